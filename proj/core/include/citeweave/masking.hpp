#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace citeweave::corpus {

inline constexpr std::string_view kCitationToken = "CITATION";

// One replaced region of the input. `offset`/`length` are byte positions in
// the original text; `markers` counts the individual citations it held
// ("([11]; [12])" is one span with two markers).
struct MaskedSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string original;
  int markers = 0;

  bool operator==(const MaskedSpan&) const = default;
};

struct MaskResult {
  std::string text;
  std::vector<MaskedSpan> spans;
};

// Replaces in-text citations with kCitationToken. Recognized forms:
// bracketed numerals ("[3]", "[3, 4]", runs like "[1]-[3]"), parentheticals
// made only of citations ("([11]; [12])", "(Name, 2021)",
// "(Name et al., 2021)"), and author-year items inside a mixed
// parenthetical. Everything else is left untouched.
MaskResult mask_citations(std::string_view text);

// Inverse of mask_citations: puts the originals back.
std::string restore_citations(std::string_view masked, const std::vector<MaskedSpan>& spans);

}  // namespace citeweave::corpus
