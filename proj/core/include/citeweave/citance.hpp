#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace citeweave::citance {

// One sentence and the distinct citation ids it mentions.
struct Citance {
  std::size_t index = 0;
  std::string text;
  std::set<int> citation_ids;

  bool operator==(const Citance&) const = default;
};

struct ParsedSection {
  std::vector<Citance> citances;
  std::set<int> unknown_ids;

  bool operator==(const ParsedSection&) const = default;
};

// Rule-based sentence splitter. A '.', '!' or '?' (plus closing quotes or
// brackets) followed by whitespace ends a sentence unless the next word
// starts lowercase or the token is a listed abbreviation. Blank lines always
// end a sentence.
class Segmenter {
 public:
  explicit Segmenter(std::set<std::string> abbreviations);

  // The built-in list; identical to data/abbreviations.txt.
  static const Segmenter& standard();
  // One lowercase token per line, e.g. "e.g." or "al.". Blank lines and
  // lines starting with '#' are skipped.
  static Segmenter from_file(const std::filesystem::path& path);

  std::vector<std::string> split(std::string_view text) const;
  const std::set<std::string>& abbreviations() const noexcept { return abbreviations_; }

 private:
  bool is_abbreviation(std::string_view text, std::size_t dot) const;

  std::set<std::string> abbreviations_;
};

const std::set<std::string>& default_abbreviations();

std::vector<std::string> segment_sentences(std::string_view text);

// Every distinct n written as "[n]". Lists and ranges inside one bracket
// ("[3, 4]", "[1-3]") contribute their endpoints only; malformed brackets
// are ignored.
std::set<int> extract_citations(std::string_view sentence);

// Ids outside `known_ids` go to unknown_ids and are dropped from the
// citances. Without `known_ids` every id is kept.
ParsedSection parse_section(std::string_view text, const std::optional<std::set<int>>& known_ids = std::nullopt,
                            const Segmenter& segmenter = Segmenter::standard());

nlohmann::json to_json(const std::vector<Citance>& citances);
std::vector<Citance> citances_from_json(const nlohmann::json& j);

}  // namespace citeweave::citance
