#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "citeweave/error.hpp"

namespace citeweave::corpus {

// One work cited in a related-work section. `id` is the bracketed numeral
// used for it in the text.
struct CitationEntry {
  int id = 0;
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;
  int year = 0;
  std::string url;

  bool operator==(const CitationEntry&) const = default;
};

// A finished paper: its framing sections, the related-work section as the
// authors wrote it (absent when withheld), and the works cited there.
struct PaperBundle {
  std::string paper_id;
  std::string title;
  std::string abstract;
  std::string introduction;
  std::optional<std::string> related_work;
  std::string conclusion;
  std::vector<CitationEntry> citations;

  bool operator==(const PaperBundle&) const = default;
};

// A paper as it looks before its related-work section is written.
struct WorkInProgress {
  std::string paper_id;
  std::string title;
  std::string abstract;
  std::string introduction;
  std::string conclusion;
  std::vector<CitationEntry> citations;

  bool operator==(const WorkInProgress&) const = default;

  const CitationEntry* find_citation(int id) const;
};

class InvalidBundle : public Error {
 public:
  using Error::Error;
};

// Throws InvalidBundle on a non-positive or duplicated id or an empty title.
void validate_citations(const std::vector<CitationEntry>& citations);

std::set<int> citation_ids(const std::vector<CitationEntry>& citations);

WorkInProgress redact(const PaperBundle& bundle);

}  // namespace citeweave::corpus
