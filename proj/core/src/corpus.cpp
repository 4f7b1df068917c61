#include "citeweave/corpus.hpp"

namespace citeweave::corpus {

const CitationEntry* WorkInProgress::find_citation(int id) const {
  for (const auto& c : citations) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void validate_citations(const std::vector<CitationEntry>& citations) {
  std::set<int> seen;
  for (const auto& c : citations) {
    if (c.id < 1) {
      throw InvalidBundle("citation id must be >= 1, got " + std::to_string(c.id));
    }
    if (!seen.insert(c.id).second) {
      throw InvalidBundle("duplicate citation id " + std::to_string(c.id));
    }
    if (c.title.empty()) {
      throw InvalidBundle("citation " + std::to_string(c.id) + " has an empty title");
    }
  }
}

std::set<int> citation_ids(const std::vector<CitationEntry>& citations) {
  std::set<int> ids;
  for (const auto& c : citations) ids.insert(c.id);
  return ids;
}

WorkInProgress redact(const PaperBundle& bundle) {
  return WorkInProgress{bundle.paper_id,     bundle.title,      bundle.abstract,
                        bundle.introduction, bundle.conclusion, bundle.citations};
}

}  // namespace citeweave::corpus
