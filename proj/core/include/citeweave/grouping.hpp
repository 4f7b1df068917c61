#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "citeweave/error.hpp"

namespace citeweave::grouping {

struct CitedPaperRef {
  int id = 0;
  std::string title;
  // Filled in by the per-group refinement step.
  std::optional<std::string> citation_rationale;
  std::optional<std::string> span;

  bool operator==(const CitedPaperRef&) const = default;
};

struct CitationGroup {
  std::string group_name;
  std::string group_rationale;
  std::vector<CitedPaperRef> cited_papers;

  bool operator==(const CitationGroup&) const = default;
  std::set<int> ids() const;
};

// Named groups keyed by positive index, over a fixed set of corpus ids.
struct GroupingSet {
  std::map<int, CitationGroup> groups;
  std::set<int> corpus_ids;

  bool operator==(const GroupingSet&) const = default;

  std::set<int> covered_ids() const;
  std::set<int> uncovered_ids() const;
  bool covers_corpus() const { return uncovered_ids().empty(); }
};

// Which keys each cited paper must carry. kEdited accepts either shape, as
// produced by a person revising groups.
enum class Stage { k1a, k1b, kEdited };

class SchemaError : public Error {
 public:
  SchemaError(std::string json_path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class UnknownCitation : public Error {
 public:
  explicit UnknownCitation(std::set<int> ids);
  const std::set<int>& ids() const noexcept { return ids_; }

 private:
  std::set<int> ids_;
};

class CoverageGap : public Error {
 public:
  explicit CoverageGap(std::set<int> ids);
  const std::set<int>& ids() const noexcept { return ids_; }

 private:
  std::set<int> ids_;
};

// Serialized in the interchange shape: {"1": {"group_name", "group_rationale",
// "cited_papers": [{"id": "1", "title", ...}]}}. Ids are written as strings.
nlohmann::ordered_json to_json(const CitationGroup& group);
nlohmann::ordered_json to_json(int index, const CitationGroup& group);
nlohmann::ordered_json to_json(const GroupingSet& set);
std::string dump(const GroupingSet& set);

// Cuts the outermost JSON object out of a model reply, dropping code fences
// and any prose around it. Throws SchemaError at "$" if there is none.
std::string extract_json_object(std::string_view raw);

// Folds raw line breaks inside string literals (plus surrounding spaces)
// into one space. parse_grouping falls back to this when strict parsing fails.
std::string fold_string_line_breaks(std::string_view text);

// Parses and validates a reply. Every id must belong to `corpus_ids` and
// every corpus id must appear in some group.
GroupingSet parse_grouping(std::string_view raw, const std::set<int>& corpus_ids, Stage stage);

// Structural parse only: schema checks, no id or coverage checks.
std::map<int, CitationGroup> parse_groups(const nlohmann::json& j, Stage stage);

// Throws UnknownCitation or CoverageGap.
void enforce_invariants(const GroupingSet& set);

struct SpanWarning {
  int group_index = 0;
  int citation_id = 0;
  std::string span;
};

// Spans that are not a substring of the cited abstract after whitespace
// normalization.
std::vector<SpanWarning> check_spans(const GroupingSet& set, const std::map<int, std::string>& abstracts);

}  // namespace citeweave::grouping
