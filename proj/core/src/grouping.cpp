#include "citeweave/grouping.hpp"

#include <cctype>

namespace citeweave::grouping {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join_ids(const std::set<int>& ids) {
  std::string s;
  for (int id : ids) s += (s.empty() ? "" : ", ") + std::to_string(id);
  return s;
}

std::optional<int> positive_int(const json& v) {
  if (v.is_number_integer()) {
    const auto n = v.get<long long>();
    if (n >= 1 && n <= 1'000'000'000) return static_cast<int>(n);
    return std::nullopt;
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.empty() || s.size() > 9) return std::nullopt;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    const int n = std::stoi(s);
    if (n >= 1) return n;
  }
  return std::nullopt;
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required key");
  if (!it->is_string()) throw SchemaError(path + "." + key, "expected string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(path + "." + key, "expected string");
  return it->get<std::string>();
}

std::string normalize_ws(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

}  // namespace

std::set<int> CitationGroup::ids() const {
  std::set<int> ids;
  for (const auto& p : cited_papers) ids.insert(p.id);
  return ids;
}

std::set<int> GroupingSet::covered_ids() const {
  std::set<int> ids;
  for (const auto& [index, g] : groups) {
    for (const auto& p : g.cited_papers) ids.insert(p.id);
  }
  return ids;
}

std::set<int> GroupingSet::uncovered_ids() const {
  const auto covered = covered_ids();
  std::set<int> missing;
  for (int id : corpus_ids) {
    if (!covered.count(id)) missing.insert(id);
  }
  return missing;
}

SchemaError::SchemaError(std::string json_path, const std::string& message)
    : Error("schema error at " + json_path + ": " + message), path_(std::move(json_path)) {}

UnknownCitation::UnknownCitation(std::set<int> ids)
    : Error("citations not in the corpus: " + join_ids(ids)), ids_(std::move(ids)) {}

CoverageGap::CoverageGap(std::set<int> ids)
    : Error("citations not placed in any group: " + join_ids(ids)), ids_(std::move(ids)) {}

ordered_json to_json(const CitationGroup& g) {
  ordered_json j;
  j["group_name"] = g.group_name;
  j["group_rationale"] = g.group_rationale;
  ordered_json papers = ordered_json::array();
  for (const auto& p : g.cited_papers) {
    ordered_json item;
    item["id"] = std::to_string(p.id);
    item["title"] = p.title;
    if (p.citation_rationale) item["citation_rationale"] = *p.citation_rationale;
    if (p.span) item["span"] = *p.span;
    papers.push_back(std::move(item));
  }
  j["cited_papers"] = std::move(papers);
  return j;
}

ordered_json to_json(int index, const CitationGroup& group) {
  ordered_json j = ordered_json::object();
  j[std::to_string(index)] = to_json(group);
  return j;
}

ordered_json to_json(const GroupingSet& set) {
  ordered_json j = ordered_json::object();
  for (const auto& [index, g] : set.groups) j[std::to_string(index)] = to_json(g);
  return j;
}

std::string dump(const GroupingSet& set) { return to_json(set).dump(2); }

std::string extract_json_object(std::string_view raw) {
  const auto open = raw.find('{');
  const auto close = raw.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw SchemaError("$", "reply contains no JSON object");
  }
  return std::string(raw.substr(open, close - open + 1));
}

std::string fold_string_line_breaks(std::string_view text) {
  std::string out;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!in_string) {
      if (c == '"') in_string = true;
      out += c;
      continue;
    }
    if (escaped) {
      escaped = false;
    } else if (c == '\\') {
      escaped = true;
    } else if (c == '"') {
      in_string = false;
    } else if (c == '\n' || c == '\r') {
      while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
      while (i + 1 < text.size() && (text[i + 1] == ' ' || text[i + 1] == '\t' || text[i + 1] == '\n' ||
                                     text[i + 1] == '\r')) {
        ++i;
      }
      out += ' ';
      continue;
    }
    out += c;
  }
  return out;
}

std::map<int, CitationGroup> parse_groups(const json& j, Stage stage) {
  if (!j.is_object()) throw SchemaError("$", "expected an object keyed by group index");
  if (j.empty()) throw SchemaError("$", "no groups");
  std::map<int, CitationGroup> groups;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string gpath = "$." + it.key();
    auto index = positive_int(json(it.key()));
    if (!index) throw SchemaError(gpath, "group keys must be positive integers");
    if (groups.count(*index)) throw SchemaError(gpath, "duplicate group index");
    const json& g = it.value();
    if (!g.is_object()) throw SchemaError(gpath, "expected object");
    CitationGroup group;
    group.group_name = require_string(g, gpath, "group_name");
    if (group.group_name.empty()) throw SchemaError(gpath + ".group_name", "must be non-empty");
    group.group_rationale = require_string(g, gpath, "group_rationale");
    auto papers = g.find("cited_papers");
    if (papers == g.end()) throw SchemaError(gpath + ".cited_papers", "missing required key");
    if (!papers->is_array()) throw SchemaError(gpath + ".cited_papers", "expected array");
    if (papers->empty()) throw SchemaError(gpath + ".cited_papers", "must be non-empty");
    for (std::size_t k = 0; k < papers->size(); ++k) {
      const std::string ppath = gpath + ".cited_papers[" + std::to_string(k) + "]";
      const json& p = (*papers)[k];
      if (!p.is_object()) throw SchemaError(ppath, "expected object");
      CitedPaperRef ref;
      auto id = p.find("id");
      if (id == p.end()) throw SchemaError(ppath + ".id", "missing required key");
      auto value = positive_int(*id);
      if (!value) throw SchemaError(ppath + ".id", "expected a positive integer id");
      ref.id = *value;
      ref.title = require_string(p, ppath, "title");
      if (stage == Stage::k1b) {
        ref.citation_rationale = require_string(p, ppath, "citation_rationale");
        ref.span = require_string(p, ppath, "span");
      } else {
        ref.citation_rationale = optional_string(p, ppath, "citation_rationale");
        ref.span = optional_string(p, ppath, "span");
      }
      group.cited_papers.push_back(std::move(ref));
    }
    groups.emplace(*index, std::move(group));
  }
  return groups;
}

void enforce_invariants(const GroupingSet& set) {
  std::set<int> unknown;
  for (int id : set.covered_ids()) {
    if (!set.corpus_ids.count(id)) unknown.insert(id);
  }
  if (!unknown.empty()) throw UnknownCitation(unknown);
  auto missing = set.uncovered_ids();
  if (!missing.empty()) throw CoverageGap(missing);
}

GroupingSet parse_grouping(std::string_view raw, const std::set<int>& corpus_ids, Stage stage) {
  json j;
  try {
    const std::string object = extract_json_object(raw);
    j = json::parse(object, nullptr, false);
    if (j.is_discarded()) j = json::parse(fold_string_line_breaks(object));
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  GroupingSet set{parse_groups(j, stage), corpus_ids};
  enforce_invariants(set);
  return set;
}

std::vector<SpanWarning> check_spans(const GroupingSet& set, const std::map<int, std::string>& abstracts) {
  std::vector<SpanWarning> warnings;
  for (const auto& [index, g] : set.groups) {
    for (const auto& p : g.cited_papers) {
      if (!p.span) continue;
      auto it = abstracts.find(p.id);
      const std::string abstract = it == abstracts.end() ? std::string() : normalize_ws(it->second);
      const std::string span = normalize_ws(*p.span);
      if (span.empty() || abstract.find(span) == std::string::npos) {
        warnings.push_back(SpanWarning{index, p.id, *p.span});
      }
    }
  }
  return warnings;
}

}  // namespace citeweave::grouping
