#include "citeweave/corpus_io.hpp"

#include <set>

#include "fs_util.hpp"

namespace citeweave::corpus {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

SchemaViolation::SchemaViolation(std::string json_path, const std::string& message)
    : Error("schema violation at " + json_path + ": " + message), path_(std::move(json_path)) {}

namespace {

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaViolation(path + "." + key, "missing required key");
  return *it;
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) throw SchemaViolation(path + "." + key, "expected string");
  return v.get<std::string>();
}

int require_int(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer()) throw SchemaViolation(path + "." + key, "expected integer");
  return v.get<int>();
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaViolation(path, "expected object");
}

struct Sections {
  std::string paper_id, title, abstract, introduction, conclusion;
};

Sections read_sections(const json& j) {
  require_object(j, "$");
  return Sections{require_string(j, "$", "paper_id"), require_string(j, "$", "title"),
                  require_string(j, "$", "abstract"), require_string(j, "$", "introduction"),
                  require_string(j, "$", "conclusion")};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation("$", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

ordered_json to_json(const CitationEntry& e) {
  return ordered_json{{"id", e.id},           {"title", e.title}, {"abstract", e.abstract},
                      {"authors", e.authors}, {"year", e.year},   {"url", e.url}};
}

namespace {
ordered_json citations_json(const std::vector<CitationEntry>& citations) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : citations) arr.push_back(to_json(c));
  return arr;
}
}  // namespace

ordered_json to_json(const PaperBundle& b) {
  ordered_json j;
  j["paper_id"] = b.paper_id;
  j["title"] = b.title;
  j["abstract"] = b.abstract;
  j["introduction"] = b.introduction;
  j["related_work"] = b.related_work ? ordered_json(*b.related_work) : ordered_json(nullptr);
  j["conclusion"] = b.conclusion;
  j["citations"] = citations_json(b.citations);
  return j;
}

ordered_json to_json(const WorkInProgress& w) {
  ordered_json j;
  j["paper_id"] = w.paper_id;
  j["title"] = w.title;
  j["abstract"] = w.abstract;
  j["introduction"] = w.introduction;
  j["conclusion"] = w.conclusion;
  j["citations"] = citations_json(w.citations);
  return j;
}

std::vector<CitationEntry> citations_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaViolation(path, "expected array");
  std::vector<CitationEntry> out;
  std::set<int> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& item = j[i];
    require_object(item, p);
    CitationEntry e;
    e.id = require_int(item, p, "id");
    if (e.id < 1) throw SchemaViolation(p + ".id", "citation id must be >= 1");
    if (!seen.insert(e.id).second) {
      throw SchemaViolation(p + ".id", "duplicate citation id " + std::to_string(e.id));
    }
    e.title = require_string(item, p, "title");
    if (e.title.empty()) throw SchemaViolation(p + ".title", "title must be non-empty");
    e.abstract = require_string(item, p, "abstract");
    const json& authors = require(item, p, "authors");
    if (!authors.is_array()) throw SchemaViolation(p + ".authors", "expected array");
    for (std::size_t k = 0; k < authors.size(); ++k) {
      if (!authors[k].is_string()) {
        throw SchemaViolation(p + ".authors[" + std::to_string(k) + "]", "expected string");
      }
      e.authors.push_back(authors[k].get<std::string>());
    }
    e.year = require_int(item, p, "year");
    e.url = require_string(item, p, "url");
    out.push_back(std::move(e));
  }
  return out;
}

PaperBundle bundle_from_json(const json& j) {
  Sections s = read_sections(j);
  PaperBundle b;
  b.paper_id = std::move(s.paper_id);
  b.title = std::move(s.title);
  b.abstract = std::move(s.abstract);
  b.introduction = std::move(s.introduction);
  b.conclusion = std::move(s.conclusion);
  const json& rw = require(j, "$", "related_work");
  if (rw.is_string()) {
    b.related_work = rw.get<std::string>();
  } else if (!rw.is_null()) {
    throw SchemaViolation("$.related_work", "expected string or null");
  }
  b.citations = citations_from_json(require(j, "$", "citations"), "$.citations");
  return b;
}

WorkInProgress wip_from_json(const json& j) {
  Sections s = read_sections(j);
  if (j.contains("related_work")) {
    throw SchemaViolation("$.related_work", "a work-in-progress must not carry a related-work section");
  }
  WorkInProgress w;
  w.paper_id = std::move(s.paper_id);
  w.title = std::move(s.title);
  w.abstract = std::move(s.abstract);
  w.introduction = std::move(s.introduction);
  w.conclusion = std::move(s.conclusion);
  w.citations = citations_from_json(require(j, "$", "citations"), "$.citations");
  return w;
}

std::string dump_bundle(const PaperBundle& bundle) { return to_json(bundle).dump(2) + "\n"; }
PaperBundle parse_bundle(std::string_view text) { return bundle_from_json(parse_json(text)); }
std::string dump_wip(const WorkInProgress& wip) { return to_json(wip).dump(2) + "\n"; }
WorkInProgress parse_wip(std::string_view text) { return wip_from_json(parse_json(text)); }

void store_bundle(const fs::path& file, const PaperBundle& bundle) {
  detail::write_file_atomic(file, dump_bundle(bundle));
}

PaperBundle load_bundle(const fs::path& file) { return parse_bundle(detail::read_file(file)); }

void store_wip(const fs::path& file, const WorkInProgress& wip) {
  detail::write_file_atomic(file, dump_wip(wip));
}

WorkInProgress load_wip(const fs::path& file) { return parse_wip(detail::read_file(file)); }

std::string bundle_file_name(std::string_view paper_id) {
  std::string name;
  for (char c : paper_id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    name += safe ? c : '_';
  }
  if (name.empty() || name[0] == '.') name.insert(name.begin(), '_');
  return name + ".json";
}

CorpusStore::CorpusStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::mutex& CorpusStore::lock_for(const std::string& paper_id) {
  std::lock_guard guard(registry_mutex_);
  auto& slot = locks_[paper_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

fs::path CorpusStore::store(const PaperBundle& bundle) {
  std::lock_guard guard(lock_for(bundle.paper_id));
  const fs::path file = dir_ / bundle_file_name(bundle.paper_id);
  store_bundle(file, bundle);
  return file;
}

PaperBundle CorpusStore::load(std::string_view paper_id) const {
  return load_bundle(dir_ / bundle_file_name(paper_id));
}

bool CorpusStore::contains(std::string_view paper_id) const {
  return fs::exists(dir_ / bundle_file_name(paper_id));
}

}  // namespace citeweave::corpus
