#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "citeweave/corpus.hpp"
#include "citeweave/error.hpp"

namespace citeweave::corpus {

// A corpus file failed validation. `path()` is a JSON path such as
// "$.citations[2].id" locating the first violation.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string json_path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

nlohmann::ordered_json to_json(const CitationEntry& entry);
nlohmann::ordered_json to_json(const PaperBundle& bundle);
nlohmann::ordered_json to_json(const WorkInProgress& wip);

PaperBundle bundle_from_json(const nlohmann::json& j);
// A WIP document must not carry a "related_work" key.
WorkInProgress wip_from_json(const nlohmann::json& j);
std::vector<CitationEntry> citations_from_json(const nlohmann::json& j, const std::string& path);

std::string dump_bundle(const PaperBundle& bundle);
PaperBundle parse_bundle(std::string_view text);
std::string dump_wip(const WorkInProgress& wip);
WorkInProgress parse_wip(std::string_view text);

void store_bundle(const std::filesystem::path& file, const PaperBundle& bundle);
PaperBundle load_bundle(const std::filesystem::path& file);
void store_wip(const std::filesystem::path& file, const WorkInProgress& wip);
WorkInProgress load_wip(const std::filesystem::path& file);

// File name used for a paper id inside a corpus directory.
std::string bundle_file_name(std::string_view paper_id);

// Directory of bundle files, one per paper id. Writes for the same paper id
// are serialized and land atomically.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path dir);

  std::filesystem::path store(const PaperBundle& bundle);
  PaperBundle load(std::string_view paper_id) const;
  bool contains(std::string_view paper_id) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::mutex& lock_for(const std::string& paper_id);

  std::filesystem::path dir_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace citeweave::corpus
