#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citeweave/conditions.hpp"
#include "citeweave/corpus.hpp"
#include "citeweave/error.hpp"
#include "citeweave/grouping.hpp"

namespace citeweave::workbench {

struct DraftVersion {
  int version = 0;
  std::string text;
  std::string source;  // "generated" or "edited"
  nlohmann::json annex;

  bool operator==(const DraftVersion&) const = default;
};

struct Project {
  std::string project_id;
  corpus::PaperBundle bundle;
  std::optional<grouping::GroupingSet> groupings;
  // Equals the number of stored grouping snapshots; 0 before the first one.
  int groupings_version = 0;
  // True once a person replaced the generated groupings.
  bool groupings_edited = false;
  std::vector<DraftVersion> drafts;
  std::map<Condition, std::string> condition_texts;

  int draft_version() const { return static_cast<int>(drafts.size()); }
};

class ProjectNotFound : public Error {
 public:
  explicit ProjectNotFound(const std::string& id) : Error("unknown project '" + id + "'") {}
};

// A write carried a stale version tag.
class StorageConflict : public Error {
 public:
  StorageConflict(const std::string& what, int current_version);
  int current_version() const noexcept { return current_; }

 private:
  int current_;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Projects as directories of JSON documents:
//   <root>/projects/<id>/project.json
//   <root>/projects/<id>/groupings/000001.json, 000002.json, ...
//   <root>/evaluations/<run_id>.json
// Every file is replaced atomically; grouping snapshots are never rewritten.
class ProjectStore {
 public:
  explicit ProjectStore(std::filesystem::path root);

  // Returns the new project id, derived from the bundle's paper id. The
  // "human" condition is registered from the bundle's related work.
  std::string create(const corpus::PaperBundle& bundle);
  Project get(const std::string& id) const;
  std::vector<std::string> list() const;
  bool exists(const std::string& id) const;

  // Stores a new snapshot if `expected_version` matches; returns the new
  // version. Throws CoverageGap / UnknownCitation for invalid groupings.
  int put_groupings(const std::string& id, const grouping::GroupingSet& groups, int expected_version,
                    bool human_edit);
  grouping::GroupingSet groupings_snapshot(const std::string& id, int version) const;
  std::size_t groupings_history_size(const std::string& id) const;

  int add_draft(const std::string& id, const std::string& text, const std::string& source,
                const nlohmann::json& annex, int expected_version);

  // The human text must equal the bundle's related work when that exists.
  void set_condition(const std::string& id, Condition condition, const std::string& text);

  void save_evaluation(const std::string& run_id, const nlohmann::json& run);
  std::optional<nlohmann::json> load_evaluation(const std::string& run_id) const;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path project_dir(const std::string& id) const;
  std::mutex& lock_for(const std::string& id);
  Project read(const std::string& id) const;
  void write(const Project& project);

  std::filesystem::path root_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace citeweave::workbench
