#include "citeweave/project_store.hpp"

#include <cstdio>

#include "citeweave/corpus_io.hpp"
#include "fs_util.hpp"

namespace citeweave::workbench {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

StorageConflict::StorageConflict(const std::string& what, int current_version)
    : Error(what + " changed concurrently; current version is " + std::to_string(current_version)),
      current_(current_version) {}

namespace {

std::string snapshot_name(int version) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d.json", version);
  return buf;
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id[0] == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

std::string slug(const std::string& paper_id) {
  std::string s;
  for (char c : paper_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    s += ok ? c : '-';
  }
  if (s.empty()) s = "project";
  if (s.size() > 64) s.resize(64);
  return s;
}

}  // namespace

ProjectStore::ProjectStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "projects");
  fs::create_directories(root_ / "evaluations");
}

fs::path ProjectStore::project_dir(const std::string& id) const {
  if (!valid_id(id)) throw ProjectNotFound(id);
  return root_ / "projects" / id;
}

std::mutex& ProjectStore::lock_for(const std::string& id) {
  std::lock_guard guard(registry_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

bool ProjectStore::exists(const std::string& id) const {
  return valid_id(id) && fs::exists(root_ / "projects" / id / "project.json");
}

std::vector<std::string> ProjectStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "projects")) {
    if (fs::exists(entry.path() / "project.json")) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Project ProjectStore::read(const std::string& id) const {
  const fs::path dir = project_dir(id);
  if (!fs::exists(dir / "project.json")) throw ProjectNotFound(id);
  const json j = json::parse(detail::read_file(dir / "project.json"));
  Project p;
  p.project_id = id;
  p.bundle = corpus::bundle_from_json(j.at("bundle"));
  p.groupings_version = j.at("groupings_version").get<int>();
  p.groupings_edited = j.value("groupings_edited", false);
  for (const auto& d : j.at("drafts")) {
    p.drafts.push_back(DraftVersion{d.at("version").get<int>(), d.at("text").get<std::string>(),
                                    d.at("source").get<std::string>(), d.value("annex", json())});
  }
  for (const auto& [name, text] : j.at("condition_texts").items()) {
    if (auto c = parse_condition(name)) p.condition_texts[*c] = text.get<std::string>();
  }
  if (p.groupings_version > 0) {
    const json g = json::parse(detail::read_file(dir / "groupings" / snapshot_name(p.groupings_version)));
    p.groupings = grouping::GroupingSet{grouping::parse_groups(g, grouping::Stage::kEdited),
                                        corpus::citation_ids(p.bundle.citations)};
  }
  return p;
}

void ProjectStore::write(const Project& p) {
  ordered_json j;
  j["project_id"] = p.project_id;
  j["bundle"] = corpus::to_json(p.bundle);
  j["groupings_version"] = p.groupings_version;
  j["groupings_edited"] = p.groupings_edited;
  j["drafts"] = ordered_json::array();
  for (const auto& d : p.drafts) {
    j["drafts"].push_back({{"version", d.version}, {"text", d.text}, {"source", d.source}, {"annex", ordered_json::parse(d.annex.dump())}});
  }
  ordered_json conditions = ordered_json::object();
  for (const auto& [c, text] : p.condition_texts) conditions[std::string(to_string(c))] = text;
  j["condition_texts"] = conditions;
  detail::write_file_atomic(project_dir(p.project_id) / "project.json", j.dump(2) + "\n");
}

std::string ProjectStore::create(const corpus::PaperBundle& bundle) {
  corpus::validate_citations(bundle.citations);
  std::lock_guard guard(registry_mutex_);
  const std::string base = slug(bundle.paper_id);
  std::string id = base;
  for (int n = 2; fs::exists(root_ / "projects" / id); ++n) id = base + "-" + std::to_string(n);
  fs::create_directories(root_ / "projects" / id / "groupings");
  Project p;
  p.project_id = id;
  p.bundle = bundle;
  if (bundle.related_work) p.condition_texts[Condition::kHuman] = *bundle.related_work;
  write(p);
  return id;
}

Project ProjectStore::get(const std::string& id) const { return read(id); }

int ProjectStore::put_groupings(const std::string& id, const grouping::GroupingSet& groups, int expected_version,
                                bool human_edit) {
  std::lock_guard guard(lock_for(id));
  Project p = read(id);
  if (expected_version != p.groupings_version) throw StorageConflict("groupings", p.groupings_version);
  grouping::GroupingSet checked = groups;
  checked.corpus_ids = corpus::citation_ids(p.bundle.citations);
  grouping::enforce_invariants(checked);
  const int version = p.groupings_version + 1;
  detail::write_file_atomic(project_dir(id) / "groupings" / snapshot_name(version), grouping::dump(checked) + "\n");
  p.groupings_version = version;
  p.groupings_edited = p.groupings_edited || human_edit;
  write(p);
  return version;
}

grouping::GroupingSet ProjectStore::groupings_snapshot(const std::string& id, int version) const {
  const fs::path file = project_dir(id) / "groupings" / snapshot_name(version);
  if (!fs::exists(file)) throw ProjectNotFound(id + " groupings v" + std::to_string(version));
  const Project p = read(id);
  return grouping::GroupingSet{grouping::parse_groups(json::parse(detail::read_file(file)), grouping::Stage::kEdited),
                               corpus::citation_ids(p.bundle.citations)};
}

std::size_t ProjectStore::groupings_history_size(const std::string& id) const {
  const fs::path dir = project_dir(id) / "groupings";
  if (!exists(id)) throw ProjectNotFound(id);
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") ++n;
  }
  return n;
}

int ProjectStore::add_draft(const std::string& id, const std::string& text, const std::string& source,
                            const json& annex, int expected_version) {
  std::lock_guard guard(lock_for(id));
  Project p = read(id);
  if (expected_version != p.draft_version()) throw StorageConflict("draft", p.draft_version());
  const int version = p.draft_version() + 1;
  p.drafts.push_back(DraftVersion{version, text, source, annex});
  write(p);
  return version;
}

void ProjectStore::set_condition(const std::string& id, Condition condition, const std::string& text) {
  std::lock_guard guard(lock_for(id));
  Project p = read(id);
  if (condition == Condition::kHuman && p.bundle.related_work && *p.bundle.related_work != text) {
    throw InvariantViolation("the human condition must equal the paper's original related work");
  }
  p.condition_texts[condition] = text;
  write(p);
}

void ProjectStore::save_evaluation(const std::string& run_id, const json& run) {
  if (!valid_id(run_id)) throw PreconditionError("invalid run id '" + run_id + "'");
  detail::write_file_atomic(root_ / "evaluations" / (run_id + ".json"), run.dump(2) + "\n");
}

std::optional<json> ProjectStore::load_evaluation(const std::string& run_id) const {
  if (!valid_id(run_id)) return std::nullopt;
  const fs::path file = root_ / "evaluations" / (run_id + ".json");
  if (!fs::exists(file)) return std::nullopt;
  return json::parse(detail::read_file(file));
}

}  // namespace citeweave::workbench
