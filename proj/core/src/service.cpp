#include "citeweave/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <mutex>
#include <regex>
#include <set>

#include "citeweave/corpus_io.hpp"
#include "citeweave/fetch.hpp"
#include "citeweave/grouping.hpp"
#include "citeweave/project_store.hpp"
#include "citeweave/stats.hpp"

namespace citeweave::workbench {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class LockedBackend final : public llm::LlmBackend {
 public:
  LockedBackend(llm::LlmBackend& inner, std::mutex& mutex) : inner_(inner), mutex_(mutex) {}
  std::string send(const std::string& prompt, const llm::DecodingConfig& decoding) override {
    std::lock_guard guard(mutex_);
    return inner_.send(prompt, decoding);
  }
  llm::BackendIdentity identity() const override { return inner_.identity(); }

 private:
  llm::LlmBackend& inner_;
  std::mutex& mutex_;
};

struct HttpError {
  int status;
  std::string error;
  std::string message;
  ordered_json detail = ordered_json::object();
};

ApiResponse json_response(int status, const ordered_json& body) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump(2) + "\n";
  r.headers["Content-Type"] = "application/json";
  return r;
}

ApiResponse error_response(const HttpError& e) {
  ordered_json body;
  body["error"] = e.error;
  body["message"] = e.message;
  body["detail"] = e.detail;
  return json_response(e.status, body);
}

json parse_body(const ApiRequest& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw HttpError{400, "MalformedJson", e.what()};
  }
}

int parse_version_tag(const ApiRequest& req) {
  auto it = req.headers.find("if-match");
  if (it == req.headers.end()) throw HttpError{428, "VersionRequired", "send If-Match with the current version"};
  std::string tag = it->second;
  tag.erase(std::remove(tag.begin(), tag.end(), '"'), tag.end());
  try {
    std::size_t used = 0;
    const int v = std::stoi(tag, &used);
    if (used == tag.size()) return v;
  } catch (const std::exception&) {
  }
  throw HttpError{400, "BadVersion", "If-Match must carry an integer version"};
}

ordered_json ids_json(const std::set<int>& ids) {
  ordered_json a = ordered_json::array();
  for (int id : ids) a.push_back(id);
  return a;
}

ordered_json project_json(const Project& p) {
  ordered_json j;
  j["project_id"] = p.project_id;
  j["paper_id"] = p.bundle.paper_id;
  j["title"] = p.bundle.title;
  j["citation_count"] = p.bundle.citations.size();
  j["groupings_version"] = p.groupings_version;
  j["groupings_edited"] = p.groupings_edited;
  j["draft_version"] = p.draft_version();
  ordered_json conditions = ordered_json::array();
  for (const auto& [c, text] : p.condition_texts) conditions.push_back(std::string(to_string(c)));
  j["conditions"] = conditions;
  return j;
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceOptions o) : options(std::move(o)), store(options.store_root) {}

  ServiceOptions options;
  ProjectStore store;
  std::mutex backend_mutex;
  std::mutex flight_mutex;
  std::set<std::string> in_flight;
  httplib::Server server;

  // Held while a generation pipeline runs for a project.
  class FlightGuard {
   public:
    FlightGuard(Impl& impl, const std::string& id) : impl_(impl), id_(id) {
      std::lock_guard guard(impl_.flight_mutex);
      if (!impl_.in_flight.insert(id_).second) {
        throw HttpError{409, "PipelineInFlight", "a generation pipeline is already running for '" + id_ + "'"};
      }
    }
    ~FlightGuard() {
      std::lock_guard guard(impl_.flight_mutex);
      impl_.in_flight.erase(id_);
    }

   private:
    Impl& impl_;
    std::string id_;
  };

  llm::LlmBackend& backend() {
    if (!options.backend) throw HttpError{503, "NoBackend", "the service was started without a language model"};
    return *options.backend;
  }

  Project project(const std::string& id) {
    try {
      return store.get(id);
    } catch (const ProjectNotFound& e) {
      throw HttpError{404, "NotFound", e.what()};
    }
  }

  ApiResponse create_project(const ApiRequest& req) {
    const json body = parse_body(req);
    corpus::PaperBundle bundle;
    if (body.contains("bundle")) {
      try {
        bundle = corpus::bundle_from_json(body.at("bundle"));
      } catch (const corpus::SchemaViolation& e) {
        HttpError err{422, "SchemaViolation", e.what()};
        err.detail["path"] = e.path();
        throw err;
      }
    } else if (body.contains("paper_id") && body["paper_id"].is_string()) {
      if (!options.ingest) throw HttpError{503, "NoIngest", "paper lookup is not configured"};
      try {
        bundle = options.ingest(body["paper_id"].get<std::string>());
      } catch (const corpus::NotFound& e) {
        throw HttpError{404, "NotFound", e.what()};
      } catch (const corpus::RateLimited& e) {
        throw HttpError{503, "RateLimited", e.what()};
      } catch (const corpus::MissingSection& e) {
        throw HttpError{422, "MissingSection", e.what()};
      } catch (const corpus::FetchError& e) {
        throw HttpError{502, "FetchError", e.what()};
      }
    } else {
      throw HttpError{400, "BadRequest", "body needs \"bundle\" or \"paper_id\""};
    }
    std::string id;
    try {
      id = store.create(bundle);
    } catch (const corpus::InvalidBundle& e) {
      throw HttpError{422, "InvalidBundle", e.what()};
    }
    ordered_json out = project_json(store.get(id));
    ApiResponse r = json_response(201, out);
    r.headers["Location"] = "/projects/" + id;
    return r;
  }

  ApiResponse groupings_body(const Project& p, int status = 200) {
    ordered_json j;
    j["version"] = p.groupings_version;
    j["edited"] = p.groupings_edited;
    j["groupings"] = p.groupings ? grouping::to_json(*p.groupings) : ordered_json(nullptr);
    ApiResponse r = json_response(status, j);
    r.headers["ETag"] = "\"" + std::to_string(p.groupings_version) + "\"";
    return r;
  }

  ApiResponse generate_groupings(const std::string& id) {
    Project p = project(id);
    FlightGuard flight(*this, id);
    LockedBackend locked(backend(), backend_mutex);
    grouping::GroupingRun run;
    try {
      run = grouping::run_grouping(corpus::redact(p.bundle), locked, options.policy);
    } catch (const grouping::PipelineFailed& e) {
      HttpError err{502, "PipelineFailed", e.what()};
      err.detail["transcript"] = grouping::to_json(e.transcript());
      throw err;
    } catch (const PreconditionError& e) {
      throw HttpError{422, "Precondition", e.what()};
    }
    put(id, run.groups, p.groupings_version, false);
    p = project(id);
    ApiResponse r = groupings_body(p, 201);
    json body = json::parse(r.body);
    body["transcript"] = grouping::to_json(run.transcript);
    json warnings = json::array();
    for (const auto& w : run.span_warnings) {
      warnings.push_back({{"group", w.group_index}, {"citation_id", w.citation_id}, {"span", w.span}});
    }
    body["span_warnings"] = warnings;
    r.body = body.dump(2) + "\n";
    return r;
  }

  int put(const std::string& id, const grouping::GroupingSet& groups, int expected, bool human_edit) {
    try {
      return store.put_groupings(id, groups, expected, human_edit);
    } catch (const StorageConflict& e) {
      HttpError err{409, "StorageConflict", e.what()};
      err.detail["current_version"] = e.current_version();
      throw err;
    } catch (const grouping::CoverageGap& e) {
      HttpError err{422, "CoverageGap", e.what()};
      err.detail["missing_ids"] = ids_json(e.ids());
      throw err;
    } catch (const grouping::UnknownCitation& e) {
      HttpError err{422, "UnknownCitation", e.what()};
      err.detail["unknown_ids"] = ids_json(e.ids());
      throw err;
    }
  }

  ApiResponse replace_groupings(const std::string& id, const ApiRequest& req) {
    const Project p = project(id);
    const int expected = parse_version_tag(req);
    json body = parse_body(req);
    if (body.contains("groupings")) body = body["groupings"];
    grouping::GroupingSet set;
    try {
      set.groups = grouping::parse_groups(body, grouping::Stage::kEdited);
    } catch (const grouping::SchemaError& e) {
      HttpError err{422, "SchemaError", e.what()};
      err.detail["path"] = e.path();
      throw err;
    }
    put(id, set, expected, true);
    return groupings_body(project(id));
  }

  ApiResponse draft_body(const Project& p, int status, const ordered_json& extra = ordered_json::object()) {
    ordered_json j;
    j["version"] = p.draft_version();
    if (!p.drafts.empty()) {
      const auto& d = p.drafts.back();
      j["text"] = d.text;
      j["source"] = d.source;
      j["annex"] = d.annex;
    }
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    ApiResponse r = json_response(status, j);
    r.headers["ETag"] = "\"" + std::to_string(p.draft_version()) + "\"";
    return r;
  }

  int add_draft(const std::string& id, const std::string& text, const std::string& source, const json& annex,
                int expected) {
    try {
      return store.add_draft(id, text, source, annex, expected);
    } catch (const StorageConflict& e) {
      HttpError err{409, "StorageConflict", e.what()};
      err.detail["current_version"] = e.current_version();
      throw err;
    }
  }

  void register_condition(const std::string& id, Condition c, const std::string& text) {
    try {
      store.set_condition(id, c, text);
    } catch (const InvariantViolation& e) {
      throw HttpError{422, "InvariantViolation", e.what()};
    }
  }

  ApiResponse generate_draft(const std::string& id, const ApiRequest& req) {
    const json body = parse_body(req);
    Project p = project(id);
    if (!p.groupings) throw HttpError{422, "NoGroupings", "generate or upload groupings first"};
    Condition target = p.groupings_edited ? Condition::kAssisted : Condition::kGenerated;
    if (body.contains("register_as")) {
      auto c = body["register_as"].is_string() ? parse_condition(body["register_as"].get<std::string>())
                                               : std::nullopt;
      if (!c || *c == Condition::kHuman) {
        throw HttpError{422, "BadCondition", "register_as must be \"assisted\" or \"generated\""};
      }
      target = *c;
    }
    FlightGuard flight(*this, id);
    LockedBackend locked(backend(), backend_mutex);
    grouping::DraftText draft;
    try {
      draft = grouping::run_drafting(corpus::redact(p.bundle), *p.groupings, locked, options.policy);
    } catch (const grouping::PipelineFailed& e) {
      HttpError err{502, "PipelineFailed", e.what()};
      err.detail["transcript"] = grouping::to_json(e.transcript());
      throw err;
    } catch (const grouping::CoverageGap& e) {
      HttpError err{422, "CoverageGap", e.what()};
      err.detail["missing_ids"] = ids_json(e.ids());
      throw err;
    }
    add_draft(id, draft.text, "generated", grouping::to_json(draft.annex), p.draft_version());
    register_condition(id, target, draft.text);
    ordered_json extra;
    extra["registered_as"] = std::string(to_string(target));
    extra["transcript"] = grouping::to_json(draft.transcript);
    return draft_body(project(id), 201, extra);
  }

  ApiResponse edit_draft(const std::string& id, const ApiRequest& req) {
    const Project p = project(id);
    const int expected = parse_version_tag(req);
    const json body = parse_body(req);
    if (!body.contains("text") || !body["text"].is_string()) throw HttpError{400, "BadRequest", "body needs \"text\""};
    const std::string text = body["text"].get<std::string>();
    json annex = json::object();
    if (p.groupings) annex = grouping::to_json(grouping::validate_draft(text, *p.groupings));
    add_draft(id, text, "edited", annex, expected);
    register_condition(id, Condition::kAssisted, text);
    ordered_json extra;
    extra["registered_as"] = "assisted";
    return draft_body(project(id), 200, extra);
  }

  ApiResponse set_condition(const std::string& id, const std::string& name, const ApiRequest& req) {
    project(id);
    const auto c = parse_condition(name);
    if (!c) throw HttpError{404, "NotFound", "unknown condition '" + name + "'"};
    const json body = parse_body(req);
    if (!body.contains("text") || !body["text"].is_string()) throw HttpError{400, "BadRequest", "body needs \"text\""};
    register_condition(id, *c, body["text"].get<std::string>());
    return json_response(200, project_json(project(id)));
  }

  ApiResponse run_evaluation(const ApiRequest& req) {
    const json body = parse_body(req);
    if (!body.contains("project_ids") || !body["project_ids"].is_array()) {
      throw HttpError{400, "BadRequest", "body needs \"project_ids\""};
    }
    const auto ids = body["project_ids"].get<std::vector<std::string>>();
    if (ids.empty() || ids.size() > options.max_projects_per_evaluation) {
      throw HttpError{422, "TooManyProjects",
                      "evaluations take 1 to " + std::to_string(options.max_projects_per_evaluation) + " projects"};
    }
    EvaluationConfig config = options.default_config;
    if (body.contains("config")) {
      try {
        config = config_from_json(body["config"]);
      } catch (const std::exception& e) {
        throw HttpError{422, "BadConfig", e.what()};
      }
    }
    std::vector<PaperTexts> papers;
    for (const auto& id : ids) {
      const Project p = project(id);
      papers.push_back(PaperTexts{id, p.bundle, p.condition_texts});
    }
    EvaluationRun run;
    try {
      run = evaluate(papers, config);
    } catch (const stats::MissingCondition& e) {
      HttpError err{422, "MissingCondition", e.what()};
      err.detail["paper"] = e.paper();
      err.detail["condition"] = std::string(to_string(e.condition()));
      throw err;
    }
    stamp(run);
    const ordered_json out = to_json(run);
    json record;
    record["run"] = out;
    record["figures"] = figures_json(run);
    record["summary"] = summary_text(run);
    store.save_evaluation(run.run_id, record);
    return json_response(201, out);
  }

  json evaluation(const std::string& run_id) {
    auto record = store.load_evaluation(run_id);
    if (!record) throw HttpError{404, "NotFound", "unknown evaluation '" + run_id + "'"};
    return *record;
  }

  ApiResponse handle(const ApiRequest& req) {
    static const std::regex kProject(R"(^/projects/([^/:]+)$)");
    static const std::regex kProjectAction(R"(^/projects/([^/:]+)/(groupings|groupings:generate|draft|draft:generate)$)");
    static const std::regex kCondition(R"(^/projects/([^/:]+)/conditions/([^/]+)$)");
    static const std::regex kEvaluation(R"(^/evaluations/([^/]+)(/figures|/summary)?$)");
    const std::string& m = req.method;
    std::smatch match;
    try {
      if (req.path == "/projects") {
        if (m == "POST") return create_project(req);
        if (m == "GET") {
          ordered_json list = ordered_json::array();
          for (const auto& id : store.list()) list.push_back(project_json(store.get(id)));
          return json_response(200, list);
        }
        throw HttpError{405, "MethodNotAllowed", m + " " + req.path};
      }
      if (std::regex_match(req.path, match, kProject)) {
        if (m != "GET") throw HttpError{405, "MethodNotAllowed", m + " " + req.path};
        return json_response(200, project_json(project(match[1])));
      }
      if (std::regex_match(req.path, match, kProjectAction)) {
        const std::string id = match[1];
        const std::string action = match[2];
        if (action == "groupings" && m == "GET") return groupings_body(project(id));
        if (action == "groupings" && m == "PUT") return replace_groupings(id, req);
        if (action == "groupings:generate" && m == "POST") return generate_groupings(id);
        if (action == "draft" && m == "GET") return draft_body(project(id), 200);
        if (action == "draft" && m == "PUT") return edit_draft(id, req);
        if (action == "draft:generate" && m == "POST") return generate_draft(id, req);
        throw HttpError{405, "MethodNotAllowed", m + " " + req.path};
      }
      if (std::regex_match(req.path, match, kCondition)) {
        if (m != "POST") throw HttpError{405, "MethodNotAllowed", m + " " + req.path};
        return set_condition(match[1], match[2], req);
      }
      if (req.path == "/evaluations") {
        if (m != "POST") throw HttpError{405, "MethodNotAllowed", m + " " + req.path};
        return run_evaluation(req);
      }
      if (std::regex_match(req.path, match, kEvaluation)) {
        if (m != "GET") throw HttpError{405, "MethodNotAllowed", m + " " + req.path};
        const json record = evaluation(match[1]);
        if (match[2] == "/figures") return json_response(200, record.at("figures"));
        if (match[2] == "/summary") {
          ApiResponse r;
          r.body = record.at("summary").get<std::string>();
          r.headers["Content-Type"] = "text/plain; charset=utf-8";
          return r;
        }
        return json_response(200, record.at("run"));
      }
      throw HttpError{404, "NotFound", "no route for " + req.path};
    } catch (const HttpError& e) {
      return error_response(e);
    } catch (const std::exception& e) {
      return error_response(HttpError{500, "Internal", e.what()});
    }
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  auto adapt = [this](const httplib::Request& in, httplib::Response& out) {
    ApiRequest req;
    req.method = in.method;
    req.path = in.path;
    req.body = in.body;
    for (const auto& [name, value] : in.headers) {
      std::string lower = name;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
      req.headers[lower] = value;
    }
    const ApiResponse res = impl_->handle(req);
    out.status = res.status;
    std::string type = "application/json";
    for (const auto& [name, value] : res.headers) {
      if (name == "Content-Type") {
        type = value;
      } else {
        out.set_header(name, value);
      }
    }
    out.set_content(res.body, type);
  };
  const std::string any = R"(/.*)";
  impl_->server.Get(any, adapt);
  impl_->server.Post(any, adapt);
  impl_->server.Put(any, adapt);
  impl_->server.Delete(any, adapt);
}

Service::~Service() { stop(); }

ApiResponse Service::handle(const ApiRequest& request) { return impl_->handle(request); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) return -1;
  return port;
}

void Service::serve() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace citeweave::workbench
