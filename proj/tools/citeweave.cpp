// citeweave: command-line front end to the core library.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "citeweave/citance.hpp"
#include "citeweave/corpus_io.hpp"
#include "citeweave/evaluation.hpp"
#include "citeweave/fetch.hpp"
#include "citeweave/graph.hpp"
#include "citeweave/pipeline.hpp"
#include "citeweave/service.hpp"
#include "citeweave/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace citeweave;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct BackendOptions {
  std::string kind = "replay";
  std::string replay_file;
  std::string record_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", kind, "live or replay")->check(CLI::IsMember({"live", "replay"}));
    cmd->add_option("--replay", replay_file, "recorded replies for the replay backend");
    cmd->add_option("--record", record_file, "with --backend live, save every exchange here");
  }

  std::shared_ptr<llm::LlmBackend> make() const {
    if (kind == "replay") {
      if (replay_file.empty()) throw std::runtime_error("--backend replay needs --replay FILE");
      return std::make_shared<llm::ReplayBackend>(llm::ReplayBackend::from_file(replay_file));
    }
    return std::make_shared<llm::ChatCompletionBackend>(llm::ChatCompletionConfig::from_env());
  }
};

// Runs `body` with the configured backend, saving a recording afterwards if asked.
template <typename F>
void with_backend(const BackendOptions& opts, F&& body) {
  auto backend = opts.make();
  if (opts.record_file.empty()) {
    body(*backend);
    return;
  }
  llm::RecordingBackend recorder(*backend);
  try {
    body(recorder);
  } catch (...) {
    recorder.recorded().save(opts.record_file);
    throw;
  }
  recorder.recorded().save(opts.record_file);
}

corpus::PaperBundle fetch_bundle(const std::string& paper_id, std::vector<corpus::FetchWarning>* warnings) {
  const auto config = corpus::ApiConfig::from_env();
  auto transport = corpus::make_http_transport(config);
  corpus::PaperFetcher fetcher(*transport, config);
  auto result = fetcher.fetch(paper_id);
  if (warnings) *warnings = result.warnings;
  return result.bundle;
}

workbench::EvaluationConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return workbench::config_from_json(json::parse(slurp(path)));
}

workbench::Service* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citeweave: citation graph analysis of related-work sections"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_id, ingest_out = ".";
  auto* ingest = app.add_subcommand("ingest", "fetch a paper and its cited works as a bundle");
  ingest->add_option("paper_id", ingest_id)->required();
  ingest->add_option("--out", ingest_out, "directory for the bundle file");

  // redact
  std::string redact_in, redact_out;
  auto* redact = app.add_subcommand("redact", "strip the related-work section from a bundle");
  redact->add_option("bundle", redact_in)->required()->check(CLI::ExistingFile);
  redact->add_option("--out", redact_out);

  // parse
  std::string parse_in, parse_bundle, parse_out, parse_abbrev;
  auto* parse = app.add_subcommand("parse", "split a related-work text into citances");
  parse->add_option("text", parse_in)->required()->check(CLI::ExistingFile);
  parse->add_option("--citations", parse_bundle, "bundle or WIP whose citation ids are known")
      ->check(CLI::ExistingFile);
  parse->add_option("--abbrev", parse_abbrev, "abbreviation list, one per line")->check(CLI::ExistingFile);
  parse->add_option("--out", parse_out);

  // graph
  std::string graph_in, graph_universe = "text", graph_bundle, graph_dot, graph_csv, graph_clustering = "mean_local";
  auto* graph_cmd = app.add_subcommand("graph", "build the concurrence graph and print its metrics");
  graph_cmd->add_option("citances", graph_in)->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--universe", graph_universe)->check(CLI::IsMember({"text", "bundle"}));
  graph_cmd->add_option("--clustering", graph_clustering)
      ->check(CLI::IsMember({"mean_local", "mean_local_degree2", "global"}));
  graph_cmd->add_option("--bundle", graph_bundle, "bundle for --universe bundle")->check(CLI::ExistingFile);
  graph_cmd->add_option("--dot", graph_dot, "write a Graphviz file");
  graph_cmd->add_option("--csv", graph_csv, "write the edge list");

  // stats
  std::string stats_in, stats_family = "per-metric", stats_out, stats_table;
  auto* stats_cmd = app.add_subcommand("stats", "Mann-Whitney comparisons over a metrics CSV");
  stats_cmd->add_option("metrics", stats_in)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--family", stats_family)->check(CLI::IsMember({"per-metric", "global"}));
  stats_cmd->add_option("--out", stats_out, "report JSON");
  stats_cmd->add_option("--table", stats_table, "summary table");

  // group
  std::string group_in, group_out, group_transcript;
  BackendOptions group_backend;
  auto* group = app.add_subcommand("group", "group the citations of a work in progress");
  group->add_option("wip", group_in)->required()->check(CLI::ExistingFile);
  group->add_option("--out", group_out);
  group->add_option("--transcript", group_transcript);
  group_backend.attach(group);

  // draft
  std::string draft_wip, draft_groups, draft_out, draft_annex, draft_transcript;
  BackendOptions draft_backend;
  auto* draft = app.add_subcommand("draft", "write a related-work section from groupings");
  draft->add_option("wip", draft_wip)->required()->check(CLI::ExistingFile);
  draft->add_option("groups", draft_groups)->required()->check(CLI::ExistingFile);
  draft->add_option("--out", draft_out);
  draft->add_option("--annex", draft_annex, "validation annex JSON");
  draft->add_option("--transcript", draft_transcript);
  draft_backend.attach(draft);

  // serve
  int serve_port = 8080;
  std::string serve_host = "127.0.0.1", serve_store = "./citeweave-store", serve_config;
  BackendOptions serve_backend;
  bool serve_no_backend = false;
  auto* serve = app.add_subcommand("serve", "run the workbench HTTP API");
  serve->add_option("--port", serve_port);
  serve->add_option("--host", serve_host);
  serve->add_option("--store", serve_store);
  serve->add_option("--config", serve_config, "default evaluation config")->check(CLI::ExistingFile);
  serve->add_flag("--no-backend", serve_no_backend, "disable generation endpoints");
  serve_backend.attach(serve);

  // evaluate
  std::string eval_corpus, eval_config, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "metrics and statistics for a corpus directory");
  evaluate->add_option("--corpus", eval_corpus)->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--config", eval_config)->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::vector<corpus::FetchWarning> warnings;
      const auto bundle = fetch_bundle(ingest_id, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: citation " << w.citation_id << ": " << w.message << "\n";
      corpus::CorpusStore store(ingest_out);
      std::cout << store.store(bundle).string() << "\n";
    } else if (*redact) {
      emit(redact_out, corpus::dump_wip(corpus::redact(corpus::load_bundle(redact_in))));
    } else if (*parse) {
      std::optional<std::set<int>> known;
      if (!parse_bundle.empty()) {
        const json j = json::parse(slurp(parse_bundle));
        known = corpus::citation_ids(corpus::citations_from_json(j.at("citations"), "$.citations"));
      }
      const auto segmenter =
          parse_abbrev.empty() ? citance::Segmenter::standard() : citance::Segmenter::from_file(parse_abbrev);
      const auto parsed = citance::parse_section(slurp(parse_in), known, segmenter);
      for (int id : parsed.unknown_ids) std::cerr << "warning: unknown citation id " << id << "\n";
      emit(parse_out, citance::to_json(parsed.citances).dump(2) + "\n");
    } else if (*graph_cmd) {
      const auto citances = citance::citances_from_json(json::parse(slurp(graph_in)));
      std::set<graph::NodeId> universe;
      if (graph::parse_universe(graph_universe) == graph::UniverseMode::kBundle) {
        if (graph_bundle.empty()) throw std::runtime_error("--universe bundle needs --bundle FILE");
        const json j = json::parse(slurp(graph_bundle));
        universe = corpus::citation_ids(corpus::citations_from_json(j.at("citations"), "$.citations"));
      } else {
        universe = graph::text_universe(citances);
      }
      const auto g = graph::build_graph(citances, universe);
      const auto m = graph::compute_metrics(g, graph::parse_clustering(graph_clustering));
      nlohmann::ordered_json out;
      out["nodes"] = m.num_nodes;
      out["edges"] = m.num_edges;
      out["avg_degree"] = m.avg_degree;
      out["density"] = m.density;
      out["clustering"] = m.clustering;
      out["clustering_variant"] = graph_clustering;
      std::cout << out.dump(2) << "\n";
      if (!graph_dot.empty()) emit(graph_dot, graph::export_dot(g, {}, fs::path(graph_in).stem().string()));
      if (!graph_csv.empty()) emit(graph_csv, graph::export_edge_csv(g));
    } else if (*stats_cmd) {
      const auto table = workbench::parse_metrics_csv(slurp(stats_in));
      const auto report = stats::compare_conditions(table, stats::parse_family(stats_family));
      emit(stats_out, stats::to_json(report).dump(2) + "\n");
      if (!stats_table.empty()) emit(stats_table, stats::format_summary_table(report));
      if (!stats_out.empty() && stats_out != "-" && stats_table.empty()) {
        std::cout << stats::format_summary_table(report);
      }
    } else if (*group) {
      const auto wip = corpus::load_wip(group_in);
      with_backend(group_backend, [&](llm::LlmBackend& backend) {
        try {
          const auto run = grouping::run_grouping(wip, backend);
          for (const auto& w : run.span_warnings) {
            std::cerr << "warning: group " << w.group_index << ", citation " << w.citation_id
                      << ": span not found in abstract\n";
          }
          if (!group_transcript.empty()) emit(group_transcript, grouping::to_json(run.transcript).dump(2) + "\n");
          emit(group_out, grouping::dump(run.groups) + "\n");
        } catch (const grouping::PipelineFailed& e) {
          if (!group_transcript.empty()) emit(group_transcript, grouping::to_json(e.transcript()).dump(2) + "\n");
          throw;
        }
      });
    } else if (*draft) {
      const auto wip = corpus::load_wip(draft_wip);
      const grouping::GroupingSet groups{
          grouping::parse_groups(json::parse(slurp(draft_groups)), grouping::Stage::kEdited),
          corpus::citation_ids(wip.citations)};
      with_backend(draft_backend, [&](llm::LlmBackend& backend) {
        const auto text = grouping::run_drafting(wip, groups, backend);
        for (const auto& w : text.annex.warnings) std::cerr << "warning: " << w << "\n";
        if (!draft_annex.empty()) emit(draft_annex, grouping::to_json(text.annex).dump(2) + "\n");
        if (!draft_transcript.empty()) emit(draft_transcript, grouping::to_json(text.transcript).dump(2) + "\n");
        emit(draft_out, text.text.ends_with('\n') ? text.text : text.text + "\n");
      });
    } else if (*serve) {
      workbench::ServiceOptions options;
      options.store_root = serve_store;
      options.default_config = load_config(serve_config);
      if (!serve_no_backend) options.backend = serve_backend.make();
      options.ingest = [](const std::string& id) { return fetch_bundle(id, nullptr); };
      workbench::Service service(std::move(options));
      const int port = service.bind(serve_host, serve_port);
      if (port < 0) throw std::runtime_error("cannot bind " + serve_host + ":" + std::to_string(serve_port));
      g_service = &service;
      std::signal(SIGINT, [](int) { if (g_service) g_service->stop(); });
      std::signal(SIGTERM, [](int) { if (g_service) g_service->stop(); });
      std::cout << "listening on http://" << serve_host << ":" << port << std::endl;
      service.serve();
      g_service = nullptr;
    } else if (*evaluate) {
      const auto config = load_config(eval_config);
      auto run = workbench::evaluate(workbench::load_corpus_dir(eval_corpus), config);
      workbench::stamp(run);
      workbench::write_evaluation(run, eval_out);
      std::cout << workbench::summary_text(run);
    }
  } catch (const std::exception& e) {
    std::cerr << "citeweave: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
