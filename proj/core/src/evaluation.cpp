#include "citeweave/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <ctime>

#include "citeweave/corpus_io.hpp"
#include "fs_util.hpp"

namespace citeweave::workbench {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const EvaluationConfig& c) {
  ordered_json j;
  j["universe"] = graph::to_string(c.universe);
  j["clustering"] = graph::to_string(c.clustering);
  j["holm_family"] = stats::to_string(c.family);
  j["min_papers_for_stats"] = c.min_papers_for_stats;
  return j;
}

EvaluationConfig config_from_json(const json& j) {
  EvaluationConfig c;
  if (!j.is_object()) throw PreconditionError("evaluation config must be a JSON object");
  try {
    if (j.contains("universe")) c.universe = graph::parse_universe(j["universe"].get<std::string>());
    if (j.contains("clustering")) c.clustering = graph::parse_clustering(j["clustering"].get<std::string>());
    if (j.contains("holm_family")) c.family = stats::parse_family(j["holm_family"].get<std::string>());
    if (j.contains("min_papers_for_stats")) c.min_papers_for_stats = j["min_papers_for_stats"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("invalid evaluation config: ") + e.what());
  }
  return c;
}

ConditionResult evaluate_text(std::string_view text, const std::optional<corpus::PaperBundle>& bundle,
                              const EvaluationConfig& config, const citance::Segmenter& segmenter) {
  std::optional<std::set<int>> known;
  if (bundle) known = corpus::citation_ids(bundle->citations);
  ConditionResult r;
  r.parsed = citance::parse_section(text, known, segmenter);
  std::set<int> universe;
  if (config.universe == graph::UniverseMode::kBundle) {
    if (!bundle) throw PreconditionError("universe mode 'bundle' needs the paper's bundle");
    universe = *known;
  } else {
    universe = graph::text_universe(r.parsed.citances);
  }
  r.graph = graph::build_graph(r.parsed.citances, universe);
  r.metrics = graph::compute_metrics(r.graph, config.clustering);
  r.mean_local_clustering = graph::mean_local_clustering(r.graph);
  r.global_clustering = graph::transitivity(r.graph);
  return r;
}

stats::MetricTable EvaluationRun::metric_table() const {
  stats::MetricTable table;
  for (const auto& [paper, by_condition] : results) {
    for (const auto& [condition, result] : by_condition) table[paper][condition] = result.metrics;
  }
  return table;
}

EvaluationRun evaluate(const std::vector<PaperTexts>& papers, const EvaluationConfig& config,
                       const citance::Segmenter& segmenter) {
  EvaluationRun run;
  run.config = config;
  for (const auto& paper : papers) {
    for (Condition c : kAllConditions) {
      if (!paper.texts.count(c)) throw stats::MissingCondition(paper.paper, c);
    }
    if (run.results.count(paper.paper)) throw PreconditionError("duplicate paper '" + paper.paper + "'");
    auto& row = run.results[paper.paper];
    for (const auto& [condition, text] : paper.texts) {
      row[condition] = evaluate_text(text, paper.bundle, config, segmenter);
    }
  }
  if (run.results.size() < std::max<std::size_t>(config.min_papers_for_stats, 1)) {
    run.stats_note = "statistical report suppressed: " + std::to_string(run.results.size()) +
                     " paper(s), at least " + std::to_string(config.min_papers_for_stats) +
                     " needed per condition";
  } else {
    run.report = stats::compare_conditions(run.metric_table(), config.family);
  }
  return run;
}

std::vector<PaperTexts> load_corpus_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw PreconditionError("corpus directory not found: " + dir.string());
  std::vector<fs::path> paper_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) paper_dirs.push_back(entry.path());
  }
  std::sort(paper_dirs.begin(), paper_dirs.end());
  std::vector<PaperTexts> papers;
  for (const auto& pdir : paper_dirs) {
    PaperTexts p;
    p.paper = pdir.filename().string();
    for (Condition c : kAllConditions) {
      const fs::path file = pdir / (std::string(to_string(c)) + ".txt");
      if (!fs::exists(file)) throw stats::MissingCondition(p.paper, c);
      p.texts[c] = detail::read_file(file);
    }
    if (fs::exists(pdir / "bundle.json")) p.bundle = corpus::load_bundle(pdir / "bundle.json");
    papers.push_back(std::move(p));
  }
  return papers;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw PreconditionError("metrics CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

constexpr std::string_view kMetricsHeader = "paper,condition,nodes,edges,avg_degree,density,clustering";

}  // namespace

std::string metrics_csv(const EvaluationRun& run) {
  std::string out(kMetricsHeader);
  out += "\n";
  for (const auto& [paper, row] : run.results) {
    for (const auto& [condition, r] : row) {
      out += csv_field(paper) + "," + std::string(to_string(condition)) + "," + std::to_string(r.metrics.num_nodes) +
             "," + std::to_string(r.metrics.num_edges) + "," + format_double(r.metrics.avg_degree) + "," +
             format_double(r.metrics.density) + "," + format_double(r.metrics.clustering) + "\n";
    }
  }
  return out;
}

stats::MetricTable parse_metrics_csv(std::string_view csv) {
  stats::MetricTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto nl = csv.find('\n', pos);
    std::string_view line = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? csv.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kMetricsHeader) {
        throw PreconditionError("metrics CSV header must be '" + std::string(kMetricsHeader) + "'");
      }
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 7) throw PreconditionError("metrics CSV line " + std::to_string(line_no) + ": expected 7 fields");
    auto condition = parse_condition(f[1]);
    if (!condition) throw PreconditionError("metrics CSV line " + std::to_string(line_no) + ": unknown condition");
    graph::GraphMetrics m;
    m.num_nodes = static_cast<std::size_t>(parse_double(f[2], line_no));
    m.num_edges = static_cast<std::size_t>(parse_double(f[3], line_no));
    m.avg_degree = parse_double(f[4], line_no);
    m.density = parse_double(f[5], line_no);
    m.clustering = parse_double(f[6], line_no);
    table[f[0]][*condition] = m;
  }
  return table;
}

ordered_json to_json(const EvaluationRun& run) {
  ordered_json j;
  j["run_id"] = run.run_id;
  j["timestamp"] = run.timestamp;
  j["config"] = to_json(run.config);
  ordered_json papers = ordered_json::object();
  for (const auto& [paper, row] : run.results) {
    ordered_json p = ordered_json::object();
    for (const auto& [condition, r] : row) {
      ordered_json cell;
      cell["nodes"] = r.metrics.num_nodes;
      cell["edges"] = r.metrics.num_edges;
      cell["avg_degree"] = r.metrics.avg_degree;
      cell["density"] = r.metrics.density;
      cell["clustering"] = r.metrics.clustering;
      cell["clustering_mean_local"] = r.mean_local_clustering;
      cell["clustering_global"] = r.global_clustering;
      cell["sentences"] = r.parsed.citances.size();
      cell["unknown_ids"] = r.parsed.unknown_ids;
      p[std::string(to_string(condition))] = cell;
    }
    papers[paper] = p;
  }
  j["papers"] = papers;
  j["report"] = run.report ? to_json(*run.report) : ordered_json(nullptr);
  if (!run.stats_note.empty()) j["stats_note"] = run.stats_note;
  return j;
}

ordered_json figures_json(const EvaluationRun& run) {
  const graph::Palette palette;
  ordered_json j = ordered_json::object();
  for (const auto& [paper, row] : run.results) {
    ordered_json p = ordered_json::object();
    for (const auto& [condition, r] : row) {
      p[std::string(to_string(condition))] = {
          {"dot", graph::export_dot(r.graph, palette, paper + " " + std::string(to_string(condition)))},
          {"edges_csv", graph::export_edge_csv(r.graph)}};
    }
    j[paper] = p;
  }
  return j;
}

std::string summary_text(const EvaluationRun& run) {
  std::string out = "Citation graph evaluation (" + std::to_string(run.results.size()) + " papers; universe=" +
                    std::string(graph::to_string(run.config.universe)) +
                    ", clustering=" + std::string(graph::to_string(run.config.clustering)) + ")\n\n";
  if (run.report) {
    out += stats::format_summary_table(*run.report);
  } else {
    out += run.stats_note + "\n";
  }
  return out;
}

void write_evaluation(const EvaluationRun& run, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  detail::write_file_atomic(out_dir / "metrics.csv", metrics_csv(run));
  ordered_json report;
  report["config"] = to_json(run.config);
  report["num_papers"] = run.results.size();
  report["metrics"] = run.report ? to_json(*run.report)["metrics"] : ordered_json(nullptr);
  if (!run.stats_note.empty()) report["stats_note"] = run.stats_note;
  detail::write_file_atomic(out_dir / "report.json", report.dump(2) + "\n");
  detail::write_file_atomic(out_dir / "summary.txt", summary_text(run));
  detail::write_file_atomic(out_dir / "run.json", to_json(run).dump(2) + "\n");
  const auto figures = figures_json(run);
  for (const auto& [paper, row] : figures.items()) {
    for (const auto& [condition, fig] : row.items()) {
      const fs::path base = out_dir / "figures" / paper;
      detail::write_file_atomic(base / (condition + ".dot"), fig["dot"].get<std::string>());
      detail::write_file_atomic(base / (condition + ".csv"), fig["edges_csv"].get<std::string>());
    }
  }
}

void stamp(EvaluationRun& run) {
  static std::atomic<unsigned> counter{0};
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char iso[32], compact[32];
  std::strftime(iso, sizeof iso, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::strftime(compact, sizeof compact, "%Y%m%d%H%M%S", &tm);
  run.timestamp = iso;
  run.run_id = std::string("run-") + compact + "-" + std::to_string(counter++);
}

}  // namespace citeweave::workbench
