#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "citeweave/citance.hpp"
#include "citeweave/conditions.hpp"
#include "citeweave/corpus.hpp"
#include "citeweave/graph.hpp"
#include "citeweave/stats.hpp"

namespace citeweave::workbench {

// Everything that decides the numbers of an evaluation run.
struct EvaluationConfig {
  graph::UniverseMode universe = graph::UniverseMode::kText;
  graph::ClusteringVariant clustering = graph::ClusteringVariant::kMeanLocal;
  stats::HolmFamily family = stats::HolmFamily::kPerMetric;
  // Fewer papers than this and the statistical report is suppressed.
  std::size_t min_papers_for_stats = 2;

  bool operator==(const EvaluationConfig&) const = default;
};

nlohmann::ordered_json to_json(const EvaluationConfig& config);
// Missing keys keep their defaults.
EvaluationConfig config_from_json(const nlohmann::json& j);

// The condition texts of one paper. The bundle is optional: without it every
// bracketed id in the text counts as known.
struct PaperTexts {
  std::string paper;
  std::optional<corpus::PaperBundle> bundle;
  std::map<Condition, std::string> texts;
};

struct ConditionResult {
  citance::ParsedSection parsed;
  graph::CitationGraph graph;
  graph::GraphMetrics metrics;
  // Reported next to the configured clustering variant.
  double mean_local_clustering = 0.0;
  double global_clustering = 0.0;
};

struct EvaluationRun {
  std::string run_id;
  std::string timestamp;
  EvaluationConfig config;
  std::map<std::string, std::map<Condition, ConditionResult>> results;
  std::optional<stats::StatReport> report;
  std::string stats_note;  // why the report is absent

  stats::MetricTable metric_table() const;
};

ConditionResult evaluate_text(std::string_view text, const std::optional<corpus::PaperBundle>& bundle,
                              const EvaluationConfig& config,
                              const citance::Segmenter& segmenter = citance::Segmenter::standard());

// Throws stats::MissingCondition if a paper lacks one of the three texts.
EvaluationRun evaluate(const std::vector<PaperTexts>& papers, const EvaluationConfig& config,
                       const citance::Segmenter& segmenter = citance::Segmenter::standard());

// <dir>/<paper>/{human,assisted,generated}.txt plus an optional bundle.json,
// papers in directory-name order.
std::vector<PaperTexts> load_corpus_dir(const std::filesystem::path& dir);

// "paper,condition,nodes,edges,avg_degree,density,clustering"
std::string metrics_csv(const EvaluationRun& run);
stats::MetricTable parse_metrics_csv(std::string_view csv);

nlohmann::ordered_json to_json(const EvaluationRun& run);
// paper -> condition -> {"dot", "edges_csv"}; one palette for all conditions.
nlohmann::ordered_json figures_json(const EvaluationRun& run);
std::string summary_text(const EvaluationRun& run);

// metrics.csv, report.json, summary.txt, run.json and figures/<paper>/<condition>.{dot,csv}.
void write_evaluation(const EvaluationRun& run, const std::filesystem::path& out_dir);

// Fresh id and UTC timestamp for a run.
void stamp(EvaluationRun& run);

}  // namespace citeweave::workbench
