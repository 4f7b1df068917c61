#include <gtest/gtest.h>

#include <regex>

#include "citeweave/corpus_io.hpp"
#include "citeweave/evaluation.hpp"
#include "fixtures.hpp"

using namespace citeweave;
using workbench::EvaluationConfig;
using workbench::PaperTexts;

namespace {

PaperTexts paper(const std::string& id, int shift) {
  PaperTexts p;
  p.paper = id;
  const std::string a = std::to_string(1 + shift), b = std::to_string(2 + shift), c = std::to_string(3 + shift);
  p.texts[Condition::kHuman] = "Early work [" + a + ", " + b + ", " + c + "] built graphs. Later [" + a + "] and [4] agreed.";
  p.texts[Condition::kAssisted] = "Some work [" + a + ", " + b + "] exists. Other work [" + c + "] too.";
  p.texts[Condition::kGenerated] = "Work [" + a + "] exists. Work [" + b + "] exists. Work [" + c + "] exists.";
  return p;
}

std::vector<PaperTexts> corpus_of(int n) {
  std::vector<PaperTexts> out;
  for (int i = 0; i < n; ++i) out.push_back(paper("paper" + std::to_string(i), i % 3));
  return out;
}

}  // namespace

TEST(Evaluation, TextToMetrics) {
  const auto r = workbench::evaluate_text("A [1, 2, 3] did. B [3], [4] did too. C [5] alone.", std::nullopt, {});
  EXPECT_EQ(r.graph.num_nodes(), 5u);
  EXPECT_EQ(r.metrics.num_edges, 4u);
  EXPECT_DOUBLE_EQ(r.metrics.avg_degree, 8.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.metrics.density, 4.0 / 10.0);
  EXPECT_DOUBLE_EQ(r.mean_local_clustering, (1.0 + 1.0 + 1.0 / 3.0) / 5.0);
  EXPECT_DOUBLE_EQ(r.global_clustering, 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.metrics.clustering, r.mean_local_clustering);
}

TEST(Evaluation, ClusteringVariantFromConfig) {
  EvaluationConfig config;
  config.clustering = graph::ClusteringVariant::kGlobal;
  const auto r = workbench::evaluate_text("A [1, 2, 3] did. B [3], [4] did too.", std::nullopt, config);
  EXPECT_DOUBLE_EQ(r.metrics.clustering, 3.0 / 5.0);
}

TEST(Evaluation, BundleUniverseAddsUncitedWorks) {
  const auto bundle = fixture::bundle(6);
  EvaluationConfig config;
  config.universe = graph::UniverseMode::kBundle;
  const auto r = workbench::evaluate_text("A [1, 2] did.", bundle, config);
  EXPECT_EQ(r.graph.num_nodes(), 6u);
  EXPECT_EQ(r.metrics.num_edges, 1u);
  const auto t = workbench::evaluate_text("A [1, 2] did.", bundle, {});
  EXPECT_EQ(t.graph.num_nodes(), 2u);
}

TEST(Evaluation, UnknownIdsAreReportedNotGraphed) {
  const auto bundle = fixture::bundle(3);
  const auto r = workbench::evaluate_text("A [1, 2, 42] did.", bundle, {});
  EXPECT_EQ(r.parsed.unknown_ids, std::set<int>{42});
  EXPECT_FALSE(r.graph.nodes().count(42));
}

TEST(Evaluation, FullRunHasTwelveTests) {
  const auto run = workbench::evaluate(corpus_of(6), {});
  ASSERT_TRUE(run.report.has_value());
  EXPECT_EQ(run.report->num_papers, 6u);
  std::size_t tests = 0;
  for (const auto& m : run.report->metrics) tests += m.pairs.size();
  EXPECT_EQ(tests, 12u);
  EXPECT_TRUE(run.stats_note.empty());
  EXPECT_EQ(run.metric_table().size(), 6u);
}

TEST(Evaluation, SinglePaperSuppressesStats) {
  const auto run = workbench::evaluate(corpus_of(1), {});
  EXPECT_FALSE(run.report.has_value());
  EXPECT_FALSE(run.stats_note.empty());
  EXPECT_EQ(run.results.size(), 1u);
  EXPECT_NE(workbench::summary_text(run).find(run.stats_note), std::string::npos);
}

TEST(Evaluation, MissingConditionThrows) {
  auto papers = corpus_of(3);
  papers[1].texts.erase(Condition::kAssisted);
  try {
    workbench::evaluate(papers, {});
    FAIL();
  } catch (const stats::MissingCondition& e) {
    EXPECT_EQ(e.paper(), "paper1");
    EXPECT_EQ(e.condition(), Condition::kAssisted);
  }
}

TEST(Evaluation, CsvIsByteStableAndParses) {
  const auto papers = corpus_of(5);
  const auto a = workbench::metrics_csv(workbench::evaluate(papers, {}));
  const auto b = workbench::metrics_csv(workbench::evaluate(papers, {}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "paper,condition,nodes,edges,avg_degree,density,clustering");

  const auto run = workbench::evaluate(papers, {});
  const auto table = workbench::parse_metrics_csv(a);
  ASSERT_EQ(table.size(), 5u);
  for (const auto& [p, row] : run.results) {
    for (const auto& [c, r] : row) {
      const auto& back = table.at(p).at(c);
      EXPECT_EQ(back.num_nodes, r.metrics.num_nodes);
      EXPECT_EQ(back.num_edges, r.metrics.num_edges);
      EXPECT_NEAR(back.avg_degree, r.metrics.avg_degree, 1e-12);
      EXPECT_NEAR(back.density, r.metrics.density, 1e-12);
      EXPECT_NEAR(back.clustering, r.metrics.clustering, 1e-12);
    }
  }
  const auto from_csv = stats::compare_conditions(table);
  EXPECT_EQ(stats::to_json(from_csv).dump(), stats::to_json(*run.report).dump());
}

TEST(Evaluation, ConfigJsonRoundTrip) {
  EvaluationConfig c;
  c.universe = graph::UniverseMode::kBundle;
  c.clustering = graph::ClusteringVariant::kMeanLocalDegreeTwo;
  c.family = stats::HolmFamily::kGlobal;
  c.min_papers_for_stats = 4;
  EXPECT_EQ(workbench::config_from_json(workbench::to_json(c)), c);
  EXPECT_EQ(workbench::config_from_json(nlohmann::json::object()), EvaluationConfig{});
}

TEST(Evaluation, WritesAllOutputs) {
  auto run = workbench::evaluate(corpus_of(3), {});
  workbench::stamp(run);
  EXPECT_FALSE(run.run_id.empty());
  EXPECT_TRUE(std::regex_match(run.timestamp, std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
  const auto dir = fixture::temp_dir("evalout");
  workbench::write_evaluation(run, dir);
  for (const char* f : {"metrics.csv", "report.json", "summary.txt", "run.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  for (const auto& [p, row] : run.results) {
    for (Condition c : kAllConditions) {
      EXPECT_TRUE(std::filesystem::exists(dir / "figures" / p / (std::string(to_string(c)) + ".dot")));
      EXPECT_TRUE(std::filesystem::exists(dir / "figures" / p / (std::string(to_string(c)) + ".csv")));
    }
  }
  EXPECT_EQ(fixture::read(dir / "metrics.csv"), workbench::metrics_csv(run));
  const auto j = nlohmann::json::parse(fixture::read(dir / "run.json"));
  EXPECT_EQ(j["run_id"], run.run_id);
  std::filesystem::remove_all(dir);
}

TEST(Evaluation, FigureColorsAgreeAcrossConditions) {
  const auto run = workbench::evaluate(corpus_of(1), {});
  const auto figs = workbench::figures_json(run);
  const std::regex node(R"re(n(\d+) \[[^\n]*fillcolor="([^"]+)")re");
  std::map<std::string, std::string> seen;
  std::size_t matched = 0;
  for (const auto& [cond, fig] : figs["paper0"].items()) {
    const std::string dot = fig["dot"].get<std::string>();
    for (auto it = std::sregex_iterator(dot.begin(), dot.end(), node); it != std::sregex_iterator(); ++it) {
      ++matched;
      auto [pos, fresh] = seen.emplace((*it)[1].str(), (*it)[2].str());
      EXPECT_EQ(pos->second, (*it)[2].str()) << "node " << (*it)[1] << " in " << cond;
    }
  }
  EXPECT_GE(matched, 10u);
}

TEST(Evaluation, CorpusDirLoadsInNameOrder) {
  const auto dir = fixture::temp_dir("corpusdir");
  for (const auto& p : {paper("b-paper", 0), paper("a-paper", 1)}) {
    for (const auto& [c, text] : p.texts) fixture::write(dir / p.paper / (std::string(to_string(c)) + ".txt"), text);
  }
  corpus::store_bundle(dir / "a-paper" / "bundle.json", fixture::bundle(5, "a-paper"));
  const auto papers = workbench::load_corpus_dir(dir);
  ASSERT_EQ(papers.size(), 2u);
  EXPECT_EQ(papers[0].paper, "a-paper");
  EXPECT_TRUE(papers[0].bundle.has_value());
  EXPECT_FALSE(papers[1].bundle.has_value());
  EXPECT_EQ(papers[1].texts.at(Condition::kGenerated), paper("b-paper", 0).texts.at(Condition::kGenerated));
  std::filesystem::remove_all(dir);
}
