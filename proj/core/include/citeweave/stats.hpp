#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citeweave/conditions.hpp"
#include "citeweave/error.hpp"
#include "citeweave/graph.hpp"

namespace citeweave::stats {

struct Sample {
  std::string label;
  std::vector<double> values;
};

enum class UTestMethod { kExact, kNormalApprox };

std::string_view to_string(UTestMethod m);

struct UTestResult {
  double u = 0.0;        // U of the first sample, from midranks
  double u_other = 0.0;  // n1 * n2 - u
  double p_two_sided = 1.0;
  UTestMethod method = UTestMethod::kExact;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  // All n1 + n2 values were equal; p is reported as 1.
  bool degenerate = false;
};

class InvalidSample : public Error {
 public:
  using Error::Error;
};

class EmptyFamily : public Error {
 public:
  using Error::Error;
};

// Largest per-sample size for which the exact null distribution is used
// (tie-free data only).
inline constexpr std::size_t kExactLimit = 12;

// Two-sided Mann-Whitney U test. Exact when both samples have at most
// kExactLimit values and there are no ties; otherwise the normal
// approximation with tie and continuity corrections.
UTestResult mann_whitney(const Sample& a, const Sample& b);

// Number of ways each U in [0, n1*n2] arises among the C(n1+n2, n1)
// equally likely rank assignments.
std::vector<double> exact_u_distribution(std::size_t n1, std::size_t n2);

// Two-sided exact p for an integral U: 2 * min(P(U <= u), P(U >= u)), capped at 1.
double exact_p_two_sided(std::size_t n1, std::size_t n2, double u);

// Holm step-down adjustment, returned in input order.
std::vector<double> holm_bonferroni(std::span<const double> p_values);

enum class HolmFamily { kPerMetric, kGlobal };

std::string_view to_string(HolmFamily f);
HolmFamily parse_family(std::string_view s);

// Metric values for each (paper, condition).
using MetricTable = std::map<std::string, std::map<Condition, graph::GraphMetrics>>;

double metric_value(const graph::GraphMetrics& m, Metric metric);

class MissingCondition : public Error {
 public:
  MissingCondition(std::string paper, Condition condition);
  const std::string& paper() const noexcept { return paper_; }
  Condition condition() const noexcept { return condition_; }

 private:
  std::string paper_;
  Condition condition_;
};

struct PairResult {
  Condition first = Condition::kHuman;
  Condition second = Condition::kAssisted;
  UTestResult test;
  double p_adjusted = 1.0;
};

struct MetricReport {
  Metric metric = Metric::kEdges;
  std::map<Condition, double> means;
  std::vector<PairResult> pairs;  // (human, assisted), (human, generated), (assisted, generated)
};

struct StatReport {
  HolmFamily family = HolmFamily::kPerMetric;
  std::size_t num_papers = 0;
  std::vector<MetricReport> metrics;  // kAllMetrics order

  const MetricReport& metric(Metric m) const;
  const PairResult& pair(Metric m, Condition first, Condition second) const;
};

inline constexpr std::array<std::pair<Condition, Condition>, 3> kConditionPairs = {{
    {Condition::kHuman, Condition::kAssisted},
    {Condition::kHuman, Condition::kGenerated},
    {Condition::kAssisted, Condition::kGenerated},
}};

// Twelve U tests (3 condition pairs x 4 metrics) with Holm adjustment over
// the chosen family. Throws MissingCondition if any paper lacks a condition.
StatReport compare_conditions(const MetricTable& table, HolmFamily family = HolmFamily::kPerMetric);

// metric -> "human_vs_generated" -> {u, p, p_adjusted, method, means}
nlohmann::ordered_json to_json(const StatReport& report);

// Plain-text table: one row per metric with condition means and "U (p)"
// cells for each pair, p being the adjusted value.
std::string format_summary_table(const StatReport& report);

}  // namespace citeweave::stats
