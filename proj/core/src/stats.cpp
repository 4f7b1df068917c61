#include "citeweave/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace citeweave::stats {

std::string_view to_string(UTestMethod m) {
  return m == UTestMethod::kExact ? "exact" : "normal-approx-tie-corrected";
}

namespace {

void check_sample(const Sample& s) {
  if (s.values.empty()) throw InvalidSample("sample '" + s.label + "' is empty");
  for (double v : s.values) {
    if (!std::isfinite(v)) throw InvalidSample("sample '" + s.label + "' has a non-finite value");
  }
}

}  // namespace

std::vector<double> exact_u_distribution(std::size_t n1, std::size_t n2) {
  // counts[i][j][u]: arrangements of i first-sample and j second-sample
  // values with statistic u. Adding the largest value to sample one raises
  // U by j; adding it to sample two leaves U unchanged.
  const std::size_t max_u = n1 * n2;
  std::vector<std::vector<std::vector<double>>> counts(
      n1 + 1, std::vector<std::vector<double>>(n2 + 1, std::vector<double>(max_u + 1, 0.0)));
  for (std::size_t i = 0; i <= n1; ++i) {
    for (std::size_t j = 0; j <= n2; ++j) {
      if (i == 0 || j == 0) {
        counts[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t u = 0; u <= i * j; ++u) {
        double c = counts[i][j - 1][u];
        if (u >= j) c += counts[i - 1][j][u - j];
        counts[i][j][u] = c;
      }
    }
  }
  return counts[n1][n2];
}

double exact_p_two_sided(std::size_t n1, std::size_t n2, double u) {
  const auto dist = exact_u_distribution(n1, n2);
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  double lower = 0.0, upper = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double kv = static_cast<double>(k);
    if (kv <= u + 1e-9) lower += dist[k];
    if (kv >= u - 1e-9) upper += dist[k];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

UTestResult mann_whitney(const Sample& a, const Sample& b) {
  check_sample(a);
  check_sample(b);
  const std::size_t n1 = a.values.size(), n2 = b.values.size(), n = n1 + n2;

  std::vector<std::pair<double, bool>> pooled;  // value, from first sample
  pooled.reserve(n);
  for (double v : a.values) pooled.emplace_back(v, true);
  for (double v : b.values) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  double rank_sum_first = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second) rank_sum_first += midrank;
    }
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  UTestResult r;
  r.n1 = n1;
  r.n2 = n2;
  const double d1 = static_cast<double>(n1), d2 = static_cast<double>(n2), dn = static_cast<double>(n);
  r.u = rank_sum_first - d1 * (d1 + 1.0) / 2.0;
  r.u_other = d1 * d2 - r.u;

  if (pooled.front().first == pooled.back().first) {
    r.degenerate = true;
    r.method = UTestMethod::kNormalApprox;
    r.p_two_sided = 1.0;
    return r;
  }

  if (!ties && n1 <= kExactLimit && n2 <= kExactLimit) {
    r.method = UTestMethod::kExact;
    r.p_two_sided = exact_p_two_sided(n1, n2, r.u);
    return r;
  }

  r.method = UTestMethod::kNormalApprox;
  const double mean = d1 * d2 / 2.0;
  const double var = d1 * d2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  const double dev = std::max(0.0, std::fabs(r.u - mean) - 0.5);
  const double z = dev / std::sqrt(var);
  r.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

std::vector<double> holm_bonferroni(std::span<const double> p) {
  if (p.empty()) throw EmptyFamily("Holm-Bonferroni needs at least one p-value");
  for (double v : p) {
    if (!(v > 0.0 && v <= 1.0)) throw PreconditionError("p-values must lie in (0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double scaled = static_cast<double>(m - rank) * p[order[rank]];
    running = std::min(1.0, std::max(running, scaled));
    adjusted[order[rank]] = running;
  }
  return adjusted;
}

std::string_view to_string(HolmFamily f) { return f == HolmFamily::kPerMetric ? "per-metric" : "global"; }

HolmFamily parse_family(std::string_view s) {
  if (s == "per-metric" || s == "per_metric") return HolmFamily::kPerMetric;
  if (s == "global") return HolmFamily::kGlobal;
  throw PreconditionError("unknown Holm family '" + std::string(s) + "' (expected per-metric|global)");
}

double metric_value(const graph::GraphMetrics& m, Metric metric) {
  switch (metric) {
    case Metric::kEdges: return static_cast<double>(m.num_edges);
    case Metric::kAvgDegree: return m.avg_degree;
    case Metric::kDensity: return m.density;
    case Metric::kClustering: return m.clustering;
  }
  return 0.0;
}

MissingCondition::MissingCondition(std::string paper, Condition condition)
    : Error("paper '" + paper + "' has no " + std::string(to_string(condition)) + " text"),
      paper_(std::move(paper)),
      condition_(condition) {}

const MetricReport& StatReport::metric(Metric m) const {
  for (const auto& r : metrics) {
    if (r.metric == m) return r;
  }
  throw Error("metric not in report: " + std::string(to_string(m)));
}

const PairResult& StatReport::pair(Metric m, Condition first, Condition second) const {
  for (const auto& p : metric(m).pairs) {
    if (p.first == first && p.second == second) return p;
  }
  throw Error("condition pair not in report");
}

StatReport compare_conditions(const MetricTable& table, HolmFamily family) {
  for (const auto& [paper, row] : table) {
    for (Condition c : kAllConditions) {
      if (!row.count(c)) throw MissingCondition(paper, c);
    }
  }
  if (table.empty()) throw PreconditionError("no papers to compare");

  StatReport report;
  report.family = family;
  report.num_papers = table.size();
  for (Metric metric : kAllMetrics) {
    std::map<Condition, Sample> samples;
    for (Condition c : kAllConditions) {
      Sample s{std::string(to_string(c)), {}};
      for (const auto& [paper, row] : table) s.values.push_back(metric_value(row.at(c), metric));
      samples[c] = std::move(s);
    }
    MetricReport mr;
    mr.metric = metric;
    for (const auto& [c, s] : samples) {
      mr.means[c] = std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(s.values.size());
    }
    for (auto [first, second] : kConditionPairs) {
      PairResult pr;
      pr.first = first;
      pr.second = second;
      pr.test = mann_whitney(samples[first], samples[second]);
      mr.pairs.push_back(pr);
    }
    report.metrics.push_back(std::move(mr));
  }

  auto adjust = [](std::vector<PairResult*> family_members) {
    std::vector<double> raw;
    for (auto* p : family_members) raw.push_back(p->test.p_two_sided);
    const auto adj = holm_bonferroni(raw);
    for (std::size_t k = 0; k < family_members.size(); ++k) family_members[k]->p_adjusted = adj[k];
  };
  if (family == HolmFamily::kPerMetric) {
    for (auto& mr : report.metrics) {
      std::vector<PairResult*> members;
      for (auto& p : mr.pairs) members.push_back(&p);
      adjust(members);
    }
  } else {
    std::vector<PairResult*> members;
    for (auto& mr : report.metrics) {
      for (auto& p : mr.pairs) members.push_back(&p);
    }
    adjust(members);
  }
  return report;
}

namespace {
std::string pair_key(Condition a, Condition b) {
  return std::string(to_string(a)) + "_vs_" + std::string(to_string(b));
}
}  // namespace

nlohmann::ordered_json to_json(const StatReport& report) {
  nlohmann::ordered_json j;
  j["family"] = to_string(report.family);
  j["num_papers"] = report.num_papers;
  nlohmann::ordered_json metrics;
  for (const auto& mr : report.metrics) {
    nlohmann::ordered_json m;
    for (const auto& pr : mr.pairs) {
      nlohmann::ordered_json cell;
      cell["u"] = pr.test.u;
      cell["u_other"] = pr.test.u_other;
      cell["p"] = pr.test.p_two_sided;
      cell["p_adjusted"] = pr.p_adjusted;
      cell["method"] = to_string(pr.test.method);
      cell["n1"] = pr.test.n1;
      cell["n2"] = pr.test.n2;
      cell["degenerate"] = pr.test.degenerate;
      cell["means"] = {{to_string(pr.first), mr.means.at(pr.first)},
                       {to_string(pr.second), mr.means.at(pr.second)}};
      m[pair_key(pr.first, pr.second)] = cell;
    }
    metrics[std::string(to_string(mr.metric))] = m;
  }
  j["metrics"] = metrics;
  return j;
}

std::string format_summary_table(const StatReport& report) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-22s %10s %10s %10s | %18s %18s %18s\n", "Statistic", "Human", "Assisted",
                "Generated", "Human vs Assisted", "Human vs Generated", "Assisted vs Gen.");
  out += buf;
  out += std::string(115, '-') + "\n";
  for (const auto& mr : report.metrics) {
    std::snprintf(buf, sizeof buf, "%-22s %10.2f %10.2f %10.2f |", std::string(display_name(mr.metric)).c_str(),
                  mr.means.at(Condition::kHuman), mr.means.at(Condition::kAssisted),
                  mr.means.at(Condition::kGenerated));
    out += buf;
    for (const auto& pr : mr.pairs) {
      std::snprintf(buf, sizeof buf, " %8.1f (%7.4f)", pr.test.u, pr.p_adjusted);
      out += buf;
    }
    out += "\n";
  }
  std::snprintf(buf, sizeof buf, "\nn = %zu papers per condition; p-values Holm-adjusted (%s family).\n",
                report.num_papers, std::string(to_string(report.family)).c_str());
  out += buf;
  return out;
}

}  // namespace citeweave::stats
