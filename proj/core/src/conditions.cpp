#include "citeweave/conditions.hpp"

namespace citeweave {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::kHuman: return "human";
    case Condition::kAssisted: return "assisted";
    case Condition::kGenerated: return "generated";
  }
  return "unknown";
}

std::optional<Condition> parse_condition(std::string_view name) {
  for (Condition c : kAllConditions) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view display_name(Condition c) {
  switch (c) {
    case Condition::kHuman: return "Human";
    case Condition::kAssisted: return "Assisted";
    case Condition::kGenerated: return "Generated";
  }
  return "?";
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kEdges: return "edges";
    case Metric::kAvgDegree: return "avg_degree";
    case Metric::kDensity: return "density";
    case Metric::kClustering: return "clustering";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view display_name(Metric m) {
  switch (m) {
    case Metric::kEdges: return "Number of edges";
    case Metric::kAvgDegree: return "Average node degree";
    case Metric::kDensity: return "Density";
    case Metric::kClustering: return "Cluster coefficient";
  }
  return "?";
}

}  // namespace citeweave
