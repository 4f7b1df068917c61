#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace citeweave {

// The three ways a related-work section can come into being.
enum class Condition { kHuman, kAssisted, kGenerated };

inline constexpr std::array<Condition, 3> kAllConditions = {
    Condition::kHuman, Condition::kAssisted, Condition::kGenerated};

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view name);

// Display label used in summary tables ("Human", "Assisted", "GPT").
std::string_view display_name(Condition c);

// Graph-structure statistics compared across conditions.
enum class Metric { kEdges, kAvgDegree, kDensity, kClustering };

inline constexpr std::array<Metric, 4> kAllMetrics = {
    Metric::kEdges, Metric::kAvgDegree, Metric::kDensity, Metric::kClustering};

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);
std::string_view display_name(Metric m);

}  // namespace citeweave
