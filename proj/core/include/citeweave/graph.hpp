#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citeweave/citance.hpp"
#include "citeweave/error.hpp"

namespace citeweave::graph {

using NodeId = int;

// Unordered pair, stored with first < second.
struct Edge {
  NodeId first = 0;
  NodeId second = 0;

  static Edge of(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  auto operator<=>(const Edge&) const = default;
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(NodeId id);
  NodeId id() const noexcept { return id_; }

 private:
  NodeId id_;
};

// Undirected simple graph of cited works. Each edge remembers which citances
// (by index) put the two works in the same sentence.
class CitationGraph {
 public:
  CitationGraph() = default;
  explicit CitationGraph(std::set<NodeId> nodes);

  void add_node(NodeId id);
  // Records a co-occurrence from citance `citance_index`. Both ends must
  // already be nodes; a == b is ignored.
  void add_concurrence(NodeId a, NodeId b, std::size_t citance_index);

  const std::set<NodeId>& nodes() const noexcept { return nodes_; }
  const std::map<Edge, std::vector<std::size_t>>& edges() const noexcept { return edges_; }
  const std::set<NodeId>& neighbors(NodeId id) const;
  std::size_t degree(NodeId id) const { return neighbors(id).size(); }
  bool has_edge(NodeId a, NodeId b) const { return edges_.count(Edge::of(a, b)) > 0; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

 private:
  std::set<NodeId> nodes_;
  std::map<Edge, std::vector<std::size_t>> edges_;
  std::map<NodeId, std::set<NodeId>> adjacency_;
};

// Which cited works become nodes: those cited in the analysed text, or every
// entry of the paper's citation list.
enum class UniverseMode { kText, kBundle };

std::set<NodeId> text_universe(std::span<const citance::Citance> citances);

// Every unordered pair of ids within one citance becomes an edge. Throws
// UnknownNode if a citance mentions an id outside `universe`.
CitationGraph build_graph(std::span<const citance::Citance> citances, const std::set<NodeId>& universe);

enum class ClusteringVariant {
  kMeanLocal,             // mean local coefficient, degree < 2 counts as 0
  kMeanLocalDegreeTwo,    // mean over nodes of degree >= 2 only
  kGlobal,                // transitivity: 3 * triangles / connected triples
};

struct GraphMetrics {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  double avg_degree = 0.0;
  double density = 0.0;
  double clustering = 0.0;

  bool operator==(const GraphMetrics&) const = default;
};

GraphMetrics compute_metrics(const CitationGraph& g, ClusteringVariant variant = ClusteringVariant::kMeanLocal);

double local_clustering(const CitationGraph& g, NodeId id);
double mean_local_clustering(const CitationGraph& g, bool exclude_low_degree = false);
double transitivity(const CitationGraph& g);

std::string_view to_string(UniverseMode m);
std::string_view to_string(ClusteringVariant v);
UniverseMode parse_universe(std::string_view s);
ClusteringVariant parse_clustering(std::string_view s);

// Node colors keyed by citation id alone. Explicit overrides win.
class Palette {
 public:
  Palette() = default;
  explicit Palette(std::map<NodeId, std::string> overrides);

  std::string color(NodeId id) const;

 private:
  std::map<NodeId, std::string> overrides_;
};

// Graphviz "graph" text; nodes are labelled "[id]" and filled with the
// palette color.
std::string export_dot(const CitationGraph& g, const Palette& palette = {},
                       std::string_view graph_name = "citations");

// "source_id,target_id,provenance_count" with a header row.
std::string export_edge_csv(const CitationGraph& g);

}  // namespace citeweave::graph
