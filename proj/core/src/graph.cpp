#include "citeweave/graph.hpp"

#include <cmath>
#include <cstdio>

namespace citeweave::graph {

UnknownNode::UnknownNode(NodeId id)
    : Error("citation " + std::to_string(id) + " is not in the node universe"), id_(id) {}

CitationGraph::CitationGraph(std::set<NodeId> nodes) : nodes_(std::move(nodes)) {
  for (NodeId id : nodes_) adjacency_[id];
}

void CitationGraph::add_node(NodeId id) {
  nodes_.insert(id);
  adjacency_[id];
}

void CitationGraph::add_concurrence(NodeId a, NodeId b, std::size_t citance_index) {
  if (a == b) return;
  if (!nodes_.count(a)) throw UnknownNode(a);
  if (!nodes_.count(b)) throw UnknownNode(b);
  edges_[Edge::of(a, b)].push_back(citance_index);
  adjacency_[a].insert(b);
  adjacency_[b].insert(a);
}

const std::set<NodeId>& CitationGraph::neighbors(NodeId id) const {
  static const std::set<NodeId> kEmpty;
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? kEmpty : it->second;
}

std::set<NodeId> text_universe(std::span<const citance::Citance> citances) {
  std::set<NodeId> ids;
  for (const auto& c : citances) ids.insert(c.citation_ids.begin(), c.citation_ids.end());
  return ids;
}

CitationGraph build_graph(std::span<const citance::Citance> citances, const std::set<NodeId>& universe) {
  CitationGraph g(universe);
  for (const auto& c : citances) {
    for (NodeId id : c.citation_ids) {
      if (!universe.count(id)) throw UnknownNode(id);
    }
    for (auto a = c.citation_ids.begin(); a != c.citation_ids.end(); ++a) {
      for (auto b = std::next(a); b != c.citation_ids.end(); ++b) g.add_concurrence(*a, *b, c.index);
    }
  }
  return g;
}

double local_clustering(const CitationGraph& g, NodeId id) {
  const auto& nbrs = g.neighbors(id);
  const std::size_t k = nbrs.size();
  if (k < 2) return 0.0;
  std::size_t links = 0;
  for (auto a = nbrs.begin(); a != nbrs.end(); ++a) {
    const auto& na = g.neighbors(*a);
    for (auto b = std::next(a); b != nbrs.end(); ++b) links += na.count(*b);
  }
  return static_cast<double>(2 * links) / static_cast<double>(k * (k - 1));
}

double mean_local_clustering(const CitationGraph& g, bool exclude_low_degree) {
  double sum = 0.0;
  std::size_t counted = 0;
  for (NodeId id : g.nodes()) {
    if (exclude_low_degree && g.degree(id) < 2) continue;
    sum += local_clustering(g, id);
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

double transitivity(const CitationGraph& g) {
  std::size_t closed = 0;   // ordered-center closed triples, 3 per triangle
  std::size_t triples = 0;  // connected triples centred at each node
  for (NodeId id : g.nodes()) {
    const auto& nbrs = g.neighbors(id);
    const std::size_t k = nbrs.size();
    triples += k * (k - 1) / 2;
    for (auto a = nbrs.begin(); a != nbrs.end(); ++a) {
      const auto& na = g.neighbors(*a);
      for (auto b = std::next(a); b != nbrs.end(); ++b) closed += na.count(*b);
    }
  }
  return triples == 0 ? 0.0 : static_cast<double>(closed) / static_cast<double>(triples);
}

GraphMetrics compute_metrics(const CitationGraph& g, ClusteringVariant variant) {
  GraphMetrics m;
  m.num_nodes = g.num_nodes();
  m.num_edges = g.num_edges();
  const double n = static_cast<double>(m.num_nodes);
  const double e = static_cast<double>(m.num_edges);
  m.avg_degree = m.num_nodes == 0 ? 0.0 : 2.0 * e / n;
  m.density = m.num_nodes < 2 ? 0.0 : e / (n * (n - 1.0) / 2.0);
  switch (variant) {
    case ClusteringVariant::kMeanLocal: m.clustering = mean_local_clustering(g, false); break;
    case ClusteringVariant::kMeanLocalDegreeTwo: m.clustering = mean_local_clustering(g, true); break;
    case ClusteringVariant::kGlobal: m.clustering = transitivity(g); break;
  }
  return m;
}

std::string_view to_string(UniverseMode m) { return m == UniverseMode::kText ? "text" : "bundle"; }

std::string_view to_string(ClusteringVariant v) {
  switch (v) {
    case ClusteringVariant::kMeanLocal: return "mean_local";
    case ClusteringVariant::kMeanLocalDegreeTwo: return "mean_local_degree2";
    case ClusteringVariant::kGlobal: return "global";
  }
  return "mean_local";
}

UniverseMode parse_universe(std::string_view s) {
  if (s == "text") return UniverseMode::kText;
  if (s == "bundle") return UniverseMode::kBundle;
  throw PreconditionError("unknown universe mode '" + std::string(s) + "' (expected text|bundle)");
}

ClusteringVariant parse_clustering(std::string_view s) {
  for (auto v : {ClusteringVariant::kMeanLocal, ClusteringVariant::kMeanLocalDegreeTwo, ClusteringVariant::kGlobal}) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown clustering variant '" + std::string(s) +
                          "' (expected mean_local|mean_local_degree2|global)");
}

Palette::Palette(std::map<NodeId, std::string> overrides) : overrides_(std::move(overrides)) {}

std::string Palette::color(NodeId id) const {
  if (auto it = overrides_.find(id); it != overrides_.end()) return it->second;
  // Golden-angle hue walk, saturation and value cycling.
  constexpr double kGolden = 0.618033988749894848;
  const double h = std::fmod(static_cast<double>(id) * kGolden, 1.0) * 6.0;
  const double s = 0.55 + 0.15 * static_cast<double>(id % 3);
  const double v = 0.95 - 0.12 * static_cast<double>((id / 3) % 3);
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = 0, gr = 0, b = 0;
  switch (sector) {
    case 0: r = v, gr = t, b = p; break;
    case 1: r = q, gr = v, b = p; break;
    case 2: r = p, gr = v, b = t; break;
    case 3: r = p, gr = q, b = v; break;
    case 4: r = t, gr = p, b = v; break;
    default: r = v, gr = p, b = q; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                static_cast<int>(std::lround(gr * 255)), static_cast<int>(std::lround(b * 255)));
  return buf;
}

std::string export_dot(const CitationGraph& g, const Palette& palette, std::string_view graph_name) {
  std::string out = "graph \"";
  for (char c : graph_name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += "\" {\n";
  out += "  node [shape=circle, style=filled, fontname=\"Helvetica\"];\n";
  for (NodeId id : g.nodes()) {
    out += "  n" + std::to_string(id) + " [label=\"[" + std::to_string(id) + "]\", fillcolor=\"" +
           palette.color(id) + "\"];\n";
  }
  for (const auto& [edge, provenance] : g.edges()) {
    out += "  n" + std::to_string(edge.first) + " -- n" + std::to_string(edge.second) +
           " [weight=" + std::to_string(provenance.size()) + "];\n";
  }
  out += "}\n";
  return out;
}

std::string export_edge_csv(const CitationGraph& g) {
  std::string out = "source_id,target_id,provenance_count\n";
  for (const auto& [edge, provenance] : g.edges()) {
    out += std::to_string(edge.first) + "," + std::to_string(edge.second) + "," +
           std::to_string(provenance.size()) + "\n";
  }
  return out;
}

}  // namespace citeweave::graph
