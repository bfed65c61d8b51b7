#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "egonet/errors.hpp"

namespace egonet {

using MemberId = std::uint64_t;
using NodeIndex = std::uint32_t;

struct WeightedEdge {
  MemberId src;
  MemberId dst;
  double weight;
};

// Immutable weighted undirected graph in CSR form. Node ids are arbitrary
// 64-bit member ids; algorithms work on dense indexes and map back at the
// edges of the system. Neighbor lists are sorted ascending by member id.
// Safe for concurrent reads after construction.
class Graph {
 public:
  Graph() = default;

  // Validates symmetry inputs: rejects self loops and non-positive weights,
  // merges duplicate (u,v)/(v,u) entries keeping the max weight.
  static Graph from_edges(const std::vector<WeightedEdge>& edges);

  // Edge-list text: one `src dst [weight]` per line, TAB- or
  // whitespace-separated, weight defaults to 1.0, '#' lines are comments.
  static Graph load(const std::string& path);
  static Graph parse(std::istream& in, const std::string& path_for_errors);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  bool has_node(MemberId id) const { return index_.find(id) != index_.end(); }

  NodeIndex index_of(MemberId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownMemberError(id);
    return it->second;
  }

  MemberId id_at(NodeIndex i) const { return ids_[i]; }

  // All member ids, ascending.
  const std::vector<MemberId>& ids() const { return ids_; }

  std::size_t degree(MemberId id) const { return degree_at(index_of(id)); }

  std::size_t degree_at(NodeIndex i) const { return offsets_[i + 1] - offsets_[i]; }

  double weighted_degree_at(NodeIndex i) const { return weighted_degree_[i]; }

  std::span<const NodeIndex> neighbors_at(NodeIndex i) const {
    return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
  }

  std::span<const double> weights_at(NodeIndex i) const {
    return {wgt_.data() + offsets_[i], wgt_.data() + offsets_[i + 1]};
  }

  double edge_weight(NodeIndex u, NodeIndex v) const;

  // {nodes, edges, degree_mean, degree_p50, degree_p90, degree_max}
  std::string summary_json() const;

  // Canonical edge list: `u<TAB>v<TAB>w` with u < v, rows ascending, one
  // row per undirected edge. Loading it back reproduces this graph.
  void write_edges_tsv(std::ostream& out) const;

 private:
  std::vector<MemberId> ids_;
  std::unordered_map<MemberId, NodeIndex> index_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeIndex> adj_;
  std::vector<double> wgt_;
  std::vector<double> weighted_degree_;
  std::size_t edge_count_ = 0;
};

// Equal-population degree strata. `boundaries` are strictly ascending degree
// cutoffs; bin b holds nodes with boundaries[b-1] <= degree < boundaries[b].
// Only nodes with degree >= 1 participate; each bin's draw order is a seeded
// shuffle.
struct DegreeBins {
  std::vector<std::size_t> boundaries;
  std::vector<std::vector<NodeIndex>> bins;

  std::size_t bin_of_degree(std::size_t degree) const;
};

// Quantile cutoffs of a sorted degree list: at most bin_count-1 strictly
// ascending values. Exposed separately so the binning rule is testable
// against direct quantile computation.
std::vector<std::size_t> quantile_boundaries(const std::vector<std::size_t>& sorted_degrees,
                                             std::size_t bin_count);

DegreeBins make_degree_bins(const Graph& g, std::size_t bin_count, std::uint64_t seed);

}  // namespace egonet
