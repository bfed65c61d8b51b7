#include "egonet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "egonet/io.hpp"
#include "egonet/rng.hpp"

#include "json.hpp"

namespace egonet {

Graph Graph::from_edges(const std::vector<WeightedEdge>& edges) {
  // Canonical key (min,max) merges both orientations; max weight wins so the
  // result does not depend on input order.
  std::map<std::pair<MemberId, MemberId>, double> merged;
  for (const auto& e : edges) {
    if (e.src == e.dst) {
      throw ValidationError("self-loop on member " + std::to_string(e.src));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("edge " + std::to_string(e.src) + "-" + std::to_string(e.dst) +
                            " has non-positive weight");
    }
    const auto key = std::minmax(e.src, e.dst);
    auto [it, inserted] = merged.emplace(key, e.weight);
    if (!inserted) it->second = std::max(it->second, e.weight);
  }

  Graph g;
  for (const auto& [key, w] : merged) {
    (void)w;
    g.index_.emplace(key.first, 0);
    g.index_.emplace(key.second, 0);
  }
  g.ids_.reserve(g.index_.size());
  for (const auto& [id, idx] : g.index_) {
    (void)idx;
    g.ids_.push_back(id);
  }
  std::sort(g.ids_.begin(), g.ids_.end());
  for (NodeIndex i = 0; i < g.ids_.size(); ++i) g.index_[g.ids_[i]] = i;

  const std::size_t n = g.ids_.size();
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [key, w] : merged) {
    (void)w;
    ++deg[g.index_[key.first]];
    ++deg[g.index_[key.second]];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.adj_.resize(g.offsets_[n]);
  g.wgt_.resize(g.offsets_[n]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // `merged` iterates in ascending (src,dst) order, so each neighbor list
  // would arrive sorted only for the src side; sort both sides afterwards.
  for (const auto& [key, w] : merged) {
    const NodeIndex u = g.index_[key.first];
    const NodeIndex v = g.index_[key.second];
    g.adj_[cursor[u]] = v;
    g.wgt_[cursor[u]++] = w;
    g.adj_[cursor[v]] = u;
    g.wgt_[cursor[v]++] = w;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = g.offsets_[i], hi = g.offsets_[i + 1];
    std::vector<std::pair<NodeIndex, double>> nb;
    nb.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) nb.emplace_back(g.adj_[k], g.wgt_[k]);
    std::sort(nb.begin(), nb.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = lo; k < hi; ++k) {
      g.adj_[k] = nb[k - lo].first;
      g.wgt_[k] = nb[k - lo].second;
    }
  }

  g.weighted_degree_.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (double w : g.weights_at(static_cast<NodeIndex>(i))) acc += w;
    g.weighted_degree_[i] = acc;
  }
  g.edge_count_ = merged.size();
  return g;
}

Graph Graph::parse(std::istream& in, const std::string& path_for_errors) {
  std::vector<WeightedEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = io::split_fields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(path_for_errors, line_no,
                       "expected `src dst [weight]`, got " + std::to_string(fields.size()) +
                           " fields");
    }
    WeightedEdge e{0, 0, 1.0};
    auto parse_id = [&](std::string_view f, MemberId& out) {
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw ParseError(path_for_errors, line_no, "bad member id `" + std::string(f) + "`");
      }
    };
    parse_id(fields[0], e.src);
    parse_id(fields[1], e.dst);
    if (fields.size() == 3) {
      const std::string wf(fields[2]);
      char* end = nullptr;
      e.weight = std::strtod(wf.c_str(), &end);
      if (end != wf.c_str() + wf.size()) {
        throw ParseError(path_for_errors, line_no, "bad weight `" + wf + "`");
      }
      if (e.weight < 0.0) {
        throw ParseError(path_for_errors, line_no, "negative weight");
      }
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw ParseError(path_for_errors, line_no, "weight must be positive and finite");
      }
    }
    if (e.src == e.dst) {
      throw ParseError(path_for_errors, line_no, "self-loop on member " + std::to_string(e.src));
    }
    edges.push_back(e);
  }
  return from_edges(edges);
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file: " + path);
  return parse(in, path);
}

double Graph::edge_weight(NodeIndex u, NodeIndex v) const {
  const auto nbrs = neighbors_at(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return 0.0;
  return weights_at(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

std::string Graph::summary_json() const {
  std::vector<std::size_t> degs(node_count());
  for (std::size_t i = 0; i < node_count(); ++i) degs[i] = degree_at(static_cast<NodeIndex>(i));
  std::sort(degs.begin(), degs.end());

  const auto pct = [&](double q) -> std::size_t {
    if (degs.empty()) return 0;
    const std::size_t pos = static_cast<std::size_t>(q * static_cast<double>(degs.size() - 1));
    return degs[pos];
  };
  double dmean = 0.0;
  for (auto d : degs) dmean += static_cast<double>(d);
  if (!degs.empty()) dmean /= static_cast<double>(degs.size());

  nlohmann::json j;
  j["nodes"] = node_count();
  j["edges"] = edge_count();
  j["degree_mean"] = dmean;
  j["degree_p50"] = pct(0.50);
  j["degree_p90"] = pct(0.90);
  j["degree_max"] = degs.empty() ? 0 : degs.back();
  return j.dump(2) + "\n";
}

void Graph::write_edges_tsv(std::ostream& out) const {
  for (NodeIndex u = 0; u < node_count(); ++u) {
    const auto nbrs = neighbors_at(u);
    const auto wts = weights_at(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (nbrs[k] <= u) continue;  // emit each undirected edge once, u < v
      out << ids_[u] << '\t' << ids_[nbrs[k]] << '\t' << io::fmt_double(wts[k]) << '\n';
    }
  }
}

std::size_t DegreeBins::bin_of_degree(std::size_t degree) const {
  std::size_t b = 0;
  while (b < boundaries.size() && degree >= boundaries[b]) ++b;
  return b;
}

std::vector<std::size_t> quantile_boundaries(const std::vector<std::size_t>& sorted_degrees,
                                             std::size_t bin_count) {
  std::vector<std::size_t> cuts;
  const std::size_t n = sorted_degrees.size();
  if (n == 0 || bin_count <= 1) return cuts;
  std::size_t start = 0;
  for (std::size_t left = bin_count; left > 1 && start < n; --left) {
    // Aim for equal population across the bins still to be formed, then
    // push the cut past ties so equal degrees always share a bin.  Cutting
    // mid-tie would instead strand the short side of the run in a sliver
    // bin that exhausts after a handful of draws and halts clustering.
    std::size_t end = start + (n - start + left - 1) / left;
    while (end < n && sorted_degrees[end] == sorted_degrees[end - 1]) ++end;
    if (end >= n) break;
    cuts.push_back(sorted_degrees[end]);
    start = end;
  }
  return cuts;
}

DegreeBins make_degree_bins(const Graph& g, std::size_t bin_count, std::uint64_t seed) {
  if (bin_count == 0) throw ValidationError("bin_count must be >= 1");

  std::vector<NodeIndex> eligible;  // degree 0 nodes carry no ego information
  eligible.reserve(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (g.degree_at(i) >= 1) eligible.push_back(i);
  }

  std::vector<std::size_t> degs;
  degs.reserve(eligible.size());
  for (NodeIndex i : eligible) degs.push_back(g.degree_at(i));
  std::sort(degs.begin(), degs.end());

  DegreeBins bins;
  bins.boundaries = quantile_boundaries(degs, bin_count);
  bins.bins.assign(bins.boundaries.size() + 1, {});
  for (NodeIndex i : eligible) {
    bins.bins[bins.bin_of_degree(g.degree_at(i))].push_back(i);
  }
  // Nodes enter ascending by id (eligible is built in index order); the
  // per-bin shuffle defines the draw order and is keyed by bin so one bin's
  // contents never perturb another's.
  for (std::size_t b = 0; b < bins.bins.size(); ++b) {
    rng::Rng r(rng::mix(seed, static_cast<std::uint64_t>(rng::kBinShuffle), b));
    r.shuffle(bins.bins[b]);
  }
  return bins;
}

}  // namespace egonet
