#include "egonet/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "egonet/io.hpp"
#include "egonet/rng.hpp"

#include "json.hpp"

namespace egonet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Role : std::uint8_t { unclaimed = 0, alter = 1, ego = 2 };

std::pair<double, double> loss_rates(const Graph& g, NodeIndex ego,
                                     std::span<const NodeIndex> claimed) {
  const double d = static_cast<double>(g.degree_at(ego));
  double w_claimed = 0.0;
  for (NodeIndex a : claimed) w_claimed += g.edge_weight(ego, a);
  const double loss = 1.0 - static_cast<double>(claimed.size()) / d;
  const double wloss = 1.0 - w_claimed / g.weighted_degree_at(ego);
  return {loss, wloss};
}

EgoCluster make_cluster(const Graph& g, NodeIndex ego, std::vector<NodeIndex> claimed) {
  EgoCluster c;
  c.ego = g.id_at(ego);
  c.original_degree = g.degree_at(ego);
  std::sort(claimed.begin(), claimed.end());
  c.cluster_alters.reserve(claimed.size());
  for (NodeIndex a : claimed) c.cluster_alters.push_back(g.id_at(a));
  const auto [loss, wloss] = loss_rates(g, ego, claimed);
  c.loss_rate = loss;
  c.weighted_loss_rate = wloss;
  return c;
}

std::vector<MemberId> collect_leftover(const Graph& g, const std::vector<Role>& role) {
  std::vector<MemberId> leftover;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (role[i] == Role::unclaimed) leftover.push_back(g.id_at(i));
  }
  return leftover;
}

}  // namespace

std::size_t required_alters(std::size_t degree, double target_loss) {
  // Smallest claim count whose loss rate stays within the cap. The epsilon
  // absorbs representation droop in (1 - t) * d for values that are exact
  // integers mathematically.
  const double need = (1.0 - target_loss) * static_cast<double>(degree);
  auto k = static_cast<std::size_t>(std::ceil(need - 1e-9));
  if (k < 1) k = 1;
  if (k > degree) k = degree;
  return k;
}

ClusteringResult naive_cluster(const Graph& g, double stop_loss, std::size_t window,
                               std::uint64_t seed) {
  if (!(stop_loss > 0.0 && stop_loss <= 1.0)) {
    throw ValidationError("stop_loss must be in (0, 1]");
  }
  if (window < 1) throw ValidationError("window must be >= 1");

  ClusteringResult result;
  result.params = {"naive", stop_loss, window, 0, seed, false};

  std::vector<NodeIndex> draw_order;
  draw_order.reserve(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (g.degree_at(i) >= 1) draw_order.push_back(i);
  }
  rng::Rng r(rng::mix(seed, static_cast<std::uint64_t>(rng::kNaiveDraw)));
  r.shuffle(draw_order);

  std::vector<Role> role(g.node_count(), Role::unclaimed);
  std::vector<double> losses;
  double trailing_sum = 0.0;  // over the last min(window, egos) losses
  std::size_t iteration = 0;

  for (NodeIndex cand : draw_order) {
    ++iteration;
    if (role[cand] != Role::unclaimed) {
      const DrawKind kind =
          role[cand] == Role::alter ? DrawKind::collision_alter : DrawKind::collision_ego;
      result.diagnostics.records.push_back({iteration, kind, kNaN, g.degree_at(cand)});
      continue;
    }
    role[cand] = Role::ego;
    std::vector<NodeIndex> claimed;
    for (NodeIndex nb : g.neighbors_at(cand)) {
      if (role[nb] == Role::unclaimed) {
        role[nb] = Role::alter;
        claimed.push_back(nb);
      }
    }
    EgoCluster cluster = make_cluster(g, cand, std::move(claimed));
    const double loss = cluster.loss_rate;
    result.diagnostics.records.push_back(
        {iteration, DrawKind::accepted, loss, cluster.original_degree});
    result.clusters.push_back(std::move(cluster));

    losses.push_back(loss);
    trailing_sum += loss;
    if (losses.size() > window) trailing_sum -= losses[losses.size() - window - 1];
    const std::size_t span = std::min(window, losses.size());
    if (trailing_sum / static_cast<double>(span) >= stop_loss) break;
  }

  result.leftover = collect_leftover(g, role);
  return result;
}

ClusteringResult stratified_cluster(const Graph& g, double target_loss, std::size_t bin_count,
                                    std::uint64_t seed) {
  if (!(target_loss >= 0.0 && target_loss < 1.0)) {
    throw ValidationError("target_loss must be in [0, 1)");
  }
  if (bin_count < 1) throw ValidationError("bin_count must be >= 1");

  ClusteringResult result;
  result.params = {"stratified", target_loss, 0, bin_count, seed, false};

  DegreeBins bins = make_degree_bins(g, bin_count, seed);
  const std::size_t nbins = bins.bins.size();
  if (nbins == 0) {
    result.leftover = g.ids();
    return result;
  }

  std::vector<Role> role(g.node_count(), Role::unclaimed);
  std::vector<std::size_t> cursor(nbins, 0);
  std::size_t iteration = 0;
  bool halted = false;

  // Tie blocks can make the quantile bins unequal, and drawing one ego per
  // bin per cycle would then over-sample the sparse tail bins badly enough
  // to bias the ego degree distribution. Owe each bin draws in proportion
  // to its population instead (exact integer credits); with equal bins this
  // degenerates to the plain one-per-bin round-robin.
  std::size_t eligible_total = 0;
  for (const auto& members : bins.bins) eligible_total += members.size();
  std::vector<std::size_t> owed(nbins, 0);

  std::vector<std::pair<double, NodeIndex>> ranked;  // (-weight, id) claim order
  while (!halted) {
    for (std::size_t b = 0; b < nbins && !halted; ++b) {
      owed[b] += bins.bins[b].size() * nbins;
      for (; owed[b] >= eligible_total && !halted; owed[b] -= eligible_total) {
        bool accepted = false;
        while (!accepted) {
          if (cursor[b] == bins.bins[b].size()) {
            // A bin that cannot supply an ego ends the whole procedure; by
            // this point the sample would start skewing away from this
            // stratum.
            halted = true;
            break;
          }
          const NodeIndex cand = bins.bins[b][cursor[b]++];
          if (role[cand] != Role::unclaimed) {
            ++iteration;
            const DrawKind kind =
                role[cand] == Role::alter ? DrawKind::collision_alter : DrawKind::collision_ego;
            result.diagnostics.records.push_back({iteration, kind, kNaN, g.degree_at(cand)});
            continue;
          }
          const std::size_t d = g.degree_at(cand);
          const std::size_t need = required_alters(d, target_loss);

          ranked.clear();
          const auto nbrs = g.neighbors_at(cand);
          const auto wts = g.weights_at(cand);
          for (std::size_t k = 0; k < nbrs.size(); ++k) {
            if (role[nbrs[k]] == Role::unclaimed) ranked.emplace_back(-wts[k], nbrs[k]);
          }
          if (ranked.size() < need) continue;  // discarded for good

          std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(need),
                            ranked.end());
          role[cand] = Role::ego;
          std::vector<NodeIndex> claimed;
          claimed.reserve(need);
          for (std::size_t k = 0; k < need; ++k) {
            role[ranked[k].second] = Role::alter;
            claimed.push_back(ranked[k].second);
          }
          EgoCluster cluster = make_cluster(g, cand, std::move(claimed));
          ++iteration;
          result.diagnostics.records.push_back(
              {iteration, DrawKind::accepted, cluster.loss_rate, d});
          result.clusters.push_back(std::move(cluster));
          accepted = true;
        }
      }
    }
  }

  result.leftover = collect_leftover(g, role);
  return result;
}

ClusteringResult reattach_alters(const Graph& g, const ClusteringResult& partial) {
  if (partial.params.algorithm != "stratified") {
    throw ValidationError("reattach_alters requires a stratified clustering input");
  }
  const double target_loss = partial.params.target_loss;
  const std::size_t ncl = partial.clusters.size();

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> owner(g.node_count(), kNone);  // cluster index
  std::vector<Role> role(g.node_count(), Role::unclaimed);
  std::vector<std::size_t> ego_of_cluster(ncl);

  for (std::size_t c = 0; c < ncl; ++c) {
    const NodeIndex e = g.index_of(partial.clusters[c].ego);
    role[e] = Role::ego;
    owner[e] = c;
    ego_of_cluster[c] = e;
    for (MemberId a : partial.clusters[c].cluster_alters) {
      const NodeIndex ai = g.index_of(a);
      role[ai] = Role::alter;
      owner[ai] = c;
    }
  }

  std::vector<std::size_t> claim_count(ncl);
  std::vector<std::size_t> ego_degree(ncl);
  std::vector<double> loss(ncl);
  for (std::size_t c = 0; c < ncl; ++c) {
    claim_count[c] = partial.clusters[c].cluster_alters.size();
    ego_degree[c] = partial.clusters[c].original_degree;
  }
  auto loss_of = [&](std::size_t c, std::size_t k) {
    return 1.0 - static_cast<double>(k) / static_cast<double>(ego_degree[c]);
  };

  // Pass 1: greedy attachment by strongest edge, ties to the lower ego id.
  struct Attached {
    NodeIndex node;
    std::size_t cluster;
    std::vector<std::size_t> adjacent;  // clusters this node could serve
  };
  std::vector<Attached> attached;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (role[u] != Role::unclaimed) continue;
    std::size_t best = kNone;
    double best_w = -1.0;
    std::vector<std::size_t> adj;
    const auto nbrs = g.neighbors_at(u);
    const auto wts = g.weights_at(u);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (role[nbrs[k]] != Role::ego) continue;
      const std::size_t c = owner[nbrs[k]];
      adj.push_back(c);
      if (wts[k] > best_w ||
          (wts[k] == best_w && best != kNone &&
           g.id_at(static_cast<NodeIndex>(ego_of_cluster[c])) <
               g.id_at(static_cast<NodeIndex>(ego_of_cluster[best])))) {
        best_w = wts[k];
        best = c;
      }
    }
    if (best == kNone) continue;
    role[u] = Role::alter;
    owner[u] = best;
    ++claim_count[best];
    attached.push_back({u, best, std::move(adj)});
  }

  for (std::size_t c = 0; c < ncl; ++c) loss[c] = loss_of(c, claim_count[c]);

  // Pass 2: equalization. Move an attached alter from a below-mean-loss ego
  // to an adjacent above-mean-loss ego when that strictly shrinks the global
  // spread. Each applied move lowers a bounded nonnegative objective over a
  // finite state space, so the loop terminates.
  if (ncl >= 2 && !attached.empty()) {
    std::multiset<double> losses(loss.begin(), loss.end());
    const auto spread_now = [&] { return *losses.rbegin() - *losses.begin(); };

    for (;;) {
      const double spread = spread_now();
      double mean_loss = 0.0;
      for (double l : loss) mean_loss += l;
      mean_loss /= static_cast<double>(ncl);

      double best_gain = 1e-12;
      std::size_t best_i = kNone;
      std::size_t best_target = kNone;
      for (std::size_t i = 0; i < attached.size(); ++i) {
        const std::size_t from = attached[i].cluster;
        if (!(loss[from] < mean_loss)) continue;
        const double from_after = loss_of(from, claim_count[from] - 1);
        for (std::size_t to : attached[i].adjacent) {
          if (to == from || !(loss[to] > mean_loss)) continue;
          const double to_after = loss_of(to, claim_count[to] + 1);
          auto it_from = losses.find(loss[from]);
          losses.erase(it_from);
          auto it_to = losses.find(loss[to]);
          losses.erase(it_to);
          losses.insert(from_after);
          losses.insert(to_after);
          const double gain = spread - spread_now();
          losses.erase(losses.find(from_after));
          losses.erase(losses.find(to_after));
          losses.insert(loss[from]);
          losses.insert(loss[to]);
          if (gain > best_gain) {
            best_gain = gain;
            best_i = i;
            best_target = to;
          }
        }
      }
      if (best_i == kNone) break;

      const std::size_t from = attached[best_i].cluster;
      losses.erase(losses.find(loss[from]));
      losses.erase(losses.find(loss[best_target]));
      --claim_count[from];
      ++claim_count[best_target];
      loss[from] = loss_of(from, claim_count[from]);
      loss[best_target] = loss_of(best_target, claim_count[best_target]);
      losses.insert(loss[from]);
      losses.insert(loss[best_target]);
      owner[attached[best_i].node] = best_target;
      attached[best_i].cluster = best_target;
    }
  }

  // Rebuild clusters from the final ownership.
  ClusteringResult out;
  out.params = partial.params;
  out.params.reattached = true;
  out.diagnostics = partial.diagnostics;
  std::vector<std::vector<NodeIndex>> members(ncl);
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (role[u] == Role::alter) members[owner[u]].push_back(u);
  }
  out.clusters.reserve(ncl);
  for (std::size_t c = 0; c < ncl; ++c) {
    EgoCluster cluster =
        make_cluster(g, static_cast<NodeIndex>(ego_of_cluster[c]), std::move(members[c]));
    assert(cluster.loss_rate <= target_loss + 1e-12);
    (void)target_loss;
    out.clusters.push_back(std::move(cluster));
  }
  out.leftover = collect_leftover(g, role);
  return out;
}

DiagnosticsTables diagnostics_report(const ClusteringResult& result, std::size_t window) {
  if (result.diagnostics.records.empty() && result.clusters.empty()) {
    throw ValidationError("diagnostics_report requires a nonempty clustering result");
  }
  if (window < 1) throw ValidationError("window must be >= 1");

  DiagnosticsTables tables;
  tables.window = window;

  std::vector<double> win_loss;
  std::vector<std::size_t> win_deg;
  std::size_t win_under = 0;
  double win_loss_sum = 0.0;
  double win_deg_sum = 0.0;
  std::size_t collisions = 0;

  for (const DrawRecord& rec : result.diagnostics.records) {
    const bool collision = rec.kind != DrawKind::accepted;
    if (collision) {
      ++collisions;
    } else {
      win_loss.push_back(rec.ego_loss_rate);
      win_deg.push_back(rec.ego_original_degree);
      win_loss_sum += rec.ego_loss_rate;
      win_deg_sum += static_cast<double>(rec.ego_original_degree);
      if (rec.ego_loss_rate < 0.10) ++win_under;
      if (win_loss.size() > window) {
        const double old_loss = win_loss[win_loss.size() - window - 1];
        win_loss_sum -= old_loss;
        win_deg_sum -= static_cast<double>(win_deg[win_deg.size() - window - 1]);
        if (old_loss < 0.10) --win_under;
      }
    }
    const std::size_t span = std::min(window, win_loss.size());
    DiagnosticsRow row;
    row.iteration = rec.iteration;
    row.collision = collision;
    row.ego_loss_rate = rec.ego_loss_rate;
    row.cumulative_collision_rate =
        static_cast<double>(collisions) / static_cast<double>(rec.iteration);
    row.ego_degree = rec.ego_original_degree;
    if (span > 0) {
      row.rolling_mean_loss = win_loss_sum / static_cast<double>(span);
      std::size_t under = 0;
      for (std::size_t k = win_loss.size() - span; k < win_loss.size(); ++k) {
        if (win_loss[k] < 0.10) ++under;
      }
      row.rolling_frac_under_10pct = static_cast<double>(under) / static_cast<double>(span);
      row.rolling_mean_degree = win_deg_sum / static_cast<double>(span);
    }
    tables.rows.push_back(row);
  }

  DiagnosticsRollup& roll = tables.rollup;
  roll.draws = result.diagnostics.records.size();
  roll.egos = result.clusters.size();
  for (const DrawRecord& rec : result.diagnostics.records) {
    if (rec.kind == DrawKind::collision_alter) ++roll.alter_collisions;
    if (rec.kind == DrawKind::collision_ego) ++roll.ego_collisions;
  }
  roll.collisions = roll.alter_collisions + roll.ego_collisions;
  roll.collision_rate =
      roll.draws == 0 ? 0.0 : static_cast<double>(roll.collisions) / static_cast<double>(roll.draws);
  double loss_sum = 0.0, wloss_sum = 0.0, deg_sum = 0.0;
  std::size_t under = 0;
  for (const EgoCluster& c : result.clusters) {
    loss_sum += c.loss_rate;
    wloss_sum += c.weighted_loss_rate;
    deg_sum += static_cast<double>(c.original_degree);
    if (c.loss_rate < 0.10) ++under;
  }
  if (roll.egos > 0) {
    roll.mean_loss_rate = loss_sum / static_cast<double>(roll.egos);
    roll.mean_weighted_loss_rate = wloss_sum / static_cast<double>(roll.egos);
    roll.frac_loss_under_10pct = static_cast<double>(under) / static_cast<double>(roll.egos);
    roll.mean_ego_degree = deg_sum / static_cast<double>(roll.egos);
  }
  return tables;
}

void write_clusters_tsv(std::ostream& out, const ClusteringResult& result) {
  out << "ego_id\tloss_rate\tweighted_loss_rate\talters\n";
  for (const EgoCluster& c : result.clusters) {
    out << c.ego << '\t' << io::fmt_double(c.loss_rate) << '\t'
        << io::fmt_double(c.weighted_loss_rate) << '\t';
    for (std::size_t i = 0; i < c.cluster_alters.size(); ++i) {
      if (i > 0) out << ',';
      out << c.cluster_alters[i];
    }
    out << '\n';
  }
}

void write_leftover(std::ostream& out, const ClusteringResult& result) {
  for (MemberId m : result.leftover) out << m << '\n';
}

void write_diagnostics_tsv(std::ostream& out, const DiagnosticsTables& tables) {
  out << "iteration\tcollision\tego_loss_rate\tcumulative_collision_rate\tego_degree\t"
         "rolling_mean_loss\trolling_frac_under_10pct\trolling_mean_degree\n";
  for (const DiagnosticsRow& r : tables.rows) {
    out << r.iteration << '\t' << (r.collision ? 1 : 0) << '\t'
        << (r.collision ? "NA" : io::fmt_double(r.ego_loss_rate)) << '\t'
        << io::fmt_double(r.cumulative_collision_rate) << '\t' << r.ego_degree << '\t'
        << io::fmt_double(r.rolling_mean_loss) << '\t'
        << io::fmt_double(r.rolling_frac_under_10pct) << '\t'
        << io::fmt_double(r.rolling_mean_degree) << '\n';
  }
}

std::string clusters_json(const ClusteringResult& result) {
  nlohmann::json j;
  j["params"] = {{"algorithm", result.params.algorithm},
                 {"target_loss", result.params.target_loss},
                 {"window", result.params.window},
                 {"bin_count", result.params.bin_count},
                 {"seed", result.params.seed},
                 {"reattached", result.params.reattached}};
  nlohmann::json arr = nlohmann::json::array();
  for (const EgoCluster& c : result.clusters) {
    arr.push_back({{"ego", c.ego},
                   {"degree", c.original_degree},
                   {"loss_rate", c.loss_rate},
                   {"weighted_loss_rate", c.weighted_loss_rate},
                   {"alters", c.cluster_alters}});
  }
  j["clusters"] = std::move(arr);
  j["leftover_count"] = result.leftover.size();
  return j.dump(2) + "\n";
}

void write_draws_tsv(std::ostream& out, const ClusteringResult& result) {
  out << "iteration\tkind\tego_loss_rate\tego_degree\n";
  for (const DrawRecord& r : result.diagnostics.records) {
    const char* kind = r.kind == DrawKind::accepted        ? "accepted"
                       : r.kind == DrawKind::collision_alter ? "collision_alter"
                                                             : "collision_ego";
    out << r.iteration << '\t' << kind << '\t'
        << (r.kind == DrawKind::accepted ? io::fmt_double(r.ego_loss_rate) : "NA") << '\t'
        << r.ego_original_degree << '\n';
  }
}

IterationDiagnostics read_draws(std::istream& in) {
  IterationDiagnostics diag;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = io::split_fields(line);
    if (fields.size() != 4) throw ParseError("draws.tsv", line_no, "expected 4 fields");
    DrawRecord r;
    auto [p1, e1] =
        std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), r.iteration);
    if (e1 != std::errc{}) throw ParseError("draws.tsv", line_no, "bad iteration");
    if (fields[1] == "accepted") {
      r.kind = DrawKind::accepted;
    } else if (fields[1] == "collision_alter") {
      r.kind = DrawKind::collision_alter;
    } else if (fields[1] == "collision_ego") {
      r.kind = DrawKind::collision_ego;
    } else {
      throw ParseError("draws.tsv", line_no, "bad kind");
    }
    r.ego_loss_rate = fields[2] == "NA" ? kNaN : std::strtod(std::string(fields[2]).c_str(), nullptr);
    auto [p2, e2] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(),
                                    r.ego_original_degree);
    if (e2 != std::errc{}) throw ParseError("draws.tsv", line_no, "bad degree");
    diag.records.push_back(r);
  }
  return diag;
}

ClusteringResult read_clusters(std::istream& clusters_tsv, std::istream& leftover,
                               const ClusteringParams& params) {
  ClusteringResult result;
  result.params = params;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(clusters_tsv, line)) {
    ++line_no;
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = io::split_fields(line);
    if (fields.size() < 3) {
      throw ParseError("clusters.tsv", line_no, "expected at least 3 fields");
    }
    EgoCluster c;
    auto [p1, e1] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), c.ego);
    if (e1 != std::errc{}) throw ParseError("clusters.tsv", line_no, "bad ego id");
    c.loss_rate = std::strtod(std::string(fields[1]).c_str(), nullptr);
    c.weighted_loss_rate = std::strtod(std::string(fields[2]).c_str(), nullptr);
    if (fields.size() >= 4) {
      std::string_view alters = fields[3];
      std::size_t start = 0;
      while (start <= alters.size() && !alters.empty()) {
        const std::size_t comma = alters.find(',', start);
        const std::string_view tok =
            alters.substr(start, comma == std::string_view::npos ? alters.size() - start
                                                                 : comma - start);
        if (!tok.empty()) {
          MemberId a = 0;
          auto [p2, e2] = std::from_chars(tok.data(), tok.data() + tok.size(), a);
          if (e2 != std::errc{}) throw ParseError("clusters.tsv", line_no, "bad alter id");
          c.cluster_alters.push_back(a);
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
    }
    // The TSV does not carry the original degree; recover it from the loss
    // rate when possible (degree-dependent consumers reload the graph).
    if (c.loss_rate < 1.0) {
      c.original_degree = static_cast<std::size_t>(std::llround(
          static_cast<double>(c.cluster_alters.size()) / (1.0 - c.loss_rate)));
    }
    result.clusters.push_back(std::move(c));
  }
  while (std::getline(leftover, line)) {
    if (line.empty()) continue;
    MemberId m = 0;
    auto [p, e] = std::from_chars(line.data(), line.data() + line.size(), m);
    if (e != std::errc{}) throw ValidationError("bad leftover id: " + line);
    result.leftover.push_back(m);
  }
  return result;
}

std::pair<double, double> recompute_loss(const Graph& g, const EgoCluster& c) {
  const NodeIndex ego = g.index_of(c.ego);
  std::vector<NodeIndex> claimed;
  claimed.reserve(c.cluster_alters.size());
  for (MemberId a : c.cluster_alters) claimed.push_back(g.index_of(a));
  return loss_rates(g, ego, claimed);
}

}  // namespace egonet
