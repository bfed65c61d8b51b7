#include "egonet/assignment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "egonet/errors.hpp"
#include "egonet/io.hpp"
#include "egonet/rng.hpp"

#include "json.hpp"

namespace egonet {

std::string_view to_string(EgoMode m) {
  switch (m) {
    case EgoMode::all_treated: return "all-treated";
    case EgoMode::all_control: return "all-control";
    case EgoMode::match_alters: return "match-alters";
    case EgoMode::independent: return "independent";
  }
  return "?";
}

std::string_view to_string(Variant v) {
  return v == Variant::treated ? "TREATED" : "CONTROL";
}

std::string_view to_string(MemberRole r) {
  switch (r) {
    case MemberRole::ego: return "EGO";
    case MemberRole::alter: return "ALTER";
    case MemberRole::leftover: return "LEFTOVER";
  }
  return "?";
}

EgoMode ego_mode_from_string(std::string_view s) {
  if (s == "all-treated") return EgoMode::all_treated;
  if (s == "all-control") return EgoMode::all_control;
  if (s == "match-alters") return EgoMode::match_alters;
  if (s == "independent") return EgoMode::independent;
  throw ValidationError("unknown ego mode: " + std::string(s));
}

const PlanRow& AssignmentPlan::row_of(MemberId m) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), m,
                             [](const PlanRow& r, MemberId v) { return r.member < v; });
  if (it == rows.end() || it->member != m) throw UnknownMemberError(m);
  return *it;
}

bool AssignmentPlan::has_member(MemberId m) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), m,
                             [](const PlanRow& r, MemberId v) { return r.member < v; });
  return it != rows.end() && it->member == m;
}

bool AssignmentPlan::ego_coin(MemberId ego) const {
  auto it = std::lower_bound(coin_egos.begin(), coin_egos.end(), ego);
  if (it == coin_egos.end() || *it != ego) throw UnknownMemberError(ego);
  return coin_treated[static_cast<std::size_t>(it - coin_egos.begin())] != 0;
}

namespace {

Variant ego_variant(EgoMode mode, bool alters_treated, double p, std::uint64_t seed,
                    MemberId ego) {
  switch (mode) {
    case EgoMode::all_treated: return Variant::treated;
    case EgoMode::all_control: return Variant::control;
    case EgoMode::match_alters: return alters_treated ? Variant::treated : Variant::control;
    case EgoMode::independent:
      return rng::keyed_coin(seed, rng::kEgoCoin, ego, p) ? Variant::treated : Variant::control;
  }
  return Variant::control;
}

template <bool Parallel>
AssignmentPlan assign_impl(const ClusteringResult& result, EgoMode mode, double p,
                           std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("p must be in (0, 1)");
  if (result.clusters.empty()) throw ValidationError("clustering has no egos");

  AssignmentPlan plan;
  plan.params = {mode, p, seed};

  const std::size_t ncl = result.clusters.size();
  std::vector<std::size_t> offset(ncl + 1, 0);
  for (std::size_t c = 0; c < ncl; ++c) {
    offset[c + 1] = offset[c] + 1 + result.clusters[c].cluster_alters.size();
  }
  const std::size_t cluster_rows = offset[ncl];
  plan.rows.resize(cluster_rows + result.leftover.size());
  plan.coin_egos.resize(ncl);
  plan.coin_treated.resize(ncl);

  // Every slot below is written exactly once from its own (cluster, member)
  // key, so the parallel and serial paths produce identical bytes.
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(ncl); ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    const EgoCluster& cluster = result.clusters[c];
    const bool coin = rng::keyed_coin(seed, rng::kAlterCoin, cluster.ego, p);
    const Variant alter_variant = coin ? Variant::treated : Variant::control;
    plan.coin_egos[c] = cluster.ego;
    plan.coin_treated[c] = coin ? 1 : 0;
    PlanRow* slot = plan.rows.data() + offset[c];
    *slot++ = {cluster.ego, ego_variant(mode, coin, p, seed, cluster.ego), MemberRole::ego,
               cluster.ego};
    for (MemberId a : cluster.cluster_alters) {
      *slot++ = {a, alter_variant, MemberRole::alter, cluster.ego};
    }
  }

#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t li = 0; li < static_cast<std::ptrdiff_t>(result.leftover.size()); ++li) {
    const MemberId m = result.leftover[static_cast<std::size_t>(li)];
    const bool coin = rng::keyed_coin(seed, rng::kLeftoverCoin, m, p);
    plan.rows[cluster_rows + static_cast<std::size_t>(li)] = {
        m, coin ? Variant::treated : Variant::control, MemberRole::leftover, 0};
  }

  std::sort(plan.rows.begin(), plan.rows.end(),
            [](const PlanRow& a, const PlanRow& b) { return a.member < b.member; });
  // Clusters arrive in draw order; coins are keyed per ego, so sorting the
  // id/coin pair lists keeps them aligned.
  std::vector<std::size_t> order(ncl);
  for (std::size_t i = 0; i < ncl; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return plan.coin_egos[a] < plan.coin_egos[b]; });
  std::vector<MemberId> egos(ncl);
  std::vector<std::uint8_t> coins(ncl);
  for (std::size_t i = 0; i < ncl; ++i) {
    egos[i] = plan.coin_egos[order[i]];
    coins[i] = plan.coin_treated[order[i]];
  }
  plan.coin_egos = std::move(egos);
  plan.coin_treated = std::move(coins);
  return plan;
}

}  // namespace

AssignmentPlan assign(const ClusteringResult& result, EgoMode mode, double p,
                      std::uint64_t seed) {
  return assign_impl<true>(result, mode, p, seed);
}

AssignmentPlan assign_serial(const ClusteringResult& result, EgoMode mode, double p,
                             std::uint64_t seed) {
  return assign_impl<false>(result, mode, p, seed);
}

namespace {

template <bool Parallel>
std::vector<ExposureRow> exposures_impl(const AssignmentPlan& plan, const Graph& g,
                                        const ClusteringResult& result) {
  if (plan.rows.size() != g.node_count()) {
    throw ValidationError("plan does not cover the graph exactly");
  }
  std::vector<std::uint8_t> treated(g.node_count(), 0);
  for (const PlanRow& r : plan.rows) {
    treated[g.index_of(r.member)] = r.variant == Variant::treated ? 1 : 0;
  }

  std::vector<ExposureRow> rows(result.clusters.size());
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(result.clusters.size()); ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    const EgoCluster& cluster = result.clusters[c];
    const NodeIndex e = g.index_of(cluster.ego);
    std::size_t n_treated = 0;
    for (NodeIndex nb : g.neighbors_at(e)) n_treated += treated[nb];
    const double a = cluster.loss_rate;
    const bool arm = plan.ego_coin(cluster.ego);
    const double p = plan.params.p;
    ExposureRow row;
    row.ego = cluster.ego;
    row.alters_treated = arm;
    row.loss_rate = a;
    row.realized_p = static_cast<double>(n_treated) / static_cast<double>(g.degree_at(e));
    row.expected_p = arm ? (1.0 - a) + p * a : p * a;
    rows[c] = row;
  }
  std::sort(rows.begin(), rows.end(),
            [](const ExposureRow& x, const ExposureRow& y) { return x.ego < y.ego; });
  return rows;
}

}  // namespace

std::vector<ExposureRow> compute_exposures(const AssignmentPlan& plan, const Graph& g,
                                           const ClusteringResult& result) {
  return exposures_impl<true>(plan, g, result);
}

std::vector<ExposureRow> compute_exposures_serial(const AssignmentPlan& plan, const Graph& g,
                                                  const ClusteringResult& result) {
  return exposures_impl<false>(plan, g, result);
}

ExposureSummary exposure_summary(const AssignmentPlan& plan, const Graph& g,
                                 const ClusteringResult& result) {
  ExposureSummary s;
  s.rows = compute_exposures(plan, g, result);
  s.p = plan.params.p;
  double loss_sum = 0.0;
  double tr = 0.0, te = 0.0, cr = 0.0, ce = 0.0;
  for (const ExposureRow& r : s.rows) {
    loss_sum += r.loss_rate;
    if (r.alters_treated) {
      ++s.n_treated_arm;
      tr += r.realized_p;
      te += r.expected_p;
    } else {
      ++s.n_control_arm;
      cr += r.realized_p;
      ce += r.expected_p;
    }
  }
  if (!s.rows.empty()) s.mean_loss = loss_sum / static_cast<double>(s.rows.size());
  if (s.n_treated_arm > 0) {
    s.treated_mean_realized = tr / static_cast<double>(s.n_treated_arm);
    s.treated_mean_expected = te / static_cast<double>(s.n_treated_arm);
  }
  if (s.n_control_arm > 0) {
    s.control_mean_realized = cr / static_cast<double>(s.n_control_arm);
    s.control_mean_expected = ce / static_cast<double>(s.n_control_arm);
  }
  s.arm_gap_realized = s.treated_mean_realized - s.control_mean_realized;
  s.arm_gap_expected = s.treated_mean_expected - s.control_mean_expected;
  return s;
}

void write_plan_tsv(std::ostream& out, const AssignmentPlan& plan) {
  out << "member_id\tvariant\trole\tego_id\n";
  for (const PlanRow& r : plan.rows) {
    out << r.member << '\t' << to_string(r.variant) << '\t' << to_string(r.role) << '\t';
    if (r.role != MemberRole::leftover) out << r.ego;
    out << '\n';
  }
}

AssignmentPlan read_plan(std::istream& in, const AssignmentParams& params) {
  AssignmentPlan plan;
  plan.params = params;
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
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // split on tabs, keeping empty trailing fields (leftover rows)
    std::vector<std::string_view> f;
    std::string_view sv = line;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = sv.find('\t', start);
      f.push_back(sv.substr(start, tab == std::string_view::npos ? sv.size() - start
                                                                 : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (f.size() != 4) throw ParseError("plan.tsv", line_no, "expected 4 fields");
    PlanRow r;
    auto [p1, e1] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), r.member);
    if (e1 != std::errc{}) throw ParseError("plan.tsv", line_no, "bad member id");
    if (f[1] == "TREATED") {
      r.variant = Variant::treated;
    } else if (f[1] == "CONTROL") {
      r.variant = Variant::control;
    } else {
      throw ParseError("plan.tsv", line_no, "bad variant");
    }
    if (f[2] == "EGO") {
      r.role = MemberRole::ego;
    } else if (f[2] == "ALTER") {
      r.role = MemberRole::alter;
    } else if (f[2] == "LEFTOVER") {
      r.role = MemberRole::leftover;
    } else {
      throw ParseError("plan.tsv", line_no, "bad role");
    }
    if (r.role != MemberRole::leftover) {
      if (f[3].empty()) throw ParseError("plan.tsv", line_no, "missing ego id");
      auto [p2, e2] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), r.ego);
      if (e2 != std::errc{}) throw ParseError("plan.tsv", line_no, "bad ego id");
    }
    plan.rows.push_back(r);
  }
  std::sort(plan.rows.begin(), plan.rows.end(),
            [](const PlanRow& a, const PlanRow& b) { return a.member < b.member; });

  // Rebuild the ego coins from the keyed hash and confirm the file agrees;
  // a plan file edited out of band fails loudly here.
  for (const PlanRow& r : plan.rows) {
    if (r.role != MemberRole::ego) continue;
    const bool coin = rng::keyed_coin(params.seed, rng::kAlterCoin, r.member, params.p);
    plan.coin_egos.push_back(r.member);
    plan.coin_treated.push_back(coin ? 1 : 0);
  }
  for (const PlanRow& r : plan.rows) {
    if (r.role != MemberRole::alter) continue;
    const bool coin = plan.ego_coin(r.ego);
    if ((r.variant == Variant::treated) != coin) {
      throw ValidationError("plan file inconsistent with its parameters (member " +
                            std::to_string(r.member) + ")");
    }
  }
  return plan;
}

void write_exposures_tsv(std::ostream& out, const ExposureSummary& summary) {
  out << "ego_id\talters_treated\tloss_rate\trealized_p\texpected_p\n";
  for (const ExposureRow& r : summary.rows) {
    out << r.ego << '\t' << (r.alters_treated ? 1 : 0) << '\t' << io::fmt_double(r.loss_rate)
        << '\t' << io::fmt_double(r.realized_p) << '\t' << io::fmt_double(r.expected_p) << '\n';
  }
}

std::string exposure_json(const ExposureSummary& s) {
  nlohmann::json j;
  j["p"] = s.p;
  j["mean_loss"] = s.mean_loss;
  j["treated_arm"] = {{"n", s.n_treated_arm},
                      {"mean_realized_p", s.treated_mean_realized},
                      {"mean_expected_p", s.treated_mean_expected}};
  j["control_arm"] = {{"n", s.n_control_arm},
                      {"mean_realized_p", s.control_mean_realized},
                      {"mean_expected_p", s.control_mean_expected}};
  j["arm_gap_realized"] = s.arm_gap_realized;
  j["arm_gap_expected"] = s.arm_gap_expected;
  return j.dump(2) + "\n";
}

}  // namespace egonet
