// Acceptance gate: one line per criterion, [PASS] or [FAIL], nonzero exit if
// anything fails. Tolerances are pinned in code next to each check.
//
//   1. Hard loss-rate cap on large power-law graphs, under 60 s per graph.
//   2. Naive-sampler degradation: rising loss, rising collision rate,
//      falling ego degree over the run.
//   3. Ego representativity on a homogeneous graph: SMD < 0.05 and a
//      calibrated t-test rejection rate in [1%, 12%] across 100 seeds.
//   4. Welch t-test against an independent numeric-integration oracle.
//   5. A/A p-values uniform (KS at the 1% level) over 200 null pipelines.
//   6. Attenuation law: exact on stars, (1 - mean loss) scaling on
//      power-law graphs, conservative for every monotone response shape.
//   7. Assignment mode contracts, exhaustively vs hand enumeration, plus
//      direct-effect recovery from the mode contrast.
//   8. Leftover population skews low-degree in at least 95 of 100 seeds.
//   9. Byte-identical artifacts across repeated runs of every stage.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "egonet/analysis.hpp"
#include "egonet/assignment.hpp"
#include "egonet/clustering.hpp"
#include "egonet/graph.hpp"
#include "egonet/rng.hpp"
#include "egonet/simulation.hpp"
#include "egonet/stats.hpp"

using namespace egonet;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s — %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

void run_criterion(int index, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(index, name, pass, detail);
  } catch (const std::exception& e) {
    report(index, name, false, std::string("exception: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

GraphSpec power_law_spec(std::size_t n, std::size_t min_degree, std::uint64_t seed) {
  GraphSpec s;
  s.kind = GraphKind::power_law;
  s.node_count = n;
  s.exponent = 2.5;
  s.min_degree = min_degree;
  s.seed = seed;
  return s;
}

GraphSpec er_spec(std::size_t n, double mean_degree, std::uint64_t seed) {
  GraphSpec s;
  s.kind = GraphKind::erdos_renyi;
  s.node_count = n;
  s.mean_degree = mean_degree;
  s.seed = seed;
  return s;
}

GraphSpec stars_spec(std::size_t stars, std::size_t leaves, std::uint64_t seed) {
  GraphSpec s;
  s.kind = GraphKind::disjoint_stars;
  s.star_count = stars;
  s.leaves = leaves;
  s.seed = seed;
  return s;
}

// Independent t-distribution oracle: adaptive Simpson over the density with
// the normalizer from std::lgamma. Shares nothing with the library path.
double t_density(double x, double df) {
  const double c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                   0.5 * std::log(df * std::acos(-1.0));
  return std::exp(c - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

double simpson(double a, double b, double df) {
  const double m = (a + b) / 2.0;
  return (b - a) / 6.0 * (t_density(a, df) + 4.0 * t_density(m, df) + t_density(b, df));
}

double integrate(double a, double b, double df, double whole, int depth) {
  const double m = (a + b) / 2.0;
  const double left = simpson(a, m, df);
  const double right = simpson(m, b, df);
  if (depth > 60 || std::abs(left + right - whole) < 1e-13) {
    return left + right + (left + right - whole) / 15.0;
  }
  return integrate(a, m, df, left, depth + 1) + integrate(m, b, df, right, depth + 1);
}

double oracle_two_sided_p(double t, double df) {
  const double a = std::abs(t);
  if (a == 0.0) return 1.0;
  if (std::isinf(a)) return 0.0;
  return 1.0 - 2.0 * integrate(0.0, a, df, simpson(0.0, a, df), 0);
}

// --------------------------------------------------------------------------
// 1. Loss-bound guarantee.
std::pair<bool, std::string> criterion_loss_bound() {
  double worst_loss = 0.0;
  double worst_time = 0.0;
  std::size_t violations = 0;
  std::size_t total_egos = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Graph g = generate_graph(power_law_spec(50000, 5, 1000 + seed));
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = reattach_alters(g, stratified_cluster(g, 0.2, 20, seed));
    const double elapsed = seconds_since(t0);
    worst_time = std::max(worst_time, elapsed);
    total_egos += result.clusters.size();
    for (const auto& c : result.clusters) {
      worst_loss = std::max(worst_loss, c.loss_rate);
      if (c.loss_rate > 0.2 + 1e-12) ++violations;
      const auto [loss, wloss] = recompute_loss(g, c);
      if (std::abs(loss - c.loss_rate) > 1e-12 ||
          std::abs(wloss - c.weighted_loss_rate) > 1e-12) {
        ++violations;
      }
    }
  }
  const bool pass = violations == 0 && worst_time < 60.0 && total_egos > 0;
  return {pass, "5 seeds, n=50000: max loss " + fmt(worst_loss) + " (cap 0.2), " +
                    std::to_string(violations) + " violations, worst cluster time " +
                    fmt(worst_time) + "s (limit 60s), " + std::to_string(total_egos) +
                    " egos total"};
}

// --------------------------------------------------------------------------
// 2. Naive degradation.
std::pair<bool, std::string> criterion_naive_degradation() {
  const Graph g = generate_graph(er_spec(50000, 15.0, 77));
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = naive_cluster(g, 1.0, 20, 7);
  const double elapsed = seconds_since(t0);
  const auto tables = diagnostics_report(result, 20);

  std::vector<double> idx, loss, degree;
  for (const auto& row : tables.rows) {
    if (row.collision) continue;
    idx.push_back(static_cast<double>(idx.size() + 1));
    loss.push_back(row.rolling_mean_loss);
    degree.push_back(row.rolling_mean_degree);
  }
  const double rho_loss = stats::spearman_rho(idx, loss);
  const double rho_degree = stats::spearman_rho(idx, degree);

  // Cumulative collision rate sampled at coarse checkpoints; the raw series
  // dips after every acceptance, the trend is what degrades.
  const auto& rows = tables.rows;
  bool collision_monotone = true;
  double prev = -1.0;
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    const auto at = static_cast<std::size_t>(frac * static_cast<double>(rows.size())) - 1;
    const double rate = rows[at].cumulative_collision_rate;
    if (rate < prev) collision_monotone = false;
    prev = rate;
  }

  const bool pass =
      rho_loss > 0.8 && rho_degree < -0.5 && collision_monotone && elapsed < 60.0;
  return {pass, "rolling-loss rho " + fmt(rho_loss) + " (need > 0.8), rolling-degree rho " +
                    fmt(rho_degree) + " (need < -0.5), collision rate " +
                    (collision_monotone ? "monotone" : "NOT monotone") +
                    " at quartile checkpoints, " + fmt(elapsed) + "s (limit 60s)"};
}

// --------------------------------------------------------------------------
// 3. Representativity.
std::pair<bool, std::string> criterion_representativity() {
  const Graph g = generate_graph(er_spec(10000, 12.0, 2024));

  // A fixed pre-experiment metric of pure member-keyed noise, independent of
  // the graph: ego selection must not skew variables it never looked at.
  std::vector<MemberId> members = g.ids();
  std::vector<double> noise;
  noise.reserve(members.size());
  for (MemberId id : members) {
    noise.push_back(rng::keyed_normal(4242, rng::kNoise, id));
  }
  const OutcomeTable pre(members, {"pre"}, {noise});

  // Degree is the stratification variable, so its check is on bias: each
  // run's SMD carries ~1/sqrt(egos) of noise and the stratified mean is far
  // more stable than an iid test assumes, hence the average over runs.
  // Test calibration at the 5% level is measured on the null metric, where
  // the ego subset is effectively a random sample.
  double smd_sum = 0.0;
  std::size_t rejections = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto result = reattach_alters(g, stratified_cluster(g, 0.2, 20, seed));
    const auto rep = representativity_check(result, g, &pre);
    smd_sum += rep.rows.front().smd_vs_eligible;
    if (rep.rows.at(1).p_vs_eligible < 0.05) ++rejections;
  }
  const double mean_smd = smd_sum / 100.0;
  const double rate = static_cast<double>(rejections) / 100.0;
  const bool pass = std::abs(mean_smd) < 0.05 && rate >= 0.01 && rate <= 0.12;
  return {pass, "100 seeds: mean degree SMD " + fmt(mean_smd) +
                    " (need |.| < 0.05), null-metric rejection rate " + fmt(rate) +
                    " (need within [0.01, 0.12])"};
}

// --------------------------------------------------------------------------
// 4. Welch oracle.
std::pair<bool, std::string> criterion_welch_oracle() {
  rng::Rng r(90210);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t na = 2 + r.below(39);
    const std::size_t nb = 2 + r.below(39);
    const double shift = r.unit() * 2.0 - 1.0;
    const double scale = 0.25 + 3.0 * r.unit();
    std::vector<double> a, b;
    for (std::size_t i = 0; i < na; ++i) a.push_back(r.normal());
    for (std::size_t i = 0; i < nb; ++i) b.push_back(shift + scale * r.normal());
    const auto res = welch_t_test(a, b);
    if (res.degenerate || std::isnan(res.df)) continue;
    const double want = oracle_two_sided_p(res.t_stat, res.df);
    worst = std::max(worst, std::abs(res.p_value - want));
  }

  const auto fixed = welch_t_test({1.0, 2.0, 3.0}, {2.0, 3.0, 4.0});
  const bool fixed_ok = std::abs(fixed.t_stat - (-1.2247)) < 1e-3 &&
                        std::abs(fixed.p_value - 0.2879) < 1e-3;
  const bool pass = worst < 1e-8 && fixed_ok;
  return {pass, "50 random samples: max |dp| " + fmt(worst) +
                    " (need < 1e-8); fixed example t=" + fmt(fixed.t_stat) +
                    ", p=" + fmt(fixed.p_value) + (fixed_ok ? " matches" : " MISMATCH")};
}

// --------------------------------------------------------------------------
// 5. A/A calibration.
std::pair<bool, std::string> criterion_aa_calibration() {
  StudyParams sp;
  sp.graph = er_spec(2000, 10.0, 31);
  sp.model.beta0 = 1.0;
  sp.model.beta_d = 0.0;
  sp.model.beta_n = 0.0;  // null: any detected effect is a calibration bug
  sp.model.sigma = 1.0;
  sp.target_loss = 0.2;
  sp.bin_count = 10;
  sp.replications = 200;
  sp.seed = 5150;
  const auto rep = attenuation_study(sp);
  std::vector<double> pvals;
  for (const auto& r : rep.reps) pvals.push_back(r.p_value);
  const double d = stats::ks_uniform_statistic(pvals);
  const double crit = stats::ks_uniform_critical(pvals.size(), 0.01);
  const bool pass = d < crit;
  return {pass, "200 null pipelines: KS " + fmt(d) + " vs critical " + fmt(crit) +
                    " at alpha 0.01"};
}

// --------------------------------------------------------------------------
// 6. Attenuation law.
std::pair<bool, std::string> criterion_attenuation() {
  // (a) Stars: zero loss, the estimate is beta_n itself.
  StudyParams stars;
  stars.graph = stars_spec(300, 5, 404);
  stars.model.beta0 = 1.0;
  stars.model.beta_n = 2.0;
  stars.model.sigma = 0.5;
  stars.target_loss = 0.0;
  stars.bin_count = 2;
  stars.replications = 150;
  stars.seed = 11;
  const auto star_rep = attenuation_study(stars);
  const double star_err = std::abs(star_rep.mean_estimate - 2.0);
  const bool stars_ok = star_rep.mean_loss < 1e-12 && star_err <= 3.0 * star_rep.se_estimate;

  // (b) Power law: the estimate shrinks by exactly the realized mean loss.
  StudyParams pl;
  pl.graph = power_law_spec(3000, 5, 505);
  pl.model.beta0 = 1.0;
  pl.model.beta_n = 2.0;
  pl.model.sigma = 0.5;
  pl.target_loss = 0.3;
  pl.bin_count = 15;
  pl.replications = 120;
  pl.seed = 21;
  const auto pl_rep = attenuation_study(pl);
  const double expected = 2.0 * (1.0 - pl_rep.mean_loss);
  const double pl_err = std::abs(pl_rep.mean_estimate - expected);
  const bool pl_ok = pl_err <= 3.0 * pl_rep.se_estimate && pl_rep.mean_loss > 0.05;

  // (c) Conservativeness: every monotone shape stays within |beta_n|.
  bool conservative = true;
  std::string shape_note;
  for (ResponseShape shape :
       {ResponseShape::linear, ResponseShape::sqrt_root, ResponseShape::square}) {
    StudyParams cp = pl;
    cp.model.shape = shape;
    cp.seed = 33 + static_cast<std::uint64_t>(shape);
    const auto crep = attenuation_study(cp);
    if (std::abs(crep.mean_estimate) > 2.0 + 3.0 * crep.se_estimate) conservative = false;
    shape_note += std::string(shape_note.empty() ? "" : "/") + fmt(crep.mean_estimate);
  }

  const bool pass = stars_ok && pl_ok && conservative;
  return {pass, "stars |est-2| " + fmt(star_err) + " vs 3SE " + fmt(3.0 * star_rep.se_estimate) +
                    "; power-law est " + fmt(pl_rep.mean_estimate) + " vs 2*(1-" +
                    fmt(pl_rep.mean_loss) + ")=" + fmt(expected) + " within 3SE " +
                    fmt(3.0 * pl_rep.se_estimate) + "; shape means " + shape_note +
                    (conservative ? " all <= |beta_n|+3SE" : " EXCEED |beta_n|+3SE")};
}

// --------------------------------------------------------------------------
// 7. Mode contracts.
std::pair<bool, std::string> criterion_mode_contracts() {
  // Hand fixture: three disjoint stars, 12 members, no leftover.
  ClusteringResult fixture;
  fixture.params = {"stratified", 0.0, 0, 1, 1, true};
  auto add = [&fixture](MemberId ego, std::vector<MemberId> alters) {
    EgoCluster c;
    c.ego = ego;
    c.cluster_alters = std::move(alters);
    c.original_degree = c.cluster_alters.size();
    c.loss_rate = 0.0;
    c.weighted_loss_rate = 0.0;
    fixture.clusters.push_back(std::move(c));
  };
  add(1, {2, 3, 4});
  add(5, {6, 7, 8});
  add(9, {10, 11, 12});
  const MemberId egos[3] = {1, 5, 9};

  // Cover all 2^3 coin patterns by seed search, then demand an exact match
  // with the enumerated truth for every member and mode.
  std::size_t patterns_seen = 0;
  bool seen[8] = {};
  bool exact = true;
  for (std::uint64_t seed = 0; seed < 20000 && patterns_seen < 8; ++seed) {
    const auto probe = assign(fixture, EgoMode::all_treated, 0.5, seed);
    std::size_t pattern = 0;
    for (int b = 0; b < 3; ++b) {
      if (probe.ego_coin(egos[b])) pattern |= (1u << b);
    }
    if (seen[pattern]) continue;
    seen[pattern] = true;
    ++patterns_seen;

    for (EgoMode mode : {EgoMode::all_treated, EgoMode::all_control, EgoMode::match_alters}) {
      const auto plan = assign(fixture, mode, 0.5, seed);
      if (plan.rows.size() != 12) exact = false;
      for (int b = 0; b < 3; ++b) {
        const bool coin = (pattern >> b) & 1u;
        const auto& c = fixture.clusters[static_cast<std::size_t>(b)];
        for (MemberId alter : c.cluster_alters) {
          const auto& row = plan.row_of(alter);
          if (row.role != MemberRole::alter || row.ego != c.ego) exact = false;
          if ((row.variant == Variant::treated) != coin) exact = false;
        }
        const auto& ego_row = plan.row_of(c.ego);
        if (ego_row.role != MemberRole::ego) exact = false;
        const bool ego_treated = ego_row.variant == Variant::treated;
        if (mode == EgoMode::all_treated && !ego_treated) exact = false;
        if (mode == EgoMode::all_control && ego_treated) exact = false;
        if (mode == EgoMode::match_alters && ego_treated != coin) exact = false;
      }
    }
  }

  // Direct-effect recovery: the match-alters arm contrast carries
  // beta_d + beta_n, the all-treated contrast carries beta_n alone.
  StudyParams base;
  base.graph = stars_spec(200, 4, 606);
  base.model.beta0 = 1.0;
  base.model.beta_d = 1.5;
  base.model.beta_n = 2.0;
  base.model.sigma = 0.5;
  base.target_loss = 0.0;
  base.bin_count = 2;
  base.replications = 100;
  base.seed = 40;
  StudyParams ma = base;
  ma.mode = EgoMode::match_alters;
  const auto rep_at = attenuation_study(base);
  const auto rep_ma = attenuation_study(ma);
  const double beta_d_hat = rep_ma.mean_estimate - rep_at.mean_estimate;
  const double se = std::sqrt(rep_ma.se_estimate * rep_ma.se_estimate +
                              rep_at.se_estimate * rep_at.se_estimate);
  const bool recovery = std::abs(beta_d_hat - 1.5) <= 3.0 * se;

  const bool pass = patterns_seen == 8 && exact && recovery;
  return {pass, std::to_string(patterns_seen) +
                    "/8 coin patterns exercised, hand enumeration " +
                    (exact ? "matches exactly" : "MISMATCH") + "; beta_d recovered " +
                    fmt(beta_d_hat) + " vs 1.5 within 3SE " + fmt(3.0 * se)};
}

// --------------------------------------------------------------------------
// 8. Leftover direction.
std::pair<bool, std::string> criterion_leftover_direction() {
  const Graph g = generate_graph(power_law_spec(5000, 3, 888));
  double population_mean = 0.0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    population_mean += static_cast<double>(g.degree_at(i));
  }
  population_mean /= static_cast<double>(g.node_count());

  std::size_t below = 0;
  std::size_t usable = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto result = reattach_alters(g, stratified_cluster(g, 0.2, 20, seed));
    if (result.leftover.empty()) continue;
    ++usable;
    double leftover_mean = 0.0;
    for (MemberId id : result.leftover) leftover_mean += static_cast<double>(g.degree(id));
    leftover_mean /= static_cast<double>(result.leftover.size());
    if (leftover_mean < population_mean) ++below;
  }
  const bool pass = usable == 100 && below >= 95;
  return {pass, std::to_string(below) + "/100 seeds have leftover mean degree below the " +
                    "population mean " + fmt(population_mean) + " (need >= 95)"};
}

// --------------------------------------------------------------------------
// 9. Determinism.
std::pair<bool, std::string> criterion_determinism() {
  std::vector<std::string> mismatches;
  auto check = [&mismatches](const std::string& stage, const std::string& a,
                             const std::string& b) {
    if (a != b) mismatches.push_back(stage);
  };

  const GraphSpec spec = power_law_spec(2000, 4, 99);
  const Graph g1 = generate_graph(spec);
  const Graph g2 = generate_graph(spec);
  std::ostringstream e1, e2;
  g1.write_edges_tsv(e1);
  g2.write_edges_tsv(e2);
  check("graph", e1.str(), e2.str());
  check("graph summary", g1.summary_json(), g2.summary_json());

  const auto c1 = reattach_alters(g1, stratified_cluster(g1, 0.2, 10, 3));
  const auto c2 = reattach_alters(g2, stratified_cluster(g2, 0.2, 10, 3));
  std::ostringstream ct1, ct2, lo1, lo2, dr1, dr2;
  write_clusters_tsv(ct1, c1);
  write_clusters_tsv(ct2, c2);
  write_leftover(lo1, c1);
  write_leftover(lo2, c2);
  write_draws_tsv(dr1, c1);
  write_draws_tsv(dr2, c2);
  check("clusters", ct1.str(), ct2.str());
  check("leftover", lo1.str(), lo2.str());
  check("draws", dr1.str(), dr2.str());
  check("clusters json", clusters_json(c1), clusters_json(c2));

  const auto p1 = assign(c1, EgoMode::all_treated, 0.5, 17);
  const auto p2 = assign(c2, EgoMode::all_treated, 0.5, 17);
  std::ostringstream pt1, pt2;
  write_plan_tsv(pt1, p1);
  write_plan_tsv(pt2, p2);
  check("plan", pt1.str(), pt2.str());

  std::ostringstream x1, x2;
  write_exposures_tsv(x1, exposure_summary(p1, g1, c1));
  write_exposures_tsv(x2, exposure_summary(p2, g2, c2));
  check("exposures", x1.str(), x2.str());

  OutcomeModel model;
  model.beta0 = 1.0;
  model.beta_d = 0.5;
  model.beta_n = 2.0;
  model.sigma = 0.5;
  const auto o1 = simulate_outcomes(g1, p1, model, 23);
  const auto o2 = simulate_outcomes(g2, p2, model, 23);
  std::ostringstream ot1, ot2;
  o1.write_tsv(ot1);
  o2.write_tsv(ot2);
  check("outcomes", ot1.str(), ot2.str());

  const auto a1 = build_analysis_report(p1, o1, {"outcome"}, nullptr, 0.05);
  const auto a2 = build_analysis_report(p2, o2, {"outcome"}, nullptr, 0.05);
  check("analysis json", analysis_report_json(a1), analysis_report_json(a2));
  check("representativity json", representativity_json(representativity_check(c1, g1, nullptr)),
        representativity_json(representativity_check(c2, g2, nullptr)));

  StudyParams sp;
  sp.graph = stars_spec(50, 3, 7);
  sp.model = model;
  sp.target_loss = 0.0;
  sp.bin_count = 2;
  sp.replications = 30;
  sp.seed = 3;
  check("study json", attenuation_report_json(sp, attenuation_study(sp)),
        attenuation_report_json(sp, attenuation_study(sp)));

  std::string detail = "all stages byte-identical across repeated runs";
  if (!mismatches.empty()) {
    detail = "mismatched stages:";
    for (const auto& m : mismatches) detail += " " + m;
  }
  return {mismatches.empty(), detail};
}

}  // namespace

int main() {
  run_criterion(1, "loss-bound guarantee", criterion_loss_bound);
  run_criterion(2, "naive degradation", criterion_naive_degradation);
  run_criterion(3, "representativity", criterion_representativity);
  run_criterion(4, "welch t-test oracle", criterion_welch_oracle);
  run_criterion(5, "A/A calibration", criterion_aa_calibration);
  run_criterion(6, "attenuation law", criterion_attenuation);
  run_criterion(7, "mode contracts", criterion_mode_contracts);
  run_criterion(8, "leftover direction", criterion_leftover_direction);
  run_criterion(9, "determinism", criterion_determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
