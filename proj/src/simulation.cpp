#include "egonet/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <utility>

#include "egonet/errors.hpp"
#include "egonet/io.hpp"
#include "egonet/rng.hpp"
#include "egonet/stats.hpp"

#include "json.hpp"

namespace egonet {

std::string_view to_string(GraphKind k) {
  switch (k) {
    case GraphKind::erdos_renyi: return "erdos-renyi";
    case GraphKind::power_law: return "power-law";
    case GraphKind::disjoint_stars: return "disjoint-stars";
  }
  return "?";
}

std::string_view to_string(ResponseShape s) {
  switch (s) {
    case ResponseShape::linear: return "linear";
    case ResponseShape::sqrt_root: return "sqrt";
    case ResponseShape::square: return "square";
  }
  return "?";
}

std::string_view to_string(NoiseKind n) {
  return n == NoiseKind::gaussian ? "gaussian" : "lognormal";
}

GraphKind graph_kind_from_string(std::string_view s) {
  if (s == "erdos-renyi" || s == "er") return GraphKind::erdos_renyi;
  if (s == "power-law") return GraphKind::power_law;
  if (s == "disjoint-stars" || s == "stars") return GraphKind::disjoint_stars;
  throw ValidationError("unknown graph kind: " + std::string(s));
}

ResponseShape response_shape_from_string(std::string_view s) {
  if (s == "linear") return ResponseShape::linear;
  if (s == "sqrt") return ResponseShape::sqrt_root;
  if (s == "square") return ResponseShape::square;
  throw ValidationError("unknown response shape: " + std::string(s));
}

NoiseKind noise_kind_from_string(std::string_view s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "lognormal") return NoiseKind::lognormal;
  throw ValidationError("unknown noise kind: " + std::string(s));
}

namespace {

double draw_weight(const WeightSpec& w, rng::Rng& r) {
  switch (w.kind) {
    case WeightSpec::Kind::unit:
      return 1.0;
    case WeightSpec::Kind::uniform: {
      double v = w.lo + r.unit() * (w.hi - w.lo);
      if (v <= 0.0) v = w.lo;  // guard against lo == 0 draws
      return v;
    }
    case WeightSpec::Kind::exponential: {
      double v = r.exponential(w.mean);
      while (v <= 0.0) v = r.exponential(w.mean);
      return v;
    }
  }
  return 1.0;
}

void validate_weights(const WeightSpec& w) {
  switch (w.kind) {
    case WeightSpec::Kind::unit:
      return;
    case WeightSpec::Kind::uniform:
      if (!(w.lo > 0.0 && w.hi >= w.lo)) {
        throw ValidationError("uniform weights need 0 < lo <= hi");
      }
      return;
    case WeightSpec::Kind::exponential:
      if (!(w.mean > 0.0)) throw ValidationError("exponential weights need mean > 0");
      return;
  }
}

Graph erdos_renyi(const GraphSpec& spec) {
  const std::size_t n = spec.node_count;
  if (n < 2) throw ValidationError("erdos-renyi needs node_count >= 2");
  if (!(spec.mean_degree > 0.0 && spec.mean_degree < static_cast<double>(n - 1))) {
    throw ValidationError("erdos-renyi needs 0 < mean_degree < node_count - 1");
  }
  const double p = spec.mean_degree / static_cast<double>(n - 1);
  rng::Rng r(rng::mix(spec.seed, rng::kGraphGen));

  // Batagelj-Brandes skip sampling over the lower triangle: geometric gaps
  // between edges instead of n^2 coin flips.
  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(spec.mean_degree * static_cast<double>(n) * 0.6));
  const double log1mp = std::log(1.0 - p);
  std::size_t v = 1;
  std::ptrdiff_t w = -1;
  while (v < n) {
    double u = r.unit();
    while (u <= 0.0) u = r.unit();
    w += 1 + static_cast<std::ptrdiff_t>(std::floor(std::log(u) / log1mp));
    while (w >= static_cast<std::ptrdiff_t>(v) && v < n) {
      w -= static_cast<std::ptrdiff_t>(v);
      ++v;
    }
    if (v < n) {
      edges.push_back({static_cast<MemberId>(v + 1), static_cast<MemberId>(w + 1), 1.0});
    }
  }
  for (WeightedEdge& e : edges) e.weight = draw_weight(spec.weights, r);
  return Graph::from_edges(edges);
}

Graph power_law(const GraphSpec& spec) {
  const std::size_t n = spec.node_count;
  if (n < 2) throw ValidationError("power-law needs node_count >= 2");
  if (!(spec.exponent > 1.0)) throw ValidationError("power-law needs exponent > 1");
  const std::size_t d_min = spec.min_degree;
  std::size_t d_max = spec.max_degree == 0 ? std::min(n - 1, std::size_t{1000}) : spec.max_degree;
  if (d_min < 1 || d_max < d_min) throw ValidationError("power-law needs 1 <= min_degree <= max_degree");
  if (d_max >= n) throw ValidationError("power-law degree cap must be below node_count");

  // Discrete degree distribution P(d) proportional to d^-exponent on
  // [d_min, d_max], sampled through its cumulative table.
  std::vector<double> cdf(d_max - d_min + 1);
  double acc = 0.0;
  for (std::size_t d = d_min; d <= d_max; ++d) {
    acc += std::pow(static_cast<double>(d), -spec.exponent);
    cdf[d - d_min] = acc;
  }
  for (double& c : cdf) c /= acc;

  rng::Rng r(rng::mix(spec.seed, rng::kGraphGen));
  std::vector<std::size_t> degree(n);
  std::size_t stub_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = r.unit();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    degree[i] = d_min + static_cast<std::size_t>(it - cdf.begin());
    stub_count += degree[i];
  }
  if (stub_count % 2 == 1) {
    // Pair parity: add one stub somewhere it will not breach the cap.
    for (;;) {
      const auto i = static_cast<std::size_t>(r.below(n));
      if (degree[i] < d_max) {
        ++degree[i];
        ++stub_count;
        break;
      }
    }
  }

  // Erased configuration model: shuffle the stub list, pair consecutive
  // stubs, and drop self-loops and repeated pairs.
  std::vector<NodeIndex> stubs;
  stubs.reserve(stub_count);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < degree[i]; ++k) stubs.push_back(static_cast<NodeIndex>(i));
  }
  r.shuffle(stubs);
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  std::vector<WeightedEdge> edges;
  edges.reserve(stub_count / 2);
  for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
    NodeIndex a = stubs[k], b = stubs[k + 1];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    edges.push_back({static_cast<MemberId>(a) + 1, static_cast<MemberId>(b) + 1, 1.0});
  }
  if (edges.empty()) throw ValidationError("power-law spec produced no edges");
  for (WeightedEdge& e : edges) e.weight = draw_weight(spec.weights, r);
  return Graph::from_edges(edges);
}

Graph disjoint_stars(const GraphSpec& spec) {
  if (spec.star_count < 1 || spec.leaves < 1) {
    throw ValidationError("disjoint-stars needs star_count >= 1 and leaves >= 1");
  }
  rng::Rng r(rng::mix(spec.seed, rng::kGraphGen));
  std::vector<WeightedEdge> edges;
  edges.reserve(spec.star_count * spec.leaves);
  const std::size_t stride = spec.leaves + 1;
  for (std::size_t s = 0; s < spec.star_count; ++s) {
    const MemberId center = static_cast<MemberId>(s * stride) + 1;
    for (std::size_t l = 1; l <= spec.leaves; ++l) {
      edges.push_back({center, center + l, draw_weight(spec.weights, r)});
    }
  }
  return Graph::from_edges(edges);
}

}  // namespace

Graph generate_graph(const GraphSpec& spec) {
  validate_weights(spec.weights);
  switch (spec.kind) {
    case GraphKind::erdos_renyi: return erdos_renyi(spec);
    case GraphKind::power_law: return power_law(spec);
    case GraphKind::disjoint_stars: return disjoint_stars(spec);
  }
  throw ValidationError("unknown graph kind");
}

double response_value(ResponseShape shape, double p) {
  switch (shape) {
    case ResponseShape::linear: return p;
    case ResponseShape::sqrt_root: return std::sqrt(p);
    case ResponseShape::square: return p * p;
  }
  return p;
}

namespace {

double noise_value(const OutcomeModel& model, std::uint64_t seed, MemberId member) {
  if (model.sigma == 0.0) return 0.0;
  const double z = rng::keyed_normal(seed, rng::kNoise, member);
  switch (model.noise) {
    case NoiseKind::gaussian:
      return model.sigma * z;
    case NoiseKind::lognormal:
      // Centered lognormal: mean zero, right-skewed, heavier tail than the
      // gaussian with the same sigma parameter.
      return std::exp(model.sigma * z) - std::exp(model.sigma * model.sigma / 2.0);
  }
  return 0.0;
}

template <bool Parallel>
OutcomeTable simulate_impl(const Graph& g, const AssignmentPlan& plan, const OutcomeModel& model,
                           std::uint64_t seed, const std::string& metric_name) {
  if (plan.rows.size() != g.node_count()) {
    throw ValidationError("plan does not cover every node of the graph");
  }
  const std::size_t n = g.node_count();
  std::vector<std::uint8_t> treated(n, 0);
  for (const PlanRow& r : plan.rows) {
    treated[g.index_of(r.member)] = r.variant == Variant::treated ? 1 : 0;
  }

  std::vector<double> outcome(n, 0.0);
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<NodeIndex>(ii);
    const double z = treated[i] != 0 ? 1.0 : 0.0;
    const std::size_t d = g.degree_at(i);
    double p_i = 0.0;
    if (d > 0) {
      std::size_t t = 0;
      for (NodeIndex nb : g.neighbors_at(i)) t += treated[nb];
      p_i = static_cast<double>(t) / static_cast<double>(d);
    }
    outcome[i] = model.beta0 + model.beta_d * z +
                 model.beta_n * response_value(model.shape, p_i) +
                 noise_value(model, seed, g.id_at(i));
  }

  return OutcomeTable(g.ids(), {metric_name}, {std::move(outcome)});
}

}  // namespace

OutcomeTable simulate_outcomes(const Graph& g, const AssignmentPlan& plan,
                               const OutcomeModel& model, std::uint64_t seed,
                               const std::string& metric_name) {
  return simulate_impl<true>(g, plan, model, seed, metric_name);
}

OutcomeTable simulate_outcomes_serial(const Graph& g, const AssignmentPlan& plan,
                                      const OutcomeModel& model, std::uint64_t seed,
                                      const std::string& metric_name) {
  return simulate_impl<false>(g, plan, model, seed, metric_name);
}

namespace {

ReplicationResult run_replication(const StudyParams& params, std::size_t rep) {
  const std::uint64_t rep_seed =
      rng::mix(params.seed, rng::kReplication, static_cast<std::uint64_t>(rep));
  GraphSpec gspec = params.graph;
  gspec.seed = rng::mix(rep_seed, rng::kStudyGraph);
  const Graph g = generate_graph(gspec);

  ClusteringResult clusters =
      stratified_cluster(g, params.target_loss, params.bin_count,
                         rng::mix(rep_seed, rng::kStudyCluster));
  clusters = reattach_alters(g, clusters);

  const AssignmentPlan plan =
      assign_serial(clusters, params.mode, params.p, rng::mix(rep_seed, rng::kStudyAssign));
  const OutcomeTable outcomes =
      simulate_outcomes_serial(g, plan, params.model, rng::mix(rep_seed, rng::kStudyNoise));
  const std::vector<TTestResult> tests = analyze_experiment(plan, outcomes, {"outcome"});

  ReplicationResult res;
  res.estimate = tests[0].mean_a - tests[0].mean_b;
  res.p_value = tests[0].p_value;
  res.egos = clusters.clusters.size();
  double loss_sum = 0.0;
  for (const EgoCluster& c : clusters.clusters) loss_sum += c.loss_rate;
  res.mean_loss = loss_sum / static_cast<double>(clusters.clusters.size());
  return res;
}

template <bool Parallel>
AttenuationReport attenuation_impl(const StudyParams& params) {
  if (params.replications < 30) throw ValidationError("attenuation_study needs >= 30 replications");
  AttenuationReport report;
  report.reps.resize(params.replications);

  // Each replication is self-contained and lands in its own slot; the
  // aggregate below reads them in index order either way.
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(params.replications); ++r) {
    report.reps[static_cast<std::size_t>(r)] = run_replication(params, static_cast<std::size_t>(r));
  }

  std::vector<double> estimates;
  estimates.reserve(report.reps.size());
  double loss_sum = 0.0;
  for (const ReplicationResult& r : report.reps) {
    estimates.push_back(r.estimate);
    loss_sum += r.mean_loss;
  }
  report.mean_estimate = stats::mean(estimates);
  report.se_estimate = std::sqrt(stats::sample_variance(estimates, report.mean_estimate) /
                                 static_cast<double>(estimates.size()));
  report.mean_loss = loss_sum / static_cast<double>(report.reps.size());
  report.theoretical = params.model.beta_n * (1.0 - report.mean_loss);
  report.ratio = params.model.beta_n != 0.0 ? report.mean_estimate / params.model.beta_n : 0.0;
  return report;
}

}  // namespace

AttenuationReport attenuation_study(const StudyParams& params) {
  return attenuation_impl<true>(params);
}

AttenuationReport attenuation_study_serial(const StudyParams& params) {
  return attenuation_impl<false>(params);
}

namespace {

void add_losses(LossHistogram& h, const std::vector<double>& losses, std::size_t hist_bins) {
  if (h.counts.empty()) h.counts.assign(hist_bins, 0);
  double sum = 0.0;
  for (double l : losses) {
    auto bin = static_cast<std::size_t>(l * static_cast<double>(hist_bins));
    if (bin >= hist_bins) bin = hist_bins - 1;
    ++h.counts[bin];
    sum += l;
    h.max = std::max(h.max, l);
  }
  // Running mean across seeds, weighted by count.
  const std::size_t new_total = h.total + losses.size();
  if (new_total > 0) {
    h.mean = (h.mean * static_cast<double>(h.total) + sum) / static_cast<double>(new_total);
  }
  h.total = new_total;
}

}  // namespace

ComparisonReport naive_vs_stratified_study(const ComparisonParams& params) {
  if (params.seeds.size() < 5) {
    throw ValidationError("naive_vs_stratified_study needs at least 5 seeds");
  }
  ComparisonReport report;
  for (const std::uint64_t s : params.seeds) {
    GraphSpec gspec = params.graph;
    gspec.seed = rng::mix(s, rng::kStudyGraph);
    const Graph g = generate_graph(gspec);

    const ClusteringResult naive =
        naive_cluster(g, params.stop_loss, params.window, rng::mix(s, rng::kStudyCluster, 0));
    ClusteringResult strat =
        stratified_cluster(g, params.target_loss, params.bin_count,
                           rng::mix(s, rng::kStudyCluster, 1));
    strat = reattach_alters(g, strat);

    std::vector<double> naive_losses;
    naive_losses.reserve(naive.clusters.size());
    for (const EgoCluster& c : naive.clusters) naive_losses.push_back(c.loss_rate);
    const std::size_t k = std::min(params.early_k, naive_losses.size());
    const std::vector<double> early(naive_losses.begin(),
                                    naive_losses.begin() + static_cast<std::ptrdiff_t>(k));
    const std::vector<double> late(naive_losses.end() - static_cast<std::ptrdiff_t>(k),
                                   naive_losses.end());
    std::vector<double> strat_losses;
    strat_losses.reserve(strat.clusters.size());
    for (const EgoCluster& c : strat.clusters) strat_losses.push_back(c.loss_rate);

    add_losses(report.naive_early, early, params.hist_bins);
    add_losses(report.naive_late, late, params.hist_bins);
    add_losses(report.stratified, strat_losses, params.hist_bins);
    report.per_seed_naive_early_mean.push_back(stats::mean(early));
    report.per_seed_naive_late_mean.push_back(stats::mean(late));
    report.per_seed_stratified_mean.push_back(stats::mean(strat_losses));
  }
  return report;
}

namespace {

nlohmann::json graph_spec_json(const GraphSpec& g) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(g.kind));
  j["node_count"] = g.node_count;
  j["mean_degree"] = g.mean_degree;
  j["exponent"] = g.exponent;
  j["min_degree"] = g.min_degree;
  j["max_degree"] = g.max_degree;
  j["star_count"] = g.star_count;
  j["leaves"] = g.leaves;
  j["seed"] = g.seed;
  switch (g.weights.kind) {
    case WeightSpec::Kind::unit:
      j["weights"] = {{"kind", "unit"}};
      break;
    case WeightSpec::Kind::uniform:
      j["weights"] = {{"kind", "uniform"}, {"lo", g.weights.lo}, {"hi", g.weights.hi}};
      break;
    case WeightSpec::Kind::exponential:
      j["weights"] = {{"kind", "exponential"}, {"mean", g.weights.mean}};
      break;
  }
  return j;
}

nlohmann::json model_json(const OutcomeModel& m) {
  return {{"beta0", m.beta0},
          {"beta_d", m.beta_d},
          {"beta_n", m.beta_n},
          {"sigma", m.sigma},
          {"shape", std::string(to_string(m.shape))},
          {"noise", std::string(to_string(m.noise))}};
}

GraphSpec graph_spec_from_json(const nlohmann::json& j) {
  GraphSpec g;
  g.kind = graph_kind_from_string(j.at("kind").get<std::string>());
  g.node_count = j.value("node_count", std::size_t{0});
  g.mean_degree = j.value("mean_degree", 0.0);
  g.exponent = j.value("exponent", 2.5);
  g.min_degree = j.value("min_degree", std::size_t{1});
  g.max_degree = j.value("max_degree", std::size_t{0});
  g.star_count = j.value("star_count", std::size_t{0});
  g.leaves = j.value("leaves", std::size_t{0});
  g.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    const auto kind = w.at("kind").get<std::string>();
    if (kind == "unit") {
      g.weights.kind = WeightSpec::Kind::unit;
    } else if (kind == "uniform") {
      g.weights.kind = WeightSpec::Kind::uniform;
      g.weights.lo = w.at("lo").get<double>();
      g.weights.hi = w.at("hi").get<double>();
    } else if (kind == "exponential") {
      g.weights.kind = WeightSpec::Kind::exponential;
      g.weights.mean = w.at("mean").get<double>();
    } else {
      throw ValidationError("unknown weight kind: " + kind);
    }
  }
  return g;
}

OutcomeModel model_from_json(const nlohmann::json& j) {
  OutcomeModel m;
  m.beta0 = j.value("beta0", 0.0);
  m.beta_d = j.value("beta_d", 0.0);
  m.beta_n = j.value("beta_n", 0.0);
  m.sigma = j.value("sigma", 0.0);
  if (m.sigma < 0.0) throw ValidationError("sigma must be non-negative");
  if (j.contains("shape")) m.shape = response_shape_from_string(j.at("shape").get<std::string>());
  if (j.contains("noise")) m.noise = noise_kind_from_string(j.at("noise").get<std::string>());
  return m;
}

}  // namespace

std::string attenuation_report_json(const StudyParams& params, const AttenuationReport& report) {
  nlohmann::json j;
  j["study"] = "attenuation";
  j["params"] = {{"graph", graph_spec_json(params.graph)},
                 {"model", model_json(params.model)},
                 {"target_loss", params.target_loss},
                 {"bin_count", params.bin_count},
                 {"p", params.p},
                 {"replications", params.replications},
                 {"seed", params.seed},
                 {"mode", std::string(to_string(params.mode))}};
  j["mean_estimate"] = report.mean_estimate;
  j["se_estimate"] = report.se_estimate;
  j["mean_loss"] = report.mean_loss;
  j["theoretical_attenuated"] = report.theoretical;
  j["ratio_vs_beta_n"] = report.ratio;
  j["replications"] = nlohmann::json::array();
  for (const ReplicationResult& r : report.reps) {
    j["replications"].push_back({{"estimate", r.estimate},
                                 {"p_value", r.p_value},
                                 {"mean_loss", r.mean_loss},
                                 {"egos", r.egos}});
  }
  return j.dump(2) + "\n";
}

std::string comparison_report_json(const ComparisonParams& params,
                                   const ComparisonReport& report) {
  nlohmann::json j;
  j["study"] = "naive-vs-stratified";
  j["params"] = {{"graph", graph_spec_json(params.graph)},
                 {"seeds", params.seeds},
                 {"stop_loss", params.stop_loss},
                 {"window", params.window},
                 {"early_k", params.early_k},
                 {"target_loss", params.target_loss},
                 {"bin_count", params.bin_count},
                 {"hist_bins", params.hist_bins}};
  auto hist = [](const LossHistogram& h) {
    return nlohmann::json{
        {"counts", h.counts}, {"total", h.total}, {"mean", h.mean}, {"max", h.max}};
  };
  j["naive_early"] = hist(report.naive_early);
  j["naive_late"] = hist(report.naive_late);
  j["stratified"] = hist(report.stratified);
  j["per_seed_means"] = {{"naive_early", report.per_seed_naive_early_mean},
                         {"naive_late", report.per_seed_naive_late_mean},
                         {"stratified", report.per_seed_stratified_mean}};
  return j.dump(2) + "\n";
}

void write_histograms_tsv(std::ostream& out, const ComparisonReport& report,
                          std::size_t hist_bins) {
  out << "bin_lo\tbin_hi\tnaive_early\tnaive_late\tstratified\n";
  for (std::size_t b = 0; b < hist_bins; ++b) {
    const double lo = static_cast<double>(b) / static_cast<double>(hist_bins);
    const double hi = static_cast<double>(b + 1) / static_cast<double>(hist_bins);
    out << io::fmt_double(lo) << '\t' << io::fmt_double(hi) << '\t'
        << (report.naive_early.counts.empty() ? 0 : report.naive_early.counts[b]) << '\t'
        << (report.naive_late.counts.empty() ? 0 : report.naive_late.counts[b]) << '\t'
        << (report.stratified.counts.empty() ? 0 : report.stratified.counts[b]) << '\n';
  }
}

StudyParams study_params_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    StudyParams p;
    p.graph = graph_spec_from_json(j.at("graph"));
    p.model = model_from_json(j.at("model"));
    p.target_loss = j.value("target_loss", 0.2);
    p.bin_count = j.value("bin_count", std::size_t{20});
    p.p = j.value("p", 0.5);
    p.replications = j.value("replications", std::size_t{100});
    p.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mode")) p.mode = ego_mode_from_string(j.at("mode").get<std::string>());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid study config: ") + e.what());
  }
}

ComparisonParams comparison_params_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    ComparisonParams p;
    p.graph = graph_spec_from_json(j.at("graph"));
    p.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    p.stop_loss = j.value("stop_loss", 1.0);
    p.window = j.value("window", std::size_t{20});
    p.early_k = j.value("early_k", std::size_t{200});
    p.target_loss = j.value("target_loss", 0.2);
    p.bin_count = j.value("bin_count", std::size_t{20});
    p.hist_bins = j.value("hist_bins", std::size_t{20});
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid study config: ") + e.what());
  }
}

GraphSpec graph_spec_from_json_text(const std::string& text) {
  try {
    return graph_spec_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid graph spec: ") + e.what());
  }
}

}  // namespace egonet
