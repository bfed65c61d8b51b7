// egonet: ego-network cluster randomization toolkit.
//
// Pipeline: ingest -> cluster -> assign -> (simulate) -> analyze -> diagnose.
// Every artifact gets a `<name>.meta.json` sidecar with the full parameters
// and input content hashes, so downstream stages can recover how an artifact
// was produced and flag stale clusterings.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "egonet/analysis.hpp"
#include "egonet/assignment.hpp"
#include "egonet/clustering.hpp"
#include "egonet/errors.hpp"
#include "egonet/graph.hpp"
#include "egonet/io.hpp"
#include "egonet/simulation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t now_unix() {
  // SOURCE_DATE_EPOCH pins artifact timestamps for reproducible runs.
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::uint64_t>(v);
  }
  return static_cast<std::uint64_t>(std::time(nullptr));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw egonet::ValidationError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw egonet::ValidationError("write failed: " + path.string());
}

std::string hash_tag(const std::string& path) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, egonet::io::fnv1a_file(path));
  return std::string("fnv1a:") + buf;
}

void write_sidecar(const fs::path& artifact, const json& params,
                   const std::vector<std::string>& inputs) {
  json j;
  j["artifact"] = artifact.filename().string();
  j["created_unix"] = now_unix();
  j["params"] = params;
  json in = json::object();
  for (const std::string& p : inputs) in[p] = hash_tag(p);
  j["inputs"] = std::move(in);
  write_text(artifact.string() + ".meta.json", j.dump(2) + "\n");
}

std::optional<json> read_sidecar(const std::string& artifact) {
  const std::string path = artifact + ".meta.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception&) {
    std::cerr << "warning: unreadable sidecar " << path << "\n";
    return std::nullopt;
  }
}

fs::path ensure_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw egonet::ValidationError("cannot open: " + path);
  return in;
}

// ---------------------------------------------------------------- ingest --

struct IngestConfig {
  std::string edges;
  std::string out_dir;
};

int cmd_ingest(const IngestConfig& cfg) {
  const egonet::Graph g = egonet::Graph::load(cfg.edges);
  const fs::path out = ensure_out_dir(cfg.out_dir);

  std::ostringstream edges;
  g.write_edges_tsv(edges);
  const json params = {{"command", "ingest"}, {"edges", cfg.edges}};
  write_text(out / "graph.tsv", edges.str());
  write_sidecar(out / "graph.tsv", params, {cfg.edges});
  write_text(out / "graph_summary.json", g.summary_json());
  write_sidecar(out / "graph_summary.json", params, {cfg.edges});

  std::cout << "ingest: " << g.node_count() << " nodes, " << g.edge_count() << " edges -> "
            << out.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- cluster --

struct ClusterConfig {
  std::string edges;
  std::string out_dir;
  std::string algo = "stratified";
  std::uint64_t seed = 0;
  double target_loss = 0.2;
  std::size_t bins = 20;
  double stop_loss = 0.95;
  std::size_t window = 20;
  bool skip_reattach = false;
};

json clustering_params_json(const egonet::ClusteringParams& p) {
  return {{"algorithm", p.algorithm}, {"target_loss", p.target_loss},
          {"window", p.window},       {"bin_count", p.bin_count},
          {"seed", p.seed},           {"reattached", p.reattached}};
}

int cmd_cluster(const ClusterConfig& cfg) {
  const egonet::Graph g = egonet::Graph::load(cfg.edges);
  egonet::ClusteringResult result;
  if (cfg.algo == "naive") {
    result = egonet::naive_cluster(g, cfg.stop_loss, cfg.window, cfg.seed);
  } else if (cfg.algo == "stratified") {
    result = egonet::stratified_cluster(g, cfg.target_loss, cfg.bins, cfg.seed);
    if (!cfg.skip_reattach) result = egonet::reattach_alters(g, result);
  } else {
    throw egonet::ValidationError("unknown algorithm: " + cfg.algo);
  }

  const fs::path out = ensure_out_dir(cfg.out_dir);
  const json params = clustering_params_json(result.params);
  {
    std::ostringstream os;
    egonet::write_clusters_tsv(os, result);
    write_text(out / "clusters.tsv", os.str());
    write_sidecar(out / "clusters.tsv", params, {cfg.edges});
  }
  {
    std::ostringstream os;
    egonet::write_leftover(os, result);
    write_text(out / "leftover.txt", os.str());
    write_sidecar(out / "leftover.txt", params, {cfg.edges});
  }
  {
    std::ostringstream os;
    egonet::write_draws_tsv(os, result);
    write_text(out / "draws.tsv", os.str());
    write_sidecar(out / "draws.tsv", params, {cfg.edges});
  }
  write_text(out / "clusters.json", egonet::clusters_json(result));
  write_sidecar(out / "clusters.json", params, {cfg.edges});

  double mean_loss = 0.0, max_loss = 0.0;
  for (const auto& c : result.clusters) {
    mean_loss += c.loss_rate;
    max_loss = std::max(max_loss, c.loss_rate);
  }
  if (!result.clusters.empty()) mean_loss /= static_cast<double>(result.clusters.size());
  std::cout << "cluster: " << result.clusters.size() << " egos, mean loss " << mean_loss
            << ", max loss " << max_loss << ", " << result.leftover.size() << " leftover -> "
            << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- assign --

struct AssignConfig {
  std::string clusters;
  std::string leftover;
  std::string edges;  // optional; enables exposure artifacts
  std::string out_dir;
  std::string mode = "all-treated";
  double p = 0.5;
  std::uint64_t seed = 0;
  double max_age_days = 30.0;
};

egonet::ClusteringParams params_from_sidecar(const std::optional<json>& sidecar) {
  egonet::ClusteringParams p;
  if (!sidecar) return p;
  const json& pj = sidecar->value("params", json::object());
  p.algorithm = pj.value("algorithm", std::string{});
  p.target_loss = pj.value("target_loss", 0.0);
  p.window = pj.value("window", std::size_t{0});
  p.bin_count = pj.value("bin_count", std::size_t{0});
  p.seed = pj.value("seed", std::uint64_t{0});
  p.reattached = pj.value("reattached", false);
  return p;
}

int cmd_assign(const AssignConfig& cfg) {
  const auto sidecar = read_sidecar(cfg.clusters);
  if (sidecar && sidecar->contains("created_unix")) {
    const auto created = (*sidecar)["created_unix"].get<std::uint64_t>();
    const std::uint64_t now = now_unix();
    if (now > created) {
      const double age_days = static_cast<double>(now - created) / 86400.0;
      if (age_days > cfg.max_age_days) {
        std::cerr << "warning: clustering artifact is " << static_cast<int>(age_days)
                  << " days old (limit " << cfg.max_age_days
                  << "); the graph has likely drifted since it was drawn\n";
      }
    }
  } else {
    std::cerr << "note: no sidecar next to " << cfg.clusters
              << "; cannot check clustering age\n";
  }

  auto clusters_in = open_input(cfg.clusters);
  auto leftover_in = open_input(cfg.leftover);
  const egonet::ClusteringResult result =
      egonet::read_clusters(clusters_in, leftover_in, params_from_sidecar(sidecar));

  const egonet::EgoMode mode = egonet::ego_mode_from_string(cfg.mode);
  const egonet::AssignmentPlan plan = egonet::assign(result, mode, cfg.p, cfg.seed);

  const fs::path out = ensure_out_dir(cfg.out_dir);
  const json params = {{"mode", cfg.mode}, {"p", cfg.p}, {"seed", cfg.seed}};
  {
    std::ostringstream os;
    egonet::write_plan_tsv(os, plan);
    write_text(out / "plan.tsv", os.str());
    write_sidecar(out / "plan.tsv", params, {cfg.clusters, cfg.leftover});
  }

  std::size_t egos = 0, alters = 0, leftover = 0;
  for (const auto& r : plan.rows) {
    switch (r.role) {
      case egonet::MemberRole::ego: ++egos; break;
      case egonet::MemberRole::alter: ++alters; break;
      case egonet::MemberRole::leftover: ++leftover; break;
    }
  }

  if (!cfg.edges.empty()) {
    const egonet::Graph g = egonet::Graph::load(cfg.edges);
    const egonet::ExposureSummary summary = egonet::exposure_summary(plan, g, result);
    std::ostringstream os;
    egonet::write_exposures_tsv(os, summary);
    write_text(out / "exposures.tsv", os.str());
    write_sidecar(out / "exposures.tsv", params, {cfg.clusters, cfg.leftover, cfg.edges});
    write_text(out / "exposure.json", egonet::exposure_json(summary));
    write_sidecar(out / "exposure.json", params, {cfg.clusters, cfg.leftover, cfg.edges});
  }

  std::cout << "assign: " << plan.rows.size() << " members (" << egos << " egos, " << alters
            << " alters, " << leftover << " leftover), mode " << cfg.mode << ", p=" << cfg.p
            << " -> " << out.string() << "\n";
  return 0;
}

// --------------------------------------------------------------- analyze --

struct AnalyzeConfig {
  std::string plan;
  std::string outcomes;
  std::string aa_outcomes;
  std::vector<std::string> metrics;
  double aa_alpha = 0.05;
  std::string out_dir;
  // plan parameters; taken from the plan sidecar unless given explicitly
  std::string mode;
  double p = -1.0;
  std::int64_t seed = -1;
};

egonet::AssignmentParams plan_params(const AnalyzeConfig& cfg) {
  egonet::AssignmentParams params;
  const auto sidecar = read_sidecar(cfg.plan);
  bool have_mode = false, have_p = false, have_seed = false;
  if (sidecar) {
    const json& pj = sidecar->value("params", json::object());
    if (pj.contains("mode")) {
      params.mode = egonet::ego_mode_from_string(pj["mode"].get<std::string>());
      have_mode = true;
    }
    if (pj.contains("p")) {
      params.p = pj["p"].get<double>();
      have_p = true;
    }
    if (pj.contains("seed")) {
      params.seed = pj["seed"].get<std::uint64_t>();
      have_seed = true;
    }
  }
  if (!cfg.mode.empty()) {
    params.mode = egonet::ego_mode_from_string(cfg.mode);
    have_mode = true;
  }
  if (cfg.p >= 0.0) {
    params.p = cfg.p;
    have_p = true;
  }
  if (cfg.seed >= 0) {
    params.seed = static_cast<std::uint64_t>(cfg.seed);
    have_seed = true;
  }
  if (!have_mode || !have_p || !have_seed) {
    throw egonet::ValidationError(
        "plan parameters unavailable: no usable sidecar; pass --mode, --p and --seed");
  }
  return params;
}

int cmd_analyze(const AnalyzeConfig& cfg) {
  auto plan_in = open_input(cfg.plan);
  const egonet::AssignmentPlan plan = egonet::read_plan(plan_in, plan_params(cfg));

  auto outcomes_in = open_input(cfg.outcomes);
  const egonet::OutcomeTable outcomes = egonet::OutcomeTable::read_tsv(outcomes_in);
  const std::vector<std::string> metrics =
      cfg.metrics.empty() ? outcomes.metric_names() : cfg.metrics;

  std::optional<egonet::OutcomeTable> aa;
  if (!cfg.aa_outcomes.empty()) {
    auto aa_in = open_input(cfg.aa_outcomes);
    aa = egonet::OutcomeTable::read_tsv(aa_in);
  }

  const egonet::AnalysisReport report = egonet::build_analysis_report(
      plan, outcomes, metrics, aa ? &*aa : nullptr, cfg.aa_alpha);

  const fs::path out = ensure_out_dir(cfg.out_dir);
  json params = {{"metrics", metrics}, {"aa_alpha", cfg.aa_alpha}};
  std::vector<std::string> inputs = {cfg.plan, cfg.outcomes};
  if (!cfg.aa_outcomes.empty()) inputs.push_back(cfg.aa_outcomes);
  write_text(out / "analysis.json", egonet::analysis_report_json(report));
  write_sidecar(out / "analysis.json", params, inputs);
  {
    std::ostringstream os;
    egonet::write_analysis_table(os, report);
    write_text(out / "analysis.tsv", os.str());
    write_sidecar(out / "analysis.tsv", params, inputs);
  }

  double min_p = 1.0;
  for (const auto& t : report.results) min_p = std::min(min_p, t.p_value);
  std::cout << "analyze: " << report.results.size() << " metrics, min p=" << min_p
            << ", A/A failures: " << report.aa_failures.size() << " -> " << out.string() << "\n";
  if (!report.aa_failures.empty()) {
    std::cerr << "A/A failure:";
    for (const auto& m : report.aa_failures) std::cerr << ' ' << m;
    std::cerr << " (randomization archived, not re-seeded)\n";
    return 2;
  }
  return 0;
}

// -------------------------------------------------------------- simulate --

struct GenerateConfig {
  std::string kind = "erdos-renyi";
  std::size_t n = 0;
  double mean_degree = 0.0;
  double exponent = 2.5;
  std::size_t min_degree = 5;
  std::size_t max_degree = 0;
  std::size_t star_count = 0;
  std::size_t leaves = 0;
  std::string weight_kind = "unit";
  double weight_lo = 1.0;
  double weight_hi = 1.0;
  double weight_mean = 1.0;
  std::uint64_t seed = 0;
  std::string out_dir;
};

egonet::GraphSpec to_spec(const GenerateConfig& cfg) {
  egonet::GraphSpec spec;
  spec.kind = egonet::graph_kind_from_string(cfg.kind);
  spec.node_count = cfg.n;
  spec.mean_degree = cfg.mean_degree;
  spec.exponent = cfg.exponent;
  spec.min_degree = cfg.min_degree;
  spec.max_degree = cfg.max_degree;
  spec.star_count = cfg.star_count;
  spec.leaves = cfg.leaves;
  spec.seed = cfg.seed;
  if (cfg.weight_kind == "unit") {
    spec.weights.kind = egonet::WeightSpec::Kind::unit;
  } else if (cfg.weight_kind == "uniform") {
    spec.weights.kind = egonet::WeightSpec::Kind::uniform;
    spec.weights.lo = cfg.weight_lo;
    spec.weights.hi = cfg.weight_hi;
  } else if (cfg.weight_kind == "exponential") {
    spec.weights.kind = egonet::WeightSpec::Kind::exponential;
    spec.weights.mean = cfg.weight_mean;
  } else {
    throw egonet::ValidationError("unknown weight kind: " + cfg.weight_kind);
  }
  return spec;
}

int cmd_generate(const GenerateConfig& cfg) {
  const egonet::Graph g = egonet::generate_graph(to_spec(cfg));
  const fs::path out = ensure_out_dir(cfg.out_dir);
  const json params = {{"kind", cfg.kind},
                       {"n", cfg.n},
                       {"mean_degree", cfg.mean_degree},
                       {"exponent", cfg.exponent},
                       {"min_degree", cfg.min_degree},
                       {"max_degree", cfg.max_degree},
                       {"star_count", cfg.star_count},
                       {"leaves", cfg.leaves},
                       {"weight_kind", cfg.weight_kind},
                       {"seed", cfg.seed}};
  std::ostringstream os;
  g.write_edges_tsv(os);
  write_text(out / "graph.tsv", os.str());
  write_sidecar(out / "graph.tsv", params, {});
  write_text(out / "graph_summary.json", g.summary_json());
  write_sidecar(out / "graph_summary.json", params, {});
  std::cout << "simulate graph: " << g.node_count() << " nodes, " << g.edge_count()
            << " edges (" << cfg.kind << ") -> " << out.string() << "\n";
  return 0;
}

struct OutcomesConfig {
  std::string edges;
  std::string plan;
  double beta0 = 0.0;
  double beta_d = 0.0;
  double beta_n = 0.0;
  double sigma = 0.0;
  std::string shape = "linear";
  std::string noise = "gaussian";
  std::string metric_name = "outcome";
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string mode;
  double p = -1.0;
  std::int64_t plan_seed = -1;
};

int cmd_outcomes(const OutcomesConfig& cfg) {
  AnalyzeConfig pc;
  pc.plan = cfg.plan;
  pc.mode = cfg.mode;
  pc.p = cfg.p;
  pc.seed = cfg.plan_seed;
  auto plan_in = open_input(cfg.plan);
  const egonet::AssignmentPlan plan = egonet::read_plan(plan_in, plan_params(pc));
  const egonet::Graph g = egonet::Graph::load(cfg.edges);

  egonet::OutcomeModel model;
  model.beta0 = cfg.beta0;
  model.beta_d = cfg.beta_d;
  model.beta_n = cfg.beta_n;
  model.sigma = cfg.sigma;
  model.shape = egonet::response_shape_from_string(cfg.shape);
  model.noise = egonet::noise_kind_from_string(cfg.noise);
  if (model.sigma < 0.0) throw egonet::ValidationError("sigma must be non-negative");

  const egonet::OutcomeTable table =
      egonet::simulate_outcomes(g, plan, model, cfg.seed, cfg.metric_name);
  const fs::path out = ensure_out_dir(cfg.out_dir);
  const json params = {{"beta0", cfg.beta0},   {"beta_d", cfg.beta_d},
                       {"beta_n", cfg.beta_n}, {"sigma", cfg.sigma},
                       {"shape", cfg.shape},   {"noise", cfg.noise},
                       {"seed", cfg.seed},     {"metric_name", cfg.metric_name}};
  std::ostringstream os;
  table.write_tsv(os);
  write_text(out / "outcomes.tsv", os.str());
  write_sidecar(out / "outcomes.tsv", params, {cfg.edges, cfg.plan});
  std::cout << "simulate outcomes: " << table.row_count() << " rows, metric "
            << cfg.metric_name << " -> " << out.string() << "\n";
  return 0;
}

struct StudyConfig {
  std::string config;
  std::string out_dir;
};

int cmd_study(const StudyConfig& cfg) {
  const std::string text = egonet::io::read_file(cfg.config);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw egonet::ValidationError(cfg.config + ": " + e.what());
  }
  const std::string study = j.value("study", std::string{});
  const fs::path out = ensure_out_dir(cfg.out_dir);

  if (study == "attenuation") {
    const egonet::StudyParams params = egonet::study_params_from_json(text);
    const egonet::AttenuationReport report = egonet::attenuation_study(params);
    write_text(out / "study.json", egonet::attenuation_report_json(params, report));
    write_sidecar(out / "study.json", j, {cfg.config});
    std::cout << "simulate study: attenuation, mean estimate " << report.mean_estimate
              << " (theory " << report.theoretical << ", mean loss " << report.mean_loss
              << ") -> " << out.string() << "\n";
    return 0;
  }
  if (study == "naive-vs-stratified") {
    const egonet::ComparisonParams params = egonet::comparison_params_from_json(text);
    const egonet::ComparisonReport report = egonet::naive_vs_stratified_study(params);
    write_text(out / "study.json", egonet::comparison_report_json(params, report));
    write_sidecar(out / "study.json", j, {cfg.config});
    std::ostringstream os;
    egonet::write_histograms_tsv(os, report, params.hist_bins);
    write_text(out / "histograms.tsv", os.str());
    write_sidecar(out / "histograms.tsv", j, {cfg.config});
    std::cout << "simulate study: naive-vs-stratified, late naive mean "
              << report.naive_late.mean << " vs stratified mean " << report.stratified.mean
              << " -> " << out.string() << "\n";
    return 0;
  }
  throw egonet::ValidationError("config field \"study\" must be \"attenuation\" or "
                                "\"naive-vs-stratified\"");
}

// -------------------------------------------------------------- diagnose --

struct DiagnoseConfig {
  std::string edges;
  std::string clusters;
  std::string leftover;
  std::string draws;
  std::string pre_outcomes;
  std::size_t window = 20;
  std::string out_dir;
};

int cmd_diagnose(const DiagnoseConfig& cfg) {
  const egonet::Graph g = egonet::Graph::load(cfg.edges);
  auto clusters_in = open_input(cfg.clusters);
  auto leftover_in = open_input(cfg.leftover);
  egonet::ClusteringResult result =
      egonet::read_clusters(clusters_in, leftover_in, params_from_sidecar(read_sidecar(cfg.clusters)));

  // Re-derive degrees and loss rates from the graph; a clusters artifact that
  // disagrees with its graph is unusable for diagnostics.
  for (auto& c : result.clusters) {
    c.original_degree = g.degree(c.ego);
    const auto [loss, wloss] = egonet::recompute_loss(g, c);
    if (std::abs(loss - c.loss_rate) > 1e-9 || std::abs(wloss - c.weighted_loss_rate) > 1e-9) {
      throw egonet::ValidationError("clusters artifact inconsistent with graph at ego " +
                                    std::to_string(c.ego));
    }
  }
  if (!cfg.draws.empty()) {
    auto draws_in = open_input(cfg.draws);
    result.diagnostics = egonet::read_draws(draws_in);
  }

  const fs::path out = ensure_out_dir(cfg.out_dir);
  const json params = {{"window", cfg.window}};
  std::vector<std::string> inputs = {cfg.edges, cfg.clusters, cfg.leftover};
  if (!cfg.draws.empty()) inputs.push_back(cfg.draws);
  if (!cfg.pre_outcomes.empty()) inputs.push_back(cfg.pre_outcomes);

  const egonet::DiagnosticsTables tables = egonet::diagnostics_report(result, cfg.window);
  if (!tables.rows.empty()) {
    std::ostringstream os;
    egonet::write_diagnostics_tsv(os, tables);
    write_text(out / "diagnostics.tsv", os.str());
    write_sidecar(out / "diagnostics.tsv", params, inputs);
  }

  json report;
  report["rollup"] = {{"draws", tables.rollup.draws},
                      {"egos", tables.rollup.egos},
                      {"collisions", tables.rollup.collisions},
                      {"alter_collisions", tables.rollup.alter_collisions},
                      {"ego_collisions", tables.rollup.ego_collisions},
                      {"collision_rate", tables.rollup.collision_rate},
                      {"mean_loss_rate", tables.rollup.mean_loss_rate},
                      {"mean_weighted_loss_rate", tables.rollup.mean_weighted_loss_rate},
                      {"frac_loss_under_10pct", tables.rollup.frac_loss_under_10pct},
                      {"mean_ego_degree", tables.rollup.mean_ego_degree}};

  std::optional<egonet::OutcomeTable> pre;
  if (!cfg.pre_outcomes.empty()) {
    auto pre_in = open_input(cfg.pre_outcomes);
    pre = egonet::OutcomeTable::read_tsv(pre_in);
  }

  if (result.clusters.size() >= 2) {
    const egonet::RepresentativityReport rep =
        egonet::representativity_check(result, g, pre ? &*pre : nullptr);
    report["representativity"] = json::parse(egonet::representativity_json(rep))["representativity"];
  } else {
    report["representativity"] = nullptr;
  }

  // Leftover comparison always covers degree; pre-experiment metrics join it
  // when supplied.
  {
    std::vector<double> deg(g.node_count());
    for (egonet::NodeIndex i = 0; i < g.node_count(); ++i) {
      deg[i] = static_cast<double>(g.degree_at(i));
    }
    std::vector<std::string> names = {"degree"};
    std::vector<std::vector<double>> cols = {std::move(deg)};
    if (pre) {
      for (std::size_t mi = 0; mi < pre->metric_names().size(); ++mi) {
        std::vector<double> col(g.node_count());
        for (egonet::NodeIndex i = 0; i < g.node_count(); ++i) {
          col[i] = pre->value(g.id_at(i), mi);
        }
        names.push_back(pre->metric_names()[mi]);
        cols.push_back(std::move(col));
      }
    }
    const egonet::OutcomeTable metrics(g.ids(), std::move(names), std::move(cols));
    const egonet::LeftoverReport lo = egonet::leftover_diagnostics(result, metrics);
    report["leftover"] = json::parse(egonet::leftover_report_json(lo));
    std::ostringstream os;
    egonet::write_leftover_table(os, lo);
    write_text(out / "leftover_comparison.tsv", os.str());
    write_sidecar(out / "leftover_comparison.tsv", params, inputs);
  }

  write_text(out / "diagnose.json", report.dump(2) + "\n");
  write_sidecar(out / "diagnose.json", params, inputs);

  std::cout << "diagnose: " << tables.rollup.egos << " egos, mean loss "
            << tables.rollup.mean_loss_rate << ", collision rate " << tables.rollup.collision_rate
            << " -> " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ego-network cluster randomization toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  IngestConfig ingest_cfg;
  auto* ingest = app.add_subcommand("ingest", "validate an edge list, write canonical graph artifacts");
  ingest->add_option("--edges", ingest_cfg.edges, "edge list: src dst [weight] per line")
      ->required()->check(CLI::ExistingFile);
  ingest->add_option("--out-dir", ingest_cfg.out_dir, "output directory")->required();
  ingest->callback([&] { rc = cmd_ingest(ingest_cfg); });

  ClusterConfig cluster_cfg;
  auto* cluster = app.add_subcommand("cluster", "draw ego clusters from a graph");
  cluster->add_option("--edges", cluster_cfg.edges)->required()->check(CLI::ExistingFile);
  cluster->add_option("--out-dir", cluster_cfg.out_dir)->required();
  cluster->add_option("--algo", cluster_cfg.algo, "naive | stratified")
      ->check(CLI::IsMember({"naive", "stratified"}))->capture_default_str();
  cluster->add_option("--seed", cluster_cfg.seed, "randomization seed")->required();
  cluster->add_option("--target-loss", cluster_cfg.target_loss, "stratified per-ego loss cap")
      ->capture_default_str();
  cluster->add_option("--bins", cluster_cfg.bins, "stratified degree bins")->capture_default_str();
  cluster->add_option("--stop-loss", cluster_cfg.stop_loss, "naive trailing-mean stop threshold")
      ->capture_default_str();
  cluster->add_option("--window", cluster_cfg.window, "naive trailing window")->capture_default_str();
  cluster->add_flag("--skip-reattach", cluster_cfg.skip_reattach,
                    "skip alter reattachment after stratified clustering");
  cluster->callback([&] { rc = cmd_cluster(cluster_cfg); });

  AssignConfig assign_cfg;
  auto* assign = app.add_subcommand("assign", "randomize variants over a clustering");
  assign->add_option("--clusters", assign_cfg.clusters)->required()->check(CLI::ExistingFile);
  assign->add_option("--leftover", assign_cfg.leftover)->required()->check(CLI::ExistingFile);
  assign->add_option("--edges", assign_cfg.edges, "graph; adds realized-exposure artifacts")
      ->check(CLI::ExistingFile);
  assign->add_option("--out-dir", assign_cfg.out_dir)->required();
  assign->add_option("--mode", assign_cfg.mode, "all-treated | all-control | match-alters | independent")
      ->check(CLI::IsMember({"all-treated", "all-control", "match-alters", "independent"}))
      ->capture_default_str();
  assign->add_option("--p", assign_cfg.p, "treatment probability")->capture_default_str();
  assign->add_option("--seed", assign_cfg.seed)->required();
  assign->add_option("--max-age-days", assign_cfg.max_age_days,
                     "warn when the clustering artifact is older than this")
      ->capture_default_str();
  assign->callback([&] { rc = cmd_assign(assign_cfg); });

  AnalyzeConfig analyze_cfg;
  auto* analyze = app.add_subcommand("analyze", "ego-level t-tests with optional A/A gate");
  analyze->add_option("--plan", analyze_cfg.plan)->required()->check(CLI::ExistingFile);
  analyze->add_option("--outcomes", analyze_cfg.outcomes)->required()->check(CLI::ExistingFile);
  analyze->add_option("--aa-outcomes", analyze_cfg.aa_outcomes,
                      "pre-experiment outcomes for the A/A validation pass")
      ->check(CLI::ExistingFile);
  analyze->add_option("--metrics", analyze_cfg.metrics, "metric names (default: all columns)")
      ->delimiter(',');
  analyze->add_option("--aa-alpha", analyze_cfg.aa_alpha, "A/A significance level")
      ->capture_default_str();
  analyze->add_option("--out-dir", analyze_cfg.out_dir)->required();
  analyze->add_option("--mode", analyze_cfg.mode, "plan mode (overrides sidecar)");
  analyze->add_option("--p", analyze_cfg.p, "plan treatment probability (overrides sidecar)");
  analyze->add_option("--seed", analyze_cfg.seed, "plan seed (overrides sidecar)");
  analyze->callback([&] { rc = cmd_analyze(analyze_cfg); });

  auto* simulate = app.add_subcommand("simulate", "synthetic graphs, outcomes, and studies");
  simulate->require_subcommand(1);

  GenerateConfig gen_cfg;
  auto* gen = simulate->add_subcommand("graph", "generate a synthetic graph");
  gen->add_option("--kind", gen_cfg.kind, "erdos-renyi | power-law | disjoint-stars")
      ->check(CLI::IsMember({"erdos-renyi", "er", "power-law", "disjoint-stars", "stars"}))
      ->capture_default_str();
  gen->add_option("--n", gen_cfg.n, "node count (erdos-renyi, power-law)");
  gen->add_option("--mean-degree", gen_cfg.mean_degree, "erdos-renyi mean degree");
  gen->add_option("--exponent", gen_cfg.exponent, "power-law exponent")->capture_default_str();
  gen->add_option("--min-degree", gen_cfg.min_degree, "power-law minimum degree")
      ->capture_default_str();
  gen->add_option("--max-degree", gen_cfg.max_degree, "power-law degree cap (0 = auto)")
      ->capture_default_str();
  gen->add_option("--star-count", gen_cfg.star_count, "disjoint-stars star count");
  gen->add_option("--leaves", gen_cfg.leaves, "disjoint-stars leaves per star");
  gen->add_option("--weight-kind", gen_cfg.weight_kind, "unit | uniform | exponential")
      ->check(CLI::IsMember({"unit", "uniform", "exponential"}))->capture_default_str();
  gen->add_option("--weight-lo", gen_cfg.weight_lo)->capture_default_str();
  gen->add_option("--weight-hi", gen_cfg.weight_hi)->capture_default_str();
  gen->add_option("--weight-mean", gen_cfg.weight_mean)->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed)->required();
  gen->add_option("--out-dir", gen_cfg.out_dir)->required();
  gen->callback([&] { rc = cmd_generate(gen_cfg); });

  OutcomesConfig out_cfg;
  auto* outc = simulate->add_subcommand("outcomes", "simulate outcomes for an existing plan");
  outc->add_option("--edges", out_cfg.edges)->required()->check(CLI::ExistingFile);
  outc->add_option("--plan", out_cfg.plan)->required()->check(CLI::ExistingFile);
  outc->add_option("--beta0", out_cfg.beta0)->capture_default_str();
  outc->add_option("--beta-d", out_cfg.beta_d, "direct (own-treatment) effect")
      ->capture_default_str();
  outc->add_option("--beta-n", out_cfg.beta_n, "network (peer-exposure) effect")
      ->capture_default_str();
  outc->add_option("--sigma", out_cfg.sigma, "noise scale")->capture_default_str();
  outc->add_option("--shape", out_cfg.shape, "linear | sqrt | square")
      ->check(CLI::IsMember({"linear", "sqrt", "square"}))->capture_default_str();
  outc->add_option("--noise", out_cfg.noise, "gaussian | lognormal")
      ->check(CLI::IsMember({"gaussian", "lognormal"}))->capture_default_str();
  outc->add_option("--metric-name", out_cfg.metric_name)->capture_default_str();
  outc->add_option("--seed", out_cfg.seed, "noise seed")->required();
  outc->add_option("--out-dir", out_cfg.out_dir)->required();
  outc->add_option("--mode", out_cfg.mode, "plan mode (overrides sidecar)");
  outc->add_option("--p", out_cfg.p, "plan treatment probability (overrides sidecar)");
  outc->add_option("--plan-seed", out_cfg.plan_seed, "plan seed (overrides sidecar)");
  outc->callback([&] { rc = cmd_outcomes(out_cfg); });

  StudyConfig study_cfg;
  auto* study = simulate->add_subcommand("study", "run a study described by a JSON config");
  study->add_option("--config", study_cfg.config)->required()->check(CLI::ExistingFile);
  study->add_option("--out-dir", study_cfg.out_dir)->required();
  study->callback([&] { rc = cmd_study(study_cfg); });

  DiagnoseConfig diag_cfg;
  auto* diagnose = app.add_subcommand("diagnose", "clustering quality and representativity report");
  diagnose->add_option("--edges", diag_cfg.edges)->required()->check(CLI::ExistingFile);
  diagnose->add_option("--clusters", diag_cfg.clusters)->required()->check(CLI::ExistingFile);
  diagnose->add_option("--leftover", diag_cfg.leftover)->required()->check(CLI::ExistingFile);
  diagnose->add_option("--draws", diag_cfg.draws, "raw draw log from cluster")
      ->check(CLI::ExistingFile);
  diagnose->add_option("--pre-outcomes", diag_cfg.pre_outcomes,
                       "pre-experiment metrics for representativity and leftover tables")
      ->check(CLI::ExistingFile);
  diagnose->add_option("--window", diag_cfg.window, "rolling window")->capture_default_str();
  diagnose->add_option("--out-dir", diag_cfg.out_dir)->required();
  diagnose->callback([&] { rc = cmd_diagnose(diag_cfg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const egonet::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
