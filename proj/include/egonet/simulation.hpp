#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "egonet/analysis.hpp"
#include "egonet/assignment.hpp"
#include "egonet/clustering.hpp"
#include "egonet/graph.hpp"

namespace egonet {

enum class GraphKind : std::uint8_t { erdos_renyi, power_law, disjoint_stars };

struct WeightSpec {
  enum class Kind : std::uint8_t { unit, uniform, exponential };
  Kind kind = Kind::unit;
  double lo = 1.0;    // uniform
  double hi = 1.0;    // uniform
  double mean = 1.0;  // exponential
};

struct GraphSpec {
  GraphKind kind = GraphKind::erdos_renyi;
  std::size_t node_count = 0;   // erdos_renyi, power_law
  double mean_degree = 0.0;     // erdos_renyi
  double exponent = 2.5;        // power_law
  std::size_t min_degree = 1;   // power_law
  std::size_t max_degree = 0;   // power_law; 0 means min(n - 1, 1000)
  std::size_t star_count = 0;   // disjoint_stars
  std::size_t leaves = 0;       // disjoint_stars
  WeightSpec weights;
  std::uint64_t seed = 0;
};

Graph generate_graph(const GraphSpec& spec);

enum class ResponseShape : std::uint8_t { linear, sqrt_root, square };
enum class NoiseKind : std::uint8_t { gaussian, lognormal };

std::string_view to_string(GraphKind k);
std::string_view to_string(ResponseShape s);
std::string_view to_string(NoiseKind n);
GraphKind graph_kind_from_string(std::string_view s);
ResponseShape response_shape_from_string(std::string_view s);
NoiseKind noise_kind_from_string(std::string_view s);

// Y = beta0 + beta_d * Z + beta_n * f(p_i) + noise; each f is monotone with
// f(0) = 0 and f(1) = 1, so effect sizes stay comparable across shapes.
struct OutcomeModel {
  double beta0 = 0.0;
  double beta_d = 0.0;
  double beta_n = 0.0;
  double sigma = 0.0;
  ResponseShape shape = ResponseShape::linear;
  NoiseKind noise = NoiseKind::gaussian;
};

double response_value(ResponseShape shape, double p);

OutcomeTable simulate_outcomes(const Graph& g, const AssignmentPlan& plan,
                               const OutcomeModel& model, std::uint64_t seed,
                               const std::string& metric_name = "outcome");
OutcomeTable simulate_outcomes_serial(const Graph& g, const AssignmentPlan& plan,
                                      const OutcomeModel& model, std::uint64_t seed,
                                      const std::string& metric_name = "outcome");

struct StudyParams {
  GraphSpec graph;
  OutcomeModel model;
  double target_loss = 0.2;
  std::size_t bin_count = 20;
  double p = 0.5;
  std::size_t replications = 100;
  std::uint64_t seed = 0;
  EgoMode mode = EgoMode::all_treated;
};

struct ReplicationResult {
  double estimate = 0.0;  // mean_treated_arm - mean_control_arm among egos
  double p_value = 1.0;
  double mean_loss = 0.0;  // realized mean ego loss rate
  std::size_t egos = 0;
};

struct AttenuationReport {
  std::vector<ReplicationResult> reps;  // replication-index order
  double mean_estimate = 0.0;
  double se_estimate = 0.0;  // standard error of the mean across replications
  double mean_loss = 0.0;
  double theoretical = 0.0;  // beta_n * (1 - mean_loss); exact under linear f
  double ratio = 0.0;        // mean_estimate / beta_n (0 when beta_n == 0)
};

// Full pipeline per replication: generate graph, stratified_cluster,
// reattach_alters, assign, simulate, analyze. Seeds derive from (seed,
// replication index), so results do not depend on scheduling.
AttenuationReport attenuation_study(const StudyParams& params);
AttenuationReport attenuation_study_serial(const StudyParams& params);

struct ComparisonParams {
  GraphSpec graph;
  std::vector<std::uint64_t> seeds;  // >= 5
  double stop_loss = 1.0;            // naive stop; 1.0 runs to exhaustion
  std::size_t window = 20;
  std::size_t early_k = 200;  // "early" = first early_k naive egos, "late" = last early_k
  double target_loss = 0.2;
  std::size_t bin_count = 20;
  std::size_t hist_bins = 20;
};

struct LossHistogram {
  std::vector<std::size_t> counts;  // hist_bins bins over [0, 1]
  std::size_t total = 0;
  double mean = 0.0;
  double max = 0.0;
};

struct ComparisonReport {
  LossHistogram naive_early;
  LossHistogram naive_late;
  LossHistogram stratified;
  std::vector<double> per_seed_naive_early_mean;
  std::vector<double> per_seed_naive_late_mean;
  std::vector<double> per_seed_stratified_mean;
};

ComparisonReport naive_vs_stratified_study(const ComparisonParams& params);

std::string attenuation_report_json(const StudyParams& params, const AttenuationReport& report);
std::string comparison_report_json(const ComparisonParams& params,
                                   const ComparisonReport& report);
void write_histograms_tsv(std::ostream& out, const ComparisonReport& report,
                          std::size_t hist_bins);

// Study configuration as a single JSON document (see README for the schema).
StudyParams study_params_from_json(const std::string& text);
ComparisonParams comparison_params_from_json(const std::string& text);
GraphSpec graph_spec_from_json_text(const std::string& text);

}  // namespace egonet
