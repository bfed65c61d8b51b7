// Serial vs OpenMP timings for the data-parallel kernels: assignment coins,
// exposure computation, outcome simulation, and replicated studies. The
// serial variants are the reference implementations the tests pin the
// parallel ones against, so this also re-checks byte-for-byte agreement.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "egonet/assignment.hpp"
#include "egonet/clustering.hpp"
#include "egonet/simulation.hpp"

using h_clock = std::chrono::high_resolution_clock;

namespace {

double seconds_since(h_clock::time_point t0) {
  return std::chrono::duration<double>(h_clock::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = h_clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s serial %8.4fs   openmp %8.4fs   speedup %5.2fx   identical %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s, identical ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled in this build\n");
#endif

  egonet::GraphSpec spec;
  spec.kind = egonet::GraphKind::power_law;
  spec.node_count = 100000;
  spec.exponent = 2.5;
  spec.min_degree = 5;
  spec.seed = 17;
  const egonet::Graph g = egonet::generate_graph(spec);
  std::printf("graph: %zu nodes, %zu edges\n", g.node_count(), g.edge_count());

  egonet::ClusteringResult clusters = egonet::stratified_cluster(g, 0.2, 20, 7);
  clusters = egonet::reattach_alters(g, clusters);
  std::printf("clusters: %zu egos, %zu leftover\n\n", clusters.clusters.size(),
              clusters.leftover.size());

  const auto mode = egonet::EgoMode::all_treated;

  egonet::AssignmentPlan plan_s, plan_p;
  const double t_assign_s =
      time_best_of(3, [&] { plan_s = egonet::assign_serial(clusters, mode, 0.5, 99); });
  const double t_assign_p =
      time_best_of(3, [&] { plan_p = egonet::assign(clusters, mode, 0.5, 99); });
  const bool assign_same = plan_s.rows.size() == plan_p.rows.size() &&
                           std::equal(plan_s.rows.begin(), plan_s.rows.end(), plan_p.rows.begin(),
                                      [](const egonet::PlanRow& a, const egonet::PlanRow& b) {
                                        return a.member == b.member && a.variant == b.variant &&
                                               a.role == b.role && a.ego == b.ego;
                                      });
  report("assign", t_assign_s, t_assign_p, assign_same);

  std::vector<egonet::ExposureRow> exp_s, exp_p;
  const double t_exp_s =
      time_best_of(3, [&] { exp_s = egonet::compute_exposures_serial(plan_s, g, clusters); });
  const double t_exp_p =
      time_best_of(3, [&] { exp_p = egonet::compute_exposures(plan_s, g, clusters); });
  const bool exp_same =
      exp_s.size() == exp_p.size() &&
      std::equal(exp_s.begin(), exp_s.end(), exp_p.begin(),
                 [](const egonet::ExposureRow& a, const egonet::ExposureRow& b) {
                   return a.ego == b.ego && a.realized_p == b.realized_p &&
                          a.expected_p == b.expected_p;
                 });
  report("compute_exposures", t_exp_s, t_exp_p, exp_same);

  egonet::OutcomeModel model;
  model.beta0 = 10.0;
  model.beta_n = 2.0;
  model.sigma = 1.0;
  egonet::OutcomeTable out_s, out_p;
  const double t_sim_s =
      time_best_of(3, [&] { out_s = egonet::simulate_outcomes_serial(g, plan_s, model, 5); });
  const double t_sim_p =
      time_best_of(3, [&] { out_p = egonet::simulate_outcomes(g, plan_s, model, 5); });
  const bool sim_same = out_s.column(0) == out_p.column(0);
  report("simulate_outcomes", t_sim_s, t_sim_p, sim_same);

  egonet::StudyParams study;
  study.graph.kind = egonet::GraphKind::erdos_renyi;
  study.graph.node_count = 4000;
  study.graph.mean_degree = 12.0;
  study.model = model;
  study.replications = 32;
  study.seed = 3;
  egonet::AttenuationReport rep_s, rep_p;
  const double t_study_s = time_best_of(1, [&] { rep_s = egonet::attenuation_study_serial(study); });
  const double t_study_p = time_best_of(1, [&] { rep_p = egonet::attenuation_study(study); });
  const bool study_same = rep_s.mean_estimate == rep_p.mean_estimate &&
                          rep_s.mean_loss == rep_p.mean_loss;
  report("attenuation_study", t_study_s, t_study_p, study_same);

  return (assign_same && exp_same && sim_same && study_same) ? 0 : 1;
}
