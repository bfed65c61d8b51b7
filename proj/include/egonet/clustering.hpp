#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "egonet/graph.hpp"

namespace egonet {

// One ego with the alters actually claimed for it. cluster_alters is always
// a subset of the ego's graph neighborhood, sorted ascending, and never
// contains the ego.
struct EgoCluster {
  MemberId ego = 0;
  std::vector<MemberId> cluster_alters;
  std::size_t original_degree = 0;
  double loss_rate = 0.0;           // 1 - |cluster_alters| / original_degree
  double weighted_loss_rate = 0.0;  // same ratio on edge weights
};

enum class DrawKind : std::uint8_t {
  accepted,
  collision_alter,  // candidate already claimed as someone's alter
  collision_ego,    // candidate already accepted as an ego
};

struct DrawRecord {
  std::size_t iteration = 0;  // 1-based draw order
  DrawKind kind = DrawKind::accepted;
  double ego_loss_rate = 0.0;  // NaN for collisions
  std::size_t ego_original_degree = 0;
};

struct IterationDiagnostics {
  std::vector<DrawRecord> records;
};

struct ClusteringParams {
  std::string algorithm;    // "naive" or "stratified"
  double target_loss = 0.0; // stratified cap; stop threshold for naive
  std::size_t window = 0;   // naive trailing-mean window
  std::size_t bin_count = 0;
  std::uint64_t seed = 0;
  bool reattached = false;
};

struct ClusteringResult {
  std::vector<EgoCluster> clusters;
  std::vector<MemberId> leftover;  // every graph node in no cluster, ascending
  IterationDiagnostics diagnostics;
  ClusteringParams params;
};

// Baseline sampler: walks a seeded uniform permutation of the eligible nodes
// (degree >= 1). A candidate already claimed records a collision; an accepted
// ego claims every still-unclaimed neighbor. Stops once the trailing mean of
// the last `window` ego loss rates reaches stop_loss, or when candidates run
// out.
ClusteringResult naive_cluster(const Graph& g, double stop_loss, std::size_t window,
                               std::uint64_t seed);

// Degree-stratified sampler with a hard per-ego loss cap. Egos are drawn
// round-robin from equal-population degree bins, lowest degree first. A
// candidate of degree d is accepted only if ceil((1 - target_loss) * d)
// neighbors are still unclaimed, and claims exactly that many, strongest
// edges first. The procedure halts the first time any bin runs out of
// candidates without yielding an acceptable ego.
ClusteringResult stratified_cluster(const Graph& g, double target_loss, std::size_t bin_count,
                                    std::uint64_t seed);

// Attaches every unclaimed node that borders at least one ego: first to its
// strongest-edge adjacent ego, then local transfers move attached alters from
// below-average-loss egos to adjacent above-average-loss egos while the
// global loss spread strictly shrinks. Loss rates never exceed the cap the
// input was built with.
ClusteringResult reattach_alters(const Graph& g, const ClusteringResult& partial);

// Alters claimed for `d` by descending edge weight, ties by ascending id.
std::size_t required_alters(std::size_t degree, double target_loss);

struct DiagnosticsRow {
  std::size_t iteration = 0;
  bool collision = false;
  double ego_loss_rate = 0.0;  // NaN when collision
  double cumulative_collision_rate = 0.0;
  std::size_t ego_degree = 0;
  double rolling_mean_loss = 0.0;
  double rolling_frac_under_10pct = 0.0;
  double rolling_mean_degree = 0.0;
};

struct DiagnosticsRollup {
  std::size_t draws = 0;
  std::size_t egos = 0;
  std::size_t collisions = 0;
  std::size_t alter_collisions = 0;
  std::size_t ego_collisions = 0;
  double collision_rate = 0.0;
  double mean_loss_rate = 0.0;
  double mean_weighted_loss_rate = 0.0;
  double frac_loss_under_10pct = 0.0;
  double mean_ego_degree = 0.0;
};

struct DiagnosticsTables {
  std::vector<DiagnosticsRow> rows;
  DiagnosticsRollup rollup;
  std::size_t window = 0;
};

DiagnosticsTables diagnostics_report(const ClusteringResult& result, std::size_t window = 20);

// Serialization. Clusters TSV:
//   ego_id <TAB> loss_rate <TAB> weighted_loss_rate <TAB> alter1,alter2,...
void write_clusters_tsv(std::ostream& out, const ClusteringResult& result);
void write_leftover(std::ostream& out, const ClusteringResult& result);
void write_diagnostics_tsv(std::ostream& out, const DiagnosticsTables& tables);
std::string clusters_json(const ClusteringResult& result);

// Raw draw log: `iteration<TAB>kind<TAB>ego_loss_rate<TAB>ego_degree`, one
// row per draw, NA loss for collisions. diagnostics_report consumes it.
void write_draws_tsv(std::ostream& out, const ClusteringResult& result);
IterationDiagnostics read_draws(std::istream& in);

// Round-trips the TSV + leftover artifacts back into a result. Params must
// be supplied by the caller (they live in the artifact sidecar).
ClusteringResult read_clusters(std::istream& clusters_tsv, std::istream& leftover,
                               const ClusteringParams& params);

// Recomputed loss rates for one cluster straight from the graph.
std::pair<double, double> recompute_loss(const Graph& g, const EgoCluster& c);

}  // namespace egonet
