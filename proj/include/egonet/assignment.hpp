#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "egonet/clustering.hpp"
#include "egonet/graph.hpp"

namespace egonet {

// How the ego's own variant relates to its alters' shared coin.
enum class EgoMode : std::uint8_t {
  all_treated,   // ego always TREATED; isolates the downstream/network effect
  all_control,   // ego always CONTROL
  match_alters,  // ego shares the alters' variant; total-effect contrast
  independent,   // ego flips its own coin
};

enum class Variant : std::uint8_t { control = 0, treated = 1 };
enum class MemberRole : std::uint8_t { ego, alter, leftover };

std::string_view to_string(EgoMode m);
std::string_view to_string(Variant v);
std::string_view to_string(MemberRole r);
EgoMode ego_mode_from_string(std::string_view s);

struct PlanRow {
  MemberId member = 0;
  Variant variant = Variant::control;
  MemberRole role = MemberRole::leftover;
  MemberId ego = 0;  // own id for egos, owning ego for alters, unused for leftover
};

struct AssignmentParams {
  EgoMode mode = EgoMode::all_treated;
  double p = 0.5;
  std::uint64_t seed = 0;
};

// One variant per member, one coin per ego. Rows are sorted by member id;
// ego_coins parallel the clusters in ego-id order. Coins are keyed hashes of
// (seed, ego id), so any subset of the plan can be regenerated and audited
// without replaying the rest.
struct AssignmentPlan {
  std::vector<PlanRow> rows;
  std::vector<MemberId> coin_egos;        // ascending
  std::vector<std::uint8_t> coin_treated;  // coin_treated[i] belongs to coin_egos[i]
  AssignmentParams params;

  const PlanRow& row_of(MemberId m) const;
  bool has_member(MemberId m) const;
  bool ego_coin(MemberId ego) const;  // true => alters treated
};

AssignmentPlan assign(const ClusteringResult& result, EgoMode mode, double p,
                      std::uint64_t seed);
AssignmentPlan assign_serial(const ClusteringResult& result, EgoMode mode, double p,
                             std::uint64_t seed);

struct ExposureRow {
  MemberId ego = 0;
  bool alters_treated = false;
  double loss_rate = 0.0;
  double realized_p = 0.0;  // treated fraction of the full neighborhood
  double expected_p = 0.0;  // (1 - a) + p*a when treated arm, p*a otherwise
};

struct ExposureSummary {
  std::vector<ExposureRow> rows;  // ego-id order
  double p = 0.0;
  double mean_loss = 0.0;
  std::size_t n_treated_arm = 0;
  std::size_t n_control_arm = 0;
  double treated_mean_realized = 0.0;
  double treated_mean_expected = 0.0;
  double control_mean_realized = 0.0;
  double control_mean_expected = 0.0;
  double arm_gap_realized = 0.0;
  double arm_gap_expected = 0.0;
};

std::vector<ExposureRow> compute_exposures(const AssignmentPlan& plan, const Graph& g,
                                           const ClusteringResult& result);
std::vector<ExposureRow> compute_exposures_serial(const AssignmentPlan& plan, const Graph& g,
                                                  const ClusteringResult& result);
ExposureSummary exposure_summary(const AssignmentPlan& plan, const Graph& g,
                                 const ClusteringResult& result);

void write_plan_tsv(std::ostream& out, const AssignmentPlan& plan);
AssignmentPlan read_plan(std::istream& in, const AssignmentParams& params);
void write_exposures_tsv(std::ostream& out, const ExposureSummary& summary);
std::string exposure_json(const ExposureSummary& summary);

}  // namespace egonet
