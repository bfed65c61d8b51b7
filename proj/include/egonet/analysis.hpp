#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "egonet/assignment.hpp"
#include "egonet/clustering.hpp"
#include "egonet/graph.hpp"

namespace egonet {

// Column-oriented metric table keyed by member id (rows ascending).
class OutcomeTable {
 public:
  OutcomeTable() = default;
  OutcomeTable(std::vector<MemberId> members, std::vector<std::string> metric_names,
               std::vector<std::vector<double>> columns);

  static OutcomeTable read_tsv(std::istream& in);
  void write_tsv(std::ostream& out) const;

  const std::vector<MemberId>& members() const { return members_; }
  const std::vector<std::string>& metric_names() const { return names_; }
  std::size_t metric_index(const std::string& name) const;  // throws if absent
  const std::vector<double>& column(std::size_t metric) const { return columns_[metric]; }
  double value(MemberId m, std::size_t metric) const;  // throws UnknownMemberError
  bool has_member(MemberId m) const;
  std::size_t row_count() const { return members_.size(); }

 private:
  std::vector<MemberId> members_;  // ascending
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;  // columns_[metric][row]
};

struct TTestResult {
  std::string metric;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double delta_pct = 0.0;  // (mean_a - mean_b) / mean_b, as a fraction
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool degenerate = false;  // both variances zero with unequal means
};

TTestResult welch_t_test(const std::vector<double>& sample_a,
                         const std::vector<double>& sample_b);

// Arms are ego-level: sample A holds egos whose alters are treated, sample B
// egos whose alters are control. Alters and leftover members never enter.
std::vector<TTestResult> analyze_experiment(const AssignmentPlan& plan,
                                            const OutcomeTable& outcomes,
                                            const std::vector<std::string>& metrics);

struct RepresentativityRow {
  std::string name;  // "degree" or a metric name
  double ego_mean = 0.0;
  double eligible_mean = 0.0;
  double all_mean = 0.0;
  double p_vs_eligible = 1.0;
  double smd_vs_eligible = 0.0;  // standardized mean difference
  double p_vs_all = 1.0;
  double smd_vs_all = 0.0;
};

struct RepresentativityReport {
  std::vector<RepresentativityRow> rows;
};

// Compares ego degree (and any supplied pre-experiment metrics) against the
// ego-eligible population (degree >= 1), with the all-nodes comparison kept
// alongside since either reading of "population" is defensible.
RepresentativityReport representativity_check(const ClusteringResult& result, const Graph& g,
                                              const OutcomeTable* pre_metrics);

struct LeftoverRow {
  std::string metric;
  double population_mean_raw = 0.0;
  double population_mean = 100.0;  // normalized so the population reads 100
  double population_sd = 0.0;
  double leftover_mean = 0.0;
  double leftover_sd = 0.0;
};

struct LeftoverReport {
  bool empty_leftover = false;
  std::size_t leftover_count = 0;
  std::size_t population_count = 0;
  std::vector<LeftoverRow> rows;
};

LeftoverReport leftover_diagnostics(const ClusteringResult& result,
                                    const OutcomeTable& metrics);

struct AnalysisReport {
  std::vector<TTestResult> results;
  std::vector<TTestResult> aa_results;
  std::vector<std::string> aa_failures;  // metrics significant in the A/A pass
  double aa_alpha = 0.05;
  bool has_aa = false;
  std::string significance_note;
};

// Runs the experiment t-tests, optionally preceded by an A/A pass on
// pre-experiment outcomes under the same plan. Metrics failing A/A stay in
// the report but are flagged excluded; the randomization is never re-seeded.
AnalysisReport build_analysis_report(const AssignmentPlan& plan, const OutcomeTable& outcomes,
                                     const std::vector<std::string>& metrics,
                                     const OutcomeTable* aa_outcomes, double aa_alpha);

std::string analysis_report_json(const AnalysisReport& report);
void write_analysis_table(std::ostream& out, const AnalysisReport& report);
std::string representativity_json(const RepresentativityReport& report);
std::string leftover_report_json(const LeftoverReport& report);
void write_leftover_table(std::ostream& out, const LeftoverReport& report);

}  // namespace egonet
