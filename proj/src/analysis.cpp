#include "egonet/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "egonet/errors.hpp"
#include "egonet/io.hpp"
#include "egonet/stats.hpp"

#include "json.hpp"

namespace egonet {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

OutcomeTable::OutcomeTable(std::vector<MemberId> members, std::vector<std::string> metric_names,
                           std::vector<std::vector<double>> columns)
    : members_(std::move(members)), names_(std::move(metric_names)), columns_(std::move(columns)) {
  if (columns_.size() != names_.size()) {
    throw ValidationError("outcome table: one column per metric name required");
  }
  for (const auto& col : columns_) {
    if (col.size() != members_.size()) {
      throw ValidationError("outcome table: ragged columns");
    }
  }
  if (!std::is_sorted(members_.begin(), members_.end())) {
    std::vector<std::size_t> order(members_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return members_[a] < members_[b]; });
    std::vector<MemberId> m(members_.size());
    for (std::size_t i = 0; i < order.size(); ++i) m[i] = members_[order[i]];
    for (auto& col : columns_) {
      std::vector<double> v(col.size());
      for (std::size_t i = 0; i < order.size(); ++i) v[i] = col[order[i]];
      col = std::move(v);
    }
    members_ = std::move(m);
  }
  for (std::size_t i = 1; i < members_.size(); ++i) {
    if (members_[i] == members_[i - 1]) {
      throw ValidationError("outcome table: duplicate member " + std::to_string(members_[i]));
    }
  }
}

OutcomeTable OutcomeTable::read_tsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  std::vector<MemberId> members;
  std::vector<std::vector<double>> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = io::split_fields(line);
    if (names.empty()) {
      if (fields.size() < 2 || fields[0] != "member_id") {
        throw ParseError("outcomes.tsv", line_no, "header must be member_id<TAB>metric...");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) names.emplace_back(fields[i]);
      columns.resize(names.size());
      continue;
    }
    if (fields.size() != names.size() + 1) {
      throw ParseError("outcomes.tsv", line_no, "field count does not match header");
    }
    MemberId m = 0;
    auto [p, e] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), m);
    if (e != std::errc{}) throw ParseError("outcomes.tsv", line_no, "bad member id");
    members.push_back(m);
    for (std::size_t i = 0; i < names.size(); ++i) {
      char* end = nullptr;
      const std::string tok(fields[i + 1]);
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || !std::isfinite(v)) {
        throw ParseError("outcomes.tsv", line_no, "bad metric value '" + tok + "'");
      }
      columns[i].push_back(v);
    }
  }
  if (names.empty()) throw ValidationError("outcomes.tsv: empty file");
  return OutcomeTable(std::move(members), std::move(names), std::move(columns));
}

void OutcomeTable::write_tsv(std::ostream& out) const {
  out << "member_id";
  for (const auto& n : names_) out << '\t' << n;
  out << '\n';
  for (std::size_t r = 0; r < members_.size(); ++r) {
    out << members_[r];
    for (const auto& col : columns_) out << '\t' << io::fmt_double(col[r]);
    out << '\n';
  }
}

std::size_t OutcomeTable::metric_index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw ValidationError("unknown metric: " + name);
}

double OutcomeTable::value(MemberId m, std::size_t metric) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), m);
  if (it == members_.end() || *it != m) throw UnknownMemberError(m);
  return columns_[metric][static_cast<std::size_t>(it - members_.begin())];
}

bool OutcomeTable::has_member(MemberId m) const {
  return std::binary_search(members_.begin(), members_.end(), m);
}

TTestResult welch_t_test(const std::vector<double>& sample_a,
                         const std::vector<double>& sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2) {
    throw ValidationError("welch_t_test requires at least 2 observations per sample");
  }
  TTestResult r;
  r.n_a = sample_a.size();
  r.n_b = sample_b.size();
  r.mean_a = stats::mean(sample_a);
  r.mean_b = stats::mean(sample_b);
  r.delta_pct = r.mean_b != 0.0 ? (r.mean_a - r.mean_b) / r.mean_b : kNaN;
  const double va = stats::sample_variance(sample_a, r.mean_a);
  const double vb = stats::sample_variance(sample_b, r.mean_b);
  const double sa = va / static_cast<double>(r.n_a);
  const double sb = vb / static_cast<double>(r.n_b);
  if (sa + sb == 0.0) {
    // Both samples are constant. Equal means carry no evidence either way;
    // unequal constants are a separation no t-scale describes.
    r.df = kNaN;
    if (r.mean_a == r.mean_b) {
      r.t_stat = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_stat = r.mean_a > r.mean_b ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
      r.degenerate = true;
    }
    return r;
  }
  r.t_stat = (r.mean_a - r.mean_b) / std::sqrt(sa + sb);
  const double num = (sa + sb) * (sa + sb);
  const double den = sa * sa / static_cast<double>(r.n_a - 1) +
                     sb * sb / static_cast<double>(r.n_b - 1);
  r.df = num / den;
  r.p_value = stats::student_t_two_sided_p(r.t_stat, r.df);
  return r;
}

std::vector<TTestResult> analyze_experiment(const AssignmentPlan& plan,
                                            const OutcomeTable& outcomes,
                                            const std::vector<std::string>& metrics) {
  std::vector<MemberId> treated_egos, control_egos;
  for (std::size_t i = 0; i < plan.coin_egos.size(); ++i) {
    (plan.coin_treated[i] != 0 ? treated_egos : control_egos).push_back(plan.coin_egos[i]);
  }
  if (treated_egos.size() < 2 || control_egos.size() < 2) {
    throw ValidationError("insufficient sample: need at least 2 egos per arm (treated " +
                          std::to_string(treated_egos.size()) + ", control " +
                          std::to_string(control_egos.size()) + ")");
  }
  for (MemberId e : plan.coin_egos) {
    if (!outcomes.has_member(e)) {
      throw ValidationError("outcomes missing ego " + std::to_string(e));
    }
  }
  std::vector<TTestResult> results;
  results.reserve(metrics.size());
  for (const std::string& metric : metrics) {
    const std::size_t mi = outcomes.metric_index(metric);
    std::vector<double> a, b;
    a.reserve(treated_egos.size());
    b.reserve(control_egos.size());
    for (MemberId e : treated_egos) a.push_back(outcomes.value(e, mi));
    for (MemberId e : control_egos) b.push_back(outcomes.value(e, mi));
    TTestResult r = welch_t_test(a, b);
    r.metric = metric;
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

double smd(double mean_a, double var_a, double mean_b, double var_b) {
  const double pooled = std::sqrt((var_a + var_b) / 2.0);
  if (pooled == 0.0) return mean_a == mean_b ? 0.0 : kNaN;
  return (mean_a - mean_b) / pooled;
}

RepresentativityRow compare_populations(const std::string& name,
                                        const std::vector<double>& egos,
                                        const std::vector<double>& eligible,
                                        const std::vector<double>& all) {
  RepresentativityRow row;
  row.name = name;
  row.ego_mean = stats::mean(egos);
  row.eligible_mean = stats::mean(eligible);
  row.all_mean = stats::mean(all);
  const double ve = stats::sample_variance(egos, row.ego_mean);
  {
    const TTestResult t = welch_t_test(egos, eligible);
    row.p_vs_eligible = t.p_value;
    row.smd_vs_eligible =
        smd(row.ego_mean, ve, row.eligible_mean, stats::sample_variance(eligible, row.eligible_mean));
  }
  {
    const TTestResult t = welch_t_test(egos, all);
    row.p_vs_all = t.p_value;
    row.smd_vs_all = smd(row.ego_mean, ve, row.all_mean, stats::sample_variance(all, row.all_mean));
  }
  return row;
}

}  // namespace

RepresentativityReport representativity_check(const ClusteringResult& result, const Graph& g,
                                              const OutcomeTable* pre_metrics) {
  if (result.clusters.size() < 2) {
    throw ValidationError("representativity_check needs at least 2 egos");
  }
  RepresentativityReport report;

  std::vector<double> ego_deg, eligible_deg, all_deg;
  ego_deg.reserve(result.clusters.size());
  for (const EgoCluster& c : result.clusters) {
    ego_deg.push_back(static_cast<double>(c.original_degree));
  }
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const auto d = static_cast<double>(g.degree_at(i));
    all_deg.push_back(d);
    if (d >= 1.0) eligible_deg.push_back(d);
  }
  report.rows.push_back(compare_populations("degree", ego_deg, eligible_deg, all_deg));

  if (pre_metrics != nullptr) {
    for (std::size_t mi = 0; mi < pre_metrics->metric_names().size(); ++mi) {
      std::vector<double> ego_v, eligible_v, all_v;
      for (const EgoCluster& c : result.clusters) ego_v.push_back(pre_metrics->value(c.ego, mi));
      for (NodeIndex i = 0; i < g.node_count(); ++i) {
        const double v = pre_metrics->value(g.id_at(i), mi);
        all_v.push_back(v);
        if (g.degree_at(i) >= 1) eligible_v.push_back(v);
      }
      report.rows.push_back(compare_populations(pre_metrics->metric_names()[mi], ego_v,
                                                eligible_v, all_v));
    }
  }
  return report;
}

LeftoverReport leftover_diagnostics(const ClusteringResult& result,
                                    const OutcomeTable& metrics) {
  LeftoverReport report;
  report.leftover_count = result.leftover.size();
  report.population_count = metrics.row_count();
  report.empty_leftover = result.leftover.empty();

  for (std::size_t mi = 0; mi < metrics.metric_names().size(); ++mi) {
    const std::vector<double>& col = metrics.column(mi);
    LeftoverRow row;
    row.metric = metrics.metric_names()[mi];
    row.population_mean_raw = stats::mean(col);
    const double pop_sd = std::sqrt(stats::sample_variance(col, row.population_mean_raw));
    // Table-style normalization: the population mean reads 100 and every
    // other entry is scaled by the same factor.
    const double scale = row.population_mean_raw != 0.0 ? 100.0 / row.population_mean_raw : 0.0;
    row.population_mean = row.population_mean_raw != 0.0 ? 100.0 : 0.0;
    row.population_sd = pop_sd * scale;
    if (!report.empty_leftover) {
      std::vector<double> lv;
      lv.reserve(result.leftover.size());
      for (MemberId m : result.leftover) lv.push_back(metrics.value(m, mi));
      const double lm = stats::mean(lv);
      const double lsd = lv.size() >= 2 ? std::sqrt(stats::sample_variance(lv, lm)) : 0.0;
      row.leftover_mean = lm * scale;
      row.leftover_sd = lsd * scale;
    } else {
      row.leftover_mean = kNaN;
      row.leftover_sd = kNaN;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

AnalysisReport build_analysis_report(const AssignmentPlan& plan, const OutcomeTable& outcomes,
                                     const std::vector<std::string>& metrics,
                                     const OutcomeTable* aa_outcomes, double aa_alpha) {
  if (!(aa_alpha > 0.0 && aa_alpha < 1.0)) throw ValidationError("aa_alpha must be in (0, 1)");
  AnalysisReport report;
  report.aa_alpha = aa_alpha;
  report.significance_note = "treat p-values under 0.1 as at most suggestive at ego-level "
                             "sample sizes";
  report.results = analyze_experiment(plan, outcomes, metrics);
  if (aa_outcomes != nullptr) {
    report.has_aa = true;
    report.aa_results = analyze_experiment(plan, *aa_outcomes, metrics);
    for (const TTestResult& t : report.aa_results) {
      if (t.p_value < aa_alpha) report.aa_failures.push_back(t.metric);
    }
  }
  return report;
}

namespace {

nlohmann::json ttest_json(const TTestResult& t) {
  return {{"metric", t.metric},
          {"mean_treated", t.mean_a},
          {"mean_control", t.mean_b},
          {"delta_pct", t.delta_pct},
          {"t_stat", t.t_stat},
          {"df", t.df},
          {"p_value", t.p_value},
          {"n_treated", t.n_a},
          {"n_control", t.n_b},
          {"degenerate", t.degenerate}};
}

}  // namespace

std::string analysis_report_json(const AnalysisReport& report) {
  nlohmann::json j;
  j["results"] = nlohmann::json::array();
  for (const TTestResult& t : report.results) {
    nlohmann::json jt = ttest_json(t);
    jt["excluded_by_aa"] =
        std::find(report.aa_failures.begin(), report.aa_failures.end(), t.metric) !=
        report.aa_failures.end();
    j["results"].push_back(std::move(jt));
  }
  if (report.has_aa) {
    j["aa"] = {{"alpha", report.aa_alpha},
               {"failures", report.aa_failures},
               {"results", nlohmann::json::array()}};
    for (const TTestResult& t : report.aa_results) j["aa"]["results"].push_back(ttest_json(t));
  }
  j["note"] = report.significance_note;
  return j.dump(2) + "\n";
}

void write_analysis_table(std::ostream& out, const AnalysisReport& report) {
  out << "metric\tmean_treated\tmean_control\tdelta_pct\tt\tdf\tp\tn_treated\tn_control\t"
         "excluded_by_aa\n";
  for (const TTestResult& t : report.results) {
    const bool excluded =
        std::find(report.aa_failures.begin(), report.aa_failures.end(), t.metric) !=
        report.aa_failures.end();
    out << t.metric << '\t' << io::fmt_double(t.mean_a) << '\t' << io::fmt_double(t.mean_b)
        << '\t' << io::fmt_double(t.delta_pct) << '\t' << io::fmt_double(t.t_stat) << '\t'
        << io::fmt_double(t.df) << '\t' << io::fmt_double(t.p_value) << '\t' << t.n_a << '\t'
        << t.n_b << '\t' << (excluded ? 1 : 0) << '\n';
  }
}

std::string representativity_json(const RepresentativityReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RepresentativityRow& r : report.rows) {
    arr.push_back({{"name", r.name},
                   {"ego_mean", r.ego_mean},
                   {"eligible_mean", r.eligible_mean},
                   {"all_mean", r.all_mean},
                   {"p_vs_eligible", r.p_vs_eligible},
                   {"smd_vs_eligible", r.smd_vs_eligible},
                   {"p_vs_all", r.p_vs_all},
                   {"smd_vs_all", r.smd_vs_all}});
  }
  nlohmann::json j;
  j["representativity"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string leftover_report_json(const LeftoverReport& report) {
  nlohmann::json j;
  j["leftover_count"] = report.leftover_count;
  j["population_count"] = report.population_count;
  j["empty_leftover"] = report.empty_leftover;
  j["rows"] = nlohmann::json::array();
  for (const LeftoverRow& r : report.rows) {
    j["rows"].push_back({{"metric", r.metric},
                         {"population_mean_raw", r.population_mean_raw},
                         {"population_mean", r.population_mean},
                         {"population_sd", r.population_sd},
                         {"leftover_mean", r.leftover_mean},
                         {"leftover_sd", r.leftover_sd}});
  }
  return j.dump(2) + "\n";
}

void write_leftover_table(std::ostream& out, const LeftoverReport& report) {
  if (report.empty_leftover) {
    out << "# leftover set is empty; population column only\n";
  }
  out << "metric\tpopulation_mean\tpopulation_sd\tleftover_mean\tleftover_sd\n";
  for (const LeftoverRow& r : report.rows) {
    out << r.metric << '\t' << io::fmt_double(r.population_mean) << '\t'
        << io::fmt_double(r.population_sd) << '\t'
        << (report.empty_leftover ? "NA" : io::fmt_double(r.leftover_mean)) << '\t'
        << (report.empty_leftover ? "NA" : io::fmt_double(r.leftover_sd)) << '\n';
  }
}

}  // namespace egonet
