// End-to-end checks of the CLI binary (path supplied via EGONET_CLI):
// artifacts must match direct library calls byte for byte, reruns must be
// idempotent, and the exit-code contract is 0 / 1 / 2 for success /
// validation failure / A-A gate failure.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "egonet/analysis.hpp"
#include "egonet/assignment.hpp"
#include "egonet/clustering.hpp"
#include "egonet/simulation.hpp"

namespace fs = std::filesystem;

namespace {

const char* kEpoch = "SOURCE_DATE_EPOCH=1700000000";

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "egonet_pipeline_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string cli_path() {
  const char* p = std::getenv("EGONET_CLI");
  REQUIRE_MESSAGE(p != nullptr, "EGONET_CLI must point at the egonet binary");
  return p;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("stdout." + std::to_string(counter));
  const fs::path err = work_dir() / ("stderr." + std::to_string(counter));
  ++counter;
  const std::string cmd = "cd '" + work_dir().string() + "' && " + kEpoch + " '" + cli_path() +
                          "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("cli artifacts equal direct library output byte for byte") {
  // Stage 1: graph generation.
  auto res = run_cli(
      "simulate graph --kind power-law --n 800 --exponent 2.5 --min-degree 3 "
      "--seed 5 --out-dir g");
  REQUIRE_MESSAGE(res.code == 0, res.err);

  egonet::GraphSpec spec;
  spec.kind = egonet::GraphKind::power_law;
  spec.node_count = 800;
  spec.exponent = 2.5;
  spec.min_degree = 3;
  spec.seed = 5;
  const egonet::Graph g = egonet::generate_graph(spec);
  std::ostringstream edges;
  g.write_edges_tsv(edges);
  CHECK(edges.str() == slurp(work_dir() / "g/graph.tsv"));
  CHECK(slurp(work_dir() / "g/graph_summary.json") == g.summary_json());

  // Stage 2: clustering (stratified + reattach is the CLI default).
  res = run_cli(
      "cluster --edges g/graph.tsv --algo stratified --seed 9 --target-loss 0.2 "
      "--bins 8 --out-dir c");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  const auto clustering = egonet::reattach_alters(g, egonet::stratified_cluster(g, 0.2, 8, 9));
  {
    std::ostringstream clusters, leftover, draws;
    egonet::write_clusters_tsv(clusters, clustering);
    egonet::write_leftover(leftover, clustering);
    egonet::write_draws_tsv(draws, clustering);
    CHECK(clusters.str() == slurp(work_dir() / "c/clusters.tsv"));
    CHECK(leftover.str() == slurp(work_dir() / "c/leftover.txt"));
    CHECK(draws.str() == slurp(work_dir() / "c/draws.tsv"));
    CHECK(egonet::clusters_json(clustering) == slurp(work_dir() / "c/clusters.json"));
  }

  // Stage 3: assignment.
  res = run_cli(
      "assign --clusters c/clusters.tsv --leftover c/leftover.txt --edges g/graph.tsv "
      "--mode all-treated --p 0.5 --seed 4 --out-dir a");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  const auto plan = egonet::assign(clustering, egonet::EgoMode::all_treated, 0.5, 4);
  {
    std::ostringstream plan_out;
    egonet::write_plan_tsv(plan_out, plan);
    CHECK(plan_out.str() == slurp(work_dir() / "a/plan.tsv"));
    const auto summary = egonet::exposure_summary(plan, g, clustering);
    std::ostringstream expo;
    egonet::write_exposures_tsv(expo, summary);
    CHECK(expo.str() == slurp(work_dir() / "a/exposures.tsv"));
    CHECK(egonet::exposure_json(summary) == slurp(work_dir() / "a/exposure.json"));
  }

  // Stage 4: synthetic outcomes.
  res = run_cli(
      "simulate outcomes --edges g/graph.tsv --plan a/plan.tsv --beta0 1 --beta-d 0.3 "
      "--beta-n 0.5 --sigma 0.4 --shape linear --noise gaussian --seed 13 --out-dir o");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  egonet::OutcomeModel model;
  model.beta0 = 1.0;
  model.beta_d = 0.3;
  model.beta_n = 0.5;
  model.sigma = 0.4;
  const auto outcomes = egonet::simulate_outcomes(g, plan, model, 13);
  {
    std::ostringstream out;
    outcomes.write_tsv(out);
    CHECK(out.str() == slurp(work_dir() / "o/outcomes.tsv"));
  }

  // Stage 5: analysis (parameters resolved from the plan sidecar).
  res = run_cli("analyze --plan a/plan.tsv --outcomes o/outcomes.tsv --out-dir an");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  const auto report = egonet::build_analysis_report(plan, outcomes, {"outcome"}, nullptr, 0.05);
  {
    std::ostringstream table;
    egonet::write_analysis_table(table, report);
    CHECK(table.str() == slurp(work_dir() / "an/analysis.tsv"));
    CHECK(egonet::analysis_report_json(report) == slurp(work_dir() / "an/analysis.json"));
  }

  // Stage 6: diagnostics accept the artifacts they were built from.
  res = run_cli(
      "diagnose --edges g/graph.tsv --clusters c/clusters.tsv --leftover c/leftover.txt "
      "--draws c/draws.tsv --out-dir d");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  CHECK(fs::exists(work_dir() / "d/diagnose.json"));
  CHECK(fs::exists(work_dir() / "d/diagnostics.tsv"));
}

TEST_CASE("reruns with the same seed are byte-identical") {
  // Sidecars record input paths verbatim, so both cluster runs must read the
  // same graph file; the graph stage itself is re-run into a second out dir.
  auto res = run_cli("simulate graph --kind er --n 400 --mean-degree 6 --seed 2 --out-dir r1");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  res = run_cli("simulate graph --kind er --n 400 --mean-degree 6 --seed 2 --out-dir r2");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  res = run_cli("cluster --edges r1/graph.tsv --seed 3 --target-loss 0.2 --bins 5 --out-dir r1c");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  res = run_cli("cluster --edges r1/graph.tsv --seed 3 --target-loss 0.2 --bins 5 --out-dir r2c");
  REQUIRE_MESSAGE(res.code == 0, res.err);

  for (const char* f : {"graph.tsv", "graph_summary.json", "graph.tsv.meta.json"}) {
    CHECK(slurp(work_dir() / "r1" / f) == slurp(work_dir() / "r2" / f));
  }
  for (const char* f : {"clusters.tsv", "leftover.txt", "draws.tsv", "clusters.json",
                        "clusters.tsv.meta.json"}) {
    CHECK(slurp(work_dir() / "r1c" / f) == slurp(work_dir() / "r2c" / f));
  }

  // The sidecar records the input hash and the pinned timestamp.
  const std::string sidecar = slurp(work_dir() / "r1c/clusters.tsv.meta.json");
  CHECK(sidecar.find("fnv1a:") != std::string::npos);
  CHECK(sidecar.find("1700000000") != std::string::npos);
}

TEST_CASE("exit code 1 on validation and parse failures") {
  CHECK(run_cli("cluster --edges does-not-exist.tsv --seed 1 --out-dir x").code == 1);
  CHECK(run_cli("definitely-not-a-subcommand").code == 1);
  CHECK(run_cli("").code == 1);  // a subcommand is required

  // Malformed edge input is a validation failure, not a crash.
  std::ofstream bad(work_dir() / "bad_edges.tsv");
  bad << "1\t1\t1.0\n";  // self loop
  bad.close();
  const auto res = run_cli("ingest --edges bad_edges.tsv --out-dir bad_out");
  CHECK(res.code == 1);
  CHECK(res.err.find("error:") != std::string::npos);

  // Parameter domain errors surface the same way.
  CHECK(run_cli("cluster --edges bad_edges.tsv --seed 1 --target-loss 1.5 --out-dir x").code ==
        1);
}

TEST_CASE("exit code 2 when the A/A gate trips") {
  auto res = run_cli("simulate graph --kind er --n 500 --mean-degree 8 --seed 6 --out-dir aa_g");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  res = run_cli(
      "cluster --edges aa_g/graph.tsv --seed 7 --target-loss 0.25 --bins 5 --out-dir aa_c");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  res = run_cli(
      "assign --clusters aa_c/clusters.tsv --leftover aa_c/leftover.txt --edges aa_g/graph.tsv "
      "--mode all-treated --p 0.5 --seed 8 --out-dir aa_a");
  REQUIRE_MESSAGE(res.code == 0, res.err);

  // Rebuild the plan in-process to rig pre-experiment outcomes by arm.
  const egonet::Graph g = egonet::Graph::load((work_dir() / "aa_g/graph.tsv").string());
  std::ifstream plan_in(work_dir() / "aa_a/plan.tsv");
  egonet::AssignmentParams params;
  params.mode = egonet::EgoMode::all_treated;
  params.p = 0.5;
  params.seed = 8;
  const auto plan = egonet::read_plan(plan_in, params);

  std::ofstream aa(work_dir() / "aa_pre.tsv");
  std::ofstream post(work_dir() / "aa_post.tsv");
  aa << "member_id\tmetric\n";
  post << "member_id\tmetric\n";
  double ramp = 0.0;
  for (const auto& row : plan.rows) {
    ramp += 0.001;
    double biased = ramp;
    if (row.role != egonet::MemberRole::leftover && plan.ego_coin(row.ego)) biased += 50.0;
    aa << row.member << "\t" << biased << "\n";
    post << row.member << "\t" << ramp << "\n";
  }
  aa.close();
  post.close();

  res = run_cli(
      "analyze --plan aa_a/plan.tsv --outcomes aa_post.tsv --aa-outcomes aa_pre.tsv "
      "--out-dir aa_an");
  CHECK(res.code == 2);
  CHECK(res.err.find("A/A failure") != std::string::npos);
  CHECK(res.err.find("not re-seeded") != std::string::npos);
  CHECK(slurp(work_dir() / "aa_an/analysis.json").find("\"excluded_by_aa\": true") !=
        std::string::npos);
}

TEST_CASE("assign warns when the clustering artifact is stale") {
  auto res = run_cli("simulate graph --kind er --n 300 --mean-degree 5 --seed 1 --out-dir st_g");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  // SOURCE_DATE_EPOCH pins the cluster sidecar to 2023-11-14; one day later
  // is fine, 40 days later trips the default 30-day limit.
  res = run_cli("cluster --edges st_g/graph.tsv --seed 2 --target-loss 0.2 --bins 4 "
                "--out-dir st_c");
  REQUIRE_MESSAGE(res.code == 0, res.err);

  const std::string assign_args =
      "assign --clusters st_c/clusters.tsv --leftover st_c/leftover.txt "
      "--mode all-treated --p 0.5 --seed 3 --out-dir st_a";
  const std::string fresh = "cd '" + work_dir().string() +
                            "' && SOURCE_DATE_EPOCH=1700086400 '" + cli_path() + "' " +
                            assign_args + " 2> st_fresh.err";
  const std::string stale = "cd '" + work_dir().string() +
                            "' && SOURCE_DATE_EPOCH=1703456000 '" + cli_path() + "' " +
                            assign_args + " 2> st_stale.err";
  REQUIRE(WEXITSTATUS(std::system(fresh.c_str())) == 0);
  CHECK(slurp(work_dir() / "st_fresh.err").find("warning:") == std::string::npos);
  REQUIRE(WEXITSTATUS(std::system(stale.c_str())) == 0);
  const std::string err = slurp(work_dir() / "st_stale.err");
  CHECK(err.find("warning: clustering artifact is") != std::string::npos);
  CHECK(err.find("days old") != std::string::npos);

  // Without a sidecar the age check degrades to a note, not a failure.
  fs::copy_file(work_dir() / "st_c/clusters.tsv", work_dir() / "clusters_nosidecar.tsv");
  res = run_cli(
      "assign --clusters clusters_nosidecar.tsv --leftover st_c/leftover.txt "
      "--mode all-treated --p 0.5 --seed 3 --out-dir st_b");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  CHECK(res.err.find("no sidecar") != std::string::npos);
}

TEST_CASE("diagnose rejects clusters inconsistent with the graph") {
  auto res = run_cli("simulate graph --kind er --n 200 --mean-degree 6 --seed 9 --out-dir dg");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  res = run_cli("cluster --edges dg/graph.tsv --seed 1 --target-loss 0.2 --bins 4 --out-dir dc");
  REQUIRE_MESSAGE(res.code == 0, res.err);

  // Append a cluster whose ego does not exist in the graph.
  std::ofstream tampered(work_dir() / "dc/clusters.tsv", std::ios::app);
  tampered << "999999\t0\t0\t\n";
  tampered.close();
  res = run_cli(
      "diagnose --edges dg/graph.tsv --clusters dc/clusters.tsv --leftover dc/leftover.txt "
      "--out-dir dd");
  CHECK(res.code == 1);
  CHECK(res.err.find("error:") != std::string::npos);
}

TEST_CASE("study subcommand writes a self-describing report") {
  std::ofstream cfg(work_dir() / "study.json");
  cfg << R"({
    "study": "attenuation",
    "graph": {"kind": "disjoint-stars", "star_count": 40, "leaves": 4, "seed": 2},
    "model": {"beta0": 1.0, "beta_d": 0.0, "beta_n": 2.0, "sigma": 0.2,
              "shape": "linear", "noise": "gaussian"},
    "target_loss": 0.0, "bin_count": 2, "p": 0.5,
    "replications": 30, "seed": 5, "mode": "all-treated"
  })";
  cfg.close();
  const auto res = run_cli("simulate study --config study.json --out-dir study_out");
  REQUIRE_MESSAGE(res.code == 0, res.err);
  const std::string report = slurp(work_dir() / "study_out/study.json");
  CHECK(report.find("\"mean_estimate\"") != std::string::npos);
  CHECK(report.find("\"replications\": 30") != std::string::npos);
}
