#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "smvi/cli.hpp"
#include "smvi/errors.hpp"
#include "smvi/io.hpp"
#include "smvi/problems.hpp"

using namespace smvi;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
  fs::path dir = fs::temp_directory_path() / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("problem references") {
  CHECK(resolve_problem("box:7").name == "box-d5-s7");
  CHECK(resolve_problem("box").name == "box-d5-s1");
  CHECK(resolve_problem("planted:2").name == "planted-d5x3-s2");
  CHECK(resolve_problem("l1:5").name == "l1-d8-s5");

  CHECK_THROWS_AS(resolve_problem("nope:1"), DomainError);
  CHECK_THROWS_AS(resolve_problem("box:abc"), DomainError);
  CHECK_THROWS_AS(resolve_problem("box:-2"), DomainError);
  CHECK_THROWS_AS(resolve_problem(""), DomainError);
  CHECK_THROWS_AS(resolve_problem("/no/such/file.json"), DomainError);
}

TEST_CASE("problem files round trip") {
  BenchmarkProblem p = make_planted_singleton(3, 2, 1);
  std::string s1 = problem_to_json(p);
  BenchmarkProblem q = problem_from_json(s1);
  CHECK(problem_to_json(q) == s1);  // doubles survive exactly

  CHECK(q.name == p.name);
  CHECK(q.x0 == p.x0);
  CHECK(q.planted == p.planted);
  CHECK(q.spec.A.matrix() == p.spec.A.matrix());
  CHECK(q.spec.theta1 == p.spec.theta1);
  CHECK(q.spec.family.size() == p.spec.family.size());
  CHECK(write_config(q.recommended_config) ==
        write_config(p.recommended_config));

  // the reloaded instance behaves identically
  StepResult a = step(p.spec, p.recommended_config, p.x0, p.x0, 0);
  StepResult b = step(q.spec, q.recommended_config, q.x0, q.x0, 0);
  CHECK(a.x_next == b.x_next);
  CHECK(a.state.y == b.state.y);

  fs::path dir = fresh_dir("smvi_test_roundtrip");
  fs::path file = dir / "prob.json";
  save_problem(p, file.string());
  BenchmarkProblem r = load_problem(file.string());
  CHECK(problem_to_json(r) == s1);
  CHECK(resolve_problem(file.string()).name == p.name);

  // box and l1 instances serialize too
  for (const BenchmarkProblem& other :
       {make_box_feasibility(4, 2), make_l1_denoise(5, 1.0, 3)}) {
    std::string os1 = problem_to_json(other);
    CHECK(problem_to_json(problem_from_json(os1)) == os1);
  }

  // analytic solution sets carry code, not data
  BenchmarkProblem an = make_box_feasibility(2, 2);
  an.gamma_set = GammaSet::analytic([](const Point& x) { return x; });
  CHECK_THROWS_AS(problem_to_json(an), DomainError);

  CHECK_THROWS_AS(problem_from_json("{ not json"), DomainError);
  CHECK_THROWS_AS(problem_from_json("{}"), DomainError);
  CHECK_THROWS_AS(load_problem((dir / "missing.json").string()), DomainError);
}

TEST_CASE("flat config format") {
  SolverConfig base = SolverConfig::defaults();
  SolverConfig got = parse_config(
      "# solver overrides\n"
      "gamma = 0.25\n"
      "lambda=0.75\n"
      "\n"
      "alpha = constant:0.4\n"
      "sigma = power:1:0.5:4\n"
      "weights = constant:0.5, harmonic:1:2\n"
      "max_iter = 50\n"
      "stop_tol = 1e-9\n"
      "dykstra_max_iter = 500\n"
      "dykstra_tol = 1e-11\n",
      base);
  CHECK(got.gamma == 0.25);
  CHECK(got.lambda == 0.75);
  CHECK(got.alpha_schedule.describe() == "constant:0.40000000000000002");
  CHECK(got.sigma_schedule.value(0) == 0.5);
  REQUIRE(got.lambda_schedules.size() == 2);
  CHECK(got.lambda_schedules[1].value(0) == 0.5);
  CHECK(got.max_iter == 50);
  CHECK(got.stop_tol == 1e-9);
  CHECK(got.dykstra.max_iter == 500);
  CHECK(got.dykstra.tol == 1e-11);

  // untouched keys keep their base values
  SolverConfig partial = parse_config("gamma = 0.1\n", base);
  CHECK(partial.lambda == base.lambda);
  CHECK(partial.max_iter == base.max_iter);

  // write -> parse is the identity
  SolverConfig back = parse_config(write_config(got), base);
  CHECK(write_config(back) == write_config(got));

  CHECK_THROWS_AS(parse_config("gama = 0.1\n", base), DomainError);
  CHECK_THROWS_AS(parse_config("gamma 0.1\n", base), DomainError);
  CHECK_THROWS_AS(parse_config("gamma = zebra\n", base), DomainError);
  CHECK_THROWS_AS(parse_config("alpha = linear:1\n", base), DomainError);
  CHECK_THROWS_AS(parse_config("max_iter = 2.5\n", base), DomainError);
  try {
    parse_config("gamma = 0.1\nbogus = 3\n", base);
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("trace csv round trip") {
  std::vector<TraceRecord> rows(3);
  rows[0] = TraceRecord{0, 0.1, 0.05, 0.051, 3.7, 0.0, std::nullopt, 0.5, 0.5};
  rows[1] = TraceRecord{1, 1e-7, 5.5e-8, 6e-8, 0.37, 1.25, 0.125, 1.0 / 3.0, 0.5};
  rows[2] = TraceRecord{2, 0.0, 0.0, 0.0, 0.0, 1.3, 1e-300, 0.25, 0.5};

  std::ostringstream out;
  write_trace_csv(out, rows);
  std::string text = out.str();
  CHECK(text.rfind(kTraceHeader, 0) == 0);
  CHECK(text.find(",,") != std::string::npos);  // empty dist_p on row 0

  std::istringstream in(text);
  std::vector<TraceRecord> got = parse_trace_csv(in);
  REQUIRE(got.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(got[i].n == rows[i].n);
    CHECK(got[i].res_split == rows[i].res_split);
    CHECK(got[i].res_yz == rows[i].res_yz);
    CHECK(got[i].bound_yz == rows[i].bound_yz);
    CHECK(got[i].ratio_cond2 == rows[i].ratio_cond2);
    CHECK(got[i].dist_x0 == rows[i].dist_x0);
    CHECK(got[i].dist_p == rows[i].dist_p);
    CHECK(got[i].sigma_n == rows[i].sigma_n);
    CHECK(got[i].alpha_n == rows[i].alpha_n);
  }

  std::istringstream bad1("res,but,wrong,header\n");
  CHECK_THROWS_AS(parse_trace_csv(bad1), DomainError);
  std::istringstream bad2(std::string(kTraceHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(parse_trace_csv(bad2), DomainError);
  std::istringstream bad3(std::string(kTraceHeader) +
                          "\n0,zebra,0,0,0,0,,0.5,0.5\n");
  CHECK_THROWS_AS(parse_trace_csv(bad3), DomainError);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_trace_csv(empty), DomainError);

  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(0.5) == "0.5");
  for (double v : {1.0 / 3.0, 2.5e-17, 1e300, 0.0, -0.125}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("output path resolution") {
  unsetenv("SMVI_OUT_DIR");
  CHECK(resolve_output_path("t.csv") == "t.csv");
  CHECK(resolve_output_path("/abs/t.csv") == "/abs/t.csv");

  fs::path dir = fresh_dir("smvi_test_outdir");
  setenv("SMVI_OUT_DIR", dir.c_str(), 1);
  CHECK(resolve_output_path("t.csv") == (dir / "t.csv").string());
  CHECK(resolve_output_path("/abs/t.csv") == "/abs/t.csv");
  unsetenv("SMVI_OUT_DIR");
}

TEST_CASE("cmd_run end to end") {
  fs::path dir = fresh_dir("smvi_test_run");
  RunManifest m;
  m.problem_ref = "box:7";
  m.trace_path = (dir / "trace.csv").string();
  m.summary_path = (dir / "sum.json").string();

  std::ostringstream out, err;
  int code = cmd_run(m, out, err);
  CHECK(code == kExitOk);
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "sum.json"));
  CHECK(out.str().find("box-d5-s7") != std::string::npos);
  CHECK(out.str().find("tolerance reached") != std::string::npos);
  CHECK(out.str().find("checks: bound pass, probes pass, chain pass") !=
        std::string::npos);

  std::ifstream tf(dir / "trace.csv");
  std::vector<TraceRecord> trace = parse_trace_csv(tf);
  CHECK(!trace.empty());

  nlohmann::json summary = nlohmann::json::parse(slurp(dir / "sum.json"));
  CHECK(summary["exit_code"] == 0);
  CHECK(summary["termination"] == "tolerance");
  CHECK(summary["checks"]["bound_failures"] == 0);
  CHECK(summary["problem"] == "box-d5-s7");
}

TEST_CASE("cmd_run rejects a bad gamma with the violated bound") {
  fs::path dir = fresh_dir("smvi_test_badgamma");
  std::ofstream cf(dir / "bad.cfg");
  cf << "gamma = 10\n";
  cf.close();

  RunManifest m;
  m.problem_ref = "box:7";
  m.config_path = (dir / "bad.cfg").string();
  m.trace_path = (dir / "trace.csv").string();
  m.summary_path = (dir / "sum.json").string();

  std::ostringstream out, err;
  int code = cmd_run(m, out, err);
  CHECK(code == kExitError);
  CHECK(err.str().find("config error [gamma-range]") != std::string::npos);
  CHECK(err.str().find("must lie in (0,") != std::string::npos);
  CHECK(!fs::exists(dir / "trace.csv"));  // nothing ran
}

TEST_CASE("cmd_run with a zero budget reports exhaustion") {
  fs::path dir = fresh_dir("smvi_test_budget");
  RunManifest m;
  m.problem_ref = "box:7";
  m.trace_path = (dir / "trace.csv").string();
  m.summary_path = (dir / "sum.json").string();
  m.max_iter_override = 0;

  std::ostringstream out, err;
  int code = cmd_run(m, out, err);
  CHECK(code == kExitError);
  CHECK(out.str().find("iteration budget exhausted") != std::string::npos);
  nlohmann::json summary = nlohmann::json::parse(slurp(dir / "sum.json"));
  CHECK(summary["termination"] == "budget");
  CHECK(summary["exit_code"] == 1);
}

TEST_CASE("cmd_run reports unresolvable problems") {
  std::ostringstream out, err;
  RunManifest m;
  m.problem_ref = "nope:3";
  fs::path dir = fresh_dir("smvi_test_unresolved");
  m.trace_path = (dir / "t.csv").string();
  m.summary_path = (dir / "s.json").string();
  CHECK(cmd_run(m, out, err) == kExitError);
  CHECK(err.str().find("error:") != std::string::npos);
}

TEST_CASE("cmd_verify round trip and fault injection") {
  fs::path dir = fresh_dir("smvi_test_verify");
  RunManifest m;
  m.problem_ref = "l1:4";
  m.trace_path = (dir / "trace.csv").string();
  m.summary_path = (dir / "sum.json").string();
  std::ostringstream out0, err0;
  REQUIRE(cmd_run(m, out0, err0) == kExitOk);

  std::ostringstream out1, err1;
  CHECK(cmd_verify(m.trace_path, out1, err1) == kExitOk);
  CHECK(out1.str().find("pass") != std::string::npos);

  // perturb one row's correction residual beyond its bound
  std::ifstream tf(m.trace_path);
  std::vector<TraceRecord> rows = parse_trace_csv(tf);
  tf.close();
  REQUIRE(rows.size() >= 2);
  rows[1].res_yz = rows[1].bound_yz + 1.0;
  fs::path bad = dir / "bad.csv";
  std::ofstream bf(bad);
  write_trace_csv(bf, rows);
  bf.close();

  std::ostringstream out2, err2;
  CHECK(cmd_verify(bad.string(), out2, err2) == kExitCheckFailed);
  CHECK(out2.str().find("first violation at data row 1") != std::string::npos);

  // header-only file: degenerate input
  fs::path hdr = dir / "empty.csv";
  std::ofstream hf(hdr);
  hf << kTraceHeader << "\n";
  hf.close();
  std::ostringstream out3, err3;
  CHECK(cmd_verify(hdr.string(), out3, err3) == kExitError);
  CHECK(err3.str().find("no data rows") != std::string::npos);

  std::ostringstream out4, err4;
  CHECK(cmd_verify((dir / "missing.csv").string(), out4, err4) == kExitError);

  // negative entries are rejected as corrupt
  std::vector<TraceRecord> neg = rows;
  neg[1] = rows[0];
  neg[1].res_yz = 0.0;
  neg[1].dist_x0 = -1.0;
  fs::path negp = dir / "neg.csv";
  std::ofstream nf(negp);
  write_trace_csv(nf, neg);
  nf.close();
  std::ostringstream out5, err5;
  CHECK(cmd_verify(negp.string(), out5, err5) == kExitCheckFailed);
  CHECK(out5.str().find("finite nonnegative fields: FAIL") != std::string::npos);
}

TEST_CASE("cmd_make_problem writes a loadable instance") {
  fs::path dir = fresh_dir("smvi_test_make");
  fs::path file = dir / "box3.json";
  std::ostringstream out, err;
  CHECK(cmd_make_problem("box:3", file.string(), out, err) == kExitOk);
  CHECK(out.str().find("wrote") != std::string::npos);
  BenchmarkProblem p = load_problem(file.string());
  CHECK(p.name == "box-d5-s3");

  std::ostringstream out2, err2;
  CHECK(cmd_make_problem("nope:1", (dir / "x.json").string(), out2, err2) ==
        kExitError);
}
