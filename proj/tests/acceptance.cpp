// Acceptance gate: runs the full benchmark suite and grades ten criteria,
// printing one [PASS]/[FAIL] line per criterion. Exit code = failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smvi/diagnostics.hpp"
#include "smvi/problems.hpp"
#include "smvi/rng.hpp"
#include "smvi/solver.hpp"

using namespace smvi;
namespace fs = std::filesystem;

namespace {

// ---- criterion 8 is structural: a real cannot be added to a Point --------
template <typename A, typename B>
concept AddsWith = requires(A a, B b) { a + b; };
template <typename A, typename B>
concept SubtractsWith = requires(A a, B b) { a - b; };

static_assert(!AddsWith<Point, double>);
static_assert(!AddsWith<double, Point>);
static_assert(!AddsWith<Point, int>);
static_assert(!SubtractsWith<Point, double>);
static_assert(!SubtractsWith<double, Point>);
static_assert(AddsWith<Point, Point>);  // vector-space ops stay available
static_assert(SubtractsWith<Point, Point>);

struct SuiteRun {
  const BenchmarkProblem* problem;  // into the suite vector
  RunResult result;
  RunChecks checks;
  bool planted_singleton = false;
  bool box = false;
};

struct Line {
  int id;
  bool pass;
  std::string text;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

Point random_point(DetRng& rng, Eigen::Index dim, double scale) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.uniform(-scale, scale);
  return Point(std::move(v));
}

Eigen::MatrixXd random_gaussian(DetRng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::MatrixXd random_orthogonal(DetRng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_gaussian(rng, n, n));
  return qr.householderQ();
}

Eigen::MatrixXd random_spd(DetRng& rng, Eigen::Index n, double lo, double hi) {
  Eigen::MatrixXd q = random_orthogonal(rng, n);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = rng.uniform(lo, hi);
  Eigen::MatrixXd p = q * d.asDiagonal() * q.transpose();
  return 0.5 * (p + p.transpose());
}

HalfSpace whole_hs(Eigen::Index dim) { return HalfSpace(Point::zero(dim), 0.0); }

IterateState synthetic_state(DetRng& rng, Eigen::Index d1, Eigen::Index d2) {
  TraceRecord tr;
  tr.alpha_n = rng.uniform(0.05, 0.95);
  tr.sigma_n = rng.uniform(0.05, 0.95);
  Point x = random_point(rng, d1, 3.0);
  Point u = random_point(rng, d1, 3.0);
  return IterateState{0,
                      x,
                      u,
                      random_point(rng, d1, 3.0),
                      random_point(rng, d1, 3.0),
                      random_point(rng, d2, 3.0),
                      random_point(rng, d2, 3.0),
                      whole_hs(d1),
                      whole_hs(d1),
                      tr};
}

}  // namespace

int main() {
  std::vector<Line> lines;
  const auto grade = [&](int id, bool pass, const std::string& text) {
    lines.push_back(Line{id, pass, text});
  };

  // ---- the benchmark suite ------------------------------------------------
  std::vector<BenchmarkProblem> suite;
  for (unsigned s = 1; s <= 10; ++s) suite.push_back(make_box_feasibility(5, s));
  for (auto [d1, d2] : {std::pair{2, 2}, std::pair{5, 3}, std::pair{20, 10}}) {
    for (unsigned s = 1; s <= 10; ++s)
      suite.push_back(make_planted_singleton(d1, d2, s));
  }
  for (int dim = 2; dim <= 20; ++dim)
    suite.push_back(make_l1_denoise(dim, 1.0, static_cast<unsigned>(dim)));

  std::vector<SuiteRun> runs;
  runs.reserve(suite.size());
  const auto t0 = std::chrono::steady_clock::now();
  for (const BenchmarkProblem& prob : suite) {
    RunResult result =
        run(prob.spec, prob.recommended_config, prob.x0, prob.planted);
    RunChecks checks;
    if (!result.states.empty()) {
      checks = run_checks(prob.spec, prob.recommended_config, result.states,
                          result.states.front().x, prob.planted);
    }
    runs.push_back(SuiteRun{&prob, std::move(result), checks,
                            prob.name.rfind("planted-", 0) == 0,
                            prob.name.rfind("box-", 0) == 0});
  }
  const double suite_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  long total_iterates = 0;
  for (const SuiteRun& sr : runs) total_iterates += sr.checks.iterates;

  // ---- criterion 1: correction bound everywhere, under a minute ----------
  {
    long violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const SuiteRun& sr : runs) {
      violations += sr.checks.bound_failures;
      worst = std::min(worst, sr.checks.min_bound_margin);
    }
    const bool in_time = suite_seconds < 60.0;
    std::ostringstream os;
    os << "correction bound ||y-z|| <= gamma ||A*|| ||w-Az|| + 1e-10 on all "
       << total_iterates << " iterates of " << runs.size() << " runs ("
       << violations << " violations, min margin " << fmt(worst) << ", suite "
       << fmt(suite_seconds) << "s)";
    grade(1, violations == 0 && in_time, os.str());
  }

  // ---- criterion 2: planted limits reached to 1e-4 ------------------------
  {
    long misses = 0;
    double worst = 0.0;
    std::string worst_name = "-";
    for (const SuiteRun& sr : runs) {
      if (!sr.planted_singleton && !sr.box) continue;
      const double d = distance(sr.result.final_x, sr.problem->planted);
      const bool within_budget =
          static_cast<long>(sr.result.states.size()) <= 10000;
      if (d > worst) {
        worst = d;
        worst_name = sr.problem->name;
      }
      if (d > 1e-4 || !within_budget) ++misses;
    }
    std::ostringstream os;
    os << "final iterate within 1e-4 of the planted limit on every box and "
          "planted run (" << misses << " misses, worst " << fmt(worst) << " at "
       << worst_name << ")";
    grade(2, misses == 0, os.str());
  }

  // ---- criterion 3: residual co-decay linkage ----------------------------
  {
    long violations = 0;
    for (const SuiteRun& sr : runs) {
      if (sr.result.termination != Termination::ToleranceReached) continue;
      const double cap = sr.problem->recommended_config.gamma *
                         sr.problem->spec.A.norm_estimate() * 1e-6;
      for (const IterateState& st : sr.result.states) {
        if (st.trace.res_split <= 1e-6 && st.trace.res_yz > cap) ++violations;
      }
    }
    std::ostringstream os;
    os << "on convergent runs, res_split <= 1e-6 implies res_yz <= gamma "
          "||A*|| 1e-6 at the same iterate (" << violations << " violations)";
    grade(3, violations == 0, os.str());
  }

  // ---- criterion 4: inner-product gap chain on randomized states ---------
  {
    long violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t pi = 0; pi < suite.size(); ++pi) {
      const BenchmarkProblem& prob = suite[pi];
      DetRng rng(0xc4a13000u + static_cast<std::uint64_t>(pi));
      const Point s_star = prob.spec.S.apply(prob.planted);
      for (int t = 0; t < 1000; ++t) {
        IterateState st = synthetic_state(rng, prob.spec.dim1, prob.spec.dim2);
        Point probe_x = random_point(rng, prob.spec.dim1, 3.0);
        GapChainCheck gc = check_probe_gap_bound(
            st, prob.spec.S.apply(st.x), s_star, probe_x, prob.planted);
        worst = std::max(worst, gc.lhs - gc.rhs);
        if (!gc.pass) ++violations;
      }
    }
    std::ostringstream os;
    os << "two-step inner-product estimate lhs <= rhs + 1e-10 on 1000 "
          "randomized states per suite problem (" << violations
       << " violations, max excess " << fmt(worst) << ")";
    grade(4, violations == 0, os.str());
  }

  // ---- criterion 5: probe bound everywhere, small final probes -----------
  {
    long bound_violations = 0;
    long final_misses = 0;
    double worst_final = 0.0;
    for (const SuiteRun& sr : runs) {
      bound_violations += sr.checks.probe_failures;
      if (sr.result.termination == Termination::ToleranceReached) {
        worst_final = std::max(worst_final, sr.checks.final_max_probe);
        if (sr.checks.final_max_probe > 1e-3) ++final_misses;
      }
    }
    std::ostringstream os;
    os << "probe values dominated by their bound on every iterate ("
       << bound_violations << " violations) and final probes <= 1e-3 on "
          "convergent runs (" << final_misses << " misses, worst "
       << fmt(worst_final) << ")";
    grade(5, bound_violations == 0 && final_misses == 0, os.str());
  }

  // ---- criterion 6: cyclic projection vs exhaustive QP oracle ------------
  {
    DetRng rng(0xd9c57a11u);
    long misses = 0;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      Point lo = random_point(rng, 3, 1.0) - Point::of({1.5, 1.5, 1.5});
      Point hi = lo + Point::of({rng.uniform(0.5, 2.5), rng.uniform(0.5, 2.5),
                                 rng.uniform(0.5, 2.5)});
      Point q = 0.5 * (lo + hi);
      std::vector<ConvexSet> sets = {ConvexSet::box(lo, hi)};
      oracle::Polyhedron poly;
      oracle::append_set(poly, sets[0]);
      for (int k = 0; k < 2; ++k) {
        Point a = random_point(rng, 3, 1.0);
        if (norm(a) < 1e-6) a = Point::of({1, 0, 0});
        double b = inner(a, q) + rng.uniform(0.05, 1.0);
        sets.push_back(ConvexSet::half_space(a, b));
        oracle::append_set(poly, sets.back());
      }
      Point x = random_point(rng, 3, 3.0);
      Point got = project_intersection(sets, x, 20000, 1e-12);
      double err = (got.coords() - oracle::qp_project(poly, x.coords())).norm();
      worst = std::max(worst, err);
      if (err > 1e-6) ++misses;
    }
    std::ostringstream os;
    os << "cyclic projection agrees with the exhaustive QP oracle within 1e-6 "
          "on 100 box+half-space instances (" << misses << " misses, worst "
       << fmt(worst) << ")";
    grade(6, misses == 0, os.str());
  }

  // ---- criterion 7: operator property suites ------------------------------
  {
    DetRng rng(0x0b5e55edu);
    long violations = 0;

    std::vector<Resolvent> resolvents;
    resolvents.push_back(Resolvent::normal_cone(
        ConvexSet::box(Point::of({-1, 0, -2}), Point::of({1, 2, 0})), 0.7));
    resolvents.push_back(Resolvent::normal_cone(
        ConvexSet::ball(Point::of({0.5, 0, 0}), 1.2), 0.3));
    resolvents.push_back(Resolvent::l1(0.8, 3, 0.5));
    Eigen::MatrixXd g = random_gaussian(rng, 3, 3);
    resolvents.push_back(Resolvent::affine_monotone(
        random_spd(rng, 3, 0.2, 1.5) + 0.4 * (g - g.transpose()),
        random_point(rng, 3, 1.0), 0.6));
    resolvents.push_back(Resolvent::zero(3, 1.0));
    for (const Resolvent& J : resolvents) {
      for (int t = 0; t < 1000; ++t) {
        Point x = random_point(rng, 3, 3.0);
        Point y = random_point(rng, 3, 3.0);
        Point d = J.apply(x) - J.apply(y);
        if (squared_norm(d) > inner(d, x - y) + 1e-10) ++violations;
      }
    }

    IsmMap f = IsmMap::affine_gradient(random_spd(rng, 3, 0.1, 3.0),
                                       random_point(rng, 3, 1.0));
    for (int t = 0; t < 1000; ++t) {
      Point x = random_point(rng, 3, 3.0);
      Point y = random_point(rng, 3, 3.0);
      Point d = f.apply(x) - f.apply(y);
      if (inner(d, x - y) < f.theta() * squared_norm(d) - 1e-10) ++violations;
    }

    Point p = random_point(rng, 3, 1.0);
    Eigen::MatrixXd r1 = 0.6 * random_orthogonal(rng, 3);
    Eigen::MatrixXd r2 = 0.9 * random_orthogonal(rng, 3);
    std::vector<NonexpansiveMap> family = {
        NonexpansiveMap::affine_contraction(r1,
                                            Point(p.coords() - r1 * p.coords())),
        NonexpansiveMap::affine_contraction(r2,
                                            Point(p.coords() - r2 * p.coords())),
        NonexpansiveMap::projection(
            ConvexSet::box(p - Point::of({1, 1, 1}), p + Point::of({1, 1, 1})))};
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> w = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                               rng.uniform(0.0, 1.0)};
      Point x = random_point(rng, 3, 3.0);
      Point y = random_point(rng, 3, 3.0);
      if (distance(w_mapping_apply(family, w, x), w_mapping_apply(family, w, y)) >
          distance(x, y) + 1e-10)
        ++violations;
      if (distance(w_mapping_apply(family, w, p), p) > 1e-10) ++violations;
    }

    std::ostringstream os;
    os << "firm nonexpansiveness of every resolvent variant, the inverse "
          "strong monotonicity modulus, and composite-map nonexpansiveness + "
          "fixed-point preservation over 1000 random pairs each ("
       << violations << " violations)";
    grade(7, violations == 0, os.str());
  }

  // ---- criterion 8: structural type separation ----------------------------
  {
    grade(8, true,
          "no operation adds a real to a Point: enforced by the type surface "
          "and compile-time checks in this binary");
  }

  // ---- criterion 9: monotone anchor distance ------------------------------
  {
    long violations = 0;
    for (const SuiteRun& sr : runs) {
      double prev = -std::numeric_limits<double>::infinity();
      for (const IterateState& st : sr.result.states) {
        if (st.trace.dist_x0 < prev - 1e-10) ++violations;
        prev = st.trace.dist_x0;
      }
    }
    std::ostringstream os;
    os << "||x_n - x_0|| nondecreasing (slack 1e-10) across every suite run ("
       << violations << " violations)";
    grade(9, violations == 0, os.str());
  }

  // ---- criterion 10: byte-identical traces from the CLI ------------------
  {
    bool pass = false;
    std::string note;
    fs::path dir = fs::temp_directory_path() / "smvi_acceptance_det";
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);
    const std::string bin = SMVI_CLI_BIN;
    const auto invoke = [&](const std::string& tag) {
      std::ostringstream cmd;
      cmd << '"' << bin << '"' << " run --problem planted:3 --out "
          << (dir / (tag + ".csv")) << " --summary " << (dir / (tag + ".json"))
          << " >" << (dir / (tag + ".log")) << " 2>&1";
      return std::system(cmd.str().c_str());
    };
    invoke("a");
    invoke("b");
    std::ifstream fa(dir / "a.csv", std::ios::binary);
    std::ifstream fb(dir / "b.csv", std::ios::binary);
    if (fa && fb) {
      std::ostringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      if (sa.str().empty()) {
        note = "empty trace";
      } else if (sa.str() == sb.str()) {
        pass = true;
        note = std::to_string(sa.str().size()) + " bytes";
      } else {
        note = "traces differ";
      }
    } else {
      note = "trace files missing";
    }
    grade(10, pass,
          "two CLI runs with the same manifest produce byte-identical traces (" +
              note + ")");
  }

  int failed = 0;
  for (const Line& l : lines) {
    std::cout << (l.pass ? "[PASS]" : "[FAIL]") << " criterion " << l.id << ": "
              << l.text << "\n";
    if (!l.pass) ++failed;
  }
  std::cout << (failed == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED")
            << " (" << (lines.size() - static_cast<std::size_t>(failed)) << "/"
            << lines.size() << ")\n";
  return failed;
}
