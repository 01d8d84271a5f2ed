#include "smvi/solver.hpp"

#include <cmath>
#include <sstream>

#include "smvi/errors.hpp"

namespace smvi {

namespace {

void add(std::vector<ConfigViolation>& out, std::string tag, std::string msg) {
  out.push_back(ConfigViolation{std::move(tag), std::move(msg)});
}

// Schedules here are nonincreasing in n, so the value at n = 0 is the sup.
bool schedule_in_unit_interval(const Schedule& s) {
  const double v0 = s.value(0);
  return v0 > 0.0 && v0 < 1.0;
}

std::string join_messages(const std::vector<ConfigViolation>& violations) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& v : violations) os << "\n  [" << v.constraint << "] " << v.message;
  return os.str();
}

// Exact projection of v onto the intersection of two half-spaces, by KKT
// case analysis over which constraints are active (a 2x2 Gram solve at
// worst).  The cut pair grows nearly tangent as the outer iteration closes
// in, which drives cyclic projection schemes into arbitrarily slow crawls;
// the closed form has no such regime.  Returns nullopt when no case checks
// out numerically (caller falls back to Dykstra).
std::optional<Point> project_cut_pair(const HalfSpace& h1, const HalfSpace& h2,
                                      const Point& v) {
  if (h1.degenerate() && h2.degenerate()) return v;
  const auto single = [&v](const HalfSpace& h) {
    const double viol = h.violation(v);
    if (viol <= 0.0) return v;
    return v - (viol / squared_norm(h.normal())) * h.normal();
  };
  if (h1.degenerate()) return single(h2);
  if (h2.degenerate()) return single(h1);

  const double viol1 = h1.violation(v);
  const double viol2 = h2.violation(v);
  if (viol1 <= 0.0 && viol2 <= 0.0) return v;

  const Point& a1 = h1.normal();
  const Point& a2 = h2.normal();
  const double s11 = squared_norm(a1);
  const double s22 = squared_norm(a2);
  const double s12 = inner(a1, a2);

  // One constraint active, the other strictly satisfied at the foot point.
  if (viol1 > 0.0) {
    Point z = v - (viol1 / s11) * a1;
    if (h2.violation(z) <= 1e-12 * (std::abs(h2.offset()) + norm(a2) * norm(z) + 1.0))
      return z;
  }
  if (viol2 > 0.0) {
    Point z = v - (viol2 / s22) * a2;
    if (h1.violation(z) <= 1e-12 * (std::abs(h1.offset()) + norm(a1) * norm(z) + 1.0))
      return z;
  }

  // Both active: solve the Gram system for the multipliers.
  const double det = s11 * s22 - s12 * s12;
  if (!(det > 0.0)) return std::nullopt;  // parallel normals, cases above missed
  const double mu1 = (s22 * viol1 - s12 * viol2) / det;
  const double mu2 = (s11 * viol2 - s12 * viol1) / det;
  const double mu_floor = -1e-12 * (std::abs(mu1) + std::abs(mu2) + 1.0);
  if (mu1 >= mu_floor && mu2 >= mu_floor) {
    return v - mu1 * a1 - mu2 * a2;
  }
  return std::nullopt;
}

}  // namespace

SolverConfig SolverConfig::defaults() {
  return SolverConfig{
      /*gamma=*/0.5,
      /*lambda=*/1.0,
      /*alpha_schedule=*/Schedule::constant(0.5),
      /*sigma_schedule=*/Schedule::harmonic(1.0, 2.0),
      /*lambda_schedules=*/{},
      /*max_iter=*/10000,
      /*stop_tol=*/1e-8,
      /*dykstra=*/DykstraOptions{},
  };
}

std::vector<ConfigViolation> validate_config(const ProblemSpec& spec,
                                             const SolverConfig& cfg) {
  std::vector<ConfigViolation> out;

  // Structural consistency of the problem itself.
  if (spec.dim1 <= 0 || spec.dim2 <= 0) {
    add(out, "dims", "space dimensions must be positive");
    return out;  // nothing below is meaningful
  }
  if (spec.A.domain_dim() != spec.dim1 || spec.A.codomain_dim() != spec.dim2) {
    std::ostringstream os;
    os << "A maps dim " << spec.A.domain_dim() << " -> " << spec.A.codomain_dim()
       << ", expected " << spec.dim1 << " -> " << spec.dim2;
    add(out, "A-dims", os.str());
  }
  if (spec.C.dim() != spec.dim1) add(out, "C-dim", "C must live in H1");
  if (spec.Q.dim() != spec.dim2) add(out, "Q-dim", "Q must live in H2");
  if (spec.M1_resolvent.dim() != spec.dim1)
    add(out, "M1-dim", "M1 resolvent must live in H1");
  if (spec.M2_resolvent.dim() != spec.dim2)
    add(out, "M2-dim", "M2 resolvent must live in H2");
  if (spec.f.dim() != spec.dim1) add(out, "f-dim", "f must live in H1");
  if (spec.g.dim() != spec.dim2) add(out, "g-dim", "g must live in H2");
  if (spec.S.dim() != spec.dim1) add(out, "S-dim", "S must live in H1");
  for (std::size_t i = 0; i < spec.family.size(); ++i) {
    if (spec.family[i].dim() != spec.dim1) {
      std::ostringstream os;
      os << "family member " << i << " must live in H1";
      add(out, "family-dim", os.str());
    }
  }
  // Claimed moduli must not overstate what the maps certify.
  if (!(spec.theta1 > 0.0) || spec.theta1 > spec.f.theta() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "theta1 = " << spec.theta1 << " exceeds the modulus " << spec.f.theta()
       << " certified by f";
    add(out, "theta1", os.str());
  }
  if (!(spec.theta2 > 0.0) || spec.theta2 > spec.g.theta() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "theta2 = " << spec.theta2 << " exceeds the modulus " << spec.g.theta()
       << " certified by g";
    add(out, "theta2", os.str());
  }

  // gamma in (0, 1/||A||^2). The power-iteration estimate converges from
  // below, so inflate it before trusting the bound.
  const double inflated = 1.01 * spec.A.norm_estimate();
  const double gamma_hi =
      inflated > 0.0 ? 1.0 / (inflated * inflated)
                     : std::numeric_limits<double>::infinity();
  if (!(cfg.gamma > 0.0) || !(cfg.gamma < gamma_hi)) {
    std::ostringstream os;
    os << "gamma = " << cfg.gamma << " must lie in (0, " << gamma_hi
       << ") (estimated ||A|| = " << spec.A.norm_estimate()
       << ", inflated x1.01)";
    add(out, "gamma-range", os.str());
  }

  // lambda in (0, 2 min(theta1, theta2)), and it must be the parameter the
  // resolvents were built with.
  const double lambda_hi = 2.0 * std::min(spec.theta1, spec.theta2);
  if (!(cfg.lambda > 0.0) || !(cfg.lambda < lambda_hi)) {
    std::ostringstream os;
    os << "lambda = " << cfg.lambda << " must lie in (0, " << lambda_hi << ")";
    add(out, "lambda-range", os.str());
  }
  for (const auto* r : {&spec.M1_resolvent, &spec.M2_resolvent}) {
    const double rel = std::abs(cfg.lambda - r->lambda()) /
                       std::max(1.0, std::abs(r->lambda()));
    if (rel > 1e-12) {
      std::ostringstream os;
      os << "lambda = " << cfg.lambda
         << " differs from the resolvent parameter " << r->lambda();
      add(out, "lambda-resolvent", os.str());
      break;
    }
  }

  if (!schedule_in_unit_interval(cfg.alpha_schedule)) {
    add(out, "alpha-schedule",
        "alpha schedule must map every n into (0, 1); got " +
            cfg.alpha_schedule.describe());
  }
  if (!schedule_in_unit_interval(cfg.sigma_schedule)) {
    add(out, "sigma-schedule",
        "sigma schedule must map every n into (0, 1); got " +
            cfg.sigma_schedule.describe());
  }
  if (!cfg.sigma_schedule.decays_to_zero()) {
    add(out, "sigma-decay",
        "sigma schedule must decay to zero; got " +
            cfg.sigma_schedule.describe());
  }
  if (cfg.lambda_schedules.size() != spec.family.size()) {
    std::ostringstream os;
    os << "need one weight schedule per family member: got "
       << cfg.lambda_schedules.size() << " for " << spec.family.size();
    add(out, "weight-schedules", os.str());
  }
  for (std::size_t i = 0; i < cfg.lambda_schedules.size(); ++i) {
    if (!schedule_in_unit_interval(cfg.lambda_schedules[i])) {
      std::ostringstream os;
      os << "weight schedule " << i << " must map every n into (0, 1); got "
         << cfg.lambda_schedules[i].describe();
      add(out, "weight-schedule-range", os.str());
    }
  }

  if (cfg.max_iter < 0) add(out, "max-iter", "max_iter must be >= 0");
  if (!(cfg.stop_tol > 0.0)) add(out, "stop-tol", "stop_tol must be > 0");
  if (cfg.dykstra.max_iter < 1)
    add(out, "dykstra-iter", "dykstra max_iter must be >= 1");
  if (!(cfg.dykstra.tol > 0.0)) add(out, "dykstra-tol", "dykstra tol must be > 0");

  return out;
}

StepResult step(const ProblemSpec& spec, const SolverConfig& cfg,
                const Point& x0, const Point& x, long n,
                const std::optional<Point>& planted) {
  const double alpha = cfg.alpha_schedule.value(n);
  const double sigma = cfg.sigma_schedule.value(n);

  const Point sx = spec.S.apply(x);
  std::vector<double> weights;
  weights.reserve(cfg.lambda_schedules.size());
  for (const auto& s : cfg.lambda_schedules) weights.push_back(s.value(n));
  const Point wx = w_mapping_apply(spec.family, weights, x);

  const Point u =
      (1.0 - alpha) * x +
      alpha * project(spec.C, sigma * sx + (1.0 - sigma) * wx);

  const Point z = forward_backward_apply(spec.M1_resolvent, spec.f, cfg.lambda, u);
  const Point az = spec.A.apply(z);
  const Point w = forward_backward_apply(spec.M2_resolvent, spec.g, cfg.lambda, az);
  const Point y = z + cfg.gamma * spec.A.apply_adjoint(w - az);

  const double beta = alpha * sigma;
  HalfSpace cn = build_cn_halfspace(x, sx, y, beta);
  HalfSpace qn = build_qn_halfspace(x0, x);

  // P_{C ∩ cn ∩ qn}(x0): when the exact projection onto the cut pair alone
  // already lands in C, it is the answer (projection onto a superset that
  // happens to be feasible for the subset).  Otherwise run the general
  // cyclic scheme over all three sets.
  Point x_next = [&] {
    std::optional<Point> pair = project_cut_pair(cn, qn, x0);
    if (pair && spec.C.contains(*pair)) return std::move(*pair);
    std::vector<ConvexSet> cuts;
    cuts.push_back(spec.C);
    cuts.push_back(ConvexSet::half_space(cn));
    cuts.push_back(ConvexSet::half_space(qn));
    return project_intersection(cuts, x0, cfg.dykstra.max_iter, cfg.dykstra.tol);
  }();

  TraceRecord rec;
  rec.n = n;
  rec.res_split = distance(w, az);
  rec.res_yz = distance(y, z);
  rec.bound_yz = cfg.gamma * spec.A.norm_estimate() * rec.res_split;
  rec.ratio_cond2 = distance(x, u) / beta;
  rec.dist_x0 = distance(x, x0);
  if (planted) rec.dist_p = distance(x, *planted);
  rec.sigma_n = sigma;
  rec.alpha_n = alpha;

  IterateState state{n, x, u, z, y, az, w, std::move(cn), std::move(qn), rec};
  return StepResult{std::move(state), std::move(x_next)};
}

RunResult run(const ProblemSpec& spec, const SolverConfig& cfg, const Point& x0,
              const std::optional<Point>& planted) {
  auto violations = validate_config(spec, cfg);
  if (!violations.empty()) throw DomainError(join_messages(violations));
  if (x0.dim() != spec.dim1) {
    throw DimensionError("run: x0 dimension does not match the problem");
  }
  if (planted && planted->dim() != spec.dim1) {
    throw DimensionError("run: planted point dimension does not match");
  }

  std::vector<std::string> warnings;
  Point x = x0;
  if (!spec.C.contains(x, 1e-12)) {
    x = project(spec.C, x0);
    std::ostringstream os;
    os << "x0 is not in C; projected onto C (moved " << distance(x, x0) << ")";
    warnings.push_back(os.str());
  }
  const Point start = x;  // all Q_n anchors and distances reference this

  std::vector<IterateState> states;
  for (long n = 0; n < cfg.max_iter; ++n) {
    std::optional<StepResult> sr;
    try {
      sr = step(spec, cfg, start, x, n, planted);
    } catch (const EmptySetError& e) {
      std::ostringstream os;
      os << "step " << n << ": " << e.what()
         << " (an empty cut intersection contradicts the solvability"
            " hypothesis)";
      return RunResult{std::move(states), std::move(x), Termination::Error,
                       os.str(), std::move(warnings)};
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os << "step " << n << ": " << e.what();
      return RunResult{std::move(states), std::move(x), Termination::Error,
                       os.str(), std::move(warnings)};
    }
    const double step_move = distance(sr->x_next, x);
    const double res_split = sr->state.trace.res_split;
    states.push_back(std::move(sr->state));
    x = std::move(sr->x_next);
    if (step_move <= cfg.stop_tol && res_split <= cfg.stop_tol) {
      std::ostringstream os;
      os << "tolerance reached at n = " << n << ": step " << step_move
         << " and split residual " << res_split << " both <= " << cfg.stop_tol;
      return RunResult{std::move(states), std::move(x),
                       Termination::ToleranceReached, os.str(),
                       std::move(warnings)};
    }
  }
  return RunResult{std::move(states), std::move(x),
                   Termination::IterationBudgetExhausted,
                   "iteration budget exhausted", std::move(warnings)};
}

}  // namespace smvi
