#include "smvi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smvi/errors.hpp"
#include "smvi/rng.hpp"

namespace smvi {

BoundCheck check_correction_bound(const IterateState& state, double gamma,
                                  double adjoint_norm) {
  const double lhs = distance(state.y, state.z);
  const double rhs = gamma * adjoint_norm * distance(state.w, state.Az);
  return BoundCheck{lhs <= rhs + kCheckSlack, lhs, rhs, rhs - lhs};
}

ProbeSet ProbeSet::canonical_plus_random(Eigen::Index dim, Point reference,
                                         int n_random, std::uint64_t seed) {
  if (dim <= 0) throw DimensionError("probe set: dimension must be positive");
  if (reference.dim() != dim) {
    throw DimensionError("probe set: reference dimension mismatch");
  }
  if (n_random < 0) throw DomainError("probe set: n_random must be >= 0");
  std::vector<Point> dirs;
  dirs.reserve(static_cast<std::size_t>(dim) + static_cast<std::size_t>(n_random));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e[i] = 1.0;
    dirs.emplace_back(std::move(e));
  }
  DetRng rng(seed);
  for (int k = 0; k < n_random; ++k) {
    Eigen::VectorXd v(dim);
    double nrm = 0.0;
    // Redraw on (vanishingly unlikely) near-zero draws so normalization
    // is always sound.
    do {
      for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
      nrm = v.norm();
    } while (nrm < 1e-12);
    dirs.emplace_back(Eigen::VectorXd(v / nrm));
  }
  return ProbeSet{std::move(dirs), std::move(reference)};
}

std::vector<ProbeValue> weak_probe(const IterateState& state,
                                   const ProbeSet& probes) {
  const double alpha = state.trace.alpha_n;
  if (!(alpha > 0.0)) {
    std::ostringstream os;
    os << "weak probe requires alpha > 0, got " << alpha;
    throw DomainError(os.str());
  }
  if (probes.directions.empty()) {
    throw DomainError("weak probe requires a nonempty probe set");
  }
  const Point gap = (1.0 / alpha) * (state.u - state.x);
  const Point shifted = state.x - probes.reference;
  const double gap_norm = norm(gap);
  std::vector<ProbeValue> out;
  out.reserve(probes.directions.size());
  for (const Point& y : probes.directions) {
    ProbeValue pv;
    pv.value = inner(gap + shifted, y);
    pv.term_gap = gap_norm * norm(y);
    pv.term_inner = inner(shifted, y);
    out.push_back(pv);
  }
  return out;
}

GapChainCheck check_probe_gap_bound(const IterateState& state,
                                    const Point& s_at_xn,
                                    const Point& s_at_xstar,
                                    const Point& probe_x,
                                    const Point& x_star) {
  const double alpha = state.trace.alpha_n;
  if (!(alpha > 0.0)) {
    std::ostringstream os;
    os << "gap bound requires alpha > 0, got " << alpha;
    throw DomainError(os.str());
  }
  const Point d = (1.0 / alpha) * (state.u - state.x) + state.x;
  const double lhs =
      std::abs(inner(s_at_xn, probe_x - d) - inner(s_at_xstar, probe_x - x_star));
  const double rhs = distance(s_at_xn, s_at_xstar) * distance(probe_x, d) +
                     std::abs(inner(s_at_xstar, x_star - d));
  return GapChainCheck{lhs <= rhs + kCheckSlack, lhs, rhs};
}

SContinuityReport s_continuity_report(std::span<const IterateState> states,
                                      const NonexpansiveMap& S,
                                      const Point& x_star) {
  if (states.empty()) {
    throw DomainError("continuity report requires a nonempty run");
  }
  const Point s_star = S.apply(x_star);
  SContinuityReport rep;
  rep.rows.reserve(states.size());
  double max_s = 0.0, max_x = 0.0;
  for (const auto& st : states) {
    const double sr = distance(S.apply(st.x), s_star);
    const double xr = distance(st.x, x_star);
    max_s = std::max(max_s, sr);
    max_x = std::max(max_x, xr);
    rep.rows.push_back(SContinuityRow{st.n, sr, xr});
  }
  const double last_s = rep.rows.back().s_residual;
  const double last_x = rep.rows.back().x_residual;
  const bool x_decayed = max_x > 1e-15 && last_x <= 0.1 * max_x;
  const bool s_decayed = max_s <= 1e-15 || last_s <= 0.5 * max_s;
  rep.flagged = x_decayed && !s_decayed;
  rep.note = rep.flagged
                 ? "S residual did not follow the iterate residual down"
                 : "S residual tracks the iterate residual";
  return rep;
}

ConditionReport condition_report(std::span<const TraceRecord> trace) {
  if (trace.size() < 2) {
    throw DomainError("condition report requires at least two iterates");
  }
  constexpr long kWindow = 50;
  const long len = static_cast<long>(trace.size());
  const long window = std::min<long>(kWindow, len - 1);
  const TraceRecord& last = trace[trace.size() - 1];
  const TraceRecord& base = trace[static_cast<std::size_t>(len - 1 - window)];
  ConditionReport rep;
  rep.window = window;
  rep.last_sigma = last.sigma_n;
  rep.last_ratio = last.ratio_cond2;
  rep.sigma_delta = last.sigma_n - base.sigma_n;
  rep.ratio_delta = last.ratio_cond2 - base.ratio_cond2;
  // A plateau at effectively-zero ratio is a satisfied hypothesis, not a
  // violation; flag only a non-decreasing ratio that is still material.
  rep.ratio_flagged = rep.ratio_delta > -1e-12 && rep.last_ratio > 1e-10;
  return rep;
}

DualResidualReport dual_residuals(const IterateState& state,
                                  const ProbeSet& probes) {
  const double alpha = state.trace.alpha_n;
  if (!(alpha > 0.0)) {
    std::ostringstream os;
    os << "dual residuals require alpha > 0, got " << alpha;
    throw DomainError(os.str());
  }
  const Point d = (1.0 / alpha) * (state.u - state.x) + state.x;
  DualResidualReport rep;
  rep.strong = distance(probes.reference, d);
  for (const ProbeValue& pv : weak_probe(state, probes)) {
    rep.weak.push_back(pv.value);
  }
  return rep;
}

RunChecks run_checks(const ProblemSpec& spec, const SolverConfig& cfg,
                     std::span<const IterateState> states, const Point& x0,
                     const std::optional<Point>& planted) {
  RunChecks rc;
  if (states.empty()) return rc;
  const Point x_star = planted ? *planted : states.back().x;
  const Point s_star = spec.S.apply(x_star);
  const ProbeSet probes =
      ProbeSet::canonical_plus_random(spec.dim1, x_star);
  const double adjoint_norm = spec.A.norm_estimate();

  rc.iterates = static_cast<long>(states.size());
  rc.min_bound_margin = std::numeric_limits<double>::infinity();
  rc.max_probe_excess = -std::numeric_limits<double>::infinity();
  rc.max_chain_excess = -std::numeric_limits<double>::infinity();

  std::vector<TraceRecord> trace;
  trace.reserve(states.size());
  for (const auto& st : states) {
    trace.push_back(st.trace);

    const BoundCheck bc = check_correction_bound(st, cfg.gamma, adjoint_norm);
    if (!bc.pass) ++rc.bound_failures;
    rc.min_bound_margin = std::min(rc.min_bound_margin, bc.margin);

    double max_abs = 0.0;
    for (const ProbeValue& pv : weak_probe(st, probes)) {
      if (!pv.pass()) ++rc.probe_failures;
      rc.max_probe_excess =
          std::max(rc.max_probe_excess, std::abs(pv.value) - pv.bound());
      max_abs = std::max(max_abs, std::abs(pv.value));
    }
    if (&st == &states.back()) rc.final_max_probe = max_abs;

    const GapChainCheck gc =
        check_probe_gap_bound(st, spec.S.apply(st.x), s_star, x0, x_star);
    if (!gc.pass) ++rc.chain_failures;
    rc.max_chain_excess = std::max(rc.max_chain_excess, gc.lhs - gc.rhs);
  }
  if (trace.size() >= 2) {
    rc.condition_flagged = condition_report(trace).ratio_flagged;
  }
  return rc;
}

}  // namespace smvi
