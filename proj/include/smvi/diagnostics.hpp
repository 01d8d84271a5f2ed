#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smvi/operators.hpp"
#include "smvi/point.hpp"
#include "smvi/solver.hpp"
#include "smvi/trace.hpp"

namespace smvi {

// Slack used by every inequality check below.
inline constexpr double kCheckSlack = 1e-10;

// The correction step satisfies ||y - z|| <= gamma ||A*|| ||w - Az||,
// because y - z = gamma A*(w - Az). Checked per iterate.
struct BoundCheck {
  bool pass;
  double lhs;     // ||y - z||
  double rhs;     // gamma * adjoint_norm * ||w - Az||
  double margin;  // rhs - lhs
};
BoundCheck check_correction_bound(const IterateState& state, double gamma,
                                  double adjoint_norm);

// Fixed probe directions for inner-product (weak-topology) residuals.
struct ProbeSet {
  std::vector<Point> directions;  // unit norm
  Point reference;                // the limit point x*, or its proxy

  // Canonical basis plus n_random seeded random unit vectors.
  static ProbeSet canonical_plus_random(Eigen::Index dim, Point reference,
                                        int n_random = 5,
                                        std::uint64_t seed = 0x70b35e7u);
};

// One probe direction y evaluated against a state:
//   value = <(u - x)/alpha + x - x*, y>
// decomposed against the dominating bound
//   (||u - x|| / alpha) ||y|| + <x - x*, y>.
struct ProbeValue {
  double value;
  double term_gap;    // (||u - x|| / alpha) * ||y||, nonnegative
  double term_inner;  // <x - x*, y>, signed
  double bound() const { return term_gap + std::abs(term_inner); }
  bool pass() const { return std::abs(value) <= bound() + kCheckSlack; }
};
std::vector<ProbeValue> weak_probe(const IterateState& state,
                                   const ProbeSet& probes);

// Two-step estimate for the inner-product gap
//   lhs = |<Sx_n, x - d> - <Sx*, x - x*>|,   d = (u - x_n)/alpha + x_n
//   rhs = ||Sx_n - Sx*|| ||x - d|| + |<Sx*, x* - d>|
// (one Cauchy-Schwarz plus one triangle application; lhs <= rhs always).
struct GapChainCheck {
  bool pass;
  double lhs;
  double rhs;
};
GapChainCheck check_probe_gap_bound(const IterateState& state,
                                    const Point& s_at_xn,
                                    const Point& s_at_xstar,
                                    const Point& probe_x, const Point& x_star);

// Norm-topology continuity monitor for S along the run: ||Sx_n - Sx*||
// against ||x_n - x*||. In finite dimension the former must decay whenever
// the latter does; the monitor documents that rather than testing it.
struct SContinuityRow {
  long n;
  double s_residual;
  double x_residual;
};
struct SContinuityReport {
  std::vector<SContinuityRow> rows;
  bool flagged;  // x residual decayed but S residual did not
  std::string note;
};
SContinuityReport s_continuity_report(std::span<const IterateState> states,
                                      const NonexpansiveMap& S,
                                      const Point& x_star);

// Last values and trailing-window trends of sigma_n and the
// ||x_n - u_n||/(alpha_n sigma_n) ratio; flags the ratio failing to
// decrease over the window while still materially nonzero.
struct ConditionReport {
  long window;
  double last_sigma;
  double last_ratio;
  double sigma_delta;  // last - value at window start (negative = decreasing)
  double ratio_delta;
  bool ratio_flagged;
};
ConditionReport condition_report(std::span<const TraceRecord> trace);

// Strong residual ||x* - d|| next to the weak (probe) residuals for the
// same state, so reports can show which of the two a claim used.
struct DualResidualReport {
  double strong;
  std::vector<double> weak;
};
DualResidualReport dual_residuals(const IterateState& state,
                                  const ProbeSet& probes);

// Everything cmd_run needs to grade a finished run.
struct RunChecks {
  long iterates = 0;
  long bound_failures = 0;
  double min_bound_margin = 0.0;
  long probe_failures = 0;
  double max_probe_excess = 0.0;  // max over |value| - bound
  double final_max_probe = 0.0;   // max |value| at the last state
  long chain_failures = 0;
  double max_chain_excess = 0.0;  // max over lhs - rhs
  bool condition_flagged = false;
  bool all_passed() const {
    return bound_failures == 0 && probe_failures == 0 && chain_failures == 0;
  }
};
RunChecks run_checks(const ProblemSpec& spec, const SolverConfig& cfg,
                     std::span<const IterateState> states, const Point& x0,
                     const std::optional<Point>& planted);

}  // namespace smvi
