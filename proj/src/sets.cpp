#include "smvi/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smvi/errors.hpp"

namespace smvi {

HalfSpace::HalfSpace(Point normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  if (!std::isfinite(offset_)) {
    throw DomainError("HalfSpace: offset must be finite");
  }
  degenerate_ = normal_.coords().isZero(0.0);
  if (degenerate_ && offset_ < 0.0) {
    throw EmptySetError("HalfSpace: zero normal with negative offset is empty");
  }
}

double HalfSpace::violation(const Point& z) const {
  if (degenerate_) return -0.0;
  return inner(normal_, z) - offset_;
}

bool HalfSpace::contains(const Point& z, double tol) const {
  return violation(z) <= tol;
}

ConvexSet ConvexSet::whole_space(Eigen::Index dim) {
  if (dim <= 0) throw DomainError("ConvexSet: dimension must be positive");
  return ConvexSet(Variant(WholeSpace{dim}));
}

ConvexSet ConvexSet::box(Point lower, Point upper) {
  require_same_dim(lower, upper, "ConvexSet::box");
  if (((upper.coords() - lower.coords()).array() < 0.0).any()) {
    throw DomainError("ConvexSet::box: lower must be <= upper componentwise");
  }
  return ConvexSet(Variant(Box{std::move(lower), std::move(upper)}));
}

ConvexSet ConvexSet::ball(Point center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw DomainError("ConvexSet::ball: radius must be nonnegative");
  }
  return ConvexSet(Variant(Ball{std::move(center), radius}));
}

ConvexSet ConvexSet::half_space(HalfSpace hs) {
  return ConvexSet(Variant(std::move(hs)));
}

ConvexSet ConvexSet::half_space(Point normal, double offset) {
  return half_space(HalfSpace(std::move(normal), offset));
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members) {
  if (members.empty()) {
    throw DomainError("ConvexSet::intersection: member list must be nonempty");
  }
  Eigen::Index d = members.front().dim();
  for (const auto& m : members) {
    if (m.dim() != d) {
      throw DimensionError("ConvexSet::intersection: mixed ambient dimensions");
    }
  }
  return ConvexSet(Variant(Intersection{std::move(members)}));
}

Eigen::Index ConvexSet::dim() const {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) return s.dim;
        if constexpr (std::is_same_v<T, Box>) return s.lower.dim();
        if constexpr (std::is_same_v<T, Ball>) return s.center.dim();
        if constexpr (std::is_same_v<T, HalfSpace>) return s.dim();
        if constexpr (std::is_same_v<T, Intersection>)
          return s.members.front().dim();
      },
      v_);
}

bool ConvexSet::contains(const Point& x, double tol) const {
  if (x.dim() != dim()) {
    throw DimensionError("ConvexSet::contains: dimension mismatch");
  }
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return true;
        } else if constexpr (std::is_same_v<T, Box>) {
          return ((x.coords() - s.lower.coords()).array() >= -tol).all() &&
                 ((s.upper.coords() - x.coords()).array() >= -tol).all();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return distance(x, s.center) <= s.radius + tol;
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return s.contains(x, tol);
        } else {
          return std::all_of(s.members.begin(), s.members.end(),
                             [&](const ConvexSet& m) { return m.contains(x, tol); });
        }
      },
      v_);
}

Point project(const ConvexSet& set, const Point& x) {
  if (x.dim() != set.dim()) {
    throw DimensionError("project: dimension mismatch");
  }
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return x;
        } else if constexpr (std::is_same_v<T, Box>) {
          return Point(x.coords()
                           .cwiseMax(s.lower.coords())
                           .cwiseMin(s.upper.coords()));
        } else if constexpr (std::is_same_v<T, Ball>) {
          double d = distance(x, s.center);
          if (d <= s.radius) return x;
          return s.center + (s.radius / d) * (x - s.center);
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          double v = s.violation(x);
          if (s.degenerate() || v <= 0.0) return x;
          return x - (v / squared_norm(s.normal())) * s.normal();
        } else {
          return project_intersection(std::span<const ConvexSet>(s.members), x);
        }
      },
      set.variant());
}

namespace {

void flatten_into(const ConvexSet& set, std::vector<const ConvexSet*>& out) {
  if (const auto* in = std::get_if<Intersection>(&set.variant())) {
    for (const auto& m : in->members) flatten_into(m, out);
  } else {
    out.push_back(&set);
  }
}

}  // namespace

DykstraResult dykstra_project(std::span<const ConvexSet> sets, const Point& x,
                              const DykstraOptions& opts) {
  if (sets.empty()) {
    throw DomainError("dykstra_project: set list must be nonempty");
  }
  for (const auto& s : sets) {
    if (s.dim() != x.dim()) {
      throw DimensionError("dykstra_project: dimension mismatch");
    }
  }
  if (sets.size() == 1 &&
      !std::holds_alternative<Intersection>(sets.front().variant())) {
    return DykstraResult{project(sets.front(), x), true, false, 0, 0.0};
  }

  std::vector<const ConvexSet*> cycle;
  for (const auto& s : sets) flatten_into(s, cycle);

  const std::size_t m = cycle.size();
  Point cur = x;
  std::vector<Point> increments(m, Point::zero(x.dim()));

  // Empty-intersection heuristic: for a feasible problem the cycle residual
  // drives to zero, for an empty one it settles at the positive gap between
  // the sets. Flag when no improvement shows over a long trailing window.
  constexpr int kStallWindow = 100;
  double best_residual = std::numeric_limits<double>::infinity();
  int cycles_since_improvement = 0;

  double residual = std::numeric_limits<double>::infinity();
  for (int cycle_idx = 0; cycle_idx < opts.max_iter; ++cycle_idx) {
    double delta_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      Point shifted = cur + increments[i];
      Point next = project(*cycle[i], shifted);
      Point inc = shifted - next;
      delta_sq += squared_norm(inc - increments[i]);
      increments[i] = std::move(inc);
      cur = std::move(next);
    }
    residual = std::sqrt(delta_sq);
    if (residual <= opts.tol) {
      return DykstraResult{cur, true, false, cycle_idx + 1, residual};
    }
    if (residual < 0.99 * best_residual) {
      best_residual = residual;
      cycles_since_improvement = 0;
    } else if (++cycles_since_improvement >= kStallWindow &&
               residual > 1e3 * opts.tol) {
      // A stalled residual alone does not mean empty: near-tangent feasible
      // wedges also flatline (with the iterate already feasible to roundoff)
      // while for truly disjoint sets the iterate parks at the gap-attaining
      // limit cycle, infeasible by half the gap.  Probe feasibility directly.
      double infeas = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        infeas = std::max(infeas, distance(cur, project(*cycle[i], cur)));
      }
      if (infeas > 1e3 * opts.tol) {
        return DykstraResult{cur, false, true, cycle_idx + 1, residual};
      }
      cycles_since_improvement = 0;  // feasible and creeping: keep going
    }
  }
  return DykstraResult{cur, false, false, opts.max_iter, residual};
}

Point project_intersection(std::span<const ConvexSet> sets, const Point& x,
                           int max_iter, double tol) {
  DykstraResult r = dykstra_project(sets, x, DykstraOptions{max_iter, tol});
  if (r.empty_suspected) {
    throw EmptySetError(
        "project_intersection: residual stalled at " + std::to_string(r.residual) +
        " after " + std::to_string(r.cycles) + " cycles; intersection looks empty");
  }
  if (!r.converged) {
    throw ConvergenceError(
        "project_intersection: no convergence within " + std::to_string(max_iter) +
        " cycles, residual " + std::to_string(r.residual),
        r.residual);
  }
  return r.point;
}

HalfSpace build_cn_halfspace(const Point& x, const Point& sx, const Point& y,
                             double beta) {
  require_same_dim(x, sx, "build_cn_halfspace");
  require_same_dim(x, y, "build_cn_halfspace");
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw DomainError("build_cn_halfspace: beta must lie in [0, 1], got " +
                      std::to_string(beta));
  }
  Point combo = (1.0 - beta) * x + beta * sx;
  Point a = 2.0 * (combo - y);
  double b = (1.0 - beta) * squared_norm(x) + beta * squared_norm(sx) -
             squared_norm(y);

  // Below the rounding scale of the inputs the condition is vacuous, and a
  // noise-level normal would make the projection step ill-posed. Convexity
  // makes b >= 0 whenever a vanishes, so clamping only removes roundoff.
  double scale = std::max(1.0, norm(x) + norm(sx) + norm(y));
  if (norm(a) <= 1e-13 * scale) {
    return HalfSpace(Point::zero(x.dim()), std::max(b, 0.0));
  }
  return HalfSpace(std::move(a), b);
}

HalfSpace build_qn_halfspace(const Point& x0, const Point& x) {
  require_same_dim(x0, x, "build_qn_halfspace");
  Point a = x0 - x;
  if (a.coords().isZero(0.0)) {
    return HalfSpace(Point::zero(x.dim()), 0.0);
  }
  double b = inner(a, x);
  return HalfSpace(std::move(a), b);
}

}  // namespace smvi
