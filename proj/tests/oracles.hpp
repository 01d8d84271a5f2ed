#pragma once

// Independent reference computations for the test suite. Everything here is
// deliberately different from the library's own algorithms: eigendecomposition
// instead of power iteration, exhaustive active-set enumeration instead of
// Dykstra, ternary search instead of the closed-form prox, hand-expanded
// recursion instead of the loop.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "smvi/operators.hpp"
#include "smvi/point.hpp"
#include "smvi/sets.hpp"

namespace oracle {

// Largest singular value via full SVD.
inline double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues()(0);
}

// Largest eigenvalue of a symmetric matrix.
inline double lambda_max_sym(const Eigen::MatrixXd& P) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  return es.eigenvalues().maxCoeff();
}

// Polyhedron {z : G z <= h}, row by row.
struct Polyhedron {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

inline void append_row(Polyhedron& p, const Eigen::VectorXd& g, double h) {
  const Eigen::Index m = p.G.rows();
  p.G.conservativeResize(m + 1, g.size());
  p.h.conservativeResize(m + 1);
  p.G.row(m) = g.transpose();
  p.h(m) = h;
}

// Box and half-space constraints as rows. Other shapes are not polyhedral.
inline void append_set(Polyhedron& p, const smvi::ConvexSet& set) {
  if (const auto* b = std::get_if<smvi::Box>(&set.variant())) {
    const Eigen::Index d = b->lower.dim();
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
      e(i) = 1.0;
      append_row(p, e, b->upper[i]);
      append_row(p, -e, -b->lower[i]);
    }
    return;
  }
  if (const auto* hs = std::get_if<smvi::HalfSpace>(&set.variant())) {
    if (!hs->degenerate()) append_row(p, hs->normal().coords(), hs->offset());
    return;
  }
  throw std::logic_error("oracle polyhedron: unsupported set shape");
}

// min ||z - x||^2 over {Gz <= h} by enumerating active sets: for every row
// subset solve the equality-constrained projection through its KKT system and
// keep the nearest candidate that is feasible for all rows. Exponential in the
// number of rows -- fine at test sizes.
inline Eigen::VectorXd qp_project(const Polyhedron& p,
                                  const Eigen::VectorXd& x,
                                  double feas_tol = 1e-9) {
  const Eigen::Index m = p.G.rows();
  const auto feasible = [&](const Eigen::VectorXd& z) {
    return m == 0 || ((p.G * z - p.h).maxCoeff() <= feas_tol);
  };
  Eigen::VectorXd best = x;
  double best_d = std::numeric_limits<double>::infinity();
  if (feasible(x)) return x;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < m; ++i)
      if (mask & (std::uint64_t{1} << i)) rows.push_back(i);
    Eigen::MatrixXd Gs(rows.size(), x.size());
    Eigen::VectorXd hs(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      Gs.row(static_cast<Eigen::Index>(k)) = p.G.row(rows[k]);
      hs(static_cast<Eigen::Index>(k)) = p.h(rows[k]);
    }
    // z = x - Gs' nu with (Gs Gs') nu = Gs x - hs; least-squares solve keeps
    // rank-deficient subsets usable, inconsistent ones get filtered below.
    Eigen::MatrixXd K = Gs * Gs.transpose();
    Eigen::VectorXd rhs = Gs * x - hs;
    Eigen::VectorXd nu =
        K.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd z = x - Gs.transpose() * nu;
    if ((Gs * z - hs).cwiseAbs().maxCoeff() > 1e-8) continue;
    if (!feasible(z)) continue;
    double d = (z - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = z;
    }
  }
  return best;
}

// argmin_t 0.5 (t - x)^2 + w |t| by ternary search on the convex objective.
// Minimizes 0.5*(t-x)^2 + w*|t| by bisecting the sign of the subgradient.
// The subdifferential is t - x + w*sgn(t) for t != 0 and -x + w*[-1,1] at 0;
// it is strictly increasing in t, so sign bisection converges to ulp level
// (value-comparison searches stall near sqrt(eps) on flat quadratics).
inline double soft_threshold_1d(double x, double w) {
  if (-x - w <= 0.0 && 0.0 <= -x + w) return 0.0;
  const auto subgrad = [&](double t) { return t - x + (t > 0.0 ? w : -w); };
  double lo = -std::abs(x) - w - 1.0;
  double hi = std::abs(x) + w + 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid == 0.0 ? (-x + w < 0.0) : (subgrad(mid) < 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Two-member W-mapping written out by hand:
//   U_3 = I
//   U_2(x) = w2 T2(x) + (1 - w2) x
//   U_1(x) = w1 T1(U_2(x)) + (1 - w1) x
inline smvi::Point w_mapping_direct2(const smvi::NonexpansiveMap& t1,
                                     const smvi::NonexpansiveMap& t2,
                                     double w1, double w2,
                                     const smvi::Point& x) {
  smvi::Point u2 = w2 * t2.apply(x) + (1.0 - w2) * x;
  return w1 * t1.apply(u2) + (1.0 - w1) * x;
}

}  // namespace oracle
