#pragma once

#include <Eigen/Core>

#include "smvi/point.hpp"

namespace smvi {

// Estimate of the spectral norm by power iteration on A^T A with a fixed,
// seeded start vector. Converges from below; the returned value satisfies
// |r - sigma_max| <= tol * sigma_max for nondegenerate spectra. The zero map
// returns 0.
double estimate_operator_norm(const Eigen::MatrixXd& matrix, double tol);

// Bounded linear operator between two finite-dimensional spaces, with its
// adjoint (the transpose) and a cached spectral-norm estimate.
class LinearMap {
 public:
  explicit LinearMap(Eigen::MatrixXd matrix);

  static LinearMap identity(Eigen::Index dim);

  Eigen::Index domain_dim() const { return matrix_.cols(); }
  Eigen::Index codomain_dim() const { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  // Cached upper-ish estimate of ||A|| (tight to ~1e-12 relative).
  double norm_estimate() const { return norm_estimate_; }

  Point apply(const Point& x) const;
  Point apply_adjoint(const Point& y) const;

 private:
  Eigen::MatrixXd matrix_;
  double norm_estimate_;
};

double estimate_operator_norm(const LinearMap& map, double tol);

}  // namespace smvi
