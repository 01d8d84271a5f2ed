#include "smvi/linear_map.hpp"

#include <cmath>

#include "smvi/errors.hpp"
#include "smvi/rng.hpp"

namespace smvi {

namespace {
constexpr std::uint64_t kPowerIterationSeed = 0x5eedb07da175u;
constexpr int kMaxPowerIterations = 200000;
}  // namespace

double estimate_operator_norm(const Eigen::MatrixXd& matrix, double tol) {
  if (!(tol > 0.0)) {
    throw DomainError("estimate_operator_norm: tol must be positive");
  }
  if (matrix.size() == 0 || matrix.cwiseAbs().maxCoeff() == 0.0) {
    return 0.0;
  }

  DetRng rng(kPowerIterationSeed);
  Eigen::VectorXd v(matrix.cols());

  // Find a start vector outside the null space. A random draw misses it
  // with probability one; the basis fallback terminates because A != 0.
  bool started = false;
  for (int attempt = 0; attempt < 8 && !started; ++attempt) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
    double n = v.norm();
    if (n > 0.0 && (matrix * v).norm() > 0.0) {
      v /= n;
      started = true;
    }
  }
  if (!started) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (matrix.col(j).norm() > 0.0) {
        v.setZero();
        v[j] = 1.0;
        break;
      }
    }
  }

  double s_prev = 0.0;
  double s = 0.0;
  int stable = 0;
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    Eigen::VectorXd u = matrix * v;
    s = u.norm();
    Eigen::VectorXd w = matrix.transpose() * u;
    double nw = w.norm();
    if (nw == 0.0) break;  // unreachable once Av != 0, kept as a guard
    v = w / nw;
    if (std::abs(s - s_prev) <= tol * std::max(s, 1e-300)) {
      if (++stable >= 3) break;
    } else {
      stable = 0;
    }
    s_prev = s;
  }
  return s;
}

LinearMap::LinearMap(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.size() == 0) {
    throw DomainError("LinearMap: matrix must be nonempty");
  }
  if (!matrix_.allFinite()) {
    throw DomainError("LinearMap: matrix entries must be finite");
  }
  norm_estimate_ = estimate_operator_norm(matrix_, 1e-12);
}

LinearMap LinearMap::identity(Eigen::Index dim) {
  return LinearMap(Eigen::MatrixXd::Identity(dim, dim));
}

Point LinearMap::apply(const Point& x) const {
  if (x.dim() != domain_dim()) {
    throw DimensionError("LinearMap::apply: expected dim " +
                         std::to_string(domain_dim()) + ", got " +
                         std::to_string(x.dim()));
  }
  return Point(matrix_ * x.coords());
}

Point LinearMap::apply_adjoint(const Point& y) const {
  if (y.dim() != codomain_dim()) {
    throw DimensionError("LinearMap::apply_adjoint: expected dim " +
                         std::to_string(codomain_dim()) + ", got " +
                         std::to_string(y.dim()));
  }
  return Point(matrix_.transpose() * y.coords());
}

double estimate_operator_norm(const LinearMap& map, double tol) {
  return estimate_operator_norm(map.matrix(), tol);
}

}  // namespace smvi
