#include "smvi/operators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <utility>

#include "smvi/errors.hpp"

namespace smvi {

namespace {

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream os;
    os << "resolvent parameter must be finite and positive, got " << lambda;
    throw DomainError(os.str());
  }
}

void require_finite_matrix(const Eigen::MatrixXd& m, const char* what) {
  if (m.size() == 0) {
    throw DimensionError(std::string(what) + ": matrix must be nonempty");
  }
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + ": matrix entries must be finite");
  }
}

// Largest eigenvalue of a symmetric matrix.
double lambda_max_sym(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw DomainError("eigenvalue computation failed");
  }
  return es.eigenvalues().maxCoeff();
}

}  // namespace

Resolvent Resolvent::normal_cone(ConvexSet set, double lambda) {
  require_positive_lambda(lambda);
  return Resolvent(NormalCone{std::move(set)}, lambda);
}

Resolvent Resolvent::l1(double weight, Eigen::Index dim, double lambda) {
  require_positive_lambda(lambda);
  if (weight < 0.0 || !std::isfinite(weight)) {
    std::ostringstream os;
    os << "l1 weight must be finite and >= 0, got " << weight;
    throw DomainError(os.str());
  }
  if (dim <= 0) throw DimensionError("l1 resolvent: dimension must be positive");
  return Resolvent(SoftThreshold{weight, dim}, lambda);
}

Resolvent Resolvent::affine_monotone(Eigen::MatrixXd B, Point c, double lambda) {
  require_positive_lambda(lambda);
  require_finite_matrix(B, "affine_monotone");
  if (B.rows() != B.cols()) {
    throw DimensionError("affine_monotone: B must be square");
  }
  if (B.rows() != c.dim()) {
    throw DimensionError("affine_monotone: B and c dimensions differ");
  }
  // Monotonicity of x -> Bx + c is exactly B + B^T PSD.
  Eigen::MatrixXd sym = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw DomainError("affine_monotone: eigenvalue check failed");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if (min_eig < -1e-9 * scale) {
    std::ostringstream os;
    os << "affine_monotone: B + B^T has eigenvalue " << min_eig
       << " < 0, operator is not monotone";
    throw DomainError(os.str());
  }
  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(B.rows(), B.cols()) + lambda * B;
  auto lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(system);
  // I + lambda B is provably invertible here (its symmetric part is >= I),
  // but report a conditioning pathology rather than return garbage.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > 1e12) {
    std::ostringstream os;
    os << "affine_monotone: I + lambda B is numerically singular (cond ~ "
       << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity())
       << ")";
    throw DomainError(os.str());
  }
  return Resolvent(
      AffineMonotone{std::move(B), c.coords(), std::move(lu)}, lambda);
}

Resolvent Resolvent::zero(Eigen::Index dim, double lambda) {
  require_positive_lambda(lambda);
  if (dim <= 0) throw DimensionError("zero resolvent: dimension must be positive");
  return Resolvent(Zero{dim}, lambda);
}

Eigen::Index Resolvent::dim() const {
  return std::visit(
      [](const auto& v) -> Eigen::Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalCone>) {
          return v.set.dim();
        } else if constexpr (std::is_same_v<T, SoftThreshold>) {
          return v.dim;
        } else if constexpr (std::is_same_v<T, AffineMonotone>) {
          return v.B.rows();
        } else {
          return v.dim;
        }
      },
      v_);
}

Point Resolvent::apply(const Point& x) const {
  if (x.dim() != dim()) {
    throw DimensionError("resolvent applied to point of wrong dimension");
  }
  return std::visit(
      [&](const auto& v) -> Point {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NormalCone>) {
          return project(v.set, x);
        } else if constexpr (std::is_same_v<T, SoftThreshold>) {
          const double t = lambda_ * v.weight;
          Eigen::VectorXd out = x.coords();
          for (Eigen::Index i = 0; i < out.size(); ++i) {
            const double xi = out[i];
            out[i] = xi > t ? xi - t : (xi < -t ? xi + t : 0.0);
          }
          return Point(std::move(out));
        } else if constexpr (std::is_same_v<T, AffineMonotone>) {
          return Point(v.lu->solve(x.coords() - lambda_ * v.c));
        } else {
          return x;
        }
      },
      v_);
}

IsmMap IsmMap::zero(Eigen::Index dim, double theta) {
  if (dim <= 0) throw DimensionError("zero map: dimension must be positive");
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("ism modulus must be finite and positive");
  }
  return IsmMap(Zero{dim}, theta);
}

IsmMap IsmMap::affine_gradient(Eigen::MatrixXd P, Point q, double theta) {
  require_finite_matrix(P, "affine_gradient");
  if (P.rows() != P.cols()) {
    throw DimensionError("affine_gradient: P must be square");
  }
  if (P.rows() != q.dim()) {
    throw DimensionError("affine_gradient: P and q dimensions differ");
  }
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw DomainError("affine_gradient: P must be symmetric");
  }
  Eigen::MatrixXd sym = 0.5 * (P + P.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw DomainError("affine_gradient: eigenvalue check failed");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  const double max_eig = es.eigenvalues().maxCoeff();
  if (min_eig < -1e-9 * scale) {
    std::ostringstream os;
    os << "affine_gradient: P has eigenvalue " << min_eig << " < 0";
    throw DomainError(os.str());
  }
  // Sharp modulus: gradient of a convex quadratic is 1/L-ism with
  // L = lambda_max(P). Zero matrix admits any modulus; default to 1.
  const double sharp = max_eig > 0.0 ? 1.0 / max_eig : 1.0;
  double chosen = theta;
  if (theta <= 0.0) {
    chosen = sharp;
  } else if (theta > sharp * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "affine_gradient: claimed modulus " << theta
       << " exceeds 1/lambda_max(P) = " << sharp;
    throw DomainError(os.str());
  }
  return IsmMap(AffineGradient{std::move(sym), q.coords()}, chosen);
}

Eigen::Index IsmMap::dim() const {
  return std::visit(
      [](const auto& v) -> Eigen::Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return v.dim;
        } else {
          return v.P.rows();
        }
      },
      v_);
}

Point IsmMap::apply(const Point& x) const {
  if (x.dim() != dim()) {
    throw DimensionError("ism map applied to point of wrong dimension");
  }
  return std::visit(
      [&](const auto& v) -> Point {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return Point::zero(v.dim);
        } else {
          return Point(v.P * x.coords() + v.q);
        }
      },
      v_);
}

NonexpansiveMap NonexpansiveMap::identity(Eigen::Index dim) {
  if (dim <= 0) throw DimensionError("identity: dimension must be positive");
  return NonexpansiveMap(Identity{dim});
}

NonexpansiveMap NonexpansiveMap::negation(Eigen::Index dim) {
  if (dim <= 0) throw DimensionError("negation: dimension must be positive");
  return NonexpansiveMap(Negation{dim});
}

NonexpansiveMap NonexpansiveMap::reflection(ConvexSet set) {
  return NonexpansiveMap(Reflection{std::move(set)});
}

NonexpansiveMap NonexpansiveMap::average(double alpha, NonexpansiveMap inner) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "average: weight must lie in [0, 1], got " << alpha;
    throw DomainError(os.str());
  }
  return NonexpansiveMap(
      Average{alpha, std::make_shared<const NonexpansiveMap>(std::move(inner))});
}

NonexpansiveMap NonexpansiveMap::projection(ConvexSet set) {
  return NonexpansiveMap(ProjectionMap{std::move(set)});
}

NonexpansiveMap NonexpansiveMap::affine_contraction(Eigen::MatrixXd R, Point s) {
  require_finite_matrix(R, "affine_contraction");
  if (R.rows() != R.cols()) {
    throw DimensionError("affine_contraction: R must be square");
  }
  if (R.rows() != s.dim()) {
    throw DimensionError("affine_contraction: R and s dimensions differ");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const double snorm = svd.singularValues().maxCoeff();
  if (snorm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "affine_contraction: spectral norm " << snorm << " exceeds 1";
    throw DomainError(os.str());
  }
  return NonexpansiveMap(AffineContraction{std::move(R), s.coords()});
}

Eigen::Index NonexpansiveMap::dim() const {
  return std::visit(
      [](const auto& v) -> Eigen::Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Identity> ||
                      std::is_same_v<T, Negation>) {
          return v.dim;
        } else if constexpr (std::is_same_v<T, Reflection> ||
                             std::is_same_v<T, ProjectionMap>) {
          return v.set.dim();
        } else if constexpr (std::is_same_v<T, Average>) {
          return v.inner->dim();
        } else {
          return v.R.rows();
        }
      },
      v_);
}

Point NonexpansiveMap::apply(const Point& x) const {
  if (x.dim() != dim()) {
    throw DimensionError("nonexpansive map applied to point of wrong dimension");
  }
  return std::visit(
      [&](const auto& v) -> Point {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return x;
        } else if constexpr (std::is_same_v<T, Negation>) {
          return -x;
        } else if constexpr (std::is_same_v<T, Reflection>) {
          return 2.0 * project(v.set, x) - x;
        } else if constexpr (std::is_same_v<T, Average>) {
          return v.alpha * v.inner->apply(x) + (1.0 - v.alpha) * x;
        } else if constexpr (std::is_same_v<T, ProjectionMap>) {
          return project(v.set, x);
        } else {
          return Point(v.R * x.coords() + v.s);
        }
      },
      v_);
}

WMapping::WMapping(std::vector<NonexpansiveMap> family,
                   std::vector<double> weights)
    : family_(std::move(family)), weights_(std::move(weights)), dim_(0) {
  if (family_.size() != weights_.size()) {
    throw DimensionError("w-mapping: family and weight counts differ");
  }
  // An empty family is the identity on every space (dim 0 = unconstrained).
  if (!family_.empty()) {
    dim_ = family_.front().dim();
    for (const auto& t : family_) {
      if (t.dim() != dim_) {
        throw DimensionError("w-mapping: family members have mixed dimensions");
      }
    }
  }
  for (double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) {
      std::ostringstream os;
      os << "w-mapping: weights must lie in [0, 1], got " << w;
      throw DomainError(os.str());
    }
  }
}

Point WMapping::apply(const Point& x) const {
  if (!family_.empty() && x.dim() != dim_) {
    throw DimensionError("w-mapping applied to point of wrong dimension");
  }
  return w_mapping_apply(family_, weights_, x);
}

Point w_mapping_apply(const std::vector<NonexpansiveMap>& family,
                      const std::vector<double>& weights, const Point& x) {
  if (family.size() != weights.size()) {
    throw DimensionError("w-mapping: family and weight counts differ");
  }
  for (const auto& t : family) {
    if (t.dim() != x.dim()) {
      throw DimensionError("w-mapping: member dimension mismatch");
    }
  }
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      std::ostringstream os;
      os << "w-mapping: weights must lie in [0, 1], got " << w;
      throw DomainError(os.str());
    }
  }
  // U_{N+1}(x) = x; U_k(x) = w_k T_k(U_{k+1}(x)) + (1 - w_k) x. Note the
  // convex combination at every level is with the *original* x.
  Point u = x;
  for (std::size_t k = family.size(); k-- > 0;) {
    u = weights[k] * family[k].apply(u) + (1.0 - weights[k]) * x;
  }
  return u;
}

Point forward_backward_apply(const Resolvent& J, const IsmMap& f, double lambda,
                             const Point& x) {
  if (J.dim() != f.dim()) {
    throw DimensionError("forward-backward: resolvent and map dimensions differ");
  }
  const double rel = std::abs(lambda - J.lambda()) /
                     std::max(1.0, std::abs(J.lambda()));
  if (rel > 1e-12) {
    std::ostringstream os;
    os << "forward-backward: step " << lambda
       << " does not match resolvent parameter " << J.lambda();
    throw DomainError(os.str());
  }
  if (!(lambda > 0.0) || !(lambda < 2.0 * f.theta())) {
    std::ostringstream os;
    os << "forward-backward: step " << lambda << " outside (0, "
       << 2.0 * f.theta() << ")";
    throw DomainError(os.str());
  }
  return J.apply(x - lambda * f.apply(x));
}

}  // namespace smvi
