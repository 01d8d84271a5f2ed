#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <memory>
#include <variant>
#include <vector>

#include "smvi/point.hpp"
#include "smvi/sets.hpp"

namespace smvi {

// Resolvent (I + lambda M)^{-1} of a maximal monotone operator M, the only
// representation of M used anywhere. Every variant has a closed form and is
// firmly nonexpansive:
//   NormalCone   -> metric projection onto the set (independent of lambda)
//   SoftThreshold-> componentwise shrink by lambda * weight (M = weight * d||.||_1)
//   AffineMonotone, M(x) = Bx + c with B + B^T PSD -> solve (I + lambda B) v = x - lambda c
//   Zero         -> identity
class Resolvent {
 public:
  struct NormalCone {
    ConvexSet set;
  };
  struct SoftThreshold {
    double weight;
    Eigen::Index dim;
  };
  struct AffineMonotone {
    Eigen::MatrixXd B;
    Eigen::VectorXd c;
    std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
  };
  struct Zero {
    Eigen::Index dim;
  };
  using Variant = std::variant<NormalCone, SoftThreshold, AffineMonotone, Zero>;

  static Resolvent normal_cone(ConvexSet set, double lambda);
  static Resolvent l1(double weight, Eigen::Index dim, double lambda);
  static Resolvent affine_monotone(Eigen::MatrixXd B, Point c, double lambda);
  static Resolvent zero(Eigen::Index dim, double lambda);

  Point apply(const Point& x) const;
  double lambda() const { return lambda_; }
  Eigen::Index dim() const;
  const Variant& variant() const { return v_; }

 private:
  Resolvent(Variant v, double lambda) : v_(std::move(v)), lambda_(lambda) {}
  Variant v_;
  double lambda_;
};

// Inverse strongly monotone map with modulus theta:
//   <f(x) - f(y), x - y> >= theta ||f(x) - f(y)||^2.
// Variants: the zero map (any modulus) and the gradient of a convex
// quadratic, f(x) = Px + q with P symmetric PSD and theta <= 1/lambda_max(P).
class IsmMap {
 public:
  struct Zero {
    Eigen::Index dim;
  };
  struct AffineGradient {
    Eigen::MatrixXd P;
    Eigen::VectorXd q;
  };
  using Variant = std::variant<Zero, AffineGradient>;

  static IsmMap zero(Eigen::Index dim, double theta = 1.0);
  // theta <= 0 selects the sharp modulus 1/lambda_max(P) automatically.
  static IsmMap affine_gradient(Eigen::MatrixXd P, Point q, double theta = 0.0);

  Point apply(const Point& x) const;
  double theta() const { return theta_; }
  Eigen::Index dim() const;
  const Variant& variant() const { return v_; }

 private:
  IsmMap(Variant v, double theta) : v_(std::move(v)), theta_(theta) {}
  Variant v_;
  double theta_;
};

// 1-Lipschitz map, closed under averaging with the identity.
class NonexpansiveMap {
 public:
  struct Identity {
    Eigen::Index dim;
  };
  struct Negation {
    Eigen::Index dim;
  };
  struct Reflection {
    ConvexSet set;  // 2 P_set - I
  };
  struct Average {
    double alpha;  // weight on the inner map: alpha*T(x) + (1-alpha)*x
    std::shared_ptr<const NonexpansiveMap> inner;
  };
  struct ProjectionMap {
    ConvexSet set;
  };
  struct AffineContraction {
    Eigen::MatrixXd R;  // spectral norm <= 1 + 1e-12
    Eigen::VectorXd s;
  };
  using Variant = std::variant<Identity, Negation, Reflection, Average,
                               ProjectionMap, AffineContraction>;

  static NonexpansiveMap identity(Eigen::Index dim);
  static NonexpansiveMap negation(Eigen::Index dim);
  static NonexpansiveMap reflection(ConvexSet set);
  static NonexpansiveMap average(double alpha, NonexpansiveMap inner);
  static NonexpansiveMap projection(ConvexSet set);
  static NonexpansiveMap affine_contraction(Eigen::MatrixXd R, Point s);

  Point apply(const Point& x) const;
  Eigen::Index dim() const;
  const Variant& variant() const { return v_; }

 private:
  explicit NonexpansiveMap(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// W-mapping generated by a finite family T_1..T_N and weights in [0, 1],
// by the usual recursion (Takahashi):
//   U_{N+1} = I,  U_k(x) = w_k T_k(U_{k+1}(x)) + (1 - w_k) x,  W = U_1.
// Nonexpansive whenever every T_k is; any common fixed point is preserved.
class WMapping {
 public:
  WMapping(std::vector<NonexpansiveMap> family, std::vector<double> weights);

  Point apply(const Point& x) const;
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return family_.size(); }

 private:
  std::vector<NonexpansiveMap> family_;
  std::vector<double> weights_;
  Eigen::Index dim_;
};

// W-mapping evaluation without constructing a WMapping: same recursion,
// weights supplied per call. An empty family acts as the identity.
Point w_mapping_apply(const std::vector<NonexpansiveMap>& family,
                      const std::vector<double>& weights, const Point& x);

// J(x - lambda f(x)). Fixed points solve 0 in f(x) + M(x). Requires lambda
// to be the resolvent's own parameter and to lie in (0, 2 theta), which
// makes the composition nonexpansive.
Point forward_backward_apply(const Resolvent& J, const IsmMap& f, double lambda,
                             const Point& x);

}  // namespace smvi
