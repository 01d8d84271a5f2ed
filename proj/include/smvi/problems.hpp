#pragma once

#include <functional>
#include <string>
#include <variant>

#include "smvi/point.hpp"
#include "smvi/solver.hpp"

namespace smvi {

// Description of the solution set when it is larger than {planted}, so the
// expected limit P_Gamma(x0) stays computable.
class GammaSet {
 public:
  struct Singleton {};
  struct BoxSet {
    Point lower, upper;
  };
  struct Analytic {
    std::function<Point(const Point&)> projector;
  };
  using Variant = std::variant<Singleton, BoxSet, Analytic>;

  static GammaSet singleton() { return GammaSet(Singleton{}); }
  static GammaSet box(Point lower, Point upper);
  static GammaSet analytic(std::function<Point(const Point&)> projector);

  const Variant& variant() const { return v_; }

 private:
  explicit GammaSet(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// A problem instance whose solution set is known by construction, plus the
// configuration it was tuned for.
struct BenchmarkProblem {
  std::string name;
  ProblemSpec spec;
  Point planted;  // a point of Gamma
  GammaSet gamma_set;
  SolverConfig recommended_config;
  Point x0;
};

// P_Gamma(x): planted for singletons, clamp for boxes, the supplied routine
// otherwise.
Point project_gamma(const BenchmarkProblem& problem, const Point& x);

// Fixed-point residuals of the planted point under every operator the
// algorithm composes. All must be ~0 or the instance is miswired.
struct PlantCheck {
  double u_res;       // ||U(p) - p||
  double v_res;       // ||V(Ap) - Ap||
  double family_res;  // max_i ||T_i(p) - p||
  double s_res;       // ||S(p) - p||
  bool pass(double tol = 1e-10) const {
    return u_res <= tol && v_res <= tol && family_res <= tol && s_res <= tol;
  }
};
PlantCheck verify_plant(const BenchmarkProblem& problem);

// Box feasibility: C = [-1,1]^dim, everything else trivial, Gamma = C.
// The limit from x0 is the componentwise clamp.
BenchmarkProblem make_box_feasibility(int dim, unsigned seed);

// Fully random instance with Gamma = {p}: affine monotone inclusions on
// both spaces planted at p and Ap, contractive family and S fixing only p.
BenchmarkProblem make_planted_singleton(int dim1, int dim2, unsigned seed);

// L1-regularized denoising: 0 in x - b + weight * d||x||_1, solved exactly
// by componentwise soft thresholding of b.
BenchmarkProblem make_l1_denoise(int dim, double weight, unsigned seed);
BenchmarkProblem make_l1_denoise_explicit(const Point& b, double weight);

}  // namespace smvi
