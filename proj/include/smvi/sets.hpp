#pragma once

#include <span>
#include <variant>
#include <vector>

#include "smvi/point.hpp"

namespace smvi {

// {z : <normal, z> <= offset}. A zero normal marks a degenerate half-space:
// the whole space when offset >= 0, rejected as empty otherwise.
class HalfSpace {
 public:
  HalfSpace(Point normal, double offset);

  const Point& normal() const { return normal_; }
  double offset() const { return offset_; }
  bool degenerate() const { return degenerate_; }
  Eigen::Index dim() const { return normal_.dim(); }

  // <normal, z> - offset; nonpositive inside.
  double violation(const Point& z) const;
  bool contains(const Point& z, double tol = 0.0) const;

 private:
  Point normal_;
  double offset_;
  bool degenerate_;
};

class ConvexSet;

struct WholeSpace {
  Eigen::Index dim;
};

struct Box {
  Point lower;
  Point upper;
};

struct Ball {
  Point center;
  double radius;
};

struct Intersection {
  std::vector<ConvexSet> members;
};

// Closed convex subset of a finite-dimensional space, restricted to shapes
// with an exact metric projection (intersections are handled by Dykstra).
class ConvexSet {
 public:
  using Variant = std::variant<WholeSpace, Box, Ball, HalfSpace, Intersection>;

  static ConvexSet whole_space(Eigen::Index dim);
  static ConvexSet box(Point lower, Point upper);
  static ConvexSet ball(Point center, double radius);
  static ConvexSet half_space(HalfSpace hs);
  static ConvexSet half_space(Point normal, double offset);
  static ConvexSet intersection(std::vector<ConvexSet> members);

  Eigen::Index dim() const;
  const Variant& variant() const { return v_; }
  bool contains(const Point& x, double tol = 0.0) const;

 private:
  explicit ConvexSet(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Nearest point of the set. Exact for all shapes except Intersection, which
// delegates to project_intersection with default settings.
Point project(const ConvexSet& set, const Point& x);

struct DykstraOptions {
  int max_iter = 10000;
  double tol = 1e-10;
};

struct DykstraResult {
  Point point;
  bool converged = false;
  bool empty_suspected = false;
  int cycles = 0;
  double residual = 0.0;
};

// Dykstra's alternating projection with correction terms over a cycle of
// sets with exact projections (nested intersections are flattened). The
// residual is the Birgin-Raydan robust criterion: the root of the summed
// squared changes of the correction increments over one cycle.
DykstraResult dykstra_project(std::span<const ConvexSet> sets, const Point& x,
                              const DykstraOptions& opts = {});

// Throwing wrapper: ConvergenceError when the cycle budget runs out,
// EmptySetError when the residual stalls at a level that indicates an
// empty intersection.
Point project_intersection(std::span<const ConvexSet> sets, const Point& x,
                           int max_iter = 10000, double tol = 1e-10);

// Half-space reduction of the contraction step's membership condition
//   ||y - z||^2 <= (1-beta)||x - z||^2 + beta||sx - z||^2
// (the ||z||^2 terms cancel because the coefficients sum to one):
//   a = 2((1-beta)x + beta*sx - y),
//   b = (1-beta)||x||^2 + beta||sx||^2 - ||y||^2.
// Coincident inputs produce a vacuous condition; normals below the noise
// scale of the inputs collapse to the degenerate whole space.
HalfSpace build_cn_halfspace(const Point& x, const Point& sx, const Point& y,
                             double beta);

// Half-space form of {z : <x - z, x0 - x> >= 0}:
//   a = x0 - x, b = <x0 - x, x>.
// x always lies on the boundary; x0 == x gives the whole space.
HalfSpace build_qn_halfspace(const Point& x0, const Point& x);

}  // namespace smvi
