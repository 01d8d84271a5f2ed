#pragma once

#include <Eigen/Core>
#include <initializer_list>
#include <utility>

#include "smvi/errors.hpp"

namespace smvi {

// Element of a finite-dimensional real inner-product space. Coordinates are
// validated finite at construction. The public surface deliberately admits
// only vector-space operations: points combine with points and with real
// scalars by scaling, and there is no way to add a real number to a Point.
class Point {
 public:
  Point() = default;

  explicit Point(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    if (!coords_.allFinite()) {
      throw DomainError("Point: coordinates must be finite");
    }
  }

  static Point zero(Eigen::Index dim) {
    return Point(Eigen::VectorXd::Zero(dim));
  }

  static Point of(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return Point(std::move(v));
  }

  Eigen::Index dim() const { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }
  const Eigen::VectorXd& coords() const { return coords_; }

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double t);

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double t, Point a) { return a *= t; }
  friend Point operator*(Point a, double t) { return a *= t; }
  friend Point operator-(Point a) { return a *= -1.0; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
  }

 private:
  Eigen::VectorXd coords_;
};

inline void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
  }
}

inline Point& Point::operator+=(const Point& o) {
  require_same_dim(*this, o, "Point::operator+=");
  coords_ += o.coords_;
  return *this;
}

inline Point& Point::operator-=(const Point& o) {
  require_same_dim(*this, o, "Point::operator-=");
  coords_ -= o.coords_;
  return *this;
}

inline Point& Point::operator*=(double t) {
  coords_ *= t;
  return *this;
}

inline double inner(const Point& x, const Point& y) {
  require_same_dim(x, y, "inner");
  return x.coords().dot(y.coords());
}

inline double squared_norm(const Point& x) { return x.coords().squaredNorm(); }
inline double norm(const Point& x) { return x.coords().norm(); }
inline double distance(const Point& x, const Point& y) {
  require_same_dim(x, y, "distance");
  return (x.coords() - y.coords()).norm();
}

}  // namespace smvi
