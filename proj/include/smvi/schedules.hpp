#pragma once

#include <string>

namespace smvi {

// Scalar parameter sequence indexed by the iteration counter n >= 0.
//   constant:c     -> c
//   harmonic:a:b   -> a / (n + b)
//   power:a:p:b    -> a / (n + b)^p
class Schedule {
 public:
  static Schedule constant(double c);
  static Schedule harmonic(double a, double b);
  static Schedule power_decay(double a, double p, double b);
  static Schedule parse(const std::string& text);

  double value(long n) const;
  bool decays_to_zero() const;
  std::string describe() const;

 private:
  enum class Kind { Constant, Harmonic, Power };
  Schedule(Kind k, double a, double p, double b)
      : kind_(k), a_(a), p_(p), b_(b) {}
  Kind kind_;
  double a_;
  double p_;
  double b_;
};

}  // namespace smvi
