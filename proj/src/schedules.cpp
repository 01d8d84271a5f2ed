#include "smvi/schedules.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "smvi/errors.hpp"

namespace smvi {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string("schedule: ") + what + " must be finite");
  }
}

std::vector<std::string> split_colon(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const std::string& full) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DomainError("schedule: cannot parse number '" + s + "' in '" + full +
                      "'");
  }
  if (pos != s.size()) {
    throw DomainError("schedule: trailing characters in number '" + s +
                      "' in '" + full + "'");
  }
  return v;
}

}  // namespace

Schedule Schedule::constant(double c) {
  require_finite(c, "constant value");
  return Schedule(Kind::Constant, c, 0.0, 0.0);
}

Schedule Schedule::harmonic(double a, double b) {
  require_finite(a, "numerator");
  require_finite(b, "shift");
  if (!(a > 0.0)) throw DomainError("schedule: harmonic numerator must be > 0");
  if (!(b > 0.0)) throw DomainError("schedule: harmonic shift must be > 0");
  return Schedule(Kind::Harmonic, a, 1.0, b);
}

Schedule Schedule::power_decay(double a, double p, double b) {
  require_finite(a, "numerator");
  require_finite(p, "exponent");
  require_finite(b, "shift");
  if (!(a > 0.0)) throw DomainError("schedule: power numerator must be > 0");
  if (!(p > 0.0)) throw DomainError("schedule: power exponent must be > 0");
  if (!(b > 0.0)) throw DomainError("schedule: power shift must be > 0");
  return Schedule(Kind::Power, a, p, b);
}

Schedule Schedule::parse(const std::string& text) {
  auto parts = split_colon(text);
  const std::string& kind = parts.front();
  if (kind == "constant" && parts.size() == 2) {
    return constant(parse_double(parts[1], text));
  }
  if (kind == "harmonic" && parts.size() == 3) {
    return harmonic(parse_double(parts[1], text), parse_double(parts[2], text));
  }
  if (kind == "power" && parts.size() == 4) {
    return power_decay(parse_double(parts[1], text),
                       parse_double(parts[2], text),
                       parse_double(parts[3], text));
  }
  throw DomainError(
      "schedule: expected 'constant:c', 'harmonic:a:b' or 'power:a:p:b', got '" +
      text + "'");
}

double Schedule::value(long n) const {
  if (n < 0) throw DomainError("schedule: index must be >= 0");
  switch (kind_) {
    case Kind::Constant:
      return a_;
    case Kind::Harmonic:
      return a_ / (static_cast<double>(n) + b_);
    case Kind::Power:
      return a_ / std::pow(static_cast<double>(n) + b_, p_);
  }
  throw DomainError("schedule: unknown kind");
}

bool Schedule::decays_to_zero() const { return kind_ != Kind::Constant; }

std::string Schedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant:
      os << "constant:" << a_;
      break;
    case Kind::Harmonic:
      os << "harmonic:" << a_ << ":" << b_;
      break;
    case Kind::Power:
      os << "power:" << a_ << ":" << p_ << ":" << b_;
      break;
  }
  return os.str();
}

}  // namespace smvi
