#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smvi/linear_map.hpp"
#include "smvi/operators.hpp"
#include "smvi/point.hpp"
#include "smvi/schedules.hpp"
#include "smvi/sets.hpp"
#include "smvi/trace.hpp"

namespace smvi {

// Split monotone variational inclusion with fixed-point constraints:
// find x in C with 0 in f(x) + M1(x), such that y = Ax solves
// 0 in g(y) + M2(y), and x is a common fixed point of the family and S.
struct ProblemSpec {
  Eigen::Index dim1;
  Eigen::Index dim2;
  ConvexSet C;               // in H1
  ConvexSet Q;               // in H2
  LinearMap A;               // H1 -> H2
  Resolvent M1_resolvent;    // for U = J(I - lambda f)
  Resolvent M2_resolvent;    // for V = J(I - lambda g)
  IsmMap f;                  // on H1, modulus theta1
  IsmMap g;                  // on H2, modulus theta2
  double theta1;
  double theta2;
  NonexpansiveMap S;         // on H1
  std::vector<NonexpansiveMap> family;  // T_1..T_N on H1 (may be empty)
};

struct SolverConfig {
  double gamma;
  double lambda;
  Schedule alpha_schedule;
  Schedule sigma_schedule;
  std::vector<Schedule> lambda_schedules;  // one per family member
  long max_iter;
  double stop_tol;
  DykstraOptions dykstra;

  // gamma/lambda are placeholders; set them per problem before use.
  static SolverConfig defaults();
};

struct ConfigViolation {
  std::string constraint;  // short machine-ish tag, e.g. "gamma-range"
  std::string message;
};

// Checks every theorem-side parameter constraint plus structural
// consistency, and returns ALL violations rather than the first.
std::vector<ConfigViolation> validate_config(const ProblemSpec& spec,
                                             const SolverConfig& cfg);

// Everything produced while forming iterate n (x is x_n, not x_{n+1}).
struct IterateState {
  long n;
  Point x, u, z, y;  // H1
  Point Az, w;       // H2
  HalfSpace cn, qn;
  TraceRecord trace;
};

struct StepResult {
  IterateState state;
  Point x_next;
};

// One pass of the update:
//   u = (1-alpha) x + alpha P_C(sigma Sx + (1-sigma) Wx)
//   z = U(u),  w = V(Az),  y = z + gamma A*(w - Az)
//   x_next = P_{C and C_n and Q_n}(x0)
StepResult step(const ProblemSpec& spec, const SolverConfig& cfg,
                const Point& x0, const Point& x, long n,
                const std::optional<Point>& planted = std::nullopt);

enum class Termination { ToleranceReached, IterationBudgetExhausted, Error };

struct RunResult {
  std::vector<IterateState> states;
  Point final_x;
  Termination termination;
  std::string message;
  std::vector<std::string> warnings;
};

// Iterates from x0 (projected onto C first if needed, with a warning) until
// both ||x_{n+1} - x_n|| and ||w_n - A z_n|| fall to stop_tol, or the budget
// runs out. Step failures terminate with the partial trace preserved.
RunResult run(const ProblemSpec& spec, const SolverConfig& cfg, const Point& x0,
              const std::optional<Point>& planted = std::nullopt);

}  // namespace smvi
