#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "smvi/problems.hpp"
#include "smvi/solver.hpp"
#include "smvi/trace.hpp"

namespace smvi {

// Problem files: JSON, exact double round-trip. Analytic gamma sets are the
// one thing that does not serialize (they carry code, not data).
std::string problem_to_json(const BenchmarkProblem& problem);
BenchmarkProblem problem_from_json(const std::string& text);
void save_problem(const BenchmarkProblem& problem, const std::string& path);
BenchmarkProblem load_problem(const std::string& path);

// Flat key = value config format ('#' comments allowed). Keys:
//   gamma, lambda, alpha, sigma, weights (comma-separated schedules),
//   max_iter, stop_tol, dykstra_max_iter, dykstra_tol
// Unknown keys are errors. Values given override `base`.
SolverConfig parse_config(const std::string& text, SolverConfig base);
std::string write_config(const SolverConfig& cfg);

// Trace CSV. Header is fixed; doubles printed with %.17g; dist_p is the
// empty field when absent.
inline constexpr const char* kTraceHeader =
    "n,res_split,res_yz,bound_yz,ratio_cond2,dist_x0,dist_p,sigma_n,alpha_n";
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
std::vector<TraceRecord> parse_trace_csv(std::istream& in);

// %.17g in the C locale regardless of the global locale.
std::string format_double(double v);

}  // namespace smvi
