#include "smvi/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "smvi/diagnostics.hpp"
#include "smvi/errors.hpp"
#include "smvi/io.hpp"

namespace smvi {

using nlohmann::json;

namespace {

bool looks_like_path(const std::string& ref) {
  return ref.find('/') != std::string::npos ||
         (ref.size() > 5 && ref.substr(ref.size() - 5) == ".json");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::ToleranceReached:
      return "tolerance";
    case Termination::IterationBudgetExhausted:
      return "budget";
    case Termination::Error:
      return "error";
  }
  return "unknown";
}

}  // namespace

BenchmarkProblem resolve_problem(const std::string& ref) {
  if (looks_like_path(ref)) return load_problem(ref);
  std::string name = ref;
  unsigned seed = 1;
  if (const std::size_t colon = ref.find(':'); colon != std::string::npos) {
    name = ref.substr(0, colon);
    const std::string seed_text = ref.substr(colon + 1);
    std::size_t pos = 0;
    long parsed = 0;
    try {
      parsed = std::stol(seed_text, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != seed_text.size() || parsed < 0) {
      throw DomainError("problem ref '" + ref + "': bad seed '" + seed_text +
                        "'");
    }
    seed = static_cast<unsigned>(parsed);
  }
  if (name == "box") return make_box_feasibility(5, seed);
  if (name == "planted") return make_planted_singleton(5, 3, seed);
  if (name == "l1") return make_l1_denoise(8, 1.0, seed);
  throw DomainError("problem ref '" + ref +
                    "': expected box:<seed>, planted:<seed>, l1:<seed> or a "
                    ".json path");
}

std::string resolve_output_path(const std::string& path) {
  namespace fs = std::filesystem;
  const char* dir = std::getenv("SMVI_OUT_DIR");
  if (dir == nullptr || *dir == '\0' || fs::path(path).is_absolute()) {
    return path;
  }
  return (fs::path(dir) / path).string();
}

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  // Resolving, configuring and running can fail on user input; report,
  // don't crash.
  std::optional<BenchmarkProblem> problem;
  std::optional<SolverConfig> cfg;
  std::optional<RunResult> result;
  try {
    problem = resolve_problem(manifest.problem_ref);
    cfg = problem->recommended_config;
    if (!manifest.config_path.empty()) {
      std::ifstream in(manifest.config_path);
      if (!in) {
        err << "error: cannot open config '" << manifest.config_path << "'\n";
        return kExitError;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      cfg = parse_config(buf.str(), *cfg);
    }
    if (manifest.max_iter_override >= 0) {
      cfg->max_iter = manifest.max_iter_override;
    }
    if (manifest.stop_tol_override > 0) {
      cfg->stop_tol = manifest.stop_tol_override;
    }

    const auto violations = validate_config(problem->spec, *cfg);
    if (!violations.empty()) {
      for (const auto& v : violations) {
        err << "config error [" << v.constraint << "]: " << v.message << "\n";
      }
      return kExitError;
    }
    const PlantCheck plant = verify_plant(*problem);
    if (!plant.pass()) {
      err << "error: planted point fails its fixed-point residuals (u "
          << plant.u_res << ", v " << plant.v_res << ", family "
          << plant.family_res << ", S " << plant.s_res << ")\n";
      return kExitError;
    }
    result = run(problem->spec, *cfg, problem->x0, problem->planted);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  for (const auto& w : result->warnings) err << "warning: " << w << "\n";

  std::vector<TraceRecord> trace;
  trace.reserve(result->states.size());
  for (const auto& st : result->states) trace.push_back(st.trace);

  const std::string trace_path = resolve_output_path(manifest.trace_path);
  {
    std::ofstream tf(trace_path);
    if (!tf) {
      err << "error: cannot open '" << trace_path << "' for writing\n";
      return kExitError;
    }
    write_trace_csv(tf, trace);
    if (!tf) {
      err << "error: write to '" << trace_path << "' failed\n";
      return kExitError;
    }
  }

  RunChecks checks;
  if (!result->states.empty()) {
    checks = run_checks(problem->spec, *cfg, result->states,
                        result->states.front().x, problem->planted);
  }

  json summary{
      {"problem", problem->name},
      {"ref", manifest.problem_ref},
      {"termination", termination_name(result->termination)},
      {"message", result->message},
      {"iterates", result->states.size()},
      {"warnings", result->warnings},
      {"checks",
       {{"bound_failures", checks.bound_failures},
        {"min_bound_margin", checks.min_bound_margin},
        {"probe_failures", checks.probe_failures},
        {"max_probe_excess", checks.max_probe_excess},
        {"final_max_probe", checks.final_max_probe},
        {"chain_failures", checks.chain_failures},
        {"max_chain_excess", checks.max_chain_excess},
        {"condition_flagged", checks.condition_flagged}}},
  };
  if (!result->states.empty()) {
    const TraceRecord& last = result->states.back().trace;
    json final{{"n", last.n},
               {"res_split", last.res_split},
               {"res_yz", last.res_yz},
               {"dist_x0", last.dist_x0}};
    if (last.dist_p) final["dist_p"] = *last.dist_p;
    summary["final"] = std::move(final);
  }

  int code = kExitOk;
  if (!checks.all_passed()) {
    code = kExitCheckFailed;
  } else if (result->termination != Termination::ToleranceReached) {
    code = kExitError;
  }
  summary["exit_code"] = code;

  const std::string summary_path = resolve_output_path(manifest.summary_path);
  {
    std::ofstream sf(summary_path);
    if (!sf) {
      err << "error: cannot open '" << summary_path << "' for writing\n";
      return kExitError;
    }
    sf << summary.dump(2) << "\n";
    if (!sf) {
      err << "error: write to '" << summary_path << "' failed\n";
      return kExitError;
    }
  }

  out << problem->name << ": " << result->message << "\n";
  if (manifest.verbosity > 0 && !result->states.empty()) {
    const TraceRecord& last = result->states.back().trace;
    out << "  final: res_split " << format_double(last.res_split)
        << ", res_yz " << format_double(last.res_yz);
    if (last.dist_p) out << ", dist_p " << format_double(*last.dist_p);
    out << "\n";
  }
  out << "  checks: bound " << (checks.bound_failures == 0 ? "pass" : "FAIL")
      << ", probes " << (checks.probe_failures == 0 ? "pass" : "FAIL")
      << ", chain " << (checks.chain_failures == 0 ? "pass" : "FAIL")
      << (checks.condition_flagged ? ", condition-(ii) flagged" : "") << "\n";
  out << "  trace: " << trace_path << "\n  summary: " << summary_path << "\n";
  if (result->termination == Termination::Error) {
    err << "error: " << result->message << "\n";
  }
  return code;
}

int cmd_verify(const std::string& trace_path, std::ostream& out,
               std::ostream& err) {
  const std::string path = resolve_output_path(trace_path);
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot open '" << path << "'\n";
    return kExitError;
  }
  std::vector<TraceRecord> trace;
  try {
    trace = parse_trace_csv(in);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (trace.empty()) {
    err << "error: trace has no data rows\n";
    return kExitError;
  }

  long bound_bad = -1;
  long finite_bad = -1;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    const double fields[] = {r.res_split,   r.res_yz,  r.bound_yz,
                             r.ratio_cond2, r.dist_x0, r.sigma_n,
                             r.alpha_n,     r.dist_p ? *r.dist_p : 0.0};
    for (double f : fields) {
      if (!std::isfinite(f) || f < 0.0) {
        if (finite_bad < 0) finite_bad = static_cast<long>(i);
      }
    }
    worst_excess = std::max(worst_excess, r.res_yz - r.bound_yz);
    if (r.res_yz > r.bound_yz + kCheckSlack && bound_bad < 0) {
      bound_bad = static_cast<long>(i);
    }
  }

  out << "rows: " << trace.size() << "\n";
  out << "correction bound res_yz <= bound_yz + 1e-10: "
      << (bound_bad < 0 ? "pass" : "FAIL") << " (max excess "
      << format_double(worst_excess) << ")\n";
  if (bound_bad >= 0) {
    out << "  first violation at data row " << bound_bad << " (n = "
        << trace[static_cast<std::size_t>(bound_bad)].n << ")\n";
  }
  out << "finite nonnegative fields: " << (finite_bad < 0 ? "pass" : "FAIL");
  if (finite_bad >= 0) out << " (first bad data row " << finite_bad << ")";
  out << "\n";
  if (trace.size() >= 2) {
    const ConditionReport rep = condition_report(trace);
    out << "sigma: last " << format_double(rep.last_sigma) << ", window "
        << rep.window << " delta " << format_double(rep.sigma_delta) << "\n";
    out << "gap ratio: last " << format_double(rep.last_ratio) << ", delta "
        << format_double(rep.ratio_delta)
        << (rep.ratio_flagged ? " [flagged: not decreasing]" : "") << "\n";
  }
  if (bound_bad >= 0 || finite_bad >= 0) return kExitCheckFailed;
  return kExitOk;
}

int cmd_make_problem(const std::string& ref, const std::string& out_path,
                     std::ostream& out, std::ostream& err) {
  try {
    const BenchmarkProblem problem = resolve_problem(ref);
    const std::string path = resolve_output_path(out_path);
    save_problem(problem, path);
    out << "wrote " << path << " (" << problem.name << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace smvi
