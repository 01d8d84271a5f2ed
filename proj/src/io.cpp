#include "smvi/io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "smvi/errors.hpp"

namespace smvi {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json point_to_json(const Point& p) { return vec_to_json(p.coords()); }

Eigen::VectorXd vec_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw DomainError(std::string(what) + ": expected array");
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) {
      throw DomainError(std::string(what) + ": expected numeric entries");
    }
    v[i++] = e.get<double>();
  }
  return v;
}

Point point_from_json(const json& j, const char* what) {
  return Point(vec_from_json(j, what));
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw DomainError(std::string(what) + ": expected nonempty array of rows");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index i = 0;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DomainError(std::string(what) + ": ragged matrix rows");
    }
    Eigen::Index k = 0;
    for (const auto& e : row) {
      if (!e.is_number()) {
        throw DomainError(std::string(what) + ": expected numeric entries");
      }
      m(i, k++) = e.get<double>();
    }
    ++i;
  }
  return m;
}

std::string kind_of(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw DomainError(std::string(what) + ": expected object with a kind");
  }
  return j["kind"].get<std::string>();
}

json set_to_json(const ConvexSet& set);

json set_variant_to_json(const WholeSpace& s) {
  return json{{"kind", "whole_space"}, {"dim", s.dim}};
}
json set_variant_to_json(const Box& s) {
  return json{{"kind", "box"},
              {"lower", point_to_json(s.lower)},
              {"upper", point_to_json(s.upper)}};
}
json set_variant_to_json(const Ball& s) {
  return json{{"kind", "ball"},
              {"center", point_to_json(s.center)},
              {"radius", s.radius}};
}
json set_variant_to_json(const HalfSpace& s) {
  return json{{"kind", "half_space"},
              {"normal", point_to_json(s.normal())},
              {"offset", s.offset()}};
}
json set_variant_to_json(const Intersection& s) {
  json members = json::array();
  for (const auto& m : s.members) members.push_back(set_to_json(m));
  return json{{"kind", "intersection"}, {"members", std::move(members)}};
}

json set_to_json(const ConvexSet& set) {
  return std::visit([](const auto& s) { return set_variant_to_json(s); },
                    set.variant());
}

ConvexSet set_from_json(const json& j) {
  const std::string kind = kind_of(j, "set");
  if (kind == "whole_space") {
    return ConvexSet::whole_space(j.at("dim").get<Eigen::Index>());
  }
  if (kind == "box") {
    return ConvexSet::box(point_from_json(j.at("lower"), "box lower"),
                          point_from_json(j.at("upper"), "box upper"));
  }
  if (kind == "ball") {
    return ConvexSet::ball(point_from_json(j.at("center"), "ball center"),
                           j.at("radius").get<double>());
  }
  if (kind == "half_space") {
    return ConvexSet::half_space(
        point_from_json(j.at("normal"), "half-space normal"),
        j.at("offset").get<double>());
  }
  if (kind == "intersection") {
    std::vector<ConvexSet> members;
    for (const auto& m : j.at("members")) members.push_back(set_from_json(m));
    return ConvexSet::intersection(std::move(members));
  }
  throw DomainError("set: unknown kind '" + kind + "'");
}

json resolvent_to_json(const Resolvent& r) {
  return std::visit(
      [&](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Resolvent::NormalCone>) {
          return json{{"kind", "normal_cone"},
                      {"set", set_to_json(v.set)},
                      {"lambda", r.lambda()}};
        } else if constexpr (std::is_same_v<T, Resolvent::SoftThreshold>) {
          return json{{"kind", "l1"},
                      {"weight", v.weight},
                      {"dim", v.dim},
                      {"lambda", r.lambda()}};
        } else if constexpr (std::is_same_v<T, Resolvent::AffineMonotone>) {
          return json{{"kind", "affine_monotone"},
                      {"B", mat_to_json(v.B)},
                      {"c", vec_to_json(v.c)},
                      {"lambda", r.lambda()}};
        } else {
          return json{{"kind", "zero"}, {"dim", v.dim}, {"lambda", r.lambda()}};
        }
      },
      r.variant());
}

Resolvent resolvent_from_json(const json& j) {
  const std::string kind = kind_of(j, "resolvent");
  const double lambda = j.at("lambda").get<double>();
  if (kind == "normal_cone") {
    return Resolvent::normal_cone(set_from_json(j.at("set")), lambda);
  }
  if (kind == "l1") {
    return Resolvent::l1(j.at("weight").get<double>(),
                         j.at("dim").get<Eigen::Index>(), lambda);
  }
  if (kind == "affine_monotone") {
    return Resolvent::affine_monotone(
        mat_from_json(j.at("B"), "resolvent B"),
        Point(vec_from_json(j.at("c"), "resolvent c")), lambda);
  }
  if (kind == "zero") {
    return Resolvent::zero(j.at("dim").get<Eigen::Index>(), lambda);
  }
  throw DomainError("resolvent: unknown kind '" + kind + "'");
}

json ism_to_json(const IsmMap& f) {
  return std::visit(
      [&](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IsmMap::Zero>) {
          return json{{"kind", "zero"}, {"dim", v.dim}, {"theta", f.theta()}};
        } else {
          return json{{"kind", "affine_gradient"},
                      {"P", mat_to_json(v.P)},
                      {"q", vec_to_json(v.q)},
                      {"theta", f.theta()}};
        }
      },
      f.variant());
}

IsmMap ism_from_json(const json& j) {
  const std::string kind = kind_of(j, "ism map");
  if (kind == "zero") {
    return IsmMap::zero(j.at("dim").get<Eigen::Index>(),
                        j.at("theta").get<double>());
  }
  if (kind == "affine_gradient") {
    return IsmMap::affine_gradient(
        mat_from_json(j.at("P"), "ism P"),
        Point(vec_from_json(j.at("q"), "ism q")), j.at("theta").get<double>());
  }
  throw DomainError("ism map: unknown kind '" + kind + "'");
}

json nonexpansive_to_json(const NonexpansiveMap& t) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NonexpansiveMap::Identity>) {
          return json{{"kind", "identity"}, {"dim", v.dim}};
        } else if constexpr (std::is_same_v<T, NonexpansiveMap::Negation>) {
          return json{{"kind", "negation"}, {"dim", v.dim}};
        } else if constexpr (std::is_same_v<T, NonexpansiveMap::Reflection>) {
          return json{{"kind", "reflection"}, {"set", set_to_json(v.set)}};
        } else if constexpr (std::is_same_v<T, NonexpansiveMap::Average>) {
          return json{{"kind", "average"},
                      {"alpha", v.alpha},
                      {"inner", nonexpansive_to_json(*v.inner)}};
        } else if constexpr (std::is_same_v<T, NonexpansiveMap::ProjectionMap>) {
          return json{{"kind", "projection"}, {"set", set_to_json(v.set)}};
        } else {
          return json{{"kind", "affine"},
                      {"R", mat_to_json(v.R)},
                      {"s", vec_to_json(v.s)}};
        }
      },
      t.variant());
}

NonexpansiveMap nonexpansive_from_json(const json& j) {
  const std::string kind = kind_of(j, "nonexpansive map");
  if (kind == "identity") {
    return NonexpansiveMap::identity(j.at("dim").get<Eigen::Index>());
  }
  if (kind == "negation") {
    return NonexpansiveMap::negation(j.at("dim").get<Eigen::Index>());
  }
  if (kind == "reflection") {
    return NonexpansiveMap::reflection(set_from_json(j.at("set")));
  }
  if (kind == "average") {
    return NonexpansiveMap::average(j.at("alpha").get<double>(),
                                    nonexpansive_from_json(j.at("inner")));
  }
  if (kind == "projection") {
    return NonexpansiveMap::projection(set_from_json(j.at("set")));
  }
  if (kind == "affine") {
    return NonexpansiveMap::affine_contraction(
        mat_from_json(j.at("R"), "map R"),
        Point(vec_from_json(j.at("s"), "map s")));
  }
  throw DomainError("nonexpansive map: unknown kind '" + kind + "'");
}

json config_to_json(const SolverConfig& cfg) {
  json weights = json::array();
  for (const auto& s : cfg.lambda_schedules) weights.push_back(s.describe());
  return json{{"gamma", cfg.gamma},
              {"lambda", cfg.lambda},
              {"alpha", cfg.alpha_schedule.describe()},
              {"sigma", cfg.sigma_schedule.describe()},
              {"weights", std::move(weights)},
              {"max_iter", cfg.max_iter},
              {"stop_tol", cfg.stop_tol},
              {"dykstra_max_iter", cfg.dykstra.max_iter},
              {"dykstra_tol", cfg.dykstra.tol}};
}

SolverConfig config_from_json(const json& j) {
  SolverConfig cfg = SolverConfig::defaults();
  cfg.gamma = j.at("gamma").get<double>();
  cfg.lambda = j.at("lambda").get<double>();
  cfg.alpha_schedule = Schedule::parse(j.at("alpha").get<std::string>());
  cfg.sigma_schedule = Schedule::parse(j.at("sigma").get<std::string>());
  cfg.lambda_schedules.clear();
  for (const auto& w : j.at("weights")) {
    cfg.lambda_schedules.push_back(Schedule::parse(w.get<std::string>()));
  }
  cfg.max_iter = j.at("max_iter").get<long>();
  cfg.stop_tol = j.at("stop_tol").get<double>();
  cfg.dykstra.max_iter = j.at("dykstra_max_iter").get<int>();
  cfg.dykstra.tol = j.at("dykstra_tol").get<double>();
  return cfg;
}

json gamma_set_to_json(const GammaSet& g) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GammaSet::Singleton>) {
          return json{{"kind", "singleton"}};
        } else if constexpr (std::is_same_v<T, GammaSet::BoxSet>) {
          return json{{"kind", "box"},
                      {"lower", point_to_json(v.lower)},
                      {"upper", point_to_json(v.upper)}};
        } else {
          throw DomainError(
              "analytic gamma sets carry code and are not serializable");
        }
      },
      g.variant());
}

GammaSet gamma_set_from_json(const json& j) {
  const std::string kind = kind_of(j, "gamma set");
  if (kind == "singleton") return GammaSet::singleton();
  if (kind == "box") {
    return GammaSet::box(point_from_json(j.at("lower"), "gamma lower"),
                         point_from_json(j.at("upper"), "gamma upper"));
  }
  throw DomainError("gamma set: unknown kind '" + kind + "'");
}

}  // namespace

std::string problem_to_json(const BenchmarkProblem& problem) {
  json family = json::array();
  for (const auto& t : problem.spec.family) {
    family.push_back(nonexpansive_to_json(t));
  }
  json j{{"name", problem.name},
         {"dim1", problem.spec.dim1},
         {"dim2", problem.spec.dim2},
         {"C", set_to_json(problem.spec.C)},
         {"Q", set_to_json(problem.spec.Q)},
         {"A", mat_to_json(problem.spec.A.matrix())},
         {"M1", resolvent_to_json(problem.spec.M1_resolvent)},
         {"M2", resolvent_to_json(problem.spec.M2_resolvent)},
         {"f", ism_to_json(problem.spec.f)},
         {"g", ism_to_json(problem.spec.g)},
         {"theta1", problem.spec.theta1},
         {"theta2", problem.spec.theta2},
         {"S", nonexpansive_to_json(problem.spec.S)},
         {"family", std::move(family)},
         {"planted", point_to_json(problem.planted)},
         {"gamma_set", gamma_set_to_json(problem.gamma_set)},
         {"config", config_to_json(problem.recommended_config)},
         {"x0", point_to_json(problem.x0)}};
  return j.dump(2) + "\n";
}

BenchmarkProblem problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("problem file: ") + e.what());
  }
  try {
    std::vector<NonexpansiveMap> family;
    for (const auto& t : j.at("family")) {
      family.push_back(nonexpansive_from_json(t));
    }
    ProblemSpec spec{j.at("dim1").get<Eigen::Index>(),
                     j.at("dim2").get<Eigen::Index>(),
                     set_from_json(j.at("C")),
                     set_from_json(j.at("Q")),
                     LinearMap(mat_from_json(j.at("A"), "A")),
                     resolvent_from_json(j.at("M1")),
                     resolvent_from_json(j.at("M2")),
                     ism_from_json(j.at("f")),
                     ism_from_json(j.at("g")),
                     j.at("theta1").get<double>(),
                     j.at("theta2").get<double>(),
                     nonexpansive_from_json(j.at("S")),
                     std::move(family)};
    return BenchmarkProblem{j.at("name").get<std::string>(),
                            std::move(spec),
                            point_from_json(j.at("planted"), "planted"),
                            gamma_set_from_json(j.at("gamma_set")),
                            config_from_json(j.at("config")),
                            point_from_json(j.at("x0"), "x0")};
  } catch (const json::exception& e) {
    throw DomainError(std::string("problem file: ") + e.what());
  }
}

void save_problem(const BenchmarkProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open '" + path + "' for writing");
  out << problem_to_json(problem);
  if (!out) throw DomainError("write to '" + path + "' failed");
}

BenchmarkProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return problem_from_json(buf.str());
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double_strict(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DomainError("config: bad number '" + s + "' for key '" + key + "'");
  }
  if (pos != s.size()) {
    throw DomainError("config: trailing characters in '" + s + "' for key '" +
                      key + "'");
  }
  return v;
}

long parse_long_strict(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw DomainError("config: bad integer '" + s + "' for key '" + key + "'");
  }
  if (pos != s.size()) {
    throw DomainError("config: trailing characters in '" + s + "' for key '" +
                      key + "'");
  }
  return v;
}

}  // namespace

SolverConfig parse_config(const std::string& text, SolverConfig base) {
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config line " << lineno << ": expected 'key = value'";
      throw DomainError(os.str());
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "gamma") {
      base.gamma = parse_double_strict(value, key);
    } else if (key == "lambda") {
      base.lambda = parse_double_strict(value, key);
    } else if (key == "alpha") {
      base.alpha_schedule = Schedule::parse(value);
    } else if (key == "sigma") {
      base.sigma_schedule = Schedule::parse(value);
    } else if (key == "weights") {
      std::vector<Schedule> weights;
      std::string item;
      std::istringstream items(value);
      while (std::getline(items, item, ',')) {
        const std::string w = trim(item);
        if (!w.empty()) weights.push_back(Schedule::parse(w));
      }
      base.lambda_schedules = std::move(weights);
    } else if (key == "max_iter") {
      base.max_iter = parse_long_strict(value, key);
    } else if (key == "stop_tol") {
      base.stop_tol = parse_double_strict(value, key);
    } else if (key == "dykstra_max_iter") {
      base.dykstra.max_iter = static_cast<int>(parse_long_strict(value, key));
    } else if (key == "dykstra_tol") {
      base.dykstra.tol = parse_double_strict(value, key);
    } else {
      std::ostringstream os;
      os << "config line " << lineno << ": unknown key '" << key << "'";
      throw DomainError(os.str());
    }
  }
  return base;
}

std::string write_config(const SolverConfig& cfg) {
  std::ostringstream os;
  os << "gamma = " << format_double(cfg.gamma) << "\n";
  os << "lambda = " << format_double(cfg.lambda) << "\n";
  os << "alpha = " << cfg.alpha_schedule.describe() << "\n";
  os << "sigma = " << cfg.sigma_schedule.describe() << "\n";
  os << "weights = ";
  for (std::size_t i = 0; i < cfg.lambda_schedules.size(); ++i) {
    if (i) os << ",";
    os << cfg.lambda_schedules[i].describe();
  }
  os << "\n";
  os << "max_iter = " << cfg.max_iter << "\n";
  os << "stop_tol = " << format_double(cfg.stop_tol) << "\n";
  os << "dykstra_max_iter = " << cfg.dykstra.max_iter << "\n";
  os << "dykstra_tol = " << format_double(cfg.dykstra.tol) << "\n";
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  out << kTraceHeader << "\n";
  for (const TraceRecord& r : trace) {
    out << r.n << ',' << format_double(r.res_split) << ','
        << format_double(r.res_yz) << ',' << format_double(r.bound_yz) << ','
        << format_double(r.ratio_cond2) << ',' << format_double(r.dist_x0)
        << ',' << (r.dist_p ? format_double(*r.dist_p) : std::string())
        << ',' << format_double(r.sigma_n) << ',' << format_double(r.alpha_n)
        << '\n';
  }
}

std::vector<TraceRecord> parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("trace: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) {
    throw DomainError("trace: bad header '" + line + "'");
  }
  std::vector<TraceRecord> out;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 9) {
      std::ostringstream os;
      os << "trace line " << lineno << ": expected 9 fields, got "
         << fields.size();
      throw DomainError(os.str());
    }
    TraceRecord r;
    std::ostringstream keybuf;
    keybuf << "trace line " << lineno;
    const std::string where = keybuf.str();
    r.n = parse_long_strict(fields[0], where);
    r.res_split = parse_double_strict(fields[1], where);
    r.res_yz = parse_double_strict(fields[2], where);
    r.bound_yz = parse_double_strict(fields[3], where);
    r.ratio_cond2 = parse_double_strict(fields[4], where);
    r.dist_x0 = parse_double_strict(fields[5], where);
    if (!fields[6].empty()) {
      r.dist_p = parse_double_strict(fields[6], where);
    }
    r.sigma_n = parse_double_strict(fields[7], where);
    r.alpha_n = parse_double_strict(fields[8], where);
    out.push_back(r);
  }
  return out;
}

}  // namespace smvi
