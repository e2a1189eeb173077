#include "rbgd_bench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <rbgd/errors.hpp>

#include "rbgd_bench/toml_subset.hpp"

namespace rbgd::bench {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a table");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": '" + key + "' is missing or has the wrong type");
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

/// Integers are accepted where floats are expected.
double get_number(const json& obj, const std::string& key, double fallback,
                  const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

ReferenceKind parse_reference(const std::string& name, const std::string& where) {
  if (name == "quartic") return ReferenceKind::Quartic;
  if (name == "quadratic") return ReferenceKind::Quadratic;
  throw ConfigError(where + ": h must be \"quartic\" or \"quadratic\", got \"" + name + "\"");
}

ProblemSpec parse_problem(const json& obj) {
  const std::string where = "problem";
  if (!obj.is_object()) throw ConfigError("missing [problem] table");
  const auto kind = get<std::string>(obj, "kind", where);
  ProblemSpec spec;
  if (kind == "nepv") {
    check_keys(obj, {"kind", "m", "p", "beta"}, where);
    spec.kind = ProblemKind::Nepv;
    spec.m = get<Index>(obj, "m", where);
    spec.p = get<Index>(obj, "p", where);
    spec.beta = get_number(obj, "beta", 10.0, where);
    spec.manifold = ManifoldKind::Stiefel;
  } else if (kind == "sensing") {
    check_keys(obj, {"kind", "m", "r", "N", "manifold"}, where);
    spec.kind = ProblemKind::Sensing;
    spec.m = get<Index>(obj, "m", where);
    spec.p = get<Index>(obj, "r", where);
    spec.N = get_or<Index>(obj, "N", 100, where);
    const auto manifold = get_or<std::string>(obj, "manifold", "fixed_rank", where);
    if (manifold == "fixed_rank") {
      spec.manifold = ManifoldKind::FixedRank;
    } else if (manifold == "sphere") {
      spec.manifold = ManifoldKind::Sphere;
    } else {
      throw ConfigError(where + ": manifold must be \"fixed_rank\" or \"sphere\"");
    }
  } else {
    throw ConfigError(where + ": kind must be \"nepv\" or \"sensing\", got \"" + kind + "\"");
  }
  return spec;
}

MethodSpec parse_method(const json& obj, ProblemKind kind, std::size_t index) {
  const std::string where = "methods[" + std::to_string(index) + "]";
  check_keys(obj,
             {"method", "label", "h", "gamma", "rho", "alpha0", "tau", "max_iters", "grad_tol",
              "max_shrinks", "noise_tol", "linesearch", "batch_size", "fixed_alpha"},
             where);
  const auto name = get<std::string>(obj, "method", where);
  const auto method = method_from_string(name);
  if (!method) throw ConfigError(where + ": unknown method \"" + name + "\"");
  MethodSpec spec;
  spec.solver = default_solver(kind, *method);
  spec.label = get_or<std::string>(obj, "label", to_string(*method), where);
  spec.h = parse_reference(get_or<std::string>(obj, "h", "quartic", where), where);
  SolverConfig& s = spec.solver;
  s.gamma = get_number(obj, "gamma", s.gamma, where);
  s.rho = get_number(obj, "rho", s.rho, where);
  s.alpha0 = get_number(obj, "alpha0", s.alpha0, where);
  s.tau = get_number(obj, "tau", s.tau, where);
  s.max_iters = get_or<int>(obj, "max_iters", s.max_iters, where);
  s.grad_tol = get_number(obj, "grad_tol", s.grad_tol, where);
  s.max_shrinks = get_or<int>(obj, "max_shrinks", s.max_shrinks, where);
  s.noise_tol = get_number(obj, "noise_tol", s.noise_tol, where);
  s.linesearch = get_or<bool>(obj, "linesearch", s.linesearch, where);
  s.batch_size = get_or<Index>(obj, "batch_size", s.batch_size, where);
  s.fixed_alpha = get_number(obj, "fixed_alpha", s.fixed_alpha, where);
  return spec;
}

}  // namespace

SolverConfig default_solver(ProblemKind kind, Method method) {
  SolverConfig s;
  s.method = method;
  s.rho = 0.5;
  s.grad_tol = 1e-4;
  if (kind == ProblemKind::Nepv) {
    s.gamma = 1.0;
    s.alpha0 = 0.5;
  } else {
    s.gamma = 100.0;
    s.alpha0 = 0.1;
  }
  s.batch_size = 10;
  s.fixed_alpha = 0.1;
  return s;
}

ExperimentConfig config_from_json(const json& doc) {
  check_keys(doc, {"problem", "methods", "seeds", "output_dir", "jobs", "record_timing"}, "config");
  ExperimentConfig config;
  if (!doc.contains("problem")) throw ConfigError("config: missing [problem] table");
  config.problem = parse_problem(doc.at("problem"));
  if (!doc.contains("methods") || !doc.at("methods").is_array()) {
    throw ConfigError("config: missing [[methods]] entries");
  }
  std::size_t index = 0;
  for (const auto& m : doc.at("methods")) {
    config.methods.push_back(parse_method(m, config.problem.kind, index++));
  }
  config.seeds = get<std::vector<std::uint64_t>>(doc, "seeds", "config");
  config.output_dir = get_or<std::string>(doc, "output_dir", "rbgd-out", "config");
  config.jobs = get_or<int>(doc, "jobs", 0, "config");
  config.record_timing = get_or<bool>(doc, "record_timing", true, "config");
  validate(config);
  return config;
}

ExperimentConfig parse_config(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  json doc;
  if (first != std::string_view::npos && text[first] == '{') {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
  } else {
    try {
      doc = parse_toml_subset(text);
    } catch (const TomlError& e) {
      throw ConfigError(std::string("TOML parse error: ") + e.what());
    }
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate(const ExperimentConfig& config) {
  const ProblemSpec& p = config.problem;
  if (p.m < 1 || p.p < 1 || p.p > p.m) throw ConfigError("problem: need m >= p >= 1");
  if (p.kind == ProblemKind::Nepv && !(p.beta >= 0.0)) {
    throw ConfigError("problem: beta must be non-negative");
  }
  if (p.kind == ProblemKind::Sensing && p.N < 1) throw ConfigError("problem: N must be >= 1");
  if (config.methods.empty()) throw ConfigError("config: at least one method is required");
  if (config.seeds.empty()) throw ConfigError("config: at least one seed is required");
  if (config.jobs < 0) throw ConfigError("config: jobs must be >= 0");

  std::set<std::string> labels;
  for (const MethodSpec& m : config.methods) {
    if (!labels.insert(m.label).second) {
      throw ConfigError("config: duplicate method label \"" + m.label + "\"");
    }
    try {
      rbgd::validate(m.solver);
    } catch (const Error& e) {
      throw ConfigError(m.label + ": " + e.what());
    }
    if (is_stochastic(m.solver.method)) {
      if (p.kind != ProblemKind::Sensing) {
        throw ConfigError(m.label + ": stochastic methods need a finite-sum problem (sensing)");
      }
      if (p.manifold == ManifoldKind::FixedRank) {
        throw ConfigError(m.label +
                          ": stochastic methods require a compact manifold; the fixed-rank "
                          "manifold is not compact (use manifold = \"sphere\")");
      }
    }
  }
}

nlohmann::json to_json(const ExperimentConfig& config) {
  json problem;
  problem["kind"] = to_string(config.problem.kind);
  problem["m"] = config.problem.m;
  if (config.problem.kind == ProblemKind::Nepv) {
    problem["p"] = config.problem.p;
    problem["beta"] = config.problem.beta;
  } else {
    problem["r"] = config.problem.p;
    problem["N"] = config.problem.N;
    problem["manifold"] =
        config.problem.manifold == ManifoldKind::Sphere ? "sphere" : "fixed_rank";
  }
  json methods = json::array();
  for (const MethodSpec& m : config.methods) {
    const SolverConfig& s = m.solver;
    json j;
    j["method"] = to_string(s.method);
    j["label"] = m.label;
    j["h"] = to_string(m.h);
    j["gamma"] = s.gamma;
    j["rho"] = s.rho;
    j["alpha0"] = s.alpha0;
    j["tau"] = s.tau;
    j["max_iters"] = s.max_iters;
    j["grad_tol"] = s.grad_tol;
    j["max_shrinks"] = s.max_shrinks;
    j["noise_tol"] = s.noise_tol;
    j["linesearch"] = s.linesearch;
    if (is_stochastic(s.method)) {
      j["batch_size"] = s.batch_size;
      j["fixed_alpha"] = s.fixed_alpha;
    }
    methods.push_back(j);
  }
  json doc;
  doc["problem"] = problem;
  doc["methods"] = methods;
  doc["seeds"] = config.seeds;
  doc["output_dir"] = config.output_dir.string();
  doc["jobs"] = config.jobs;
  doc["record_timing"] = config.record_timing;
  return doc;
}

}  // namespace rbgd::bench
