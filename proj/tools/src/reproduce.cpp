#include "rbgd_bench/reproduce.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace rbgd::bench {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<Method> methods_for(Experiment experiment) {
  if (experiment == Experiment::FigSensing) return {Method::P_RBGD, Method::RSD, Method::RSD_ADA};
  return {Method::RSD, Method::RSD_ADA, Method::R_RBGD, Method::P_RBGD, Method::P_RBGD_C};
}

std::vector<std::uint64_t> default_seeds(Experiment experiment) {
  if (experiment == Experiment::FigSensing) return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return {1, 2, 3};
}

std::string cell_name(Experiment experiment, const GridCell& cell) {
  const char* second = experiment == Experiment::FigSensing ? "_r" : "_p";
  return "m" + std::to_string(cell.m) + second + std::to_string(cell.p);
}

const CellResult* find(const ComparisonReport& report, std::size_t method, std::uint64_t seed) {
  for (const CellResult& c : report.cells) {
    if (c.method_index == method && c.seed == seed) return &c;
  }
  return nullptr;
}

}  // namespace

ExperimentConfig reproduce_config(const ReproduceOptions& options, const GridCell& cell) {
  ExperimentConfig config;
  config.problem.m = cell.m;
  config.problem.p = cell.p;
  if (options.experiment == Experiment::FigSensing) {
    config.problem.kind = ProblemKind::Sensing;
    config.problem.manifold = ManifoldKind::FixedRank;
  } else {
    config.problem.kind = ProblemKind::Nepv;
    config.problem.manifold = ManifoldKind::Stiefel;
  }
  for (Method m : methods_for(options.experiment)) {
    MethodSpec spec;
    spec.label = to_string(m);
    spec.solver = default_solver(config.problem.kind, m);
    config.methods.push_back(spec);
  }
  config.seeds = options.seeds ? *options.seeds : default_seeds(options.experiment);
  config.output_dir =
      options.output_dir / to_string(options.experiment) / cell_name(options.experiment, cell);
  config.jobs = options.jobs;
  config.record_timing = options.record_timing;
  validate(config);
  return config;
}

std::vector<Check> compare(Experiment experiment, const ComparisonReport& report) {
  std::vector<Check> checks;
  const ExperimentConfig& config = report.config;
  const std::vector<TableRow> rows = report.table();

  if (experiment != Experiment::FigSensing) {
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
      const Method method = config.methods[i].solver.method;
      const auto ref = lookup(experiment, config.problem.m, config.problem.p, method);
      if (!ref) continue;
      const TableRow& row = rows[i];
      const double fref = parse_reference(ref->fval);
      const int n = row.converged + row.failed;
      const bool have = row.converged + row.failed > 0 && row.iterations > 0;
      checks.push_back({row.label + " Fval", sci(row.fval), std::string(ref->fval) + " rel 1e-3",
                        have && std::abs(row.fval - fref) <= kFvalRelTol * std::abs(fref)});
      if (experiment == Experiment::Table2) {
        checks.push_back({row.label + " ||grad||<=1e-4",
                          std::to_string(row.converged) + "/" + std::to_string(n) + " seeds",
                          "all seeds (published " + std::string(ref->grad) + ")",
                          row.converged == n});
      } else {
        // The published RSD-Ada rows stop above the tolerance here, so
        // convergence is reported but not required.
        checks.push_back({row.label + " ||grad||<=1e-4",
                          std::to_string(row.converged) + "/" + std::to_string(n) + " seeds",
                          "published " + std::string(ref->grad), true, true});
        const double iref = parse_reference(ref->iter);
        checks.push_back({row.label + " Iter", fixed(row.iterations, 1),
                          "[" + fixed(iref / kIterBand, 0) + ", " + fixed(iref * kIterBand, 0) +
                              "] (published " + std::string(ref->iter) + ")",
                          row.iterations >= iref / kIterBand && row.iterations <= iref * kIterBand});
      }
      checks.push_back({row.label + " Time", fixed(row.seconds, 3) + " s",
                        std::string(ref->time) + " s (published hardware)", true, true});
    }
    return checks;
  }

  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    const TableRow& row = rows[i];
    const int n = row.converged + row.failed;
    checks.push_back({row.label + " ||grad||<=1e-4",
                      std::to_string(row.converged) + "/" + std::to_string(n) + " seeds",
                      "all seeds", row.converged == n});
    int decreased = 0;
    for (std::uint64_t seed : config.seeds) {
      const CellResult* c = find(report, i, seed);
      if (c && c->report &&
          c->report->last().objective() <= kSensingDecrease * c->initial_objective) {
        ++decreased;
      }
    }
    checks.push_back({row.label + " f<=1e-6 f(x0)",
                      std::to_string(decreased) + "/" + std::to_string(n) + " seeds", "all seeds",
                      decreased == n});
  }
  std::optional<std::size_t> prbgd;
  std::optional<std::size_t> rsd;
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    if (config.methods[i].solver.method == Method::P_RBGD) prbgd = i;
    if (config.methods[i].solver.method == Method::RSD) rsd = i;
  }
  if (prbgd && rsd) {
    int wins = 0;
    for (std::uint64_t seed : config.seeds) {
      const CellResult* a = find(report, *prbgd, seed);
      const CellResult* b = find(report, *rsd, seed);
      if (a && b && a->converged() && b->converged() &&
          a->report->iterations() <= b->report->iterations()) {
        ++wins;
      }
    }
    const auto n = config.seeds.size();
    const int need = static_cast<int>(std::ceil(kSensingOrderShare * static_cast<double>(n)));
    checks.push_back({"Iter(P-RBGD) <= Iter(RSD)",
                      std::to_string(wins) + "/" + std::to_string(n) + " seeds",
                      ">= " + std::to_string(need) + " seeds", wins >= need});
  }
  return checks;
}

int reproduce(const ReproduceOptions& options, std::ostream& out) {
  bool ok = true;
  for (const GridCell& cell : grid(options.experiment, options.scale)) {
    const ExperimentConfig config = reproduce_config(options, cell);
    ComparisonReport report = run_experiment(config);
    write_outputs(report);
    out << "== " << to_string(options.experiment) << " " << cell_name(options.experiment, cell)
        << " ==\n"
        << format_table(report);
    char line[256];
    for (const Check& c : compare(options.experiment, report)) {
      const char* verdict = c.info ? "info" : c.pass ? "PASS" : "FAIL";
      std::snprintf(line, sizeof line, "  [%s] %-26s %-22s expected %s\n", verdict, c.what.c_str(),
                    c.observed.c_str(), c.expected.c_str());
      out << line;
      ok = ok && c.pass;
    }
    for (const CellResult& c : report.cells) {
      if (c.report) continue;
      out << "  [FAIL] " << c.label << " seed " << c.seed << ": " << c.error << "\n";
      ok = false;
    }
    out << "  outputs: " << config.output_dir.string() << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace rbgd::bench
