#include "rbgd_bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <system_error>
#include <thread>
#include <utility>

#include <unistd.h>

#include <rbgd/errors.hpp>

namespace rbgd::bench {

namespace {

using json = nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

ReferenceFunction reference(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::Quadratic: return ReferenceFunction::quadratic();
    case ReferenceKind::Quartic: return ReferenceFunction::quartic();
    default: break;
  }
  throw ConfigError("only the quartic and quadratic references are available from the CLI");
}

}  // namespace

CellSetup make_cell(const ProblemSpec& spec, std::uint64_t seed) {
  CellSetup cell;
  const Rng root(seed);
  if (spec.kind == ProblemKind::Nepv) {
    cell.problem = std::make_unique<NepvProblem>(spec.m, spec.p, spec.beta);
    cell.manifold = std::make_unique<Stiefel>(spec.m, spec.p);
  } else {
    Rng data = root.fork(1);
    cell.problem = std::make_unique<SensingProblem>(generate_sensing(spec.m, spec.p, spec.N, data));
    if (spec.manifold == ManifoldKind::Sphere) {
      cell.manifold = std::make_unique<Sphere>(spec.m, spec.p);
    } else {
      cell.manifold = std::make_unique<FixedRank>(spec.m, spec.p, spec.p);
    }
  }
  Rng start = root.fork(2);
  cell.x0 = cell.manifold->random_point(start);
  return cell;
}

CellResult run_cell(const ExperimentConfig& config, std::size_t method_index, std::uint64_t seed) {
  const MethodSpec& method = config.methods.at(method_index);
  CellResult result;
  result.method_index = method_index;
  result.label = method.label;
  result.seed = seed;
  try {
    const CellSetup cell = make_cell(config.problem, seed);
    result.initial_objective = cell.problem->objective(cell.x0->ambient());
    SolverConfig solver = method.solver;
    solver.seed = seed;
    solver.record_timing = config.record_timing;
    result.report = run(*cell.problem, *cell.manifold, reference(method.h), *cell.x0, solver);
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

int worker_count(int requested, std::size_t cells) {
  int n = requested;
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min<int>(n, static_cast<int>(std::max<std::size_t>(cells, 1))));
}

ComparisonReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::vector<std::pair<std::size_t, std::uint64_t>> jobs;
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    for (std::uint64_t seed : config.seeds) jobs.emplace_back(i, seed);
  }

  std::map<std::pair<std::size_t, std::uint64_t>, CellResult> merged;
  std::mutex merge_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      CellResult r = run_cell(config, jobs[k].first, jobs[k].second);
      const std::lock_guard lock(merge_mutex);
      merged.emplace(jobs[k], std::move(r));
    }
  };
  const int n = worker_count(config.jobs, jobs.size());
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  ComparisonReport report;
  report.config = config;
  for (auto& [key, cell] : merged) report.cells.push_back(std::move(cell));
  return report;
}

bool ComparisonReport::all_converged() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.converged(); });
}

std::vector<TableRow> ComparisonReport::table() const {
  std::vector<TableRow> rows;
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    TableRow row;
    row.label = config.methods[i].label;
    int with_report = 0;
    int with_grad = 0;
    double grad_sum = 0.0;
    for (const CellResult& c : cells) {
      if (c.method_index != i) continue;
      c.converged() ? ++row.converged : ++row.failed;
      if (!c.report) continue;
      ++with_report;
      const IterationRecord& last = c.report->last();
      row.fval += last.objective();
      row.iterations += c.report->iterations();
      row.seconds += static_cast<double>(c.report->total_wall_ns) * 1e-9;
      if (last.grad_norm) {
        grad_sum += *last.grad_norm;
        ++with_grad;
      }
    }
    if (with_report > 0) {
      row.fval /= with_report;
      row.iterations /= with_report;
      row.seconds /= with_report;
    }
    if (with_grad > 0) row.grad_norm = grad_sum / with_grad;
    rows.push_back(row);
  }
  return rows;
}

std::string iteration_csv(const RunReport& report) {
  std::string out = "t,F,grad_norm,v_norm,alpha,ls_trials,wall_ns\n";
  for (const IterationRecord& r : report.records) {
    out += std::to_string(r.t);
    out += ',';
    out += format_double(r.objective());
    out += ',';
    if (r.grad_norm) out += format_double(*r.grad_norm);
    out += ',';
    out += format_double(r.direction_norm);
    out += ',';
    out += format_double(r.alpha);
    out += ',';
    out += std::to_string(r.linesearch_trials);
    out += ',';
    out += std::to_string(r.wall_ns);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const ComparisonReport& report) {
  json cells = json::array();
  for (const CellResult& c : report.cells) {
    json j;
    j["label"] = c.label;
    j["method"] = to_string(report.config.methods[c.method_index].solver.method);
    j["seed"] = c.seed;
    j["initial_F"] = c.initial_objective;
    j["csv"] = c.csv_path.filename().string();
    if (!c.report) {
      j["status"] = "Failed";
      j["message"] = c.error;
      j["final_F"] = nullptr;
      j["final_grad_norm"] = nullptr;
      j["iterations"] = nullptr;
      j["wall_time_s"] = nullptr;
    } else {
      const RunReport& r = *c.report;
      j["status"] = to_string(r.status);
      j["message"] = r.message;
      j["final_F"] = r.last().objective();
      j["final_grad_norm"] = r.last().grad_norm ? json(*r.last().grad_norm) : json(nullptr);
      j["final_v_norm"] = r.last().direction_norm;
      j["iterations"] = r.iterations();
      j["wall_time_s"] = static_cast<double>(r.total_wall_ns) * 1e-9;
      j["final_feasibility"] = r.final_feasibility;
      j["final_checksum"] = r.final_checksum;
      j["manifold"] = r.manifold;
      j["h"] = to_string(r.h);
    }
    cells.push_back(j);
  }
  json table = json::array();
  for (const TableRow& row : report.table()) {
    json j;
    j["label"] = row.label;
    j["Fval"] = row.fval;
    j["grad"] = row.grad_norm ? json(*row.grad_norm) : json(nullptr);
    j["Iter"] = row.iterations;
    j["Time"] = row.seconds;
    j["converged_cells"] = row.converged;
    j["failed_cells"] = row.failed;
    table.push_back(j);
  }
  json doc;
  doc["schema"] = "rbgd.comparison/1";
  doc["config"] = to_json(report.config);
  doc["all_converged"] = report.all_converged();
  doc["cells"] = cells;
  doc["table"] = table;
  return doc;
}

std::string format_table(const ComparisonReport& report) {
  std::ostringstream out;
  const ProblemSpec& p = report.config.problem;
  out << to_string(p.kind) << " m=" << p.m << (p.kind == ProblemKind::Nepv ? " p=" : " r=") << p.p
      << "  seeds=" << report.config.seeds.size() << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %-11s %-11s %9s %10s %s\n", "solver", "Fval", "||grad||",
                "Iter", "Time(s)", "cells");
  out << line;
  for (const TableRow& row : report.table()) {
    const std::string grad = row.grad_norm ? format_short(*row.grad_norm) : "-";
    std::snprintf(line, sizeof line, "%-12s %-11s %-11s %9.1f %10.3f %d/%d converged\n",
                  row.label.c_str(), format_short(row.fval).c_str(), grad.c_str(), row.iterations,
                  row.seconds, row.converged, row.converged + row.failed);
    out << line;
  }
  for (const CellResult& c : report.cells) {
    if (c.converged()) continue;
    out << "  " << c.label << " seed " << c.seed << ": "
        << (c.report ? std::string(to_string(c.report->status)) + " " + c.report->message
                     : "failed: " + c.error)
        << "\n";
  }
  return out.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string slug(std::string_view label) {
  std::string out;
  for (char c : label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? "method" : out;
}

void write_outputs(ComparisonReport& report) {
  const std::filesystem::path dir = report.config.output_dir;
  for (CellResult& c : report.cells) {
    c.csv_path = dir / (slug(c.label) + "_seed" + std::to_string(c.seed) + ".csv");
    if (c.report) write_atomic(c.csv_path, iteration_csv(*c.report));
  }
  write_atomic(dir / "report.json", to_json(report).dump(2) + "\n");
  write_atomic(dir / "report.txt", format_table(report));
}

}  // namespace rbgd::bench
