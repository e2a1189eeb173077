#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <rbgd/problems.hpp>
#include <rbgd/solvers.hpp>

namespace rbgd::bench {

/// One published row, kept as the exact printed strings.
struct PublishedRow {
  std::string_view fval;
  std::string_view grad;
  std::string_view iter;
  std::string_view time;
};

struct PublishedCell {
  Index m;
  Index p;
  Method method;
  PublishedRow row;
};

/// NEPv, p = 50, m in {500, ..., 3000}.
std::span<const PublishedCell> table1();
/// NEPv, m = 5000, p in {10, ..., 60}.
std::span<const PublishedCell> table2();

enum class Experiment { Table1, Table2, FigSensing };
enum class Scale { Desk, Paper };

std::optional<Experiment> experiment_from_string(std::string_view name);
const char* to_string(Experiment experiment);

struct GridCell {
  Index m;
  Index p;  ///< p (nepv) or r (sensing)
};

std::vector<GridCell> grid(Experiment experiment, Scale scale);

/// Row for (m, p, method) in the experiment's table, if published.
std::optional<PublishedRow> lookup(Experiment experiment, Index m, Index p, Method method);

double parse_reference(std::string_view value);

}  // namespace rbgd::bench
