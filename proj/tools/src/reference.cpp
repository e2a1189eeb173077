#include "rbgd_bench/reference.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace rbgd::bench {

namespace {

// Copied verbatim from the published tables.
constexpr PublishedCell kTable1[] = {
    {500, 50, Method::RSD, {"2.7674e+04", "5.1152e-05", "7566", "36.2087"}},
    {500, 50, Method::RSD_ADA, {"2.7674e+04", "4.3667e-04", "7650", "40.2719"}},
    {500, 50, Method::R_RBGD, {"2.7674e+04", "9.6010e-05", "4938", "23.5305"}},
    {500, 50, Method::P_RBGD, {"2.7674e+04", "9.9854e-05", "4864", "40.7854"}},
    {500, 50, Method::P_RBGD_C, {"2.7674e+04", "9.7726e-05", "4901", "46.7791"}},
    {1000, 50, Method::RSD, {"2.7674e+04", "2.5639e-04", "8873", "68.4400"}},
    {1000, 50, Method::RSD_ADA, {"2.7674e+04", "3.8527e-04", "8988", "70.3007"}},
    {1000, 50, Method::R_RBGD, {"2.7674e+04", "9.8616e-05", "5518", "53.8013"}},
    {1000, 50, Method::P_RBGD, {"2.7674e+04", "9.9820e-05", "5503", "74.4051"}},
    {1000, 50, Method::P_RBGD_C, {"2.7674e+04", "9.8943e-05", "5510", "80.5897"}},
    {1500, 50, Method::RSD, {"2.7674e+04", "9.1536e-04", "7108", "117.2364"}},
    {1500, 50, Method::RSD_ADA, {"2.7674e+04", "4.7544e-04", "6304", "113.7995"}},
    {1500, 50, Method::R_RBGD, {"2.7674e+04", "9.9155e-05", "5160", "102.2899"}},
    {1500, 50, Method::P_RBGD, {"2.7674e+04", "9.9829e-05", "5144", "130.3309"}},
    {1500, 50, Method::P_RBGD_C, {"2.7674e+04", "9.8907e-05", "5322", "133.2718"}},
    {2000, 50, Method::RSD, {"2.7674e+04", "2.6418e-04", "8902", "159.2698"}},
    {2000, 50, Method::RSD_ADA, {"2.7674e+04", "4.3806e-04", "9115", "196.9259"}},
    {2000, 50, Method::R_RBGD, {"2.7674e+04", "9.5463e-05", "5964", "192.0930"}},
    {2000, 50, Method::P_RBGD, {"2.7674e+04", "9.8332e-05", "5884", "171.8766"}},
    {2000, 50, Method::P_RBGD_C, {"2.7674e+04", "9.7909e-05", "6019", "177.7956"}},
    {2500, 50, Method::RSD, {"2.7674e+04", "2.3527e-04", "7840", "206.9153"}},
    {2500, 50, Method::RSD_ADA, {"2.7674e+04", "3.5709e-04", "7238", "232.8811"}},
    {2500, 50, Method::R_RBGD, {"2.7674e+04", "9.9000e-05", "5197", "204.8740"}},
    {2500, 50, Method::P_RBGD, {"2.7674e+04", "9.8332e-05", "5246", "179.6978"}},
    {2500, 50, Method::P_RBGD_C, {"2.7674e+04", "9.7069e-05", "5303", "207.1347"}},
    {3000, 50, Method::RSD, {"2.7674e+04", "2.1955e-04", "7732", "221.2304"}},
    {3000, 50, Method::RSD_ADA, {"2.7674e+04", "5.1092e-04", "6015", "204.8033"}},
    {3000, 50, Method::R_RBGD, {"2.7674e+04", "9.8652e-05", "5315", "239.3315"}},
    {3000, 50, Method::P_RBGD, {"2.7674e+04", "9.8969e-05", "5265", "213.2356"}},
    {3000, 50, Method::P_RBGD_C, {"2.7674e+04", "9.8572e-05", "5233", "226.3744"}},
};

constexpr PublishedCell kTable2[] = {
    {5000, 10, Method::RSD, {"2.8429e+02", "8.1462e-05", "249", "1.0864"}},
    {5000, 10, Method::RSD_ADA, {"2.8429e+02", "9.8615e-05", "307", "1.2623"}},
    {5000, 10, Method::R_RBGD, {"2.8429e+02", "9.3002e-05", "317", "1.3235"}},
    {5000, 10, Method::P_RBGD, {"2.8429e+02", "9.3140e-05", "315", "1.1404"}},
    {5000, 10, Method::P_RBGD_C, {"2.8429e+02", "9.5805e-05", "314", "1.3440"}},
    {5000, 20, Method::RSD, {"1.9443e+03", "9.9204e-05", "1333", "9.7795"}},
    {5000, 20, Method::RSD_ADA, {"1.9443e+03", "9.8288e-05", "1401", "10.5765"}},
    {5000, 20, Method::R_RBGD, {"1.9443e+03", "9.7837e-05", "1282", "12.6708"}},
    {5000, 20, Method::P_RBGD, {"1.9443e+03", "9.9858e-05", "1274", "11.4878"}},
    {5000, 20, Method::P_RBGD_C, {"1.9443e+03", "9.8893e-05", "1267", "12.6460"}},
    {5000, 30, Method::RSD, {"6.2293e+03", "9.9957e-05", "3328", "77.0571"}},
    {5000, 30, Method::RSD_ADA, {"6.2293e+03", "9.9447e-05", "3228", "84.4482"}},
    {5000, 30, Method::R_RBGD, {"6.2293e+03", "9.9393e-05", "1681", "43.5144"}},
    {5000, 30, Method::P_RBGD, {"6.2293e+03", "9.9030e-05", "1679", "38.0242"}},
    {5000, 30, Method::P_RBGD_C, {"6.2293e+03", "9.9961e-05", "1665", "40.7001"}},
    {5000, 40, Method::RSD, {"1.4389e+04", "9.5968e-05", "5728", "171.1722"}},
    {5000, 40, Method::RSD_ADA, {"1.4389e+04", "3.1914e-04", "3872", "126.8553"}},
    {5000, 40, Method::R_RBGD, {"1.4389e+04", "9.8178e-05", "5367", "241.8630"}},
    {5000, 40, Method::P_RBGD, {"1.4389e+04", "9.6651e-05", "5356", "218.3186"}},
    {5000, 40, Method::P_RBGD_C, {"1.4389e+04", "9.8343e-05", "5339", "223.8977"}},
    {5000, 50, Method::RSD, {"2.7674e+04", "2.7698e-04", "8007", "277.4160"}},
    {5000, 50, Method::RSD_ADA, {"2.7674e+04", "4.3422e-04", "7477", "300.1134"}},
    {5000, 50, Method::R_RBGD, {"2.7674e+04", "9.9805e-05", "5326", "328.1556"}},
    {5000, 50, Method::P_RBGD, {"2.7674e+04", "9.9563e-05", "5228", "303.5396"}},
    {5000, 50, Method::P_RBGD_C, {"2.7674e+04", "9.7795e-05", "5423", "337.2280"}},
    {5000, 60, Method::RSD, {"4.7334e+04", "1.3049e-03", "10090", "392.3834"}},
    {5000, 60, Method::RSD_ADA, {"4.7334e+04", "6.6243e-04", "10260", "415.5020"}},
    {5000, 60, Method::R_RBGD, {"4.7334e+04", "9.9850e-05", "5128", "353.4060"}},
    {5000, 60, Method::P_RBGD, {"4.7334e+04", "9.9838e-05", "5267", "382.2308"}},
    {5000, 60, Method::P_RBGD_C, {"4.7334e+04", "9.8905e-05", "5300", "411.1444"}},
};

}  // namespace

std::span<const PublishedCell> table1() { return kTable1; }
std::span<const PublishedCell> table2() { return kTable2; }

std::optional<Experiment> experiment_from_string(std::string_view name) {
  if (name == "table1") return Experiment::Table1;
  if (name == "table2") return Experiment::Table2;
  if (name == "fig-sensing" || name == "fig_sensing") return Experiment::FigSensing;
  return std::nullopt;
}

const char* to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Table1: return "table1";
    case Experiment::Table2: return "table2";
    case Experiment::FigSensing: return "fig-sensing";
  }
  return "?";
}

std::vector<GridCell> grid(Experiment experiment, Scale scale) {
  switch (experiment) {
    case Experiment::Table1:
      if (scale == Scale::Desk) return {{500, 50}};
      return {{500, 50}, {1000, 50}, {1500, 50}, {2000, 50}, {2500, 50}, {3000, 50}};
    case Experiment::Table2:
      if (scale == Scale::Desk) return {{5000, 10}};
      return {{5000, 10}, {5000, 20}, {5000, 30}, {5000, 40}, {5000, 50}, {5000, 60}};
    case Experiment::FigSensing: {
      if (scale == Scale::Desk) return {{500, 10}};
      std::vector<GridCell> cells;
      for (Index m : {500, 1000, 2000, 4000}) {
        for (Index r : {10, 20, 40}) cells.push_back({m, r});
      }
      return cells;
    }
  }
  return {};
}

std::optional<PublishedRow> lookup(Experiment experiment, Index m, Index p, Method method) {
  std::span<const PublishedCell> rows;
  if (experiment == Experiment::Table1) rows = table1();
  if (experiment == Experiment::Table2) rows = table2();
  for (const PublishedCell& c : rows) {
    if (c.m == m && c.p == p && c.method == method) return c.row;
  }
  return std::nullopt;
}

double parse_reference(std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("bad reference value " + std::string(value));
  }
  return out;
}

}  // namespace rbgd::bench
