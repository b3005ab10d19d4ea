#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rtwt/config.hpp"
#include "rtwt/optimizer.hpp"
#include "rtwt/report.hpp"

namespace rtwt {

// Figure data regeneration. Every experiment starts from a base RunConfig
// (traffic, error probability, buffer, simulator settings, grid) and
// overrides the parameters the figure varies:
//   fig2  period 1..16 ms, N = 3, R in {1, 3}        -> fig2_R1.csv, fig2_R3.csv
//   fig3  N = 1..10, T = 10 ms, R in {1, 3}          -> fig3_R1.csv, fig3_R3.csv
//   fig4  1/lambda = 5..16 ms, T = 10 ms, R = 3,
//         N in {3, 5}                                -> fig4_N3.csv, fig4_N5.csv
//   fig5  optimal (T, N) for targets 1..30 ms, R = 3,
//         one table per indicator                    -> fig5_<indicator>.csv
struct ExperimentOptions {
  Seconds period_step{1e-3};  // fig2 x-axis step
};

struct ExperimentTable {
  std::string name;  // file stem
  std::string csv;
};

const std::vector<std::string_view>& experiment_names();

// Throws ConfigError for an unknown experiment name.
std::vector<ExperimentTable> run_experiment(std::string_view name, const RunConfig& base,
                                            const ExperimentOptions& options = {});

struct CapacityRow {
  Seconds target{0.0};
  OptimalChoice choice;
};

// Optimal choice for each target; the grid is evaluated once and reduced
// per target.
std::vector<CapacityRow> capacity_curve(const TrafficSpec& traffic, const LinkSpec& link,
                                        int buffer, Indicator indicator, double quantile,
                                        const std::vector<Seconds>& targets,
                                        const SearchGrid& grid);

// Header: target_ms,T_star_ms,N_star,capacity,capacity_floor,feasible,achieved_ms
void write_capacity_csv(std::ostream& out, const std::vector<CapacityRow>& rows);

}  // namespace rtwt
