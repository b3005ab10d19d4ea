#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtwt/model.hpp"
#include "rtwt/params.hpp"

namespace rtwt {

enum class Indicator { Percentile, MeanDelay, Jitter };

struct QosConstraint {
  Indicator indicator = Indicator::Percentile;
  double quantile = kDefaultPercentile;  // used by Indicator::Percentile
  Seconds target{0.0};

  void validate() const;
  bool operator==(const QosConstraint&) const = default;
  // Value of the constrained indicator in a model report.
  Seconds measure(const MetricsReport& report) const;
};

struct SearchGrid {
  Seconds period_min{0.5e-3};
  Seconds period_max{16e-3};
  Seconds period_step{0.1e-3};
  int sp_min = 1;
  int sp_max = 5;

  void validate() const;
  bool operator==(const SearchGrid&) const = default;
  std::vector<Seconds> periods() const;
};

struct GridPoint {
  Seconds period{0.0};
  int sp_slots = 1;
};

struct OptimalChoice {
  Seconds period{0.0};
  int sp_slots = 0;
  double capacity = 0.0;
  double capacity_floor = 0.0;  // whole flows
  Seconds achieved{0.0};        // indicator value at the chosen point
  bool feasible = false;
  std::int64_t evaluated_points = 0;
  std::int64_t failed_points = 0;  // points the model could not evaluate
};

// Model output at one candidate; report is empty when the model rejected it.
struct GridEvaluation {
  GridPoint point;
  std::optional<MetricsReport> report;
};

std::vector<GridPoint> grid_points(const SearchGrid& grid);

// Evaluates every candidate (concurrently when cores are available), keeping
// the input order.
std::vector<GridEvaluation> evaluate_points(const TrafficSpec& traffic, const LinkSpec& link,
                                            int buffer, const std::vector<GridPoint>& points,
                                            double percentile_q = kDefaultPercentile);

// Deterministic reduction over evaluated candidates.
OptimalChoice select_optimal(const std::vector<GridEvaluation>& evaluated,
                             const QosConstraint& constraint);

// Exhaustive search over grid: maximise T / (N * S) subject to
// indicator <= target. Ties go to the smaller T, then the smaller N. With
// no feasible point the one closest to the target is reported.
OptimalChoice optimize(const TrafficSpec& traffic, const LinkSpec& link, int buffer,
                       const QosConstraint& constraint, const SearchGrid& grid);

// Same search over an explicit list of candidates; the result does not
// depend on their order.
OptimalChoice optimize_points(const TrafficSpec& traffic, const LinkSpec& link, int buffer,
                              const QosConstraint& constraint,
                              const std::vector<GridPoint>& points);

enum class SweepAxis { Period, SpSlots, InterArrival };

struct SweepRow {
  double axis_value = 0.0;  // seconds for Period/InterArrival, slots for SpSlots
  TrafficSpec traffic;
  RtwtSpec rtwt;
  std::optional<MetricsReport> report;
  std::string error;  // set when the model rejected this row
};

// One model evaluation per axis value, rows ordered by axis value.
std::vector<SweepRow> sweep(const TrafficSpec& traffic, const LinkSpec& link,
                            const RtwtSpec& rtwt, int buffer, SweepAxis axis,
                            std::vector<double> values, const EvaluateOptions& options = {});

// Applies one axis value to copies of the fixed parameters.
void apply_axis(SweepAxis axis, double value, TrafficSpec& traffic, RtwtSpec& rtwt);

}  // namespace rtwt
