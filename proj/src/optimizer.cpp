#include "rtwt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <thread>

namespace rtwt {

namespace {

struct PointResult {
  GridPoint point;
  Seconds indicator{0.0};
  double capacity = 0.0;
};

template <typename Fn>
auto parallel_map(std::size_t count, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = fn(i);
    }
    return out;
  }
  std::vector<std::future<void>> pending;
  for (std::size_t w = 0; w < workers; ++w) {
    pending.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        out[i] = fn(i);
      }
    }));
  }
  for (auto& f : pending) {
    f.get();
  }
  return out;
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

bool earlier(const GridPoint& a, const GridPoint& b) {
  if (a.period.count() != b.period.count()) {
    return a.period.count() < b.period.count();
  }
  return a.sp_slots < b.sp_slots;
}

// Strict "better than" used for the reduction; a total order, so the
// winner does not depend on evaluation order.
bool better_feasible(const PointResult& a, const PointResult& b) {
  if (!nearly_equal(a.capacity, b.capacity)) {
    return a.capacity > b.capacity;
  }
  return earlier(a.point, b.point);
}

bool closer_infeasible(const PointResult& a, const PointResult& b) {
  if (a.indicator.count() != b.indicator.count()) {
    return a.indicator.count() < b.indicator.count();
  }
  return earlier(a.point, b.point);
}

}  // namespace

void QosConstraint::validate() const {
  if (!(target.count() > 0.0)) {
    throw InvalidParameter("qos: target must be > 0");
  }
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw InvalidParameter("qos: quantile must lie in (0, 1)");
  }
}

Seconds QosConstraint::measure(const MetricsReport& report) const {
  switch (indicator) {
    case Indicator::Percentile: return report.percentile;
    case Indicator::MeanDelay: return report.mean_delay;
    case Indicator::Jitter: return report.jitter;
  }
  return report.percentile;
}

void SearchGrid::validate() const {
  if (!(period_min.count() > 0.0) || !(period_step.count() > 0.0) ||
      period_max < period_min) {
    throw InvalidParameter("grid: need 0 < period_min <= period_max and period_step > 0");
  }
  if (sp_min < 1 || sp_max < sp_min) {
    throw InvalidParameter("grid: need 1 <= sp_min <= sp_max");
  }
}

std::vector<Seconds> SearchGrid::periods() const {
  validate();
  std::vector<Seconds> out;
  const double span = (period_max - period_min).count() / period_step.count();
  const auto steps = static_cast<long>(std::floor(span + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    out.emplace_back(period_min.count() + static_cast<double>(i) * period_step.count());
  }
  return out;
}

std::vector<GridPoint> grid_points(const SearchGrid& grid) {
  std::vector<GridPoint> points;
  for (const Seconds t : grid.periods()) {
    for (int n = grid.sp_min; n <= grid.sp_max; ++n) {
      points.push_back(GridPoint{t, n});
    }
  }
  return points;
}

std::vector<GridEvaluation> evaluate_points(const TrafficSpec& traffic, const LinkSpec& link,
                                            int buffer, const std::vector<GridPoint>& points,
                                            double percentile_q) {
  traffic.validate();
  link.validate();
  EvaluateOptions options;
  options.percentile_q = percentile_q;
  options.allow_discretization_error = true;

  return parallel_map(points.size(), [&](std::size_t i) {
    GridEvaluation g;
    g.point = points[i];
    RtwtSpec rtwt;
    rtwt.period = g.point.period;
    rtwt.sp_slots = g.point.sp_slots;
    try {
      g.report = evaluate(traffic, link, rtwt, buffer, options).report;
    } catch (const std::exception&) {
      g.report.reset();
    }
    return g;
  });
}

OptimalChoice select_optimal(const std::vector<GridEvaluation>& evaluated,
                             const QosConstraint& constraint) {
  constraint.validate();
  OptimalChoice out;
  out.evaluated_points = static_cast<std::int64_t>(evaluated.size());

  std::optional<PointResult> best;
  std::optional<PointResult> closest;
  for (const auto& g : evaluated) {
    if (!g.report) {
      ++out.failed_points;
      continue;
    }
    if (constraint.indicator == Indicator::Percentile &&
        g.report->percentile_q != constraint.quantile) {
      throw InvalidParameter("optimizer: grid evaluated at a different percentile level");
    }
    PointResult r{g.point, constraint.measure(*g.report), g.report->capacity};
    if (r.indicator <= constraint.target) {
      if (!best || better_feasible(r, *best)) {
        best = r;
      }
    } else if (!closest || closer_infeasible(r, *closest)) {
      closest = r;
    }
  }

  const std::optional<PointResult>& chosen = best ? best : closest;
  out.feasible = best.has_value();
  if (chosen) {
    out.period = chosen->point.period;
    out.sp_slots = chosen->point.sp_slots;
    out.capacity = chosen->capacity;
    out.capacity_floor = std::floor(chosen->capacity + 1e-9);
    out.achieved = chosen->indicator;
  }
  return out;
}

OptimalChoice optimize_points(const TrafficSpec& traffic, const LinkSpec& link, int buffer,
                              const QosConstraint& constraint,
                              const std::vector<GridPoint>& points) {
  constraint.validate();
  return select_optimal(evaluate_points(traffic, link, buffer, points, constraint.quantile),
                        constraint);
}

OptimalChoice optimize(const TrafficSpec& traffic, const LinkSpec& link, int buffer,
                       const QosConstraint& constraint, const SearchGrid& grid) {
  return optimize_points(traffic, link, buffer, constraint, grid_points(grid));
}

void apply_axis(SweepAxis axis, double value, TrafficSpec& traffic, RtwtSpec& rtwt) {
  switch (axis) {
    case SweepAxis::Period:
      rtwt.period = Seconds(value);
      break;
    case SweepAxis::SpSlots:
      if (value < 1.0 || value != std::floor(value)) {
        throw InvalidParameter("sweep: SP slot count must be a positive integer");
      }
      rtwt.sp_slots = static_cast<int>(value);
      break;
    case SweepAxis::InterArrival:
      if (!(value > 0.0)) {
        throw InvalidParameter("sweep: inter-arrival time must be > 0");
      }
      traffic.lambda = 1.0 / value;
      break;
  }
}

std::vector<SweepRow> sweep(const TrafficSpec& traffic, const LinkSpec& link,
                            const RtwtSpec& rtwt, int buffer, SweepAxis axis,
                            std::vector<double> values, const EvaluateOptions& options) {
  if (values.empty()) {
    throw InvalidParameter("sweep: no axis values");
  }
  std::sort(values.begin(), values.end());
  return parallel_map(values.size(), [&](std::size_t i) {
    SweepRow row;
    row.axis_value = values[i];
    row.traffic = traffic;
    row.rtwt = rtwt;
    try {
      apply_axis(axis, values[i], row.traffic, row.rtwt);
      row.report = evaluate(row.traffic, link, row.rtwt, buffer, options).report;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  });
}

}  // namespace rtwt
