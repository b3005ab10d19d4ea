#include "rtwt/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace rtwt {

namespace {

std::vector<double> range(double first, double last, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((last - first) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    out.push_back(first + static_cast<double>(i) * step);
  }
  return out;
}

ExperimentTable validation_table(std::string name, const RunConfig& base, const LinkSpec& link,
                                 const RtwtSpec& rtwt, SweepAxis axis,
                                 std::vector<double> values) {
  EvaluateOptions options = base.evaluate_options();
  options.allow_discretization_error = true;
  const auto rows = run_validation(base.traffic, link, rtwt, base.buffer, axis, std::move(values),
                                   options, base.sim, base.sim_runs);
  std::ostringstream os;
  write_validation_csv(os, rows, axis);
  return {std::move(name), os.str()};
}

}  // namespace

const std::vector<std::string_view>& experiment_names() {
  static const std::vector<std::string_view> names{"fig2", "fig3", "fig4", "fig5"};
  return names;
}

std::vector<CapacityRow> capacity_curve(const TrafficSpec& traffic, const LinkSpec& link,
                                        int buffer, Indicator indicator, double quantile,
                                        const std::vector<Seconds>& targets,
                                        const SearchGrid& grid) {
  const auto evaluated = evaluate_points(traffic, link, buffer, grid_points(grid), quantile);
  std::vector<CapacityRow> rows;
  for (const Seconds target : targets) {
    QosConstraint q;
    q.indicator = indicator;
    q.quantile = quantile;
    q.target = target;
    rows.push_back(CapacityRow{target, select_optimal(evaluated, q)});
  }
  return rows;
}

void write_capacity_csv(std::ostream& out, const std::vector<CapacityRow>& rows) {
  out << "target_ms,T_star_ms,N_star,capacity,capacity_floor,feasible,achieved_ms\n";
  char buf[256];
  for (const auto& row : rows) {
    const auto& c = row.choice;
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%d,%.6f,%.0f,%d,%.6f\n", row.target.count() * 1e3,
                  c.period.count() * 1e3, c.sp_slots, c.capacity, c.capacity_floor,
                  c.feasible ? 1 : 0, c.achieved.count() * 1e3);
    out << buf;
  }
}

std::vector<ExperimentTable> run_experiment(std::string_view name, const RunConfig& base,
                                            const ExperimentOptions& options) {
  std::vector<ExperimentTable> out;
  if (name == "fig2") {
    for (int R : {1, 3}) {
      LinkSpec link = base.link;
      link.retry_limit = R;
      RtwtSpec rtwt = base.rtwt;
      rtwt.sp_slots = 3;
      out.push_back(validation_table("fig2_R" + std::to_string(R), base, link, rtwt,
                                     SweepAxis::Period,
                                     range(1e-3, 16e-3, options.period_step.count())));
    }
  } else if (name == "fig3") {
    for (int R : {1, 3}) {
      LinkSpec link = base.link;
      link.retry_limit = R;
      RtwtSpec rtwt = base.rtwt;
      rtwt.period = Seconds(10e-3);
      out.push_back(validation_table("fig3_R" + std::to_string(R), base, link, rtwt,
                                     SweepAxis::SpSlots, range(1, 10, 1)));
    }
  } else if (name == "fig4") {
    for (int N : {3, 5}) {
      LinkSpec link = base.link;
      link.retry_limit = 3;
      RtwtSpec rtwt = base.rtwt;
      rtwt.period = Seconds(10e-3);
      rtwt.sp_slots = N;
      out.push_back(validation_table("fig4_N" + std::to_string(N), base, link, rtwt,
                                     SweepAxis::InterArrival, range(5e-3, 16e-3, 1e-3)));
    }
  } else if (name == "fig5") {
    LinkSpec link = base.link;
    link.retry_limit = 3;
    std::vector<Seconds> targets;
    for (int t = 1; t <= 30; ++t) {
      targets.emplace_back(t * 1e-3);
    }
    const auto evaluated =
        evaluate_points(base.traffic, link, base.buffer, grid_points(base.grid), base.qos.quantile);
    for (Indicator ind : {Indicator::Percentile, Indicator::MeanDelay, Indicator::Jitter}) {
      std::vector<CapacityRow> rows;
      for (const Seconds target : targets) {
        QosConstraint q;
        q.indicator = ind;
        q.quantile = base.qos.quantile;
        q.target = target;
        rows.push_back(CapacityRow{target, select_optimal(evaluated, q)});
      }
      std::ostringstream os;
      write_capacity_csv(os, rows);
      out.push_back({"fig5_" + std::string(to_string(ind)), os.str()});
    }
  } else {
    throw ConfigError("unknown experiment '" + std::string(name) +
                      "' (expected fig2, fig3, fig4 or fig5)");
  }
  return out;
}

}  // namespace rtwt
