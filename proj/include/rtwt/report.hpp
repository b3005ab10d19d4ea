#pragma once

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rtwt/model.hpp"
#include "rtwt/optimizer.hpp"
#include "rtwt/simulator.hpp"

namespace rtwt {

// Stable field names: mean_delay_s, jitter_s, loss_prob, percentile_s,
// percentile_q, capacity, overflow_prob.
nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const SimReport& report);
nlohmann::json to_json(const OptimalChoice& choice, const QosConstraint& constraint);

void write_table(std::ostream& out, const MetricsReport& report);
void write_table(std::ostream& out, const SimReport& report);
void write_table(std::ostream& out, const OptimalChoice& choice, const QosConstraint& constraint);

// Columns: delay_slots,delay_s,probability (zero-mass rows omitted).
void write_pmf_csv(std::ostream& out, const DelayPmf& pmf, Seconds slot_time);

// Model against simulator at one sweep point.
struct ValidationRow {
  double axis_value = 0.0;
  std::optional<MetricsReport> model;
  std::optional<SimReport> sim;
  std::string error;

  double err_percentile_abs() const;  // seconds, |model - sim|
  double err_mean_rel() const;        // |model - sim| / sim
  double err_percentile_rel() const;
};

// One simulator run (or replicate set) and one model evaluation per value.
std::vector<ValidationRow> run_validation(const TrafficSpec& traffic, const LinkSpec& link,
                                          const RtwtSpec& rtwt, int buffer, SweepAxis axis,
                                          std::vector<double> values,
                                          const EvaluateOptions& options, const SimConfig& sim,
                                          int sim_runs = 1);

// Header: axis,mean_ana,mean_sim,mean_sim_ci,jitter_ana,jitter_sim,loss_ana,
// loss_sim,pctl_ana,pctl_sim,err_pctl_abs followed by an error column. Time
// columns are in milliseconds; the axis column is in milliseconds for time
// axes and in slots for the SP axis.
void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows,
                          SweepAxis axis);

}  // namespace rtwt
