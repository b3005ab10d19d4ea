#include "rtwt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rtwt/config.hpp"

namespace rtwt {

namespace {

using nlohmann::json;

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"ci95", e.ci95}}; }

std::string fixed(double v, int digits = 6) {
  if (!std::isfinite(v)) {
    return "";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  if (!std::isfinite(v)) {
    return "";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string ms(double seconds) { return fixed(seconds * 1e3); }

// CSV-safe single-line text.
std::string csv_text(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') {
      c = ';';
    }
  }
  return s;
}

}  // namespace

json to_json(const MetricsReport& r) {
  return {{"mean_delay_s", r.mean_delay.count()},
          {"jitter_s", r.jitter.count()},
          {"loss_prob", r.loss_probability},
          {"percentile_s", r.percentile.count()},
          {"percentile_q", r.percentile_q},
          {"capacity", r.capacity},
          {"overflow_prob", r.overflow_probability}};
}

json to_json(const SimReport& r) {
  return {{"offered", r.offered},
          {"delivered", r.delivered},
          {"lost_retry", r.lost_retry},
          {"lost_overflow", r.lost_overflow},
          {"loss_prob", r.loss_ratio},
          {"loss_std_error", r.loss_std_error},
          {"mean_delay_s", estimate_json(r.mean_delay)},
          {"jitter_s", estimate_json(r.jitter)},
          {"percentile_s", estimate_json(r.percentile)},
          {"percentile_q", r.percentile_q},
          {"runs", r.runs},
          {"sim_time_s", r.sim_time}};
}

json to_json(const OptimalChoice& c, const QosConstraint& q) {
  return {{"feasible", c.feasible},
          {"period_s", c.period.count()},
          {"sp_slots", c.sp_slots},
          {"capacity", c.capacity},
          {"capacity_floor", c.capacity_floor},
          {"indicator", std::string(to_string(q.indicator))},
          {"quantile", q.quantile},
          {"target_s", q.target.count()},
          {"achieved_s", c.achieved.count()},
          {"evaluated_points", c.evaluated_points},
          {"failed_points", c.failed_points}};
}

void write_table(std::ostream& out, const MetricsReport& r) {
  out << "mean delay      " << ms(r.mean_delay.count()) << " ms\n"
      << "jitter          " << ms(r.jitter.count()) << " ms\n"
      << "loss prob       " << sci(r.loss_probability) << "\n"
      << "percentile " << fixed(r.percentile_q * 100.0, 1) << "% " << ms(r.percentile.count())
      << " ms\n"
      << "capacity        " << fixed(r.capacity, 3) << " flows\n"
      << "overflow prob   " << sci(r.overflow_probability) << "\n";
}

void write_table(std::ostream& out, const SimReport& r) {
  auto est = [](const Estimate& e) { return ms(e.value) + " +/- " + ms(e.ci95) + " ms"; };
  out << "offered         " << r.offered << "\n"
      << "delivered       " << r.delivered << "\n"
      << "lost (retry)    " << r.lost_retry << "\n"
      << "lost (overflow) " << r.lost_overflow << "\n"
      << "loss prob       " << sci(r.loss_ratio) << " (se " << sci(r.loss_std_error) << ")\n"
      << "mean delay      " << est(r.mean_delay) << "\n"
      << "jitter          " << est(r.jitter) << "\n"
      << "percentile " << fixed(r.percentile_q * 100.0, 1) << "% " << est(r.percentile) << "\n"
      << "runs            " << r.runs << "\n";
}

void write_table(std::ostream& out, const OptimalChoice& c, const QosConstraint& q) {
  out << "constraint      " << to_string(q.indicator) << " <= " << ms(q.target.count()) << " ms\n"
      << "feasible        " << (c.feasible ? "yes" : "no") << "\n"
      << "period          " << ms(c.period.count()) << " ms\n"
      << "sp slots        " << c.sp_slots << "\n"
      << "capacity        " << fixed(c.capacity, 3) << " (" << c.capacity_floor << " whole flows)\n"
      << "achieved        " << ms(c.achieved.count()) << " ms\n"
      << "grid points     " << c.evaluated_points << " (" << c.failed_points << " not evaluable)\n";
}

void write_pmf_csv(std::ostream& out, const DelayPmf& pmf, Seconds slot_time) {
  out << "delay_slots,delay_s,probability\n";
  char buf[128];
  for (std::size_t d = 0; d < pmf.mass.size(); ++d) {
    if (pmf.mass[d] <= 0.0) {
      continue;
    }
    std::snprintf(buf, sizeof buf, "%zu,%.9e,%.17g\n", d, static_cast<double>(d) * slot_time.count(),
                  pmf.mass[d]);
    out << buf;
  }
}

double ValidationRow::err_percentile_abs() const {
  if (!model || !sim || sim->delivered == 0) {
    return std::nan("");
  }
  return std::abs(model->percentile.count() - sim->percentile.value);
}

double ValidationRow::err_mean_rel() const {
  if (!model || !sim || sim->delivered == 0) {
    return std::nan("");
  }
  return std::abs(model->mean_delay.count() - sim->mean_delay.value) / sim->mean_delay.value;
}

double ValidationRow::err_percentile_rel() const {
  if (!model || !sim || sim->delivered == 0) {
    return std::nan("");
  }
  return err_percentile_abs() / sim->percentile.value;
}

std::vector<ValidationRow> run_validation(const TrafficSpec& traffic, const LinkSpec& link,
                                          const RtwtSpec& rtwt, int buffer, SweepAxis axis,
                                          std::vector<double> values,
                                          const EvaluateOptions& options, const SimConfig& sim,
                                          int sim_runs) {
  std::sort(values.begin(), values.end());
  std::vector<ValidationRow> rows;
  for (double v : values) {
    ValidationRow row;
    row.axis_value = v;
    TrafficSpec t = traffic;
    RtwtSpec r = rtwt;
    try {
      apply_axis(axis, v, t, r);
      row.model = evaluate(t, link, r, buffer, options).report;
      row.sim = replicate(t, link, r, buffer, sim, sim_runs);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows,
                          SweepAxis axis) {
  out << "axis,mean_ana,mean_sim,mean_sim_ci,jitter_ana,jitter_sim,loss_ana,loss_sim,pctl_ana,"
         "pctl_sim,err_pctl_abs,error\n";
  for (const auto& row : rows) {
    const double nan = std::nan("");
    const bool m = row.model.has_value();
    const bool s = row.sim.has_value() && row.sim->delivered > 0;
    out << (axis == SweepAxis::SpSlots ? fixed(row.axis_value, 0) : ms(row.axis_value)) << ','
        << ms(m ? row.model->mean_delay.count() : nan) << ','
        << ms(s ? row.sim->mean_delay.value : nan) << ','
        << ms(s ? row.sim->mean_delay.ci95 : nan) << ','
        << ms(m ? row.model->jitter.count() : nan) << ','
        << ms(s ? row.sim->jitter.value : nan) << ','
        << sci(m ? row.model->loss_probability : nan) << ','
        << sci(row.sim ? row.sim->loss_ratio : nan) << ','
        << ms(m ? row.model->percentile.count() : nan) << ','
        << ms(s ? row.sim->percentile.value : nan) << ','
        << ms(row.err_percentile_abs()) << ',' << csv_text(row.error) << '\n';
  }
}

}  // namespace rtwt
