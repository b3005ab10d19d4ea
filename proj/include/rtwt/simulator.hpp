#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rtwt/params.hpp"

namespace rtwt {

class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::int64_t warmup_packets = 10'000;
  // Successful deliveries to collect. Arrivals keep joining the measurement
  // window until this many have been delivered; if the link can never deliver
  // (p_err == 1) the window instead closes after this many arrivals.
  std::int64_t measured_packets = 1'000'000;
  Seconds max_sim_time{1e7};
  double percentile_q = 0.999;
  bool keep_samples = false;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

// Point estimate with a 95% confidence half-width (0 when unavailable).
struct Estimate {
  double value = 0.0;
  double ci95 = 0.0;
};

struct SimReport {
  std::int64_t offered = 0;
  std::int64_t delivered = 0;
  std::int64_t lost_retry = 0;
  std::int64_t lost_overflow = 0;
  double loss_ratio = 0.0;     // lost_retry / (delivered + lost_retry)
  double loss_std_error = 0.0; // binomial standard error of loss_ratio
  Estimate mean_delay;         // seconds
  Estimate jitter;             // seconds
  Estimate percentile;         // seconds
  double percentile_q = 0.999;
  int runs = 1;
  double sim_time = 0.0;       // simulated seconds (summed over runs)
  std::vector<double> delay_samples;
};

enum class TraceKind {
  Arrival,
  AttemptStart,
  AttemptOk,
  AttemptFail,
  DropRetry,
  DropOverflow,
  SpStart,
  SpEnd,
};

std::string_view to_string(TraceKind kind);

struct TraceEvent {
  double time = 0.0;
  TraceKind kind = TraceKind::Arrival;
  int queue_len = 0;  // after the event took effect
};

using TraceSink = std::function<void(const TraceEvent&)>;

// Writes "time_s,event,queue_len" rows (header first) to the stream.
TraceSink csv_trace_writer(std::ostream& out);

SimReport simulate(const TrafficSpec& traffic, const LinkSpec& link, const RtwtSpec& rtwt,
                   int buffer, const SimConfig& sim, const TraceSink& trace = {});

// Independent runs with seeds sim.seed, sim.seed + 1, ... aggregated in seed
// order. Runs may execute concurrently; the result does not depend on it.
SimReport replicate(const TrafficSpec& traffic, const LinkSpec& link, const RtwtSpec& rtwt,
                    int buffer, const SimConfig& sim, int n_runs, bool concurrent = true);

}  // namespace rtwt
