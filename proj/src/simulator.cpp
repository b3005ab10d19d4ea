#include "rtwt/simulator.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <thread>

namespace rtwt {

namespace {

// Stream identifiers mixed into the user seed; one engine per random source
// so that arrivals and attempt outcomes never shift each other.
constexpr std::uint64_t kArrivalStream = 0x61727269'76616c73ULL;
constexpr std::uint64_t kOutcomeStream = 0x6f757463'6f6d6573ULL;
constexpr int kConfidenceBatches = 20;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 output is fixed by the standard; the conversions below avoid
// the library distributions, whose algorithms are implementation-defined.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(seed ^ stream)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
  std::mt19937_64 engine_;
};

double t_quantile_975(int dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, 0.975);
}

double sample_mean(const std::vector<double>& v, std::size_t first, std::size_t last) {
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    s += v[i];
  }
  return s / static_cast<double>(last - first);
}

double sample_stddev(const std::vector<double>& v, std::size_t first, std::size_t last) {
  const std::size_t n = last - first;
  if (n < 2) {
    return 0.0;
  }
  const double m = sample_mean(v, first, last);
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    s += (v[i] - m) * (v[i] - m);
  }
  return std::sqrt(s / static_cast<double>(n - 1));
}

// Smallest sample x with empirical CDF(x) >= q.
double sample_quantile(const std::vector<double>& v, std::size_t first, std::size_t last,
                       double q) {
  std::vector<double> tmp(v.begin() + static_cast<std::ptrdiff_t>(first),
                          v.begin() + static_cast<std::ptrdiff_t>(last));
  const auto n = static_cast<double>(tmp.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, tmp.size()) - 1;
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(rank), tmp.end());
  return tmp[rank];
}

Estimate across(const std::vector<double>& values) {
  Estimate e;
  e.value = sample_mean(values, 0, values.size());
  if (values.size() >= 2) {
    const auto n = static_cast<int>(values.size());
    e.ci95 = t_quantile_975(n - 1) * sample_stddev(values, 0, values.size()) / std::sqrt(n);
  }
  return e;
}

// Fills the delay statistics; confidence intervals come from contiguous
// batches of the sample sequence.
void summarise_delays(const std::vector<double>& delays, double q, SimReport& out) {
  if (delays.empty()) {
    return;
  }
  const std::size_t n = delays.size();
  out.mean_delay.value = sample_mean(delays, 0, n);
  out.jitter.value = sample_stddev(delays, 0, n);
  out.percentile.value = sample_quantile(delays, 0, n, q);

  if (n < static_cast<std::size_t>(kConfidenceBatches) * 50) {
    return;
  }
  std::vector<double> means, stds, pctls;
  const std::size_t batch = n / kConfidenceBatches;
  for (int i = 0; i < kConfidenceBatches; ++i) {
    const std::size_t first = static_cast<std::size_t>(i) * batch;
    const std::size_t last = first + batch;
    means.push_back(sample_mean(delays, first, last));
    stds.push_back(sample_stddev(delays, first, last));
    pctls.push_back(sample_quantile(delays, first, last, q));
  }
  out.mean_delay.ci95 = across(means).ci95;
  out.jitter.ci95 = across(stds).ci95;
  out.percentile.ci95 = across(pctls).ci95;
}

void finish_loss(SimReport& r) {
  const std::int64_t resolved = r.delivered + r.lost_retry;
  if (resolved > 0) {
    r.loss_ratio = static_cast<double>(r.lost_retry) / static_cast<double>(resolved);
    r.loss_std_error = std::sqrt(r.loss_ratio * (1.0 - r.loss_ratio) / static_cast<double>(resolved));
  }
}

class Simulation {
public:
  Simulation(const TrafficSpec& traffic, const LinkSpec& link, const RtwtSpec& rtwt, int buffer,
             const SimConfig& sim, const TraceSink& trace)
      : traffic_(traffic),
        link_(link),
        rtwt_(rtwt),
        buffer_(buffer),
        sim_(sim),
        trace_(trace),
        arrivals_(sim.seed, kArrivalStream),
        outcomes_(sim.seed, kOutcomeStream),
        slot_(traffic.slot_time.count()),
        sp_len_(rtwt.sp_slots * traffic.slot_time.count()),
        eps_(1e-6 * traffic.slot_time.count()) {}

  SimReport run();

private:
  enum class Kind : std::uint8_t { SpStart, SpEnd, AttemptEnd, Arrival };

  struct Event {
    double time;
    std::uint64_t seq;
    Kind kind;
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  struct Packet {
    double arrival;
    int attempts;
    bool measured;
  };

  void schedule(double time, Kind kind) { events_.push(Event{time, next_seq_++, kind}); }
  void emit(TraceKind kind) {
    if (trace_) {
      trace_(TraceEvent{now_, kind, static_cast<int>(queue_.size())});
    }
  }

  void on_arrival();
  void on_attempt_end();
  void on_sp_start();
  void try_start();
  bool done() const { return !window_open_ && outstanding_ == 0; }

  TrafficSpec traffic_;
  LinkSpec link_;
  RtwtSpec rtwt_;
  int buffer_;
  SimConfig sim_;
  const TraceSink& trace_;
  RandomStream arrivals_;
  RandomStream outcomes_;
  double slot_;
  double sp_len_;
  double eps_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
  std::deque<Packet> queue_;
  bool busy_ = false;
  bool in_sp_ = false;
  double sp_end_ = 0.0;
  std::int64_t sp_index_ = 0;
  std::int64_t arrival_index_ = 0;
  bool window_open_ = true;
  std::int64_t outstanding_ = 0;
  std::vector<double> delays_;
  SimReport report_;
};

void Simulation::try_start() {
  if (busy_ || !in_sp_ || queue_.empty() || now_ + slot_ > sp_end_ + eps_) {
    return;
  }
  busy_ = true;
  ++queue_.front().attempts;
  schedule(now_ + slot_, Kind::AttemptEnd);
  emit(TraceKind::AttemptStart);
}

void Simulation::on_arrival() {
  const bool measured = window_open_ && arrival_index_ >= sim_.warmup_packets;
  ++arrival_index_;
  if (measured) {
    ++report_.offered;
  }
  if (static_cast<int>(queue_.size()) >= buffer_) {
    if (measured) {
      ++report_.lost_overflow;
    }
    emit(TraceKind::DropOverflow);
  } else {
    queue_.push_back(Packet{now_, 0, measured});
    if (measured) {
      ++outstanding_;
    }
    emit(TraceKind::Arrival);
    try_start();
  }
  if (link_.p_err >= 1.0 && report_.offered >= sim_.measured_packets) {
    window_open_ = false;
  }
  // Later arrivals cannot delay earlier packets (FIFO), so generation stops
  // once the window has closed.
  if (window_open_) {
    schedule(now_ + arrivals_.exponential(traffic_.lambda), Kind::Arrival);
  }
}

void Simulation::on_attempt_end() {
  busy_ = false;
  Packet& head = queue_.front();
  const bool ok = outcomes_.uniform() >= link_.p_err;
  if (ok) {
    if (head.measured) {
      ++report_.delivered;
      --outstanding_;
      delays_.push_back(now_ - head.arrival);
      if (report_.delivered >= sim_.measured_packets) {
        window_open_ = false;
      }
    }
    queue_.pop_front();
    emit(TraceKind::AttemptOk);
  } else if (head.attempts >= link_.retry_limit) {
    if (head.measured) {
      ++report_.lost_retry;
      --outstanding_;
    }
    queue_.pop_front();
    emit(TraceKind::AttemptFail);
    emit(TraceKind::DropRetry);
  } else {
    emit(TraceKind::AttemptFail);
  }
  try_start();
}

void Simulation::on_sp_start() {
  in_sp_ = true;
  // Absolute SP times avoid accumulating rounding over millions of periods.
  const double start = rtwt_.offset.count() + static_cast<double>(sp_index_) * rtwt_.period.count();
  sp_end_ = start + sp_len_;
  ++sp_index_;
  schedule(sp_end_, Kind::SpEnd);
  schedule(rtwt_.offset.count() + static_cast<double>(sp_index_) * rtwt_.period.count(),
           Kind::SpStart);
  emit(TraceKind::SpStart);
  try_start();
}

SimReport Simulation::run() {
  report_.percentile_q = sim_.percentile_q;
  if (traffic_.lambda <= 0.0) {
    return report_;
  }
  delays_.reserve(static_cast<std::size_t>(std::min<std::int64_t>(sim_.measured_packets, 1 << 24)));
  schedule(rtwt_.offset.count(), Kind::SpStart);
  schedule(arrivals_.exponential(traffic_.lambda), Kind::Arrival);

  const double horizon = sim_.max_sim_time.count();
  while (!done()) {
    const Event ev = events_.top();
    events_.pop();
    if (ev.time > horizon) {
      std::ostringstream os;
      os << "simulation reached max_sim_time (" << horizon << " s) after " << report_.delivered
         << " of " << sim_.measured_packets << " measured deliveries";
      throw SimulationError(os.str());
    }
    now_ = ev.time;
    switch (ev.kind) {
      case Kind::Arrival:
        on_arrival();
        break;
      case Kind::AttemptEnd:
        on_attempt_end();
        break;
      case Kind::SpStart:
        on_sp_start();
        break;
      case Kind::SpEnd:
        in_sp_ = false;
        emit(TraceKind::SpEnd);
        break;
    }
  }

  report_.sim_time = now_;
  finish_loss(report_);
  summarise_delays(delays_, sim_.percentile_q, report_);
  if (sim_.keep_samples) {
    report_.delay_samples = std::move(delays_);
  }
  return report_;
}

}  // namespace

void SimConfig::validate() const {
  if (measured_packets < 1) {
    throw InvalidParameter("sim: measured_packets must be >= 1");
  }
  if (warmup_packets < 0) {
    throw InvalidParameter("sim: warmup_packets must be >= 0");
  }
  if (!(max_sim_time.count() > 0.0)) {
    throw InvalidParameter("sim: max_sim_time must be > 0");
  }
  if (!(percentile_q > 0.0 && percentile_q < 1.0)) {
    throw InvalidParameter("sim: percentile level must lie in (0, 1)");
  }
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Arrival: return "arrival";
    case TraceKind::AttemptStart: return "attempt_start";
    case TraceKind::AttemptOk: return "attempt_ok";
    case TraceKind::AttemptFail: return "attempt_fail";
    case TraceKind::DropRetry: return "drop_retry";
    case TraceKind::DropOverflow: return "drop_overflow";
    case TraceKind::SpStart: return "sp_start";
    case TraceKind::SpEnd: return "sp_end";
  }
  return "unknown";
}

TraceSink csv_trace_writer(std::ostream& out) {
  out << "time_s,event,queue_len\n";
  return [&out](const TraceEvent& e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", e.time);
    out << buf << ',' << to_string(e.kind) << ',' << e.queue_len << '\n';
  };
}

SimReport simulate(const TrafficSpec& traffic, const LinkSpec& link, const RtwtSpec& rtwt,
                   int buffer, const SimConfig& sim, const TraceSink& trace) {
  traffic.validate();
  link.validate();
  rtwt.validate_against(traffic);
  sim.validate();
  if (buffer < 1) {
    throw InvalidParameter("buffer capacity must be >= 1");
  }
  Simulation s(traffic, link, rtwt, buffer, sim, trace);
  return s.run();
}

SimReport replicate(const TrafficSpec& traffic, const LinkSpec& link, const RtwtSpec& rtwt,
                    int buffer, const SimConfig& sim, int n_runs, bool concurrent) {
  if (n_runs < 1) {
    throw InvalidParameter("replicate: n_runs must be >= 1");
  }
  auto one = [&](int i) {
    SimConfig c = sim;
    c.seed = sim.seed + static_cast<std::uint64_t>(i);
    return simulate(traffic, link, rtwt, buffer, c);
  };
  if (n_runs == 1) {
    return one(0);
  }

  std::vector<SimReport> runs(static_cast<std::size_t>(n_runs));
  const unsigned workers = concurrent ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  if (workers > 1) {
    for (int first = 0; first < n_runs; first += static_cast<int>(workers)) {
      const int last = std::min(n_runs, first + static_cast<int>(workers));
      std::vector<std::future<SimReport>> pending;
      for (int i = first; i < last; ++i) {
        pending.push_back(std::async(std::launch::async, one, i));
      }
      for (int i = first; i < last; ++i) {
        runs[static_cast<std::size_t>(i)] = pending[static_cast<std::size_t>(i - first)].get();
      }
    }
  } else {
    for (int i = 0; i < n_runs; ++i) {
      runs[static_cast<std::size_t>(i)] = one(i);
    }
  }

  SimReport out;
  out.runs = n_runs;
  out.percentile_q = sim.percentile_q;
  std::vector<double> means, jitters, pctls;
  for (auto& r : runs) {
    out.offered += r.offered;
    out.delivered += r.delivered;
    out.lost_retry += r.lost_retry;
    out.lost_overflow += r.lost_overflow;
    out.sim_time += r.sim_time;
    if (r.delivered > 0) {
      means.push_back(r.mean_delay.value);
      jitters.push_back(r.jitter.value);
      pctls.push_back(r.percentile.value);
    }
    out.delay_samples.insert(out.delay_samples.end(), r.delay_samples.begin(),
                             r.delay_samples.end());
  }
  finish_loss(out);
  if (!means.empty()) {
    out.mean_delay = across(means);
    out.jitter = across(jitters);
    out.percentile = across(pctls);
  }
  return out;
}

}  // namespace rtwt
