#include <cmath>
#include <sstream>

#include "rtwt/model.hpp"

namespace rtwt {

int vacation_slots_before_service(int queue_position, int sp_slots, int vacation_slots) {
  if (queue_position < 1) {
    throw InvalidParameter("queue position must be >= 1");
  }
  if (sp_slots < 1 || vacation_slots < 0) {
    throw InvalidParameter("invalid slot layout");
  }
  const int full_sps = queue_position / sp_slots;
  if (queue_position % sp_slots != 0) {
    return full_sps * vacation_slots;
  }
  return (full_sps - 1) * vacation_slots;
}

int batch_delay(int k, int slot, int batch_size, const SlottedConfig& slotted,
                SpillPenalty penalty) {
  const int N = slotted.sp_slots;
  const int M = slotted.vacation_slots;
  if (k < 0 || batch_size < 1 || k + batch_size > slotted.buffer || slot < 0 ||
      slot >= slotted.cycle_len()) {
    std::ostringstream os;
    os << "batch_delay: state (k=" << k << ", n=" << slot << ", r=" << batch_size
       << ") outside the chain";
    throw InvalidParameter(os.str());
  }

  const int queued = k + batch_size;
  if (!slotted.in_service_period(slot)) {
    return (N + M - slot) + queued + vacation_slots_before_service(queued, N, M);
  }

  // Arrival inside the SP: part of the queue drains before the vacation.
  const int left_over = queued - std::min(N - slot, queued);
  if (left_over == 0) {
    return queued;
  }
  const int spill = penalty == SpillPenalty::WholeVacation ? M : 1;
  return queued + spill + vacation_slots_before_service(left_over, N, M);
}

int delay_support_cap(const SlottedConfig& slotted, int retry_limit) {
  const int N = slotted.sp_slots;
  const int M = slotted.vacation_slots;
  const int KR = slotted.buffer + retry_limit;
  // ceil((K + R) * (1 + M / N)) + N + M
  return KR + (KR * M + N - 1) / N + N + M;
}

double DelayPmf::total() const {
  double s = 0.0;
  for (double m : mass) {
    s += m;
  }
  return s;
}

double DelayPmf::mean_slots() const {
  double s = 0.0;
  for (std::size_t d = 0; d < mass.size(); ++d) {
    s += static_cast<double>(d) * mass[d];
  }
  return s;
}

double DelayPmf::variance_slots() const {
  const double mean = mean_slots();
  double s = 0.0;
  for (std::size_t d = 0; d < mass.size(); ++d) {
    const double dev = static_cast<double>(d) - mean;
    s += dev * dev * mass[d];
  }
  return s;
}

int DelayPmf::quantile_slots(double q) const {
  if (!(q > 0.0 && q <= 1.0)) {
    throw InvalidParameter("percentile level must lie in (0, 1]");
  }
  // Absorbs rounding in the running sum; far below any meaningful mass.
  constexpr double kSlack = 1e-12;
  double cdf = 0.0;
  int last = 0;
  for (std::size_t d = 0; d < mass.size(); ++d) {
    if (mass[d] <= 0.0) {
      continue;
    }
    cdf += mass[d];
    last = static_cast<int>(d);
    if (cdf >= q - kSlack) {
      return last;
    }
  }
  return last;
}

DelayPmf delay_pmf(const StationaryDistribution& stat, const BatchDistribution& batches,
                   const SlottedConfig& slotted, SpillPenalty penalty) {
  const int K = slotted.buffer;
  const int L = slotted.cycle_len();
  const int R = batches.retry_limit();
  if (stat.queue_states() != K + 1 || stat.cycle_len() != L) {
    throw InvalidParameter("delay_pmf: stationary distribution does not match the slot layout");
  }
  if (!(batches.b > 0.0)) {
    throw ModelError("delay_pmf: no arrivals, so no packet is ever delivered");
  }

  const int cap = delay_support_cap(slotted, R);
  DelayPmf pmf;
  pmf.mass.assign(static_cast<std::size_t>(cap) + 1, 0.0);

  // Cells whose batch overflows the buffer are left out of both the mass and
  // the normaliser, so the result is conditioned on delivery.
  double z = 0.0;
  for (int n = 0; n < L; ++n) {
    for (int k = 0; k <= K; ++k) {
      const double pkn = stat(k, n);
      if (pkn == 0.0) {
        continue;
      }
      for (int r = 1; r <= R && k + r <= K; ++r) {
        const double w = pkn * batches.b_success[r];
        if (w == 0.0) {
          continue;
        }
        const int d = batch_delay(k, n, r, slotted, penalty);
        if (d < 1 || d > cap) {
          throw ModelError("delay_pmf: batch delay outside the analytic support");
        }
        pmf.mass[static_cast<std::size_t>(d)] += w;
        z += w;
      }
    }
  }
  if (!(z > 0.0)) {
    throw ModelError("delay_pmf: every successful batch is dropped; no deliveries");
  }
  for (double& m : pmf.mass) {
    m /= z;
  }
  return pmf;
}

double overflow_probability(const StationaryDistribution& stat, const BatchDistribution& batches,
                            const SlottedConfig& slotted) {
  if (!(batches.b > 0.0)) {
    return 0.0;
  }
  const int K = slotted.buffer;
  const int R = batches.retry_limit();
  double dropped = 0.0;
  for (int n = 0; n < slotted.cycle_len(); ++n) {
    for (int k = 0; k <= K; ++k) {
      for (int r = std::max(1, K - k + 1); r <= R; ++r) {
        dropped += stat(k, n) * batches.b_hat[r];
      }
    }
  }
  return dropped / batches.b;
}

MetricsReport metrics(const DelayPmf& pmf, const LinkSpec& link, const TrafficSpec& traffic,
                      const RtwtSpec& rtwt, double percentile_q, double overflow) {
  const double S = traffic.slot_time.count();
  MetricsReport out;
  out.mean_delay = Seconds(S * pmf.mean_slots());
  out.jitter = Seconds(S * std::sqrt(std::max(0.0, pmf.variance_slots())));
  out.loss_probability = packet_loss_probability(link);
  out.percentile_q = percentile_q;
  out.percentile = Seconds(S * pmf.quantile_slots(percentile_q));
  out.overflow_probability = overflow;
  out.capacity = system_capacity(rtwt, traffic);
  return out;
}

Evaluation evaluate(const TrafficSpec& traffic, const LinkSpec& link, const RtwtSpec& rtwt,
                    int buffer, const EvaluateOptions& options) {
  link.validate();
  Evaluation out;
  out.slotted = slotify(traffic, rtwt, buffer, {options.allow_discretization_error});
  out.batches = batch_distribution(traffic, link);
  const ChainModel chain = build_chain(out.slotted, out.batches);
  const StationaryDistribution stat = stationary(chain, options.solver);
  out.pmf = delay_pmf(stat, out.batches, out.slotted, options.penalty);
  out.report = metrics(out.pmf, link, traffic, rtwt, options.percentile_q,
                       overflow_probability(stat, out.batches, out.slotted));
  return out;
}

}  // namespace rtwt
