#include "rtwt/params.hpp"

#include <cmath>
#include <sstream>

namespace rtwt {

void TrafficSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("traffic: arrival rate must be finite and >= 0");
  }
  if (!(slot_time.count() > 0.0) || !std::isfinite(slot_time.count())) {
    throw InvalidParameter("traffic: packet duration must be > 0");
  }
}

void LinkSpec::validate() const {
  if (!(p_err >= 0.0 && p_err <= 1.0)) {
    throw InvalidParameter("link: error probability must lie in [0, 1]");
  }
  if (retry_limit < 1) {
    throw InvalidParameter("link: retry limit must be >= 1");
  }
}

void RtwtSpec::validate() const {
  if (!(period.count() > 0.0) || !std::isfinite(period.count())) {
    throw InvalidParameter("rtwt: period must be > 0");
  }
  if (sp_slots < 1) {
    throw InvalidParameter("rtwt: SP must hold at least one slot");
  }
  if (!(offset.count() >= 0.0)) {
    throw InvalidParameter("rtwt: offset must be >= 0");
  }
}

void RtwtSpec::validate_against(const TrafficSpec& traffic) const {
  validate();
  // Relative slack so that T == N*S computed in floating point still passes.
  const double sp = sp_slots * traffic.slot_time.count();
  if (sp > period.count() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "rtwt: SP (" << sp << " s) longer than period (" << period.count() << " s)";
    throw InvalidParameter(os.str());
  }
}

SlottedConfig slotify(const TrafficSpec& traffic, const RtwtSpec& rtwt, int buffer,
                      SlotifyOptions options) {
  traffic.validate();
  rtwt.validate();
  if (buffer < 1) {
    throw InvalidParameter("buffer capacity must be >= 1");
  }

  const double period = rtwt.period.count();
  const double ratio = period / traffic.slot_time.count();
  const long total = std::lround(ratio);
  if (total < rtwt.sp_slots) {
    std::ostringstream os;
    os << "period holds " << total << " slots, fewer than the SP (" << rtwt.sp_slots << ")";
    throw InvalidParameter(os.str());
  }

  SlottedConfig out;
  out.sp_slots = rtwt.sp_slots;
  out.vacation_slots = static_cast<int>(total - rtwt.sp_slots);
  out.buffer = buffer;
  out.discretization_error =
      std::abs(period - static_cast<double>(total) * traffic.slot_time.count()) / period;
  // Sub-ulp residue from T = (N+M)*S round trips is not a real mismatch.
  if (out.discretization_error < 1e-12) {
    out.discretization_error = 0.0;
  }
  if (out.discretization_error > kMaxDiscretizationError && !options.allow_discretization_error) {
    std::ostringstream os;
    os << "period is not close to a whole number of slots (relative error "
       << out.discretization_error * 100.0 << "% > 1%)";
    throw InvalidParameter(os.str());
  }
  return out;
}

BatchDistribution batch_distribution(const TrafficSpec& traffic, const LinkSpec& link) {
  traffic.validate();
  link.validate();

  const double load = traffic.lambda * traffic.slot_time.count();
  const int R = link.retry_limit;
  const double p = link.p_err;

  BatchDistribution d;
  d.b0 = std::exp(-load);
  d.b = -std::expm1(-load);
  d.b_success.assign(R + 1, 0.0);
  d.b_hat.assign(R + 1, 0.0);
  double p_pow = 1.0;  // p^(r-1)
  for (int r = 1; r <= R; ++r) {
    d.b_success[r] = d.b * (1.0 - p) * p_pow;
    d.b_hat[r] = d.b_success[r];
    p_pow *= p;
  }
  d.b_fail = d.b * p_pow;
  d.b_hat[R] += d.b_fail;
  return d;
}

double packet_loss_probability(const LinkSpec& link) {
  link.validate();
  return std::pow(link.p_err, link.retry_limit);
}

double system_capacity(const RtwtSpec& rtwt, const TrafficSpec& traffic) {
  rtwt.validate();
  traffic.validate();
  return rtwt.period.count() / (rtwt.sp_slots * traffic.slot_time.count());
}

}  // namespace rtwt
