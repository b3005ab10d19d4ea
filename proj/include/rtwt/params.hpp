#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtwt {

using Seconds = std::chrono::duration<double>;

// Thrown for any input that violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Default buffer capacity (packets, including the one in service).
inline constexpr int kDefaultBufferPackets = 20;
// Largest relative mismatch between T and its slotted approximation accepted
// without an explicit override.
inline constexpr double kMaxDiscretizationError = 0.01;
// lambda * S above this value means the slot is no longer short compared to
// the mean inter-arrival time.
inline constexpr double kShortSlotLoadLimit = 0.2;

struct TrafficSpec {
  double lambda = 0.0;         // packets per second
  Seconds slot_time{0.0};      // packet airtime incl. ACK

  void validate() const;
  bool operator==(const TrafficSpec&) const = default;
  // True while lambda * S stays small enough for one-batch-per-slot.
  bool short_slot_assumption_holds() const {
    return lambda * slot_time.count() < kShortSlotLoadLimit;
  }
};

struct LinkSpec {
  double p_err = 0.0;
  int retry_limit = 1;  // maximum number of transmission attempts

  void validate() const;
  bool operator==(const LinkSpec&) const = default;
};

struct RtwtSpec {
  Seconds period{0.0};
  int sp_slots = 1;
  Seconds offset{0.0};  // first SP start; only the simulator uses it

  void validate() const;
  void validate_against(const TrafficSpec& traffic) const;
  bool operator==(const RtwtSpec&) const = default;
};

struct SlottedConfig {
  int sp_slots = 1;        // N
  int vacation_slots = 0;  // M
  int buffer = kDefaultBufferPackets;  // K
  double discretization_error = 0.0;

  int cycle_len() const { return sp_slots + vacation_slots; }
  bool in_service_period(int slot) const { return slot < sp_slots; }
};

struct BatchDistribution {
  double b0 = 1.0;
  double b = 0.0;
  // Indexed 1..R; element 0 is unused and kept at zero.
  std::vector<double> b_success;
  double b_fail = 0.0;
  std::vector<double> b_hat;

  int retry_limit() const { return static_cast<int>(b_success.size()) - 1; }
};

struct SlotifyOptions {
  bool allow_discretization_error = false;
};

SlottedConfig slotify(const TrafficSpec& traffic, const RtwtSpec& rtwt, int buffer,
                      SlotifyOptions options = {});

BatchDistribution batch_distribution(const TrafficSpec& traffic, const LinkSpec& link);

// Probability that an offered packet exhausts all attempts.
double packet_loss_probability(const LinkSpec& link);

// Number of flows that fit with dedicated, non-overlapping SPs: T / (N * S).
double system_capacity(const RtwtSpec& rtwt, const TrafficSpec& traffic);

}  // namespace rtwt
