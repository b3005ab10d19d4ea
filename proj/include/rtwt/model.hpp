#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

#include "rtwt/params.hpp"

namespace rtwt {

class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Queue-length Markov chain observed at slot boundaries. The state is (k, n):
// k packets buffered, n the position inside the SP+vacation cycle. Only two
// distinct one-slot kernels exist (SP slot and vacation slot), so they are
// stored once and looked up by slot index.
class ChainModel {
public:
  ChainModel(SlottedConfig slotted, BatchDistribution batches);

  const SlottedConfig& slotted() const { return slotted_; }
  const BatchDistribution& batches() const { return batches_; }
  int queue_states() const { return slotted_.buffer + 1; }
  int cycle_len() const { return slotted_.cycle_len(); }

  // Row-stochastic kernel from slot n to slot (n + 1) mod cycle_len.
  const Eigen::MatrixXd& transition(int slot) const;

private:
  SlottedConfig slotted_;
  BatchDistribution batches_;
  Eigen::MatrixXd service_;
  Eigen::MatrixXd vacation_;
};

ChainModel build_chain(const SlottedConfig& slotted, const BatchDistribution& batches);

enum class StationarySolver {
  CycleReduction,  // embedded chain at slot 0, then propagate through the cycle
  FullSystem,      // sparse LU over every (k, n) state
};

struct StationaryDistribution {
  // prob(k, n); rows are queue lengths, columns slot indices.
  Eigen::MatrixXd p;
  double balance_residual = 0.0;

  double operator()(int k, int n) const { return p(k, n); }
  int queue_states() const { return static_cast<int>(p.rows()); }
  int cycle_len() const { return static_cast<int>(p.cols()); }
};

StationaryDistribution stationary(const ChainModel& chain,
                                  StationarySolver solver = StationarySolver::CycleReduction);

// max over target states of |p' - sum p * Pr{(k,n) -> (k',n')}|.
double balance_residual(const ChainModel& chain, const Eigen::MatrixXd& p);

// Vacation slots a packet at queue position q (q >= 1) sits through before
// the SP in which it is transmitted.
int vacation_slots_before_service(int queue_position, int sp_slots, int vacation_slots);

// How a packet that is still queued when the current SP ends is charged for
// the vacation that follows.
enum class SpillPenalty {
  WholeVacation,  // waits the M-slot vacation (default)
  UnitStep,       // charged a single slot; kept only for comparison runs
};

// Delay in slots of the last packet of an r-attempt batch that arrives at
// the start of slot n and finds k packets queued.
int batch_delay(int k, int slot, int batch_size, const SlottedConfig& slotted,
                SpillPenalty penalty = SpillPenalty::WholeVacation);

struct DelayPmf {
  // mass[d] = Pr{delay == d slots}; mass[0] is always zero.
  std::vector<double> mass;

  double total() const;
  double mean_slots() const;
  double variance_slots() const;
  // Smallest d with CDF(d) >= q.
  int quantile_slots(double q) const;
};

// Upper bound on any batch delay, in slots.
int delay_support_cap(const SlottedConfig& slotted, int retry_limit);

DelayPmf delay_pmf(const StationaryDistribution& stat, const BatchDistribution& batches,
                   const SlottedConfig& slotted,
                   SpillPenalty penalty = SpillPenalty::WholeVacation);

// Fraction of arriving batches that do not fit into the buffer.
double overflow_probability(const StationaryDistribution& stat, const BatchDistribution& batches,
                            const SlottedConfig& slotted);

inline constexpr double kDefaultPercentile = 0.999;

struct MetricsReport {
  Seconds mean_delay{0.0};
  Seconds jitter{0.0};
  double loss_probability = 0.0;
  double percentile_q = kDefaultPercentile;
  Seconds percentile{0.0};
  double overflow_probability = 0.0;
  double capacity = 0.0;
};

MetricsReport metrics(const DelayPmf& pmf, const LinkSpec& link, const TrafficSpec& traffic,
                      const RtwtSpec& rtwt, double percentile_q = kDefaultPercentile,
                      double overflow = 0.0);

struct EvaluateOptions {
  double percentile_q = kDefaultPercentile;
  bool allow_discretization_error = false;
  SpillPenalty penalty = SpillPenalty::WholeVacation;
  StationarySolver solver = StationarySolver::CycleReduction;
};

struct Evaluation {
  SlottedConfig slotted;
  BatchDistribution batches;
  DelayPmf pmf;
  MetricsReport report;
};

Evaluation evaluate(const TrafficSpec& traffic, const LinkSpec& link, const RtwtSpec& rtwt,
                    int buffer = kDefaultBufferPackets, const EvaluateOptions& options = {});

}  // namespace rtwt
