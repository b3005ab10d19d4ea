#include "rtwt/model.hpp"

namespace rtwt {

namespace {

// One vacation slot: arrivals that fit are queued, nothing is served.
Eigen::MatrixXd vacation_kernel(int buffer, const BatchDistribution& batches) {
  const int R = batches.retry_limit();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(buffer + 1, buffer + 1);
  for (int k = 0; k <= buffer; ++k) {
    m(k, k) += batches.b0;
    for (int r = 1; r <= R; ++r) {
      if (r <= buffer - k) {
        m(k, k + r) += batches.b_hat[r];
      } else {
        m(k, k) += batches.b_hat[r];  // batch dropped
      }
    }
  }
  return m;
}

// One SP slot: arrivals that fit are queued and the head packet is sent.
Eigen::MatrixXd service_kernel(int buffer, const BatchDistribution& batches) {
  const int R = batches.retry_limit();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(buffer + 1, buffer + 1);
  for (int k = 0; k <= buffer; ++k) {
    const int idle_next = k > 0 ? k - 1 : 0;
    m(k, idle_next) += batches.b0;
    for (int r = 1; r <= R; ++r) {
      if (r <= buffer - k) {
        m(k, k + r - 1) += batches.b_hat[r];
      } else {
        m(k, idle_next) += batches.b_hat[r];
      }
    }
  }
  return m;
}

}  // namespace

ChainModel::ChainModel(SlottedConfig slotted, BatchDistribution batches)
    : slotted_(slotted), batches_(std::move(batches)) {
  if (slotted_.buffer < 1) {
    throw InvalidParameter("chain: buffer capacity must be >= 1");
  }
  if (slotted_.sp_slots < 1 || slotted_.vacation_slots < 0) {
    throw InvalidParameter("chain: invalid slot layout");
  }
  if (batches_.retry_limit() < 1) {
    throw InvalidParameter("chain: batch distribution is empty");
  }
  service_ = service_kernel(slotted_.buffer, batches_);
  vacation_ = vacation_kernel(slotted_.buffer, batches_);
}

const Eigen::MatrixXd& ChainModel::transition(int slot) const {
  if (slot < 0 || slot >= cycle_len()) {
    throw InvalidParameter("chain: slot index out of range");
  }
  return slotted_.in_service_period(slot) ? service_ : vacation_;
}

ChainModel build_chain(const SlottedConfig& slotted, const BatchDistribution& batches) {
  return ChainModel(slotted, batches);
}

}  // namespace rtwt
