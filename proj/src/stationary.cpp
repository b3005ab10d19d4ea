#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

#include "rtwt/model.hpp"

namespace rtwt {

namespace {

constexpr double kResidualLimit = 1e-8;
constexpr double kNegativeClip = -1e-14;

// Grassmann-Taksar-Heyman elimination. Uses only off-diagonal entries and
// never subtracts, so it stays accurate when the chain is close to identity
// (light load, where plain Gaussian elimination on P - I loses digits).
Eigen::VectorXd gth_stationary(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int k = n - 1; k > 0; --k) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) {
      s += a(k, j);
    }
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "stationary: queue level " << k << " cannot drain in one cycle";
      throw ModelError(os.str());
    }
    for (int i = 0; i < k; ++i) {
      a(i, k) /= s;
    }
    for (int i = 0; i < k; ++i) {
      const double aik = a(i, k);
      if (aik == 0.0) {
        continue;
      }
      for (int j = 0; j < k; ++j) {
        a(i, j) += aik * a(k, j);
      }
    }
  }
  Eigen::VectorXd pi(n);
  pi(0) = 1.0;
  for (int k = 1; k < n; ++k) {
    double v = 0.0;
    for (int i = 0; i < k; ++i) {
      v += pi(i) * a(i, k);
    }
    pi(k) = v;
  }
  return pi / pi.sum();
}

Eigen::MatrixXd solve_cycle_reduction(const ChainModel& chain) {
  const int states = chain.queue_states();
  const int cycle = chain.cycle_len();

  // Row-vector convention: phi_{n+1} = phi_n * P_n, so one full cycle started
  // at slot 0 is P_0 * P_1 * ... * P_{L-1}.
  Eigen::MatrixXd cycle_kernel = Eigen::MatrixXd::Identity(states, states);
  for (int n = 0; n < cycle; ++n) {
    cycle_kernel = cycle_kernel * chain.transition(n);
  }

  Eigen::MatrixXd p(states, cycle);
  Eigen::RowVectorXd phi = gth_stationary(cycle_kernel).transpose();
  for (int n = 0; n < cycle; ++n) {
    p.col(n) = phi.transpose() / cycle;
    phi = phi * chain.transition(n);
  }
  return p;
}

Eigen::MatrixXd solve_full_system(const ChainModel& chain) {
  const int states = chain.queue_states();
  const int cycle = chain.cycle_len();
  const int total = states * cycle;
  auto index = [states](int k, int n) { return n * states + k; };

  // Global balance written as (P^T - I) p = 0 with the last equation
  // replaced by the normalisation sum(p) = 1.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(total) * 8);
  for (int n = 0; n < cycle; ++n) {
    const auto& kernel = chain.transition(n);
    const int next = (n + 1) % cycle;
    for (int k = 0; k < states; ++k) {
      for (int k2 = 0; k2 < states; ++k2) {
        const double v = kernel(k, k2);
        const int row = index(k2, next);
        if (v != 0.0 && row != total - 1) {
          triplets.emplace_back(row, index(k, n), v);
        }
      }
    }
  }
  for (int i = 0; i < total - 1; ++i) {
    triplets.emplace_back(i, i, -1.0);
  }
  for (int i = 0; i < total; ++i) {
    triplets.emplace_back(total - 1, i, 1.0);
  }

  Eigen::SparseMatrix<double> a(total, total);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw ModelError("stationary: full-system factorisation failed");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
  rhs(total - 1) = 1.0;
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) {
    throw ModelError("stationary: full-system solve failed");
  }

  Eigen::MatrixXd p(states, cycle);
  for (int n = 0; n < cycle; ++n) {
    for (int k = 0; k < states; ++k) {
      p(k, n) = x(index(k, n));
    }
  }
  return p;
}

}  // namespace

double balance_residual(const ChainModel& chain, const Eigen::MatrixXd& p) {
  const int cycle = chain.cycle_len();
  double worst = 0.0;
  for (int n = 0; n < cycle; ++n) {
    const int next = (n + 1) % cycle;
    const Eigen::VectorXd pushed = chain.transition(n).transpose() * p.col(n);
    worst = std::max(worst, (pushed - p.col(next)).cwiseAbs().maxCoeff());
  }
  return worst;
}

StationaryDistribution stationary(const ChainModel& chain, StationarySolver solver) {
  StationaryDistribution out;
  out.p = solver == StationarySolver::CycleReduction ? solve_cycle_reduction(chain)
                                                     : solve_full_system(chain);

  if (out.p.minCoeff() < kNegativeClip || !out.p.allFinite()) {
    throw ModelError("stationary: solution has negative or non-finite entries");
  }
  out.p = out.p.cwiseMax(0.0);
  out.balance_residual = balance_residual(chain, out.p);
  const double norm_error = std::abs(out.p.sum() - 1.0);
  if (out.balance_residual > kResidualLimit || norm_error > kResidualLimit) {
    std::ostringstream os;
    os << "stationary: ill-conditioned solve (balance residual " << out.balance_residual
       << ", normalisation error " << norm_error << ")";
    throw ModelError(os.str());
  }
  return out;
}

}  // namespace rtwt
