#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "kinplume/core.hpp"

namespace oracle {

using kinplume::KineticsParams;
using kinplume::Phase;

inline int index(Phase p) { return p == Phase::Free ? 0 : 1; }

inline Eigen::Matrix2d generator(const KineticsParams& kin) {
  Eigen::Matrix2d q;
  q << -kin.lambda, kin.lambda, kin.mu, -kin.mu;
  return q;
}

/// P(phase j at t | phase i at 0) = expm(Q t)(i, j).
inline double transition(Phase i, Phase j, double t, const KineticsParams& kin) {
  const Eigen::Matrix2d p = (generator(kin) * t).exp();
  return p(index(i), index(j));
}

/// E[free time in [0, t] | start i] = int_0^t expm(Q s)(i, f) ds, read off the Van Loan
/// block matrix expm([[Q, I], [0, 0]] t).
inline double expected_free_time(Phase i, double t, const KineticsParams& kin) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<2, 2>() = generator(kin);
  m.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
  const Eigen::Matrix4d e = (m * t).exp();
  return e.topRightCorner<2, 2>()(index(i), 0);
}

/// Law of K_n (free intervals among n) by enumerating all 2^n phase paths of the
/// discrete chain: a = P(adsorbed -> free), b = P(free -> adsorbed), stationary start.
/// Returns P(K_n = k) for k = 0..n.
inline std::vector<double> kn_distribution(double a, double b, int n) {
  std::vector<double> pk(static_cast<std::size_t>(n) + 1, 0.0);
  const double start_free = a / (a + b);
  for (unsigned path = 0; path < (1u << n); ++path) {
    double p = 1.0;
    int k = 0;
    bool prev_free = false;
    for (int step = 0; step < n; ++step) {
      const bool free = (path >> step) & 1u;
      if (step == 0) {
        p *= free ? start_free : 1.0 - start_free;
      } else if (prev_free) {
        p *= free ? 1.0 - b : b;
      } else {
        p *= free ? a : 1.0 - a;
      }
      k += free ? 1 : 0;
      prev_free = free;
    }
    pk[static_cast<std::size_t>(k)] += p;
  }
  return pk;
}

struct Central {
  double mean = 0.0, variance = 0.0, third = 0.0;
};

inline Central central(const std::vector<double>& values, const std::vector<double>& probs) {
  Central c;
  for (std::size_t i = 0; i < values.size(); ++i) c.mean += probs[i] * values[i];
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - c.mean;
    c.variance += probs[i] * d * d;
    c.third += probs[i] * d * d * d;
  }
  return c;
}

}  // namespace oracle
