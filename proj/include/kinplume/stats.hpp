#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kinplume {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Population (1/N) moments of a sample, as used for plume centroid and spread.
struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double third_central = 0.0;
  double fourth_central = 0.0;

  double skewness() const {
    return variance > 0.0 ? third_central / std::pow(variance, 1.5) : 0.0;
  }
  double kurtosis() const {
    return variance > 0.0 ? fourth_central / (variance * variance) : 0.0;
  }
};

/// Two-pass moments with compensated sums; result depends only on the sample order.
SampleMoments sample_moments(std::span<const double> values);
SampleMoments sample_moments(std::span<const double> values, std::span<const double> weights);

/// Mean of (x - mean_x)(y - mean_y).
double sample_covariance(std::span<const double> x, std::span<const double> y);

/// Batch-means standard error of a statistic: the sample is split into `batches`
/// contiguous blocks, the statistic is evaluated per block, and the spread of the block
/// values is scaled by 1/sqrt(batches).
double batch_standard_error(std::span<const double> values,
                            const std::function<double(std::span<const double>)>& statistic,
                            std::size_t batches = 20);

/// Point estimate +/- batch-means standard error.
struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

Estimate estimate_mean(std::span<const double> values, std::size_t batches = 20);
Estimate estimate_variance(std::span<const double> values, std::size_t batches = 20);
Estimate estimate_kurtosis(std::span<const double> values, std::size_t batches = 20);
Estimate estimate_skewness(std::span<const double> values, std::size_t batches = 20);

}  // namespace kinplume
