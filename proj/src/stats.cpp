#include "kinplume/stats.hpp"

#include "kinplume/errors.hpp"

namespace kinplume {

SampleMoments sample_moments(std::span<const double> values) {
  SampleMoments m;
  m.count = values.size();
  if (values.empty()) return m;
  CompensatedSum s1;
  for (double x : values) s1 += x;
  const double n = static_cast<double>(values.size());
  m.mean = s1.value() / n;
  CompensatedSum s2, s3, s4;
  for (double x : values) {
    const double d = x - m.mean;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }
  m.variance = s2.value() / n;
  m.third_central = s3.value() / n;
  m.fourth_central = s4.value() / n;
  return m;
}

SampleMoments sample_moments(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw InvalidParameter("values/weights size mismatch");
  SampleMoments m;
  m.count = values.size();
  CompensatedSum w0, s1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    w0 += weights[i];
    s1 += weights[i] * values[i];
  }
  const double total = w0.value();
  if (!(total > 0.0)) return m;
  m.mean = s1.value() / total;
  CompensatedSum s2, s3, s4;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - m.mean;
    const double d2 = d * d;
    s2 += weights[i] * d2;
    s3 += weights[i] * d2 * d;
    s4 += weights[i] * d2 * d2;
  }
  m.variance = s2.value() / total;
  m.third_central = s3.value() / total;
  m.fourth_central = s4.value() / total;
  return m;
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidParameter("covariance: size mismatch");
  if (x.empty()) return 0.0;
  const double mx = sample_moments(x).mean;
  const double my = sample_moments(y).mean;
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s.value() / static_cast<double>(x.size());
}

double batch_standard_error(std::span<const double> values,
                            const std::function<double(std::span<const double>)>& statistic,
                            std::size_t batches) {
  if (batches < 2) throw InvalidParameter("batch means need at least 2 batches");
  if (values.size() < 2 * batches) return 0.0;
  const std::size_t len = values.size() / batches;
  std::vector<double> per_batch;
  per_batch.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * len;
    const std::size_t end = (b + 1 == batches) ? values.size() : begin + len;
    per_batch.push_back(statistic(values.subspan(begin, end - begin)));
  }
  const auto m = sample_moments(per_batch);
  const double nb = static_cast<double>(batches);
  // unbiased spread of batch statistics, then standard error of their mean
  return std::sqrt(m.variance * nb / (nb - 1.0) / nb);
}

Estimate estimate_mean(std::span<const double> values, std::size_t batches) {
  return {sample_moments(values).mean,
          batch_standard_error(values, [](auto s) { return sample_moments(s).mean; }, batches)};
}

Estimate estimate_variance(std::span<const double> values, std::size_t batches) {
  return {sample_moments(values).variance,
          batch_standard_error(values, [](auto s) { return sample_moments(s).variance; },
                               batches)};
}

Estimate estimate_kurtosis(std::span<const double> values, std::size_t batches) {
  return {sample_moments(values).kurtosis(),
          batch_standard_error(values, [](auto s) { return sample_moments(s).kurtosis(); },
                               batches)};
}

Estimate estimate_skewness(std::span<const double> values, std::size_t batches) {
  return {sample_moments(values).skewness(),
          batch_standard_error(values, [](auto s) { return sample_moments(s).skewness(); },
                               batches)};
}

}  // namespace kinplume
