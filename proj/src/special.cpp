#include "kinplume/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kinplume/errors.hpp"

namespace kinplume::special {

namespace {

constexpr double kSeriesLimit = 15.0;
// log(DBL_MAX); exp(z) overflows beyond this
constexpr double kMaxExpArgument = 709.78;

void check_argument(double z) {
  if (!(z >= 0.0)) throw DomainError("modified Bessel functions are evaluated for z >= 0 only");
}

// sum_k (z^2/4)^k / (k! (k + order)!)
double series(double z, int order) {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// sqrt(2 pi z) e^{-z} I_nu(z) ~ sum_k (-1)^k a_k(nu) / z^k, truncated at the smallest term
double asymptotic(double z, int order) {
  const double four_nu2 = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (four_nu2 - odd * odd) / (8.0 * k * z);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

double scaled(double z, int order) {
  check_argument(z);
  if (z <= kSeriesLimit) {
    const double s = series(z, order);
    return std::exp(-z) * (order == 0 ? s : 0.5 * z * s);
  }
  return asymptotic(z, order);
}

double unscaled(double z, int order) {
  check_argument(z);
  if (z <= kSeriesLimit) {
    const double s = series(z, order);
    return order == 0 ? s : 0.5 * z * s;
  }
  if (z > kMaxExpArgument) throw std::overflow_error("I_nu(z) overflows double; use the scaled form");
  return asymptotic(z, order) * std::exp(z);
}

}  // namespace

double bessel_i0(double z) { return unscaled(z, 0); }
double bessel_i1(double z) { return unscaled(z, 1); }
double bessel_i0_scaled(double z) { return scaled(z, 0); }
double bessel_i1_scaled(double z) { return scaled(z, 1); }

double bessel_i1_over_half_z_scaled(double z) {
  check_argument(z);
  if (z <= kSeriesLimit) return std::exp(-z) * series(z, 1);
  return 2.0 * asymptotic(z, 1) / z;
}

}  // namespace kinplume::special
