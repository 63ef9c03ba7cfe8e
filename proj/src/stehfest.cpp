#include "kinplume/stehfest.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <mutex>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "kinplume/errors.hpp"

namespace kinplume::laplace {

namespace {

using boost::multiprecision::cpp_int;

cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  cpp_int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_terms(int n_terms, int max_terms) {
  if (n_terms < 8 || n_terms > max_terms || n_terms % 2 != 0) {
    throw InvalidParameter("Stehfest needs an even term count in [8, " + std::to_string(max_terms) +
                           "], got " + std::to_string(n_terms));
  }
}

// V_k * M! with M = N / 2, as exact integers:
//   (-1)^{k+M} sum_j j^{M+1} C(2j, j) C(j, k-j) C(M, j)
std::vector<cpp_int> scaled_weights(int n_terms, cpp_int& m_factorial) {
  const int m = n_terms / 2;
  m_factorial = 1;
  for (int i = 2; i <= m; ++i) m_factorial *= i;
  std::vector<cpp_int> w(static_cast<std::size_t>(n_terms));
  for (int k = 1; k <= n_terms; ++k) {
    cpp_int s = 0;
    for (int j = (k + 1) / 2; j <= std::min(k, m); ++j) {
      cpp_int p = 1;
      for (int e = 0; e <= m; ++e) p *= j;
      s += p * binomial(2 * j, j) * binomial(j, k - j) * binomial(m, j);
    }
    w[static_cast<std::size_t>(k - 1)] = ((k + m) % 2 == 0) ? s : cpp_int(-s);
  }
  return w;
}

}  // namespace

std::vector<double> stehfest_weights(int n_terms) {
  check_terms(n_terms, 18);
  cpp_int denom;
  const auto w = scaled_weights(n_terms, denom);
  std::vector<double> out;
  out.reserve(w.size());
  for (const auto& v : w) out.push_back(static_cast<double>(WideReal(v) / WideReal(denom)));
  return out;
}

const std::vector<WideReal>& wide_stehfest_weights(int n_terms) {
  check_terms(n_terms, 200);
  static std::mutex mutex;
  static std::map<int, std::vector<WideReal>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n_terms);
  if (it != cache.end()) return it->second;
  cpp_int denom;
  const auto w = scaled_weights(n_terms, denom);
  std::vector<WideReal> out;
  out.reserve(w.size());
  for (const auto& v : w) out.push_back(WideReal(v) / WideReal(denom));
  return cache.emplace(n_terms, std::move(out)).first->second;
}

double stehfest_invert(const std::function<double(double)>& f, double t, int n_terms) {
  if (!(t > 0.0)) throw InvalidParameter("Stehfest inversion needs t > 0");
  const auto w = stehfest_weights(n_terms);
  const double step = std::numbers::ln2 / t;
  long double sum = 0.0L;
  for (int k = 1; k <= n_terms; ++k) {
    const double value = f(k * step);
    if (!std::isfinite(value)) {
      throw ConvergenceError("Laplace transform is not finite at s = " + std::to_string(k * step));
    }
    sum += static_cast<long double>(w[static_cast<std::size_t>(k - 1)]) * value;
  }
  return static_cast<double>(sum * step);
}

WideReal stehfest_invert_wide(const std::function<WideReal(const WideReal&)>& f, double t,
                              int n_terms) {
  if (!(t > 0.0)) throw InvalidParameter("Stehfest inversion needs t > 0");
  const auto& w = wide_stehfest_weights(n_terms);
  const WideReal step = boost::math::constants::ln_two<WideReal>() / WideReal(t);
  WideReal sum = 0;
  for (int k = 1; k <= n_terms; ++k) {
    const WideReal value = f(step * k);
    if (!boost::multiprecision::isfinite(value)) {
      throw ConvergenceError("Laplace transform is not finite at s = " +
                             std::to_string(static_cast<double>(step * k)));
    }
    sum += w[static_cast<std::size_t>(k - 1)] * value;
  }
  return sum * step;
}

}  // namespace kinplume::laplace
