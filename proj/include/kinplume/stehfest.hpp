#pragma once

#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace kinplume::laplace {

/// 200 significant decimal digits; used where the alternating Stehfest sum needs many terms.
using WideReal =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>,
                                  boost::multiprecision::et_off>;

/// Gaver-Stehfest weights V_1..V_N, computed exactly as integers over (N/2)! and rounded once.
std::vector<double> stehfest_weights(int n_terms);
const std::vector<WideReal>& wide_stehfest_weights(int n_terms);

/// f(t) ~ ln2 / t * sum_k V_k F(k ln2 / t). Double precision supports even n_terms in [8, 18].
/// Throws ConvergenceError on a non-finite F value.
double stehfest_invert(const std::function<double(double)>& f, double t, int n_terms = 12);

/// Same sum carried out in WideReal; any even n_terms in [8, 200].
WideReal stehfest_invert_wide(const std::function<WideReal(const WideReal&)>& f, double t,
                              int n_terms = 64);

}  // namespace kinplume::laplace
