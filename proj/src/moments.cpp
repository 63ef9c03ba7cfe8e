#include "kinplume/moments.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace kinplume::moments {

std::string_view to_string(Conditioning c) {
  switch (c) {
    case Conditioning::None:
      return "none";
    case Conditioning::FreeAtT:
      return "free_at_t";
    case Conditioning::AdsorbedAtT:
      return "adsorbed_at_t";
  }
  return "?";
}

Conditioning parse_conditioning(std::string_view s) {
  if (s == "none") return Conditioning::None;
  if (s == "free_at_t" || s == "free") return Conditioning::FreeAtT;
  if (s == "adsorbed_at_t" || s == "adsorbed") return Conditioning::AdsorbedAtT;
  throw InvalidParameter("unknown conditioning '" + std::string(s) +
                         "' (expected none|free_at_t|adsorbed_at_t)");
}

namespace {

void check_ab(double a, double b, long n) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
    throw InvalidParameter("discrete kinetics need a, b in [0, 1]");
  }
  if (a + b <= 0.0) throw InvalidParameter("a + b must be > 0");
  if (n < 0) throw InvalidParameter("step count must be >= 0");
}

// 1 - (1 - a - b)^n without cancellation for small a + b
double one_minus_power(double a, double b, long n) {
  const double r = 1.0 - a - b;
  if (r > 0.0) return -std::expm1(static_cast<double>(n) * std::log1p(-(a + b)));
  return 1.0 - std::pow(r, static_cast<double>(n));
}

double mean_tau_free_start(const KineticsParams& kin, double t) {
  const double g = kin.total_rate();
  return kin.pi_free() * t + kin.pi_adsorbed() * (-std::expm1(-g * t)) / g;
}

double var_tau_free_start(const KineticsParams& kin, double t) {
  const double l = kin.lambda, m = kin.mu, g = kin.total_rate();
  const double e = std::exp(-g * t);
  const double relaxed = -std::expm1(-g * t);
  const double relaxed2 = -std::expm1(-2.0 * g * t);
  const double g3 = g * g * g, g4 = g3 * g;
  return (2.0 * l * m / g3 + 2.0 * l * (m - l) / g3 * e) * t - 4.0 * l * m / g4 * relaxed +
         l * l / g4 * relaxed2;
}

struct TauMoments {
  double mean, variance;
};

TauMoments unconditional_tau(const KineticsParams& kin, double t, Initial initial) {
  const double g = kin.total_rate();
  switch (initial) {
    case Initial::Free:
      return {mean_tau_free_start(kin, t), var_tau_free_start(kin, t)};
    case Initial::Adsorbed: {
      // adsorbed time of this process is the free time of the rate-swapped one
      const auto sw = kin.swapped();
      return {t - mean_tau_free_start(sw, t), var_tau_free_start(sw, t)};
    }
    case Initial::Equilibrium: {
      const double lm = kin.lambda * kin.mu;
      const double relaxed = -std::expm1(-g * t);
      return {kin.pi_free() * t, 2.0 * lm / (g * g * g) * t - 2.0 * lm / (g * g * g * g) * relaxed};
    }
  }
  return {0.0, 0.0};
}

ResidenceMoments to_raw(const TauMoments& m, double probability) {
  return {probability, probability * m.mean, probability * (m.variance + m.mean * m.mean)};
}

// E[tau^k 1{free at t} | free at 0], k = 0, 1, 2
ResidenceMoments free_free_moments(const KineticsParams& kin, double t) {
  const double g = kin.total_rate();
  const double pf = kin.pi_free(), pa = kin.pi_adsorbed();
  const double e = std::exp(-g * t);
  const double relaxed = -std::expm1(-g * t);
  const double p = pf + pa * e;
  const double first = pf * pf * t + 2.0 * pf * pa * relaxed / g + pa * pa * t * e;
  const double mean = first / p;
  const double var = sigma_ff_sq(kin, TransportParams{1.0, 0.0, 0.0}, t);
  return {p, first, p * (var + mean * mean)};
}

}  // namespace

ResidenceMoments& ResidenceMoments::operator+=(const ResidenceMoments& o) {
  probability += o.probability;
  first += o.first;
  second += o.second;
  return *this;
}

double mean_kn(double a, double b, long n) {
  check_ab(a, b, n);
  return a * static_cast<double>(n) / (a + b);
}

double mean_kn_from(double a, double b, long n, Phase start) {
  check_ab(a, b, n);
  const double pi = a / (a + b);
  const double delta = start == Phase::Free ? 1.0 : 0.0;
  return pi * static_cast<double>(n) + (delta - pi) * one_minus_power(a, b, n) / (a + b);
}

double var_kn(double a, double b, long n) {
  check_ab(a, b, n);
  const double s = a + b;
  const double s3 = s * s * s;
  return a * b * (2.0 - s) * static_cast<double>(n) / s3 -
         2.0 * a * b * (1.0 - s) * one_minus_power(a, b, n) / (s3 * s);
}

MomentSet discrete_moments_s(const DiscreteKinetics& dk, const TransportParams& tp) {
  dk.validate();
  const double step = tp.v * dk.dt;
  const double ek = mean_kn(dk.a, dk.b, dk.n);
  MomentSet m;
  m.t = dk.dt * static_cast<double>(dk.n);
  m.mean = ek * step;
  m.variance = ek * 2.0 * tp.d_l * dk.dt + var_kn(dk.a, dk.b, dk.n) * step * step;
  return m;
}

double third_central_moment_random_sum(double mean_k, double var_k, double third_k, double mean_y,
                                       double var_y, double third_y) {
  return mean_k * third_y + 3.0 * mean_y * var_y * var_k + mean_y * mean_y * mean_y * third_k;
}

double sigma_ff_sq(const KineticsParams& kin, const TransportParams& tp, double t) {
  kin.validate();
  if (!(kin.mu > 0.0)) throw DegenerateKinetics("sigma_ff^2 needs mu > 0");
  if (!(t >= 0.0)) throw InvalidParameter("t must be >= 0");
  const double k = kin.mu;
  const double beta = kin.lambda / kin.mu;
  const double v = tp.v, d = tp.d_l;
  const double a = std::exp(-(beta + 1.0) * k * t);
  const double one_minus_a = -std::expm1(-(beta + 1.0) * k * t);
  const double bp1 = beta + 1.0;
  const double q = 1.0 + beta * a;
  const double v2 = v * v;
  double s = t * t * a * v2 * beta * (beta - 1.0) * (beta - 1.0) / (bp1 * bp1 * q * q);
  s += t * (2.0 * d / bp1 + 2.0 * v2 * beta / (k * bp1 * bp1 * bp1));
  s += t * a * (4.0 * v2 * beta * (-beta * beta * a - beta * beta - beta + 1.0) /
                (k * q * q * bp1 * bp1 * bp1));
  s += t * a * (2.0 * d * beta * (beta - 1.0) / (bp1 * q));
  // corrected term: -beta (A - 1)
  s += 2.0 * v2 * beta * one_minus_a * (3.0 * beta * beta * a - 3.0 - beta * (a - 1.0)) /
       (k * k * q * q * bp1 * bp1 * bp1 * bp1);
  s += 4.0 * d * beta * one_minus_a / (k * q * bp1 * bp1);
  return s;
}

ResidenceMoments residence_moments(const KineticsParams& kin, double t, Initial initial,
                                   std::optional<Phase> final_phase) {
  kin.validate();
  if (!(t >= 0.0)) throw InvalidParameter("t must be >= 0");
  if (!final_phase) return to_raw(unconditional_tau(kin, t, initial), 1.0);

  if (!(kin.lambda > 0.0 && kin.mu > 0.0)) {
    throw DegenerateKinetics("phase-conditioned moments need lambda > 0 and mu > 0");
  }
  const double pf = kin.pi_free(), pa = kin.pi_adsorbed();
  const ResidenceMoments ff = free_free_moments(kin, t);
  ResidenceMoments fa = to_raw(unconditional_tau(kin, t, Initial::Free), 1.0);
  fa += ff.scaled(-1.0);
  // reversibility of the stationary two-state chain: pi_a m(a, f) = pi_f m(f, a)
  const ResidenceMoments af = fa.scaled(pf / pa);
  ResidenceMoments aa = to_raw(unconditional_tau(kin, t, Initial::Adsorbed), 1.0);
  aa += af.scaled(-1.0);

  const bool to_free = *final_phase == Phase::Free;
  switch (initial) {
    case Initial::Free:
      return to_free ? ff : fa;
    case Initial::Adsorbed:
      return to_free ? af : aa;
    case Initial::Equilibrium: {
      ResidenceMoments r = (to_free ? ff : fa).scaled(pf);
      r += (to_free ? af : aa).scaled(pa);
      return r;
    }
  }
  return {};
}

MomentSet moments_s(const KineticsParams& kin, const TransportParams& tp, double t,
                    Conditioning conditioning, Initial initial) {
  tp.validate();
  std::optional<Phase> final_phase;
  if (conditioning == Conditioning::FreeAtT) final_phase = Phase::Free;
  if (conditioning == Conditioning::AdsorbedAtT) final_phase = Phase::Adsorbed;
  MomentSet m;
  m.t = t;
  m.conditioning = conditioning;
  m.initial = initial;
  if (t == 0.0) {
    m.probability = final_phase ? occupancy(initial, *final_phase, 0.0, kin) : 1.0;
    return m;
  }
  const ResidenceMoments r = residence_moments(kin, t, initial, final_phase);
  m.probability = r.probability;
  if (!(r.probability > 0.0)) {
    throw DomainError("conditioning event has zero probability");
  }
  const double mean_tau = r.first / r.probability;
  const double var_tau = std::max(0.0, r.second / r.probability - mean_tau * mean_tau);
  m.mean = tp.v * mean_tau;
  m.variance = 2.0 * tp.d_l * mean_tau + tp.v * tp.v * var_tau;
  return m;
}

void write_moment_curve_csv(std::ostream& os, std::span<const MomentSet> curve) {
  os << "t,mean,variance,conditioning,initial\n";
  const auto old_precision = os.precision(17);
  for (const auto& m : curve) {
    os << m.t << ',' << m.mean << ',' << m.variance << ',' << to_string(m.conditioning) << ','
       << kinplume::to_string(m.initial) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace kinplume::moments
