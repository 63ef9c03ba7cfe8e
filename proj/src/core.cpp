#include "kinplume/core.hpp"

#include <cmath>
#include <sstream>

namespace kinplume {

namespace {

void require_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream os;
    os << name << " must be finite and >= 0 (got " << value << ")";
    throw InvalidParameter(os.str());
  }
}

}  // namespace

std::string_view to_string(Phase p) { return p == Phase::Free ? "free" : "adsorbed"; }

std::string_view to_string(Initial i) {
  switch (i) {
    case Initial::Free:
      return "free";
    case Initial::Adsorbed:
      return "adsorbed";
    case Initial::Equilibrium:
      return "equilibrium";
  }
  return "?";
}

Phase parse_phase(std::string_view s) {
  if (s == "free" || s == "f") return Phase::Free;
  if (s == "adsorbed" || s == "a") return Phase::Adsorbed;
  throw InvalidParameter("unknown phase '" + std::string(s) + "' (expected free|adsorbed)");
}

Initial parse_initial(std::string_view s) {
  if (s == "free" || s == "f") return Initial::Free;
  if (s == "adsorbed" || s == "a") return Initial::Adsorbed;
  if (s == "equilibrium" || s == "eq") return Initial::Equilibrium;
  throw InvalidParameter("unknown initial condition '" + std::string(s) +
                         "' (expected free|adsorbed|equilibrium)");
}

void TransportParams::validate() const {
  require_nonnegative(v, "v");
  require_nonnegative(d_l, "d_l");
  require_nonnegative(d_t, "d_t");
}

void KineticsParams::validate() const {
  require_nonnegative(lambda, "lambda");
  require_nonnegative(mu, "mu");
  if (lambda + mu <= 0.0) {
    throw InvalidParameter(
        "lambda + mu must be > 0; use lambda = 0, mu > 0 for conservative transport");
  }
}

double DerivedQuantities::require_retardation() const {
  if (!retardation) throw DegenerateKinetics("retardation factor undefined for mu = 0");
  return *retardation;
}

DerivedQuantities derive(const KineticsParams& kin, const TransportParams& tp) {
  kin.validate();
  tp.validate();
  const double g = kin.total_rate();
  DerivedQuantities dq;
  dq.pi_f = kin.mu / g;
  dq.pi_a = kin.lambda / g;
  dq.v_star = tp.v * dq.pi_f;
  dq.d_star = kin.lambda * kin.mu * tp.v * tp.v / (g * g * g);
  dq.v_e = dq.v_star;
  dq.d_e = dq.d_star + dq.pi_f * tp.d_l;
  if (kin.mu > 0.0) dq.retardation = g / kin.mu;
  return dq;
}

void DiscreteKinetics::validate() const {
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidParameter("discrete release probability a must lie in [0,1]");
  if (!(b >= 0.0 && b <= 1.0)) throw InvalidParameter("discrete capture probability b must lie in [0,1]");
  if (n < 1) throw InvalidParameter("step count n must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("time step must be > 0");
}

DiscreteKinetics DiscreteKinetics::from_rates(const KineticsParams& kin, double t, long n) {
  kin.validate();
  if (n < 1) throw InvalidParameter("step count n must be >= 1");
  if (!(t > 0.0)) throw InvalidParameter("horizon t must be > 0");
  DiscreteKinetics dk;
  dk.n = n;
  dk.dt = t / static_cast<double>(n);
  dk.a = kin.mu * dk.dt;
  dk.b = kin.lambda * dk.dt;
  dk.validate();
  return dk;
}

double scaled_x(double x, double t, const DerivedQuantities& dq) {
  if (!(t > 0.0)) throw DomainError("scaled coordinates need t > 0");
  if (!(dq.d_star > 0.0)) throw DomainError("scaled x needs D* > 0 (both rates and v positive)");
  return (x - dq.v_star * t) / std::sqrt(2.0 * dq.d_star * t);
}

double scaled_y(double y, double t, double d_t) {
  if (!(t > 0.0)) throw DomainError("scaled coordinates need t > 0");
  if (!(d_t > 0.0)) throw DomainError("scaled y needs D_T > 0");
  return y / std::sqrt(2.0 * d_t * t);
}

std::pair<double, double> scaled_coords(double x, double y, double t, const DerivedQuantities& dq,
                                        double d_t) {
  return {scaled_x(x, t, dq), scaled_y(y, t, d_t)};
}

double transition_probability(Phase from, Phase to, double t, const KineticsParams& kin) {
  const double g = kin.total_rate();
  // 1 - exp(-g t), computed without cancellation at small t
  const double relaxed = -std::expm1(-g * t);
  const double pi_f = kin.pi_free();
  const double pi_a = kin.pi_adsorbed();
  if (from == Phase::Free) {
    return to == Phase::Free ? 1.0 - pi_a * relaxed : pi_a * relaxed;
  }
  return to == Phase::Free ? pi_f * relaxed : 1.0 - pi_f * relaxed;
}

double occupancy(Initial from, Phase to, double t, const KineticsParams& kin) {
  switch (from) {
    case Initial::Free:
      return transition_probability(Phase::Free, to, t, kin);
    case Initial::Adsorbed:
      return transition_probability(Phase::Adsorbed, to, t, kin);
    case Initial::Equilibrium:
      return to == Phase::Free ? kin.pi_free() : kin.pi_adsorbed();
  }
  return 0.0;
}

}  // namespace kinplume
