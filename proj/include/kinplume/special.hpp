#pragma once

namespace kinplume::special {

/// Modified Bessel functions of the first kind, orders 0 and 1, for z >= 0.
/// Power series up to z = 15, asymptotic expansion beyond. The unscaled forms throw
/// std::overflow_error once e^z leaves the double range; use the scaled forms there.
double bessel_i0(double z);
double bessel_i1(double z);

/// e^{-z} I_0(z) and e^{-z} I_1(z); finite for every z >= 0.
double bessel_i0_scaled(double z);
double bessel_i1_scaled(double z);

/// e^{-z} * 2 I_1(z) / z, equal to 1 at z = 0. Lets densities of the form
/// sqrt(a/b) I_1(2 sqrt(ab)) be evaluated without a 0/0 at the end points.
double bessel_i1_over_half_z_scaled(double z);

}  // namespace kinplume::special
