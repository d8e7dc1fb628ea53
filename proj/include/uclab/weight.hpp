#pragma once

#include <cmath>

namespace uclab {

// R0 = e^{-3}: log r < -2 keeps phi increasing with margin.
inline const double kR0 = std::exp(-3.0);
inline constexpr double kLogR0 = -3.0;

// phi(r) = log r + log((log r)^2); domain 0 < r < e^{-2}.
double phi(double r);
double phi_prime(double r);

// varphi(t) = phi(e^t) = t + log t^2; domain t < -2.
double varphi(double t);
double varphi_prime(double t);

}  // namespace uclab
