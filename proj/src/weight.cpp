#include "uclab/weight.hpp"

#include "uclab/errors.hpp"

namespace uclab {

namespace {
const double kCeiling = std::exp(-2.0);
}

double phi(double r) {
  if (!(r > 0) || r >= kCeiling) throw DomainError("phi: r must lie in (0, e^-2)");
  double l = std::log(r);
  return l + std::log(l * l);
}

double phi_prime(double r) {
  if (!(r > 0) || r >= kCeiling) throw DomainError("phi_prime: r must lie in (0, e^-2)");
  return 1.0 / r + 2.0 / (r * std::log(r));
}

double varphi(double t) {
  if (!(t < -2)) throw DomainError("varphi: t must be below -2");
  return t + std::log(t * t);
}

double varphi_prime(double t) {
  if (!(t < -2)) throw DomainError("varphi_prime: t must be below -2");
  return 1.0 + 2.0 / t;
}

}  // namespace uclab
