#include "uclab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uclab/errors.hpp"
#include "uclab/weight.hpp"

namespace uclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCheckTol = 1e-12;

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

void check_st(double s, double t) {
  if (!(s > 2)) throw DomainError("s must exceed 2");
  if (!(t > 1)) throw DomainError("t must exceed 1");
}

void check_eps_closed(double eps) {
  if (!(eps >= 0 && eps < 1)) throw DomainError("eps must lie in [0, 1)");
}

void check_t(double t) {
  if (!(t > 1)) throw DomainError("t must exceed 1");
}

// 2s/(s+2), the MID/LOW split.
double low_split(double s) { return std::isinf(s) ? 2.0 : 2 * s / (s + 2); }

// s = inf is the s -> inf limit at fixed t, and t = 2 lies above 2s/(s+2) for every finite s
bool is_low(double s, double t) { return std::isinf(s) ? t < 2 : t <= low_split(s); }

void consistency(bool ok, const char* what) {
  if (!ok) throw InvariantError(std::string("parameter consistency failed: ") + what);
}

}  // namespace

void PotentialRegularity::validate() const {
  check_st(s, t);
  if (!(eps > 0 && eps < 1)) throw DomainError("eps must lie in (0, 1)");
  if (!(delta > 0)) throw DomainError("delta must be positive");
}

double parse_extended(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity" || text == "Inf") return kInf;
  size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size()) throw DomainError("cannot parse number: " + text);
  return v;
}

std::string format_extended(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

const char* case_name(Case c) {
  switch (c) {
    case Case::T_GE_S: return "T_GE_S";
    case Case::MID: return "MID";
    case Case::LOW: return "LOW";
    case Case::PURE_HIGH: return "PURE_HIGH";
    case Case::PURE_LOW: return "PURE_LOW";
  }
  return "?";
}

const char* branch_name(PiBranch b) { return b == PiBranch::HIGH_T ? "HIGH_T" : "LOW_T"; }

Case regularity_case(double s, double t) {
  check_st(s, t);
  if (t >= s) return Case::T_GE_S;
  if (!is_low(s, t)) return Case::MID;
  return Case::LOW;
}

double kappa(const PotentialRegularity& reg) {
  check_st(reg.s, reg.t);
  check_eps_closed(reg.eps);
  const double s = reg.s, t = reg.t, eps = reg.eps;
  if (!is_low(s, t)) return std::isinf(s) ? 2.0 : 2 * s / (s - 2);
  double den = t - 1 - eps * t;
  if (!(den > 0)) throw DomainError("low branch requires eps < (t-1)/t");
  return t / den;
}

double mu_full(const PotentialRegularity& reg) {
  check_eps_closed(reg.eps);
  const double s = reg.s, t = reg.t, eps = reg.eps;
  switch (regularity_case(s, t)) {
    case Case::T_GE_S:
      return std::isinf(s) ? 2.0 / 3.0 : 2 * s / (3 * s - 2);
    case Case::MID: {
      double num, den;
      if (std::isinf(s)) {
        num = 2 * t;
        den = 3 * t - 4 - eps * (2 * t - 4);
      } else {
        num = 2 * s * t;
        den = 3 * s * t + 2 * t - 4 * s - eps * (2 * s * t + 4 * t - 4 * s);
      }
      if (!(den > 0)) throw DomainError("MID branch: denominator 3st+2t-4s-eps(2st+4t-4s) must be positive");
      return num / den;
    }
    default: {
      double den = t - 1 + eps * (t - 2 * t * eps);
      if (!(den > 0)) throw DomainError("LOW branch: denominator t-1+eps(t-2t eps) must be positive");
      return t / den;
    }
  }
}

double mu_pure(double t, double eps) {
  check_t(t);
  check_eps_closed(eps);
  if (t > 2) return std::isinf(t) ? 2.0 / 3.0 : 2 * t / (3 * t - 2);
  double den = 2 * t - 2 - eps * (2 * t - 1 - 2 * eps);
  if (!(den > 0)) throw DomainError("low branch requires eps(2t-1-2eps) < 2(t-1)");
  return t / den;
}

double mu_tilde(double t, double eps) {
  check_t(t);
  check_eps_closed(eps);
  if (std::isinf(t)) return 2.0 / 3.0;
  if (t > 2) {
    double den = 3 * t - 4 - eps * (2 * t - 4);
    if (!(den > 0)) throw DomainError("mu_tilde: denominator 3t-4-eps(2t-4) must be positive");
    return 2 * t / den;
  }
  double den = t - 1 + eps * (t - 2 * eps * t);
  if (!(den > 0)) throw DomainError("mu_tilde: denominator t-1+eps(t-2 eps t) must be positive");
  return t / den;
}

ExponentReport carleman_parameters(const PotentialRegularity& reg) {
  reg.validate();
  const double s = reg.s, t = reg.t, eps = reg.eps;
  const double a = inv(s), b = inv(t);
  ExponentReport rep;
  rep.case_id = regularity_case(s, t);
  if (rep.case_id == Case::LOW) {
    if (!(eps < (t - 1) / t)) throw DomainError("Case 3 requires eps < (t-1)/t");
    if (!(eps < 0.5)) throw DomainError("Case 3 requires eps < 1/2");
  }
  rep.kappa = kappa(reg);
  rep.mu = mu_full(reg);

  switch (rep.case_id) {
    case Case::T_GE_S:
    case Case::MID:
      rep.p = std::isinf(s) ? 2.0 : 2 * s / (s + 2);
      // 2p/(2-p) = s, compared through reciprocals so that s = inf works
      consistency(std::abs((2 - rep.p) / (2 * rep.p) - a) <= kCheckTol, "2p/(2-p) = s");
      if (rep.case_id == Case::MID) {
        rep.q = std::isinf(s) ? 2 * t / (t - 2) : 2 * s * t / (s * t + 2 * t - 2 * s);
        consistency(std::abs(1 / rep.p - 1 / *rep.q - b) <= kCheckTol, "pq/(q-p) = t");
      }
      break;
    default:
      rep.p = t / (1 + eps * t);
      rep.q = 1 / eps;
      consistency((2 - rep.p) / (2 * rep.p) >= a - kCheckTol, "2p/(2-p) <= s");
      consistency(std::abs(1 / rep.p - 1 / *rep.q - b) <= kCheckTol, "pq/(q-p) = t");
      break;
  }
  if (!(rep.p > 1 && rep.p <= 2)) throw DomainError("p must lie in (1, 2]");
  if (rep.q && !(*rep.q > 2 && std::isfinite(*rep.q))) throw DomainError("q must lie in (2, inf)");
  rep.beta1 = 1 - 1 / rep.p;
  if (rep.q) rep.beta0 = beta_exponents(rep.p, *rep.q, eps).beta0;
  return rep;
}

ExponentReport carleman_parameters_pure(double t, double eps) {
  check_t(t);
  if (!(eps > 0 && eps < 1)) throw DomainError("eps must lie in (0, 1)");
  const double b = inv(t);
  ExponentReport rep;
  if (t > 2) {
    rep.case_id = Case::PURE_HIGH;
    rep.p = std::isinf(t) ? 2.0 : 2 * t / (t + 2);
    consistency(std::abs((2 - rep.p) / (2 * rep.p) - b) <= kCheckTol, "2p/(2-p) = t");
  } else {
    rep.case_id = Case::PURE_LOW;
    if (!(eps < t - 1)) throw DomainError("low branch requires eps < t-1");
    if (!(eps * (2 * t - 1 - 2 * eps) < 2 * (t - 1)))
      throw DomainError("low branch requires eps(2t-1-2eps) < 2(t-1)");
    rep.p = t / (t - eps);
    rep.q = t / (t - 1 - eps);
    consistency(std::abs(1 / rep.p - 1 / *rep.q - b) <= kCheckTol, "pq/(q-p) = t");
  }
  rep.mu = mu_pure(t, eps);
  rep.beta1 = 1 - 1 / rep.p;
  if (rep.q) rep.beta0 = beta_exponents(rep.p, *rep.q, eps).beta0;
  return rep;
}

Betas beta_exponents(double p, double q, double eps) {
  if (!(p > 1 && p <= 2)) throw DomainError("beta_exponents: p must lie in (1, 2]");
  if (!(q > 2 && std::isfinite(q))) throw DomainError("beta_exponents: q must lie in (2, inf)");
  if (!(eps > 0 && eps < 1)) throw DomainError("beta_exponents: eps must lie in (0, 1)");
  return {2 / q * (1 - eps) + 1 - 1 / p, 1 - 1 / p};
}

double beta_minus(double p) {
  if (!(p > 1 && p <= 2)) throw DomainError("beta_minus: p must lie in (1, 2]");
  return (1 - p) / p;
}

InterpolationSplit interpolation_split(double q, double q_prime) {
  if (!(q > 2 && q < q_prime && std::isfinite(q_prime)))
    throw DomainError("interpolation_split requires 2 < q < q' < inf");
  double lambda = (q_prime - q) / (q_prime - 2);
  return {lambda, 2 * (q_prime - q) / (q * (q_prime - 2)), (q - 2) / (q_prime - 2)};
}

InfinityReport infinity_exponent(const PotentialRegularity& reg) {
  const double s = reg.s, t = reg.t, eps = reg.eps;
  double k = kappa(reg);
  double m = mu_full(reg);
  InfinityReport rep;
  rep.kappa_term = std::isinf(s) ? k : k * (s - 2) / s;
  rep.mu_term = std::isinf(t) ? 2 * m : m * (2 * t - 2) / t;
  rep.Pi = std::max(rep.kappa_term, rep.mu_term);
  if (!is_low(s, t)) {
    rep.branch = PiBranch::HIGH_T;
    rep.piecewise = 2;
  } else {
    rep.branch = PiBranch::LOW_T;
    rep.piecewise = std::isinf(s) ? t / (t - 1 - eps * t) : t * (s - 2) / (s * (t - 1 - eps * t));
  }
  if (std::abs(rep.Pi - rep.piecewise) > kCheckTol * std::max(1.0, rep.Pi))
    throw InvariantError("max-formula Pi differs from the piecewise value (MID branch needs eps < 1/2)");
  return rep;
}

InfinityReport infinity_exponent_pure(double t, double eps) {
  double m = mu_pure(t, eps);
  InfinityReport rep;
  rep.kappa_term = 0;
  rep.mu_term = std::isinf(t) ? 2 * m : m * (2 * t - 2) / t;
  rep.Pi = rep.mu_term;
  if (t > 2) {
    rep.branch = PiBranch::HIGH_T;
    rep.piecewise = std::isinf(t) ? 4.0 / 3.0 : (4 * t - 4) / (3 * t - 2);
  } else {
    rep.branch = PiBranch::LOW_T;
    rep.piecewise = (2 * t - 2) / (2 * t - 2 - eps * (2 * t - 1 - 2 * eps));
  }
  if (std::abs(rep.Pi - rep.piecewise) > kCheckTol * std::max(1.0, rep.Pi))
    throw InvariantError("pure-V Pi differs from the piecewise value");
  return rep;
}

double k_zero(double r0, double r1, double R1) {
  if (!(r0 > 0 && r0 <= r1 && r1 < R1)) throw DomainError("k_zero requires 0 < r0 <= r1 < R1");
  if (!(R1 < kR0)) throw DomainError("k_zero requires R1 < R0 = e^-3");
  if (!(r1 <= R1 / 2)) throw DomainError("k_zero requires r1 <= R1/2");
  double top = phi(R1 / 2);
  if (!(r0 < R1 / 2)) throw DomainError("k_zero requires r0 < R1/2");
  return (top - phi(r1)) / (top - phi(r0));
}

double f_delta(double r, double K, double M, const PotentialRegularity& reg) {
  if (!(r > 0)) throw DomainError("f_delta requires r > 0");
  if (!(K >= 0 && M >= 0)) throw DomainError("f_delta requires K, M >= 0");
  check_st(reg.s, reg.t);
  if (!(reg.delta > 0)) throw DomainError("delta must be positive");
  double ek = 1 / (1 - 2 * inv(reg.s)) + reg.delta;  // s/(s-2) + delta
  double em = 1 / (2 - 2 * inv(reg.t)) + reg.delta;  // t/(2t-2) + delta
  return 1 + r * std::pow(K, ek) + r * std::pow(M, em);
}

double tau_threshold(double K, double M, const PotentialRegularity& reg, double C1, double C2) {
  if (!(K >= 0 && M >= 0)) throw DomainError("tau_threshold requires K, M >= 0");
  if (!(C1 > 0 && C2 > 0)) throw DomainError("tau_threshold requires C1, C2 > 0");
  return 1 + C1 * std::pow(K, kappa(reg)) + C2 * std::pow(M, mu_full(reg));
}

}  // namespace uclab
