#include "uclab/conjugated.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "uclab/errors.hpp"
#include "uclab/weight.hpp"

namespace uclab {

namespace {

constexpr double kD1[4] = {0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
constexpr double kMaxCellExponent = 700;

int signed_mode(int i, int n) { return i < n / 2 ? i : i - n; }

void require_margin(const CylinderField& u, const char* what) {
  if (!u.has_margin(3)) throw SupportError(std::string(what) + ": field needs a 3-row zero margin");
}

void require_weight_domain(const CylinderGrid& g) {
  if (!(g.t_max() < -2)) throw DomainError("conjugated operator needs t < -2 on the whole grid");
}

std::vector<double> phi_rows(const CylinderGrid& g) {
  std::vector<double> out(g.nt);
  for (int j = 0; j < g.nt; ++j) out[j] = varphi(g.t(j));
  return out;
}

// 8-point Gauss-Legendre on [0, 1]
struct CellRule {
  std::array<double, 8> x, w;
  CellRule() {
    using GL = boost::math::quadrature::gauss<double, 8>;
    const auto& a = GL::abscissa();
    const auto& wt = GL::weights();
    for (int i = 0; i < 4; ++i) {
      x[2 * i] = 0.5 * (1 - a[i]);
      x[2 * i + 1] = 0.5 * (1 + a[i]);
      w[2 * i] = w[2 * i + 1] = 0.5 * wt[i];
    }
  }
};

const CellRule& cell_rule() {
  static const CellRule rule;
  return rule;
}

// g at t_j + x*dt by 6-point Lagrange on the uniform grid.
cplx interp_g(const std::vector<cplx>& g, int j, double x) {
  const int n = int(g.size());
  int i0 = std::clamp(j - 2, 0, n - 6);
  double pos = j + x - i0;
  cplx s = 0;
  for (int a = 0; a < 6; ++a) {
    double l = 1;
    for (int b = 0; b < 6; ++b)
      if (b != a) l *= (pos - b) / double(a - b);
    s += l * g[i0 + a];
  }
  return s;
}

void check_profile(const ModeProfile& m) {
  if (int(m.g.size()) != m.grid.nt) throw SizeError("mode profile length differs from grid");
  if (m.grid.nt < 6) throw SizeError("mode solve needs at least 6 grid rows");
  if (m.k < 0) throw DomainError("mode degree must be nonnegative");
  if (!(m.tau >= 0)) throw DomainError("tau must be nonnegative");
  require_weight_domain(m.grid);
}

// log S_k(s, t) on the grid rows; E(a, b) = k(a-b) - tau(phi(a) - phi(b)) carries f from b to a.
struct Propagator {
  const ModeProfile& m;
  double exponent(double a, double b) const { return m.k * (a - b) - m.tau * (varphi(a) - varphi(b)); }
};

void check_cell(double e) {
  if (std::abs(e) > kMaxCellExponent)
    throw QuadratureError("kernel varies by more than e^700 across one cell; refine the t grid");
}

void check_finite(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw QuadratureError("mode solve produced a non-finite value");
}

}  // namespace

CylinderField conjugate_apply(const CylinderField& u, double tau) {
  require_margin(u, "conjugate_apply");
  require_weight_domain(u.grid);
  const auto& g = u.grid;
  ModeField c = to_modes(u);
  ModeField out{g, std::vector<cplx>(c.coeffs.size())};
  const int n = g.ntheta;
  for (int j = 3; j < g.nt - 3; ++j) {
    double a = tau * varphi_prime(g.t(j));
    for (int i = 0; i < n; ++i) {
      int k = signed_mode(i, n);
      cplx d = 0;
      for (int o = 1; o <= 3; ++o) d += kD1[o] * (c(j + o, k) - c(j - o, k));
      out(j, k) = d / g.dt + (a - std::abs(k)) * c(j, k);
    }
  }
  return from_modes(out);
}

CylinderField conjugate_apply_direct(const CylinderField& u, double tau) {
  require_margin(u, "conjugate_apply");
  require_weight_domain(u.grid);
  const auto& g = u.grid;
  auto ph = phi_rows(g);
  double ref = ph[g.nt / 2];
  CylinderField w = u;
  for (int j = 0; j < g.nt; ++j) {
    double f = std::exp(tau * (ph[j] - ref));
    for (int m = 0; m < g.ntheta; ++m) w(j, m) *= f;
  }
  CylinderField lw = apply_L(w, -1);
  for (int j = 0; j < g.nt; ++j) {
    double f = std::exp(-tau * (ph[j] - ref));
    for (int m = 0; m < g.ntheta; ++m) lw(j, m) *= f;
  }
  return lw;
}

std::vector<cplx> solve_mode_low(const ModeProfile& m) {
  check_profile(m);
  const auto& g = m.grid;
  const auto& rule = cell_rule();
  Propagator P{m};
  std::vector<cplx> f(g.nt, 0);
  for (int j = 0; j + 1 < g.nt; ++j) {
    double a = g.t(j + 1);
    double e = P.exponent(a, g.t(j));
    check_cell(e);
    cplx acc = std::exp(e) * f[j];
    for (int q = 0; q < 8; ++q) {
      double s = g.t(j) + rule.x[q] * g.dt;
      acc += rule.w[q] * g.dt * std::exp(P.exponent(a, s)) * interp_g(m.g, j, rule.x[q]);
    }
    check_finite(acc);
    f[j + 1] = acc;
  }
  return f;
}

std::vector<cplx> solve_mode_high(const ModeProfile& m) {
  check_profile(m);
  const auto& g = m.grid;
  const auto& rule = cell_rule();
  Propagator P{m};
  std::vector<cplx> f(g.nt, 0);
  for (int j = g.nt - 2; j >= 0; --j) {
    double a = g.t(j);
    double e = P.exponent(a, g.t(j + 1));
    check_cell(e);
    cplx acc = std::exp(e) * f[j + 1];
    for (int q = 0; q < 8; ++q) {
      double s = g.t(j) + rule.x[q] * g.dt;
      acc -= rule.w[q] * g.dt * std::exp(P.exponent(a, s)) * interp_g(m.g, j, rule.x[q]);
    }
    check_finite(acc);
    f[j] = acc;
  }
  return f;
}

double mode_residual(const ModeProfile& m, const std::vector<cplx>& f) {
  check_profile(m);
  if (f.size() != m.g.size()) throw SizeError("solution length differs from profile");
  const auto& g = m.grid;
  double worst = 0;
  for (int j = 3; j < g.nt - 3; ++j) {
    cplx d = 0;
    for (int o = 1; o <= 3; ++o) d += kD1[o] * (f[j + o] - f[j - o]);
    cplx r = d / g.dt + (m.tau * varphi_prime(g.t(j)) - m.k) * f[j] - m.g[j];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

int ProjectorSplit::N_of_t(double t) const { return int(std::ceil(tau * varphi_prime(t))); }

ProjectorSplit make_split(double tau) {
  if (!(tau >= 1)) throw DomainError("projector split needs tau >= 1");
  return {tau, int(std::ceil(2 * tau))};
}

std::pair<CylinderField, CylinderField> split_apply(const CylinderField& v, int M) {
  if (M < 0) throw DomainError("split index must be nonnegative");
  ModeField c = to_modes(v);
  ModeField plus = c, minus = c;
  const int n = v.grid.ntheta;
  for (int j = 0; j < v.grid.nt; ++j)
    for (int i = 0; i < n; ++i) {
      int k = std::abs(signed_mode(i, n));
      (k > M ? minus : plus).coeffs[size_t(j) * n + i] = 0;
    }
  return {from_modes(plus), from_modes(minus)};
}

double support_midpoint(const CylinderField& v) {
  const auto& g = v.grid;
  int lo = -1, hi = -1;
  for (int j = 0; j < g.nt; ++j) {
    bool nz = false;
    for (int m = 0; m < g.ntheta && !nz; ++m) nz = v(j, m) != cplx(0);
    if (nz) {
      if (lo < 0) lo = j;
      hi = j;
    }
  }
  if (lo < 0) throw ZeroNormError("field has empty support");
  return 0.5 * (g.t(lo) + g.t(hi));
}

double log_kernel(int k, double tau, double s, double t) {
  return k * (t - s) + tau * (varphi(s) - varphi(t));
}

const char* kernel_branch_name(KernelBranch b) {
  switch (b) {
    case KernelBranch::HIGH: return "HIGH";
    case KernelBranch::CASE1: return "CASE1";
    case KernelBranch::CASE2: return "CASE2";
  }
  return "?";
}

KernelBound kernel_bound_check(int k, double tau, double t, double s) {
  if (!(s <= -3 && t <= -3)) throw DomainError("kernel bounds are stated for s, t <= -3");
  if (k < 0 || !(tau >= 1)) throw DomainError("kernel bounds need k >= 0 and tau >= 1");
  ProjectorSplit sp = make_split(tau);
  const int N = sp.N_of_t(t);
  const double z = s - t;
  KernelBound b;
  if (k > sp.M) {
    b.branch = KernelBranch::HIGH;
    b.lhs = z >= 0 ? std::exp(log_kernel(k, tau, s, t)) : 0.0;
    b.rhs = std::exp(-0.5 * k * std::abs(z));
  } else if (k >= N) {
    b.branch = KernelBranch::CASE1;
    b.lhs = z >= 0 ? std::exp(log_kernel(k, tau, s, t)) : 0.0;
    b.rhs = std::exp(-std::abs(k - N) * std::abs(z) - tau / (t * t) * z * z);
  } else {
    b.branch = KernelBranch::CASE2;
    b.lhs = z <= 0 ? std::exp(log_kernel(k, tau, s, t)) : 0.0;
    b.rhs = std::exp(-std::abs(N - 1 - k) * std::abs(z) - tau / (s * s) * z * z);
  }
  return b;
}

KernelScan kernel_scan(int k, double tau, double lo, double hi, int n) {
  if (n < 2 || !(lo < hi)) throw DomainError("kernel scan needs n >= 2 and lo < hi");
  KernelScan sc;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double t = lo + (hi - lo) * a / (n - 1), s = lo + (hi - lo) * b / (n - 1);
      auto kb = kernel_bound_check(k, tau, t, s);
      ++sc.points;
      if (kb.lhs > kb.rhs * (1 + 1e-12)) ++sc.violations;
      if (kb.rhs > 0) sc.worst = std::max(sc.worst, kb.lhs / kb.rhs);
    }
  return sc;
}

double exp_bound_constant(double tau, double p, double lo, double hi, int n) {
  if (!(p > 1 && p < 2)) throw DomainError("Gaussian tail bound needs 1 < p < 2");
  if (!(hi <= -3) || !(lo < hi) || n < 2) throw DomainError("scan range must satisfy lo < hi <= -3");
  const double a2 = (2 - p) / (2 * p);
  double best = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double t = lo + (hi - lo) * a / (n - 1), s = lo + (hi - lo) * b / (n - 1);
      double z = std::abs(s - t);
      best = std::max(best, std::exp(-a2 * tau * z * z / (t * t)) * (1 + std::sqrt(tau) * z) / std::abs(t));
    }
  return best;
}

YoungNorm young_norm_identity(int k, double p) {
  if (k < 1) throw DomainError("Young identity needs k >= 1");
  if (!(p > 1 && p <= 2)) throw DomainError("Young identity needs 1 < p <= 2 (sigma degenerates at p = 1)");
  YoungNorm y;
  y.sigma = 1 / (1.5 - 1 / p);
  boost::math::quadrature::exp_sinh<double> integrator;
  double half = integrator.integrate([&](double z) { return std::exp(-y.sigma * k * z / 2); });
  y.integral_value = std::pow(2 * half, 1 / y.sigma);
  y.closed_form = std::pow(4 / (y.sigma * k), 1 / y.sigma);
  y.k_exponent = -1 / y.sigma;
  y.bound_value = std::pow(4 / y.sigma, 1 / y.sigma) * std::pow(double(k), 1 / p - 1.5);
  return y;
}

PartialSums partial_sums(double p, int M, long K_max) {
  if (!(p >= 1 && p <= 2)) throw DomainError("partial sums need 1 <= p <= 2");
  if (M < 1 || K_max < 100L * M) throw DomainError("partial sums need M >= 1 and K_max >= 100 M");
  PartialSums ps;
  const double e = 2 / p - 3;
  long next = 2L * M;
  double s = 0;
  for (long k = M + 1; k <= K_max; ++k) {
    s += std::pow(double(k), e);
    if (k == next || k == K_max) {
      ps.K.push_back(double(k));
      ps.S.push_back(s);
      next *= 2;
    }
  }
  // last decade of the doubling ladder
  std::vector<double> lk, ls;
  for (size_t i = 0; i < ps.K.size(); ++i)
    if (ps.K[i] * 10 >= ps.K.back()) {
      lk.push_back(std::log(ps.K[i]));
      ls.push_back(ps.S[i]);
    }
  ps.tail_slope = linear_slope(lk, ls);
  ps.converges = ps.tail_slope < 0.05;
  return ps;
}

namespace {

WeightSpec cyl_weight(double tau, int log_power) { return {tau, log_power, -2, 0, kR0}; }

}  // namespace

VerificationRecord verify_carlpp(const CylinderField& v, double tau, double p) {
  if (!(p > 1 && p <= 2)) throw DomainError("carlpp needs 1 < p <= 2");
  if (!(tau >= 1)) throw DomainError("carlpp needs tau >= 1");
  CylinderField lv = apply_L(v, -1);
  double beta = (1 - p) / p;
  double lhs = log_weighted_norm(v, 2, cyl_weight(tau, -1));
  double rhs = log_weighted_norm(lv, p, cyl_weight(tau, 1)) + beta * std::log(tau);
  auto rec = make_record("carlpp", tau, {"t^-1 e^-tau phi v"}, {lhs}, rhs);
  rec.p = p;
  rec.q = 2;
  return rec;
}

VerificationRecord verify_car22(const CylinderField& v, double tau) {
  if (!(tau >= 1)) throw DomainError("car22 needs tau >= 1");
  CylinderField lv = apply_L(v, +1);
  auto w = cyl_weight(tau, -1);
  double a = std::log(tau) + log_weighted_norm(v, 2, w);
  double b = log_weighted_norm(d_dt(v), 2, w);
  double c = log_weighted_norm(lambda_apply(v), 2, w);
  double rhs = log_weighted_norm(lv, 2, w);
  auto rec = make_record("car22", tau, {"tau t^-1 e^-tau phi v", "t^-1 e^-tau phi d_t v", "t^-1 e^-tau phi Lambda v"},
                         {a, b, c}, rhs);
  rec.p = 2;
  rec.q = 2;
  return rec;
}

}  // namespace uclab
