#include "uclab/elliptic.hpp"

#include <Eigen/SparseLU>
#include <Eigen/Sparse>
#include <algorithm>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "uclab/errors.hpp"
#include "uclab/kernels.hpp"
#include "uclab/weight.hpp"

namespace uclab {

namespace {

constexpr double kPi = std::numbers::pi;

// Lagrange weights for the 4 nodes x0..x0+3 (unit spacing) at x
std::array<double, 4> cubic_weights(double x) {
  std::array<double, 4> w{};
  for (int j = 0; j < 4; ++j) {
    double v = 1;
    for (int k = 0; k < 4; ++k)
      if (k != j) v *= (x - k) / double(j - k);
    w[j] = v;
  }
  return w;
}

// Integral over t in (-inf, T] of a nonnegative f sampled at t0 + i dt, exponential between
// samples (exact for the power laws r^k that dominate near a ring). Below t0 the integrand is
// taken as f(t0) e^{2(t - t0)} (an r^2-area core), above the last node it is 0.
double integrate_to(const std::vector<double>& f, double t0, double dt, double T, bool area_core) {
  if (f.empty() || T < t0) {
    if (area_core && !f.empty()) return f[0] / 2 * std::exp(2 * (T - t0));
    return 0;
  }
  auto piece = [](double fa, double fb, double h) {
    if (fa > 0 && fb > 0) {
      double l = std::log(fb / fa);
      if (std::abs(l) > 1e-8) return h * (fb - fa) / l;
    }
    return 0.5 * (fa + fb) * h;
  };
  double s = area_core ? f[0] / 2 : 0;
  const int n = int(f.size());
  for (int i = 0; i + 1 < n; ++i) {
    double a = t0 + i * dt;
    if (T <= a) break;
    double frac = std::min(1.0, (T - a) / dt);
    double fb = frac == 1.0 ? f[i + 1]
                : (f[i] > 0 && f[i + 1] > 0) ? f[i] * std::pow(f[i + 1] / f[i], frac)
                                             : f[i] + frac * (f[i + 1] - f[i]);
    s += piece(f[i], fb, frac * dt);
  }
  return s;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double angular_sum(const cplx* row, int n, double p) {
  double s = 0;
  for (int m = 0; m < n; ++m) s += std::pow(std::abs(row[m]), p);
  return s * 2 * kPi / n;
}

}  // namespace

double DiskGrid::theta(int m) const { return 2 * kPi * m / ntheta; }

DiskGrid DiskGrid::make(double R, int ntheta, double r_min_over_R) {
  if (!(R > 0 && R <= 1)) throw DomainError("disk radius must lie in (0, 1]");
  if (!(r_min_over_R > 0 && r_min_over_R < 0.5)) throw DomainError("r_min / R must lie in (0, 1/2)");
  if (ntheta < 16 || (ntheta & (ntheta - 1))) throw SizeError("ntheta must be a power of two >= 16");
  DiskGrid g;
  g.R = R;
  g.ntheta = ntheta;
  g.dt = 2 * kPi / ntheta;
  g.nrings = int(std::ceil(-std::log(r_min_over_R) / g.dt - 0.5));
  return g;
}

void PotentialPair::validate() const {
  if (!(s > 2)) throw DomainError("W needs s > 2");
  if (!(t > 1)) throw DomainError("V needs t > 1");
  if (!(R > 0)) throw DomainError("potential ball radius must be positive");
  if (W.amplitude != cplx(0) && !std::isfinite(K())) throw DomainError("W power law is not in L^s");
  if (V.amplitude != cplx(0) && !std::isfinite(M())) throw DomainError("V power law is not in L^t");
}

SmoothField harmonic_monomial(int n) {
  if (n < 0) throw DomainError("monomial degree must be >= 0");
  SmoothField f;
  f.u = [n](double x, double y) { return cplx(std::pow(cplx(x, y), n).real()); };
  f.grad = [n](double x, double y) -> std::array<cplx, 2> {
    if (n == 0) return {0.0, 0.0};
    cplx d = double(n) * std::pow(cplx(x, y), n - 1);  // Re(z^n)_x = Re(n z^{n-1}), _y = -Im(n z^{n-1})
    return {d.real(), -d.imag()};
  };
  f.laplacian = [](double, double) { return cplx(0); };
  return f;
}

// ---------------------------------------------------------------- solver

DiskSolution solve_dirichlet(const DiskGrid& grid, const PotentialPair& pot, const std::function<cplx(double)>& g) {
  pot.validate();
  if (grid.nrings < 3) throw SizeError("disk grid needs at least 3 rings");
  const int N = grid.nrings, n = grid.ntheta;
  const double dt = grid.dt, dth = 2 * kPi / n;
  const double itt = 1 / (dt * dt), ith = 1 / (dth * dth);
  auto idx = [n](int i, int m) { return i * n + ((m % n) + n) % n; };

  std::vector<cplx> bd(n);
  for (int m = 0; m < n; ++m) {
    bd[m] = g(grid.theta(m));
    if (!std::isfinite(std::abs(bd[m]))) throw DomainError("boundary data must be finite");
  }

  // r^2 (Delta + W.grad + V) u = u_tt + u_thth + A_W r^{1-a_W} u_t + A_V r^{2-a_V} u
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(size_t(N) * n * 5);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(N * n);
  for (int i = 0; i < N; ++i) {
    double r = grid.r(i);
    cplx bw = pot.W.amplitude == cplx(0) ? cplx(0) : pot.W.amplitude * std::pow(r, 1 - pot.W.exponent);
    cplx cv = pot.V.amplitude == cplx(0) ? cplx(0) : pot.V.amplitude * std::pow(r, 2 - pot.V.exponent);
    cplx up = itt + bw / (2 * dt), dn = itt - bw / (2 * dt);
    for (int m = 0; m < n; ++m) {
      int row = idx(i, m);
      cplx diag = -2 * itt - 2 * ith + cv;
      if (i == 0)
        diag += dn;  // zero-flux core: ghost u_{-1} = u_0
      else
        trip.emplace_back(row, idx(i - 1, m), dn);
      if (i + 1 < N)
        trip.emplace_back(row, idx(i + 1, m), up);
      else
        b[row] -= up * bd[m];
      trip.emplace_back(row, idx(i, m - 1), ith);
      trip.emplace_back(row, idx(i, m + 1), ith);
      trip.emplace_back(row, row, diag);
    }
  }
  Eigen::SparseMatrix<cplx> A(N * n, N * n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw ResonanceError("sparse LU failed: system is singular to working precision");

  // Hager-Higham 1-norm estimate of ||A^{-1}||_1
  double norm1 = 0;
  for (int k = 0; k < A.outerSize(); ++k) {
    double c = 0;
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(A, k); it; ++it) c += std::abs(it.value());
    norm1 = std::max(norm1, c);
  }
  Eigen::VectorXcd x = Eigen::VectorXcd::Constant(N * n, 1.0 / (N * n));
  double inv_est = 0;
  for (int it = 0; it < 5; ++it) {
    Eigen::VectorXcd y = lu.solve(x);
    double est = y.lpNorm<1>();
    if (est <= inv_est) break;
    inv_est = est;
    Eigen::VectorXcd xi(y.size());
    for (int j = 0; j < y.size(); ++j) xi[j] = std::abs(y[j]) > 0 ? y[j] / std::abs(y[j]) : cplx(1);
    Eigen::VectorXcd z = lu.adjoint().solve(xi);
    int jmax = 0;
    z.cwiseAbs().maxCoeff(&jmax);
    x.setZero();
    x[jmax] = 1;
  }
  double cond = norm1 * inv_est;
  if (!(cond < 1e14)) throw ResonanceError("near-singular system, condition estimate " + sci(cond));

  Eigen::VectorXcd u = lu.solve(b);
  double bn = b.norm();
  double res = bn > 0 ? (A * u - b).norm() / bn : (A * u - b).norm();
  if (!std::isfinite(res) || res > 1e-10) throw SolveError("sparse solve residual " + sci(res));

  DiskSolution sol;
  sol.grid = grid;
  sol.values.assign(size_t(N + 1) * n, 0);
  for (int k = 0; k < N * n; ++k) sol.values[k] = u[k];
  for (int m = 0; m < n; ++m) sol.values[size_t(N) * n + m] = bd[m];
  sol.residual = res;
  sol.condition_estimate = cond;
  return sol;
}

double max_error(const DiskSolution& u, const std::function<cplx(double, double)>& exact_polar) {
  double e = 0;
  for (int i = 0; i <= u.grid.nrings; ++i)
    for (int m = 0; m < u.grid.ntheta; ++m)
      e = std::max(e, std::abs(u(i, m) - exact_polar(u.grid.r(i), u.grid.theta(m))));
  return e;
}

// ---------------------------------------------------------------- sampling

const std::vector<cplx>& DiskSolution::modes() const {
  if (modes_.empty()) {
    kernels::DftTable tab(grid.ntheta);
    modes_.resize(values.size());
    kernels::analyze_rows(tab, values.data(), modes_.data(), grid.nrings + 1);
  }
  return modes_;
}

cplx DiskSolution::eval(double x, double y) const {
  const double r = std::hypot(x, y);
  if (r > grid.R * (1 + 1e-12)) throw GeometryError("evaluation point outside the disk");
  const auto& c = modes();
  const int n = grid.ntheta, nr = grid.nrings + 1;
  double th = std::atan2(y, x);
  double s = r > 0 ? std::clamp((std::log(r) - grid.t(0)) / grid.dt, 0.0, double(nr - 1)) : 0.0;
  int i0 = std::clamp(int(std::floor(s)) - 1, 0, nr - 4);
  auto w = cubic_weights(s - i0);
  cplx out = 0;
  const double norm = 1 / std::sqrt(2 * kPi);
  for (int j = 0; j < 4; ++j) {
    const cplx* row = c.data() + size_t(i0 + j) * n;
    cplx v = 0;
    for (int k = -n / 2; k < n / 2; ++k) v += row[((k % n) + n) % n] * std::polar(norm, k * th);
    out += w[j] * v;
  }
  return out;
}

double DiskSolution::sup_norm(double rho, double cx, double cy) const {
  if (!(rho > 0)) throw DomainError("ball radius must be positive");
  if (std::hypot(cx, cy) + rho > grid.R * (1 + 1e-12)) throw GeometryError("ball leaves the disk");
  const int n = grid.ntheta;
  double best = 0;
  if (cx == 0 && cy == 0) {
    const auto& c = modes();
    const int fine = 4 * n;
    kernels::DftTable tab(fine);
    std::vector<cplx> buf(fine);
    for (int i = 0; i <= grid.nrings && grid.r(i) <= rho * (1 + 1e-12); ++i) {
      kernels::synthesize_rows_fine(tab, n, c.data() + size_t(i) * n, buf.data(), 1);
      for (auto z : buf) best = std::max(best, std::abs(z));
    }
    for (int m = 0; m < fine; ++m) {
      double th = 2 * kPi * m / fine;
      best = std::max(best, std::abs(eval(rho * std::cos(th), rho * std::sin(th))));
    }
    return best;
  }
  const int J = 48, A = 4 * n;
  best = std::abs(eval(cx, cy));
  for (int j = 1; j <= J; ++j) {
    double rr = rho * j / J;
    for (int m = 0; m < A; ++m) {
      double th = 2 * kPi * m / A;
      best = std::max(best, std::abs(eval(cx + rr * std::cos(th), cy + rr * std::sin(th))));
    }
  }
  return best;
}

double DiskSolution::l2_norm(double rho) const {
  if (!(rho > 0 && rho <= grid.R * (1 + 1e-12))) throw DomainError("ball radius must lie in (0, R]");
  const int n = grid.ntheta;
  std::vector<double> f(grid.nrings + 1);
  for (int i = 0; i <= grid.nrings; ++i) f[i] = angular_sum(values.data() + size_t(i) * n, n, 2) * std::exp(2 * grid.t(i));
  return std::sqrt(integrate_to(f, grid.t(0), grid.dt, std::log(rho), true));
}

double DiskSolution::grad_l2_sq(double rho) const {
  if (!(rho > 0 && rho <= grid.R * (1 + 1e-12))) throw DomainError("ball radius must lie in (0, R]");
  // conformal: |grad u|^2 dx = (|u_t|^2 + |u_theta|^2) dt dtheta
  const int n = grid.ntheta, nr = grid.nrings + 1;
  const auto& c = modes();
  kernels::DftTable tab(n);
  std::vector<cplx> dc(n), dth(n);
  std::vector<double> ang(nr), rad(nr - 1);
  for (int i = 0; i < nr; ++i) {
    for (int k = -n / 2; k < n / 2; ++k) {
      int j = ((k % n) + n) % n;
      dc[j] = cplx(0, k) * c[size_t(i) * n + j];
    }
    dc[n / 2] = 0;  // drop the unpaired Nyquist mode
    kernels::synthesize_rows(tab, dc.data(), dth.data(), 1);
    ang[i] = angular_sum(dth.data(), n, 2);
  }
  for (int i = 0; i + 1 < nr; ++i) {
    double s = 0;
    for (int m = 0; m < n; ++m) s += std::norm(values[size_t(i + 1) * n + m] - values[size_t(i) * n + m]);
    rad[i] = s * 2 * kPi / n / (grid.dt * grid.dt);
  }
  double T = std::log(rho);
  // theta part on ring nodes, t part on half-ring nodes
  return integrate_to(ang, grid.t(0), grid.dt, T, false) + integrate_to(rad, grid.t(0) + grid.dt / 2, grid.dt, T, false);
}

// ---------------------------------------------------------------- checks

VanishingFit vanishing_order_fit(const DiskSolution& u, const std::vector<double>& radii, double cx, double cy) {
  if (radii.size() < 2) throw SizeError("vanishing-order fit needs at least two radii");
  VanishingFit f;
  f.radii = radii;
  for (double r : radii) {
    double s = u.sup_norm(r, cx, cy);
    if (!(s > std::numeric_limits<double>::min()) || !std::isfinite(s))
      throw DegenerateError("sup-norm underflow at r = " + std::to_string(r));
    f.sups.push_back(s);
  }
  f.order = loglog_slope(radii, f.sups);
  // intercept and RMS misfit
  double mx = 0, my = 0;
  for (size_t i = 0; i < radii.size(); ++i) mx += std::log(radii[i]), my += std::log(f.sups[i]);
  mx /= radii.size();
  my /= radii.size();
  double ss = 0;
  for (size_t i = 0; i < radii.size(); ++i) {
    double e = std::log(f.sups[i]) - (my + f.order * (std::log(radii[i]) - mx));
    ss += e * e;
  }
  f.residual = std::sqrt(ss / radii.size());
  return f;
}

ThreeBallRecord three_ball_check(const DiskSolution& u, double r0, double r1, double R1, const PotentialPair& pot,
                                 const PotentialRegularity& reg, const EmpiricalConstants& ec, double cx, double cy) {
  ThreeBallRecord rec;
  rec.r0 = r0;
  rec.r1 = r1;
  rec.R1 = R1;
  rec.k0 = k_zero(r0, r1, R1);
  rec.K = pot.K();
  rec.M = pot.M();
  rec.F_r0 = f_delta(r0, rec.K, rec.M, reg);
  rec.F_r1 = f_delta(r1, rec.K, rec.M, reg);
  rec.F_R1 = f_delta(R1, rec.K, rec.M, reg);
  rec.lhs = u.sup_norm(0.75 * r1, cx, cy);
  rec.sup_small = u.sup_norm(2 * r0, cx, cy);
  rec.sup_large = u.sup_norm(R1, cx, cy);
  const double l0 = std::abs(std::log(r0)), l1 = std::abs(std::log(r1)), lR = std::abs(std::log(R1));
  if (!(rec.sup_small > 0 && rec.sup_large > 0)) throw DegenerateError("three-ball check needs u nonzero on B_2r0");
  rec.log_term_interp = std::log(rec.F_r1 * l1) + rec.k0 * std::log((rec.K + l0) * rec.F_r0 * rec.sup_small) +
                        (1 - rec.k0) * std::log((rec.K + lR) * rec.F_R1 * rec.sup_large);
  double tau = 1 + ec.C1 * std::pow(rec.K, kappa(reg)) + ec.C2 * std::pow(rec.M, mu_full(reg));
  // 1 + |log r0| / K is unbounded as K -> 0; K is floored at 1 there
  rec.log_term_exp = std::log(rec.F_r1 * (R1 / r1) * (1 + l0 / std::max(rec.K, 1.0)) * rec.sup_small) +
                     tau * (phi(R1 / 2) - phi(r0));
  double hi = std::max(rec.log_term_interp, rec.log_term_exp);
  double log_rhs = hi + std::log(std::exp(rec.log_term_interp - hi) + std::exp(rec.log_term_exp - hi));
  rec.term_interp = std::exp(rec.log_term_interp);
  rec.term_exp = std::exp(rec.log_term_exp);
  rec.log_ratio = std::log(rec.lhs) - log_rhs;
  rec.ratio = std::exp(rec.log_ratio);
  return rec;
}

EmpiricalConstants empirical_constants(const PotentialRegularity& reg, double C, double tau_star) {
  reg.validate();
  if (!(C > 0 && tau_star > 1)) throw DomainError("empirical constants need C > 0 and tau* > 1");
  const double aw = 0.3, av = std::min(0.3, 1 / reg.t);
  const double K = PowerLaw{threshold_amplitude_W(reg, aw, C, tau_star), aw}.norm(reg.s, kR0);
  const double M = PowerLaw{threshold_amplitude_V(reg, av, C, tau_star), av}.norm(reg.t, kR0);
  return {tau_star / std::pow(K, kappa(reg)), tau_star / std::pow(M, mu_full(reg))};
}

namespace {

// ||P 1_{|P| > level}||_{L^q(B_R)} for P = A r^{-a}
double truncated_norm(const PowerLaw& P, double level, double q, double R) {
  double A = std::abs(P.amplitude);
  if (A == 0) return 0;
  if (P.exponent == 0) return A > level ? P.norm(q, R) : 0.0;
  double rc = std::min(R, std::pow(A / level, 1 / P.exponent));
  return rc > 0 ? P.norm(q, rc) : 0.0;
}

}  // namespace

CaccioppoliRecord caccioppoli_check(const DiskSolution& u, double r, double R, const PotentialPair& pot, double delta) {
  if (!(0 < r && r < R && R <= u.grid.R * (1 + 1e-12))) throw DomainError("Caccioppoli needs 0 < r < R <= disk radius");
  if (!(delta > 0)) throw DomainError("delta must be positive");
  pot.validate();
  CaccioppoliRecord rec;
  rec.r = r;
  rec.R = R;
  const double s = pot.s, t = pot.t;
  const double K = pot.W.norm(s, R), M = pot.V.norm(t, R);
  rec.lhs = u.grad_l2_sq(r);
  double ul = u.l2_norm(R);
  rec.u_l2_sq = ul * ul;
  // t/(t-1) -> 1 and 2s/(s-2) -> 2 at infinity
  const double em = (std::isinf(t) ? 1.0 : t / (t - 1)) + delta;
  const double ek = (std::isinf(s) ? 2.0 : 2 * s / (s - 2)) + delta;
  rec.bracket = 1 / ((R - r) * (R - r)) + std::pow(M, em) + std::pow(K, ek);
  rec.ratio = rec.u_l2_sq > 0 ? rec.lhs / (rec.bracket * rec.u_l2_sq) : std::numeric_limits<double>::quiet_NaN();
  rec.prefactor = rec.u_l2_sq > 0 ? rec.lhs / rec.u_l2_sq - 1 / ((R - r) * (R - r)) : 0;

  if (std::isfinite(t)) {
    double d0 = delta * (t - 1) * (t - 1) / (t + delta * (t - 1));
    rec.q_V = 1 + d0;
    if (rec.q_V < t && M > 0) {
      rec.M0 = std::pow(M, 2 * t / (t - rec.q_V));
      rec.who_lhs = truncated_norm(pot.V, std::sqrt(rec.M0), rec.q_V, R);
      rec.who_rhs = std::pow(rec.M0, -(t - rec.q_V) / (2 * rec.q_V)) * std::pow(M, t / rec.q_V);
    }
  }
  if (std::isfinite(s)) {
    double e0 = delta * (s - 2) * (s - 2) / (2 * s + delta * (s - 2));
    rec.q_W = 2 + e0;
    if (rec.q_W < s && K > 0) {
      rec.K0 = std::pow(K, 2 * s / (s - rec.q_W));
      rec.mmo_lhs = truncated_norm(pot.W, std::sqrt(rec.K0), rec.q_W, R);
      rec.mmo_rhs = std::pow(rec.K0, -(s - rec.q_W) / (2 * rec.q_W)) * std::pow(K, s / rec.q_W);
    }
  }
  return rec;
}

RegularityRecord regularity_sup_check(const DiskSolution& u, double r, const PotentialPair& pot,
                                      const PotentialRegularity& reg) {
  if (!(r > 0 && 2 * r <= u.grid.R * (1 + 1e-12))) throw GeometryError("B_{2r} must lie inside the disk");
  RegularityRecord rec;
  rec.r = r;
  rec.F = f_delta(r, pot.K(), pot.M(), reg);
  rec.lhs = u.sup_norm(r);
  rec.rhs = rec.F / r * u.l2_norm(2 * r);
  rec.ratio = rec.rhs > 0 ? rec.lhs / rec.rhs : std::numeric_limits<double>::quiet_NaN();
  return rec;
}

PotentialPair scale_potentials(const PotentialPair& pot, double R_scale) {
  if (!(R_scale > 0)) throw DomainError("scale must be positive");
  PotentialPair out = pot;
  out.W.amplitude = pot.W.amplitude * std::pow(R_scale, 1 - pot.W.exponent);
  out.V.amplitude = pot.V.amplitude * std::pow(R_scale, 2 - pot.V.exponent);
  out.R = pot.R / R_scale;
  return out;
}

cplx equation_residual(const PotentialPair& pot, const SmoothField& u, double x, double y) {
  double r = std::hypot(x, y);
  if (r == 0) throw GeometryError("potentials are singular at the origin");
  auto g = u.grad(x, y);
  cplx w = pot.W.at(r);
  return u.laplacian(x, y) + w * (x / r * g[0] + y / r * g[1]) + pot.V.at(r) * u.u(x, y);
}

ScalingCheck check_scaling(const PotentialPair& pot, double R_scale, const SmoothField& u,
                           const std::vector<std::array<double, 2>>& points, double h) {
  PotentialPair sc = scale_potentials(pot, R_scale);
  ScalingCheck out;
  double kw = sc.W.norm(sc.s, sc.R), kw0 = pot.W.norm(pot.s, pot.R);
  double mv = sc.V.norm(sc.t, sc.R), mv0 = pot.V.norm(pot.t, pot.R);
  if (kw > 0) out.W_identity_error = std::abs(kw - std::pow(R_scale, 1 - 2 / pot.s) * kw0) / kw;
  if (mv > 0) out.V_identity_error = std::abs(mv - std::pow(R_scale, 2 - 2 / pot.t) * mv0) / mv;
  auto uR = [&](double x, double y) { return u.u(R_scale * x, R_scale * y); };
  for (auto [x, y] : points) {
    // derivatives of u_R by central differences
    cplx c = uR(x, y);
    cplx ux = (uR(x + h, y) - uR(x - h, y)) / (2 * h), uy = (uR(x, y + h) - uR(x, y - h)) / (2 * h);
    cplx lap = (uR(x + h, y) + uR(x - h, y) + uR(x, y + h) + uR(x, y - h) - 4.0 * c) / (h * h);
    double r = std::hypot(x, y);
    cplx lhs = lap + sc.W.at(r) * (x / r * ux + y / r * uy) + sc.V.at(r) * c;
    cplx rhs = R_scale * R_scale * equation_residual(pot, u, R_scale * x, R_scale * y);
    double scale = std::max({std::abs(rhs), std::abs(lap), std::abs(sc.V.at(r) * c), 1e-300});
    out.residual_identity_error = std::max(out.residual_identity_error, std::abs(lhs - rhs) / scale);
  }
  return out;
}

ChainRecord propagation_chain(const DiskSolution& u, double r, const std::vector<std::array<double, 2>>& path,
                              const PotentialPair& pot, const PotentialRegularity& reg, const EmpiricalConstants& ec) {
  if (path.empty()) throw DomainError("chain needs at least one center");
  if (!(r > 0)) throw DomainError("chain radius must be positive");
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    double d = std::hypot(path[i + 1][0] - path[i][0], path[i + 1][1] - path[i][1]);
    if (d > 2 * r * (1 + 1e-12))
      throw GeometryError("centers " + std::to_string(i) + " and " + std::to_string(i + 1) +
                          " are more than 2r apart: B_r(x_{i+1}) is not inside B_3r(x_i)");
  }
  for (auto& c : path)
    if (std::hypot(c[0], c[1]) + 10 * r > u.grid.R * (1 + 1e-12)) throw GeometryError("B_10r leaves the disk");

  ChainRecord rec;
  rec.r = r;
  double Cmax = 0;
  for (auto& c : path) {
    ChainStep st;
    st.cx = c[0];
    st.cy = c[1];
    st.ball = three_ball_check(u, r / 2, 4 * r, 10 * r, pot, reg, ec, c[0], c[1]);
    Cmax = std::max(Cmax, st.ball.ratio);
    rec.steps.push_back(st);
  }
  rec.ell = rec.steps.front().ball.sup_small;
  rec.target = rec.steps.back().ball.lhs;

  // one application: bound on ||u||_{B_3r(x_i)} from a bound m on ||u||_{B_r(x_i)}
  auto apply = [&](const ThreeBallRecord& b, double m) {
    double a = std::exp(b.log_term_interp - b.k0 * std::log(b.sup_small));
    double e = std::exp(b.log_term_exp - std::log(b.sup_small));
    return Cmax * (a * std::pow(m, b.k0) + e * m);
  };
  auto compose = [&](double ell) {
    double m = ell;
    for (auto& st : rec.steps) m = apply(st.ball, m);
    return m;
  };
  double m = rec.ell;
  for (auto& st : rec.steps) {
    m = apply(st.ball, m);
    st.bound = m;
  }
  // smallest ell whose composed bound still reaches the target
  if (compose(rec.ell) < rec.target * (1 - 1e-12)) {
    rec.ell_lower = std::numeric_limits<double>::infinity();
  } else {
    auto f = [&](double le) { return compose(std::exp(le)) - rec.target; };
    double lo = std::log(rec.ell) - 700, hi = std::log(rec.ell);
    if (f(lo) >= 0) {
      rec.ell_lower = std::exp(lo);
    } else {
      boost::math::tools::eps_tolerance<double> tol(50);
      auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol);
      rec.ell_lower = std::exp(b);
    }
  }
  rec.consistent = rec.ell_lower <= rec.ell * (1 + 1e-9);
  return rec;
}

// ---------------------------------------------------------------- ladders

CaccioppoliLadder caccioppoli_M_ladder(const std::vector<double>& M, int ntheta, double delta) {
  if (M.size() < 2) throw SizeError("ladder needs at least two rungs");
  CaccioppoliLadder out;
  out.delta = delta;
  out.expected = 1 + delta;
  const DiskGrid grid = DiskGrid::make(1, ntheta);
  std::vector<double> xs, ys;
  for (double m : M) {
    if (!(m > 0)) throw DomainError("ladder amplitudes must be positive");
    PotentialPair pot;
    pot.t = std::numeric_limits<double>::infinity();
    pot.R = 1;
    pot.V = {m, 0};
    auto u = solve_dirichlet(grid, pot, [](double th) { return cplx(1 + 0.5 * std::cos(th) + 0.3 * std::sin(3 * th)); });
    auto rec = caccioppoli_check(u, 0.5, 0.9, pot, delta);
    out.M.push_back(m);
    out.prefactor.push_back(rec.prefactor);
    out.ratio.push_back(rec.ratio);
    if (rec.prefactor > 0) {
      xs.push_back(m);
      ys.push_back(rec.prefactor);
    }
  }
  out.used = int(xs.size());
  out.exponent = out.used >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

OrderLadder vanishing_M_ladder(const std::vector<double>& M, int ntheta, int n, double mu, double ang) {
  if (M.size() < 3) throw SizeError("ladder needs two fitting rungs and at least one check rung");
  if (n < 1) throw DomainError("trace degree must be >= 1");
  OrderLadder out;
  out.mu = mu;
  const DiskGrid grid = DiskGrid::make(1, ntheta);
  const std::vector<double> radii{0.1, 0.2, 0.4, 0.8};
  for (double m : M) {
    PotentialPair pot;
    pot.t = std::numeric_limits<double>::infinity();
    pot.R = 1;
    pot.V = {std::polar(m, ang), 0};
    auto u = solve_dirichlet(grid, pot, [n](double th) { return std::polar(1.0, n * th) + 0.1 * std::polar(1.0, (n + 1) * th); });
    out.M.push_back(m);
    out.order.push_back(vanishing_order_fit(u, radii).order);
  }
  // order = C + C C2 M^mu through the first two rungs, slope clamped at 0
  double x0 = std::pow(M[0], mu), x1 = std::pow(M[1], mu);
  double b = (out.order[1] - out.order[0]) / (x1 - x0);
  if (b <= 0) {
    out.C = std::max(out.order[0], out.order[1]);
    out.C2 = 0;
  } else {
    out.C = out.order[0] - b * x0;
    if (out.C <= 0) throw NumericalError("order ladder fit gives a non-positive constant");
    out.C2 = b / out.C;
  }
  out.holds = true;
  for (size_t i = 0; i < M.size(); ++i) {
    out.bound.push_back(out.C * (1 + out.C2 * std::pow(M[i], mu)));
    if (i >= 2 && out.order[i] > out.bound[i]) out.holds = false;
  }
  return out;
}

// ---------------------------------------------------------------- cutoff

namespace {
double smooth5(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * x * (10 - 15 * x + 6 * x * x);
}
double smooth5_d1(double x) { return x <= 0 || x >= 1 ? 0 : 30 * x * x * (1 - x) * (1 - x); }
double smooth5_d2(double x) { return x <= 0 || x >= 1 ? 0 : 60 * x * (1 - x) * (1 - 2 * x); }
}  // namespace

void CutoffProfile::validate() const {
  if (!(a >= 0 && b > a && w_in >= 0 && w_out > 0)) throw DomainError("cutoff needs 0 <= a < b and positive outer width");
  if (w_in > a) throw DomainError("inner transition must not reach the origin");
  if (a > 0 && !(w_in > 0)) throw DomainError("inner plateau edge needs a positive width");
}

double CutoffProfile::value(double r) const {
  if (r >= a && r <= b) return 1;
  if (r > b) return 1 - smooth5((r - b) / w_out);
  return smooth5((r - (a - w_in)) / w_in);
}

double CutoffProfile::d1(double r) const {
  if (r > b) return -smooth5_d1((r - b) / w_out) / w_out;
  if (r < a) return smooth5_d1((r - (a - w_in)) / w_in) / w_in;
  return 0;
}

double CutoffProfile::d2(double r) const {
  if (r > b) return -smooth5_d2((r - b) / w_out) / (w_out * w_out);
  if (r < a) return smooth5_d2((r - (a - w_in)) / w_in) / (w_in * w_in);
  return 0;
}

double CutoffProfile::hess_bound() const {
  // eigenvalues of D^2 eta are eta'' and eta'/r
  double h = std::max(kC2 / (w_out * w_out), kC1 / (w_out * b));
  if (a > 0) h = std::max({h, kC2 / (w_in * w_in), kC1 / (w_in * (a - w_in))});
  return h;
}

// ---------------------------------------------------------------- corpus

cplx LabCase::g(double theta) const {
  cplx v = 0;
  for (auto& [k, a] : trace) v += a * std::polar(1.0, k * theta);
  return v;
}

std::vector<LabCase> generate_lab_corpus(std::uint64_t seed, int n, double R) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<LabCase> out;
  for (int i = 0; i < n; ++i) {
    LabCase c;
    c.id = "lab" + std::to_string(i);
    c.seed = rng();
    std::mt19937_64 local(c.seed);
    c.reg = {4, 1.5, 0.1, 0.1};
    c.pot.s = c.reg.s;
    c.pot.t = c.reg.t;
    c.pot.R = R;
    // r|W| and r^2|V| at r = R of order one; exponents inside the Lebesgue classes
    double aw = 0.45 * U(local), av = 1.2 * U(local);
    double w_edge = 0.2 + 1.8 * U(local), v_edge = 0.5 + 4.5 * U(local);
    c.pot.W = {std::polar(w_edge * std::pow(R, aw - 1), 2 * kPi * U(local)), aw};
    c.pot.V = {std::polar(v_edge * std::pow(R, av - 2), 2 * kPi * U(local)), av};
    c.trace.emplace_back(0, cplx(1));
    int nm = 1 + int(3 * U(local));
    for (int m = 0; m < nm; ++m) c.trace.emplace_back(1 + int(6 * U(local)), std::polar(0.5 * U(local), 2 * kPi * U(local)));
    out.push_back(std::move(c));
  }
  return out;
}

std::string lab_manifest_text(const std::vector<LabCase>& corpus) {
  std::ostringstream os;
  os << "# uclab lab corpus manifest v1\n# id seed R s t eps delta W(re:im:a) V(re:im:a) trace(k:re:im;...)\n";
  os.precision(17);
  for (auto& c : corpus) {
    os << c.id << ' ' << c.seed << ' ' << c.pot.R << ' ' << c.reg.s << ' ' << c.reg.t << ' ' << c.reg.eps << ' '
       << c.reg.delta << ' ' << c.pot.W.amplitude.real() << ':' << c.pot.W.amplitude.imag() << ':' << c.pot.W.exponent
       << ' ' << c.pot.V.amplitude.real() << ':' << c.pot.V.amplitude.imag() << ':' << c.pot.V.exponent << ' ';
    for (size_t i = 0; i < c.trace.size(); ++i)
      os << (i ? ";" : "") << c.trace[i].first << ':' << c.trace[i].second.real() << ':' << c.trace[i].second.imag();
    os << '\n';
  }
  return os.str();
}

std::vector<LabCase> read_lab_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SpecError("cannot open lab manifest " + path);
  std::vector<LabCase> out;
  std::string line;
  auto triple = [](const std::string& tok) {
    std::array<double, 3> v{};
    std::istringstream ts(tok);
    std::string part;
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(ts, part, ':')) throw SpecError("malformed lab manifest field " + tok);
      v[i] = std::stod(part);
    }
    return v;
  };
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    LabCase c;
    std::string w, v, tr;
    double R = 0;
    if (!(ls >> c.id >> c.seed >> R >> c.reg.s >> c.reg.t >> c.reg.eps >> c.reg.delta >> w >> v >> tr))
      throw SpecError("malformed lab manifest line: " + line);
    c.pot.R = R;
    c.pot.s = c.reg.s;
    c.pot.t = c.reg.t;
    auto wt = triple(w), vt = triple(v);
    c.pot.W = {cplx(wt[0], wt[1]), wt[2]};
    c.pot.V = {cplx(vt[0], vt[1]), vt[2]};
    std::istringstream ts(tr);
    std::string mode;
    while (std::getline(ts, mode, ';')) {
      auto m = triple(mode);
      c.trace.emplace_back(int(m[0]), cplx(m[1], m[2]));
    }
    c.reg.validate();
    c.pot.validate();
    out.push_back(std::move(c));
  }
  if (out.empty()) throw SpecError("lab manifest " + path + " has no cases");
  return out;
}

}  // namespace uclab
