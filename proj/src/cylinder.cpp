#include "uclab/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "uclab/circle.hpp"
#include "uclab/errors.hpp"
#include "uclab/kernels.hpp"

namespace uclab {

namespace {

constexpr double kD1[4] = {0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
constexpr double kD2[4] = {-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
constexpr int kHalf = 3;
constexpr double kMarginTol = 1e-13;
constexpr double kGeomTol = 1e-9;

double row_max(const cplx* row, int n) {
  double m = 0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(row[i]));
  return m;
}

// Lagrange weights on 6 nodes around x.
void lagrange6(const std::vector<double>& xs, double x, int& i0, double w[6]) {
  const int n = int(xs.size());
  int idx = int(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
  i0 = std::clamp(idx - 2, 0, std::max(0, n - 6));
  for (int a = 0; a < 6; ++a) {
    double l = 1;
    for (int b = 0; b < 6; ++b)
      if (b != a) l *= (x - xs[i0 + b]) / (xs[i0 + a] - xs[i0 + b]);
    w[a] = l;
  }
}

void interpolate_rows(const std::vector<double>& xs, const std::vector<cplx>& src, int ntheta,
                      const std::vector<double>& targets, std::vector<cplx>& dst) {
  if (xs.size() < 6) throw SizeError("interpolation needs at least 6 radial nodes");
  dst.assign(targets.size() * ntheta, 0);
  for (size_t j = 0; j < targets.size(); ++j) {
    double x = targets[j];
    if (x < xs.front() || x > xs.back()) continue;  // outside support: zero
    int i0;
    double w[6];
    lagrange6(xs, x, i0, w);
    for (int a = 0; a < 6; ++a)
      for (int m = 0; m < ntheta; ++m) dst[j * ntheta + m] += w[a] * src[size_t(i0 + a) * ntheta + m];
  }
}

void require_radial_margin(const DiskFunction& u) {
  const int nr = int(u.r.size());
  double mx = 0;
  for (auto z : u.values) mx = std::max(mx, std::abs(z));
  for (int i : {0, 1, 2, nr - 3, nr - 2, nr - 1})
    if (row_max(&u.values[size_t(i) * u.ntheta], u.ntheta) > kMarginTol * mx)
      throw SupportError("disk function support touches the radial grid edge");
}

CylinderField stencil(const CylinderField& v, const double* c, bool odd, int power) {
  CylinderField out(v.grid);
  const int nt = v.grid.nt, n = v.grid.ntheta;
  const double scale = std::pow(v.grid.dt, -power);
  for (int j = kHalf; j < nt - kHalf; ++j) {
    for (int m = 0; m < n; ++m) {
      cplx acc = c[0] * v(j, m);
      for (int s = 1; s <= kHalf; ++s) {
        if (odd)
          acc += c[s] * (v(j + s, m) - v(j - s, m));
        else
          acc += c[s] * (v(j + s, m) + v(j - s, m));
      }
      out(j, m) = acc * scale;
    }
  }
  return out;
}

CylinderField mode_multiply(const CylinderField& v, const std::function<cplx(int)>& mult) {
  ModeField c = to_modes(v);
  const int n = v.grid.ntheta;
  std::vector<cplx> factor(n);
  for (int idx = 0; idx < n; ++idx) factor[idx] = mult(idx < n / 2 ? idx : idx - n);
  for (int j = 0; j < v.grid.nt; ++j)
    for (int idx = 0; idx < n; ++idx) c.coeffs[size_t(j) * n + idx] *= factor[idx];
  return from_modes(c);
}

CylinderField combine(const CylinderField& a, double sa, const CylinderField& b, double sb) {
  CylinderField out(a.grid);
  for (size_t i = 0; i < a.values.size(); ++i) out.values[i] = sa * a.values[i] + sb * b.values[i];
  return out;
}

struct RowWeights {
  std::vector<double> log_w, q;
  double shift = -std::numeric_limits<double>::infinity();
};

}  // namespace

double CylinderGrid::theta(int m) const { return 2 * std::numbers::pi * m / ntheta; }

CylinderGrid CylinderGrid::spanning(double t_lo, double t_hi, double dt_target, int ntheta) {
  if (!(t_hi > t_lo) || !(dt_target > 0)) throw DomainError("CylinderGrid::spanning: bad range");
  CylinderGrid g;
  g.nt = int(std::ceil((t_hi - t_lo) / dt_target)) + 1;
  g.dt = (t_hi - t_lo) / (g.nt - 1);
  g.t_min = t_lo;
  g.ntheta = ntheta;
  return g;
}

CylinderField::CylinderField(const CylinderGrid& g) : grid(g), values(size_t(g.nt) * g.ntheta) {
  check_circle_size(g.ntheta);
}

CylinderField CylinderField::from(const CylinderGrid& g, const std::function<cplx(double, double)>& f) {
  CylinderField v(g);
  for (int j = 0; j < g.nt; ++j)
    for (int m = 0; m < g.ntheta; ++m) v(j, m) = f(g.t(j), g.theta(m));
  return v;
}

double CylinderField::max_abs() const {
  double m = 0;
  for (auto z : values) m = std::max(m, std::abs(z));
  return m;
}

bool CylinderField::has_margin(int rows) const {
  const double tol = kMarginTol * max_abs();
  for (int j = 0; j < rows; ++j) {
    if (row_max(row(j), grid.ntheta) > tol) return false;
    if (row_max(row(grid.nt - 1 - j), grid.ntheta) > tol) return false;
  }
  return true;
}

ModeField to_modes(const CylinderField& v) {
  ModeField c{v.grid, std::vector<cplx>(v.values.size())};
  kernels::DftTable tab(v.grid.ntheta);
  kernels::analyze_rows(tab, v.values.data(), c.coeffs.data(), v.grid.nt);
  return c;
}

CylinderField from_modes(const ModeField& c) {
  CylinderField v(c.grid);
  kernels::DftTable tab(c.grid.ntheta);
  kernels::synthesize_rows(tab, c.coeffs.data(), v.values.data(), c.grid.nt);
  return v;
}

DiskFunction DiskFunction::from(const std::vector<double>& r, int ntheta,
                                const std::function<cplx(double, double)>& f) {
  check_circle_size(ntheta);
  DiskFunction u;
  u.r = r;
  u.ntheta = ntheta;
  u.values.resize(r.size() * ntheta);
  for (size_t i = 0; i < r.size(); ++i)
    for (int m = 0; m < ntheta; ++m) u(int(i), m) = f(r[i], 2 * std::numbers::pi * m / ntheta);
  return u;
}

CylinderField to_cylinder(const DiskFunction& u) {
  const int nr = int(u.r.size());
  if (nr < 7) throw SizeError("to_cylinder: too few radii");
  double t0 = std::log(u.r.front());
  double dt = (std::log(u.r.back()) - t0) / (nr - 1);
  bool geometric = true;
  for (int i = 0; i < nr && geometric; ++i)
    geometric = std::abs(std::log(u.r[i]) - (t0 + i * dt)) <= kGeomTol * std::max(1.0, std::abs(t0));
  if (!geometric) throw DomainError("to_cylinder: radii are not geometric; pass a target grid");
  require_radial_margin(u);
  CylinderGrid g{t0, dt, nr, u.ntheta};
  CylinderField v(g);
  v.values = u.values;
  return v;
}

CylinderField to_cylinder(const DiskFunction& u, const CylinderGrid& grid) {
  require_radial_margin(u);
  if (grid.ntheta != u.ntheta) throw SizeError("to_cylinder: angular sizes differ");
  if (std::log(u.r.back()) > grid.t_max() || std::log(u.r.front()) < grid.t_min)
    throw SupportError("to_cylinder: disk radii exceed the cylinder grid");
  std::vector<double> xs(u.r.size());
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = std::log(u.r[i]);
  std::vector<double> targets(grid.nt);
  for (int j = 0; j < grid.nt; ++j) targets[j] = grid.t(j);
  CylinderField v(grid);
  interpolate_rows(xs, u.values, u.ntheta, targets, v.values);
  return v;
}

DiskFunction from_cylinder(const CylinderField& v) {
  DiskFunction u;
  u.ntheta = v.grid.ntheta;
  u.r.resize(v.grid.nt);
  for (int j = 0; j < v.grid.nt; ++j) u.r[j] = std::exp(v.grid.t(j));
  u.values = v.values;
  return u;
}

DiskFunction resample(const DiskFunction& u, const std::vector<double>& radii) {
  std::vector<double> xs(u.r.size()), targets(radii.size());
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = std::log(u.r[i]);
  for (size_t i = 0; i < radii.size(); ++i) targets[i] = std::log(radii[i]);
  DiskFunction out;
  out.r = radii;
  out.ntheta = u.ntheta;
  interpolate_rows(xs, u.values, u.ntheta, targets, out.values);
  return out;
}

CylinderField d_dt(const CylinderField& v) { return stencil(v, kD1, true, 1); }
CylinderField d2_dt2(const CylinderField& v) { return stencil(v, kD2, false, 2); }

CylinderField d_dtheta(const CylinderField& v) {
  const int n = v.grid.ntheta;
  return mode_multiply(v, [n](int k) { return k == -n / 2 ? cplx(0) : cplx(0, k); });
}

CylinderField lambda_apply(const CylinderField& v) {
  return mode_multiply(v, [](int k) { return cplx(std::abs(k)); });
}

CylinderField apply_L_interior(const CylinderField& v, int sign) {
  CylinderField dv = d_dt(v);
  CylinderField lv = lambda_apply(v);
  // Keep ghost rows zero so that compositions stay local.
  for (int j = 0; j < v.grid.nt; ++j)
    if (j < kHalf || j >= v.grid.nt - kHalf)
      for (int m = 0; m < v.grid.ntheta; ++m) lv(j, m) = 0;
  return combine(dv, 1.0, lv, sign >= 0 ? 1.0 : -1.0);
}

CylinderField apply_L(const CylinderField& v, int sign) {
  if (!v.has_margin(kHalf)) throw SupportError("apply_L: field does not vanish on the 3-row ghost margin");
  return apply_L_interior(v, sign);
}

FactorizationResidual factorization_residual(const CylinderField& v) {
  CylinderField pm = apply_L_interior(apply_L_interior(v, -1), +1);
  CylinderField mp = apply_L_interior(apply_L_interior(v, +1), -1);
  CylinderField lap = d2_dt2(v);
  CylinderField l2 = lambda_apply(lambda_apply(v));
  FactorizationResidual res;
  const int n = v.grid.ntheta;
  for (int j = 2 * kHalf; j < v.grid.nt - 2 * kHalf; ++j)
    for (int m = 0; m < n; ++m) {
      res.vs_laplacian = std::max(res.vs_laplacian, std::abs(pm(j, m) - (lap(j, m) - l2(j, m))));
      res.commutator = std::max(res.commutator, std::abs(pm(j, m) - mp(j, m)));
    }
  return res;
}

double laplacian_residual(const CylinderField& v, const CylinderField& reference) {
  CylinderField pm = apply_L_interior(apply_L_interior(v, -1), +1);
  double r = 0;
  for (int j = 2 * kHalf; j < v.grid.nt - 2 * kHalf; ++j)
    for (int m = 0; m < v.grid.ntheta; ++m) r = std::max(r, std::abs(pm(j, m) - reference(j, m)));
  return r;
}

namespace {

// log of |t^lp e^{-tau varphi} e^{shift t}|^p e^{(rp+2) t} for the cylinder measure
double cylinder_log_weight(double t, double p, const WeightSpec& w) {
  double lw = w.log_power * std::log(std::abs(t)) + w.shift * t;
  if (w.tau != 0) lw -= w.tau * varphi(t);
  return p * lw + (w.radial_power + 2) * t;
}

double finish(const RowWeights& rw, const std::vector<cplx>& values, int cols, double p) {
  if (!std::isfinite(rw.shift)) return -std::numeric_limits<double>::infinity();
  double s = kernels::weighted_power_sum(values.data(), rw.log_w.data(), rw.q.data(), int(rw.q.size()),
                                         cols, p, rw.shift);
  if (s == 0) return -std::numeric_limits<double>::infinity();
  return (rw.shift + std::log(s)) / p;
}

void check_weight(double p, const WeightSpec& w) {
  if (!(p >= 1) || !std::isfinite(p)) throw DomainError("weighted_norm requires 1 <= p < inf");
  if (!(w.tau >= 0)) throw DomainError("weighted_norm requires tau >= 0");
  if (!(w.R0 <= kR0 * (1 + 1e-12))) throw DomainError("weighted_norm requires R0 <= e^-3");
}

}  // namespace

double log_weighted_norm(const CylinderField& f, double p, const WeightSpec& w) {
  check_weight(p, w);
  const auto& g = f.grid;
  RowWeights rw;
  rw.log_w.assign(g.nt, 0);
  rw.q.assign(g.nt, 0);
  const double base = g.dt * 2 * std::numbers::pi / g.ntheta;
  const double log_r0 = std::log(w.R0);
  for (int j = 0; j < g.nt; ++j) {
    if (row_max(f.row(j), g.ntheta) == 0) continue;
    double t = g.t(j);
    if (t > log_r0 + 1e-12) throw DomainError("weighted_norm: support exceeds R0");
    rw.log_w[j] = cylinder_log_weight(t, p, w);
    rw.q[j] = (j == 0 || j == g.nt - 1) ? base / 2 : base;
    rw.shift = std::max(rw.shift, rw.log_w[j]);
  }
  return finish(rw, f.values, g.ntheta, p);
}

double weighted_norm(const CylinderField& f, double p, const WeightSpec& w) {
  return std::exp(log_weighted_norm(f, p, w));
}

double log_weighted_norm(const DiskFunction& f, double p, const WeightSpec& w) {
  check_weight(p, w);
  const int nr = int(f.r.size());
  RowWeights rw;
  rw.log_w.assign(nr, 0);
  rw.q.assign(nr, 0);
  const double dth = 2 * std::numbers::pi / f.ntheta;
  for (int i = 0; i < nr; ++i) {
    if (row_max(&f.values[size_t(i) * f.ntheta], f.ntheta) == 0) continue;
    double r = f.r[i];
    if (r > w.R0 * (1 + 1e-12)) throw DomainError("weighted_norm: support exceeds R0");
    double t = std::log(r);
    // dx = r dr dtheta; trapezoid in r
    double h = (i > 0 ? f.r[i] - f.r[i - 1] : 0) + (i + 1 < nr ? f.r[i + 1] - f.r[i] : 0);
    rw.log_w[i] = cylinder_log_weight(t, p, w) - 2 * t;  // back to dx
    rw.q[i] = 0.5 * h * r * dth;
    rw.shift = std::max(rw.shift, rw.log_w[i]);
  }
  return finish(rw, f.values, f.ntheta, p);
}

double weighted_norm(const DiskFunction& f, double p, const WeightSpec& w) {
  return std::exp(log_weighted_norm(f, p, w));
}

void write_csv(const CylinderField& v, std::ostream& os) {
  os << "t,theta,re,im\n";
  os.precision(17);
  for (int j = 0; j < v.grid.nt; ++j)
    for (int m = 0; m < v.grid.ntheta; ++m)
      os << v.grid.t(j) << ',' << v.grid.theta(m) << ',' << v(j, m).real() << ',' << v(j, m).imag() << '\n';
}

}  // namespace uclab
