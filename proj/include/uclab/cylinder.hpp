#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "uclab/weight.hpp"

namespace uclab {

using cplx = std::complex<double>;

struct CylinderGrid {
  double t_min = -10;
  double dt = 0.01;
  int nt = 0;
  int ntheta = 64;

  double t(int j) const { return t_min + j * dt; }
  double t_max() const { return t(nt - 1); }
  double theta(int m) const;
  // Uniform grid from t_lo to at most t_hi with spacing <= dt_target.
  static CylinderGrid spanning(double t_lo, double t_hi, double dt_target, int ntheta);
};

// Row-major samples v(t_j, theta_m).
struct CylinderField {
  CylinderGrid grid;
  std::vector<cplx> values;

  CylinderField() = default;
  explicit CylinderField(const CylinderGrid& g);
  static CylinderField from(const CylinderGrid& g, const std::function<cplx(double, double)>& f);

  cplx& operator()(int j, int m) { return values[size_t(j) * grid.ntheta + m]; }
  cplx operator()(int j, int m) const { return values[size_t(j) * grid.ntheta + m]; }
  const cplx* row(int j) const { return values.data() + size_t(j) * grid.ntheta; }
  double max_abs() const;
  // True if the first and last `rows` rows vanish.
  bool has_margin(int rows) const;
};

// Per-row coefficients against e_k, index k mod ntheta.
struct ModeField {
  CylinderGrid grid;
  std::vector<cplx> coeffs;

  cplx& operator()(int j, int k) { return coeffs[size_t(j) * grid.ntheta + index(k)]; }
  cplx operator()(int j, int k) const { return coeffs[size_t(j) * grid.ntheta + index(k)]; }
  int index(int k) const { return ((k % grid.ntheta) + grid.ntheta) % grid.ntheta; }
};

ModeField to_modes(const CylinderField& v);
CylinderField from_modes(const ModeField& c);

// Polar samples u(r_i, theta_m), r increasing.
struct DiskFunction {
  std::vector<double> r;
  int ntheta = 64;
  std::vector<cplx> values;

  cplx& operator()(int i, int m) { return values[size_t(i) * ntheta + m]; }
  cplx operator()(int i, int m) const { return values[size_t(i) * ntheta + m]; }
  static DiskFunction from(const std::vector<double>& r, int ntheta,
                           const std::function<cplx(double, double)>& f);
};

// Geometric radii map one-to-one onto the t grid; otherwise interpolate.
CylinderField to_cylinder(const DiskFunction& u);
CylinderField to_cylinder(const DiskFunction& u, const CylinderGrid& grid);
DiskFunction from_cylinder(const CylinderField& v);
DiskFunction resample(const DiskFunction& u, const std::vector<double>& radii);

// 6th-order central differences in t on rows [3, nt-4]; other rows are zero.
CylinderField d_dt(const CylinderField& v);
CylinderField d2_dt2(const CylinderField& v);
CylinderField d_dtheta(const CylinderField& v);
CylinderField lambda_apply(const CylinderField& v);

// L+- = d/dt +- Lambda. apply_L requires a 3-row zero margin.
CylinderField apply_L(const CylinderField& v, int sign);
CylinderField apply_L_interior(const CylinderField& v, int sign);

struct FactorizationResidual {
  double vs_laplacian = 0;  // |L+L- v - (v_tt + Delta_w v)|
  double commutator = 0;    // |L+L- v - L-L+ v|
};
FactorizationResidual factorization_residual(const CylinderField& v);
// max |L+L- v - reference| over rows where the composed stencil is valid
double laplacian_residual(const CylinderField& v, const CylinderField& reference);

// Integrand |(log r)^log_power e^{-tau phi(r)} r^shift f|^p r^radial_power dx.
struct WeightSpec {
  double tau = 1;
  int log_power = -1;
  double radial_power = -2;
  double shift = 0;
  double R0 = kR0;
};

double log_weighted_norm(const CylinderField& f, double p, const WeightSpec& w);
double weighted_norm(const CylinderField& f, double p, const WeightSpec& w);
double log_weighted_norm(const DiskFunction& f, double p, const WeightSpec& w);
double weighted_norm(const DiskFunction& f, double p, const WeightSpec& w);

void write_csv(const CylinderField& v, std::ostream& os);

}  // namespace uclab
