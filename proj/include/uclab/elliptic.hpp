#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uclab/carleman.hpp"
#include "uclab/exponents.hpp"

namespace uclab {

// Polar grid on B_R, uniform in t = log r (geometric in r) with dt = 2 pi / ntheta,
// so cells are square in (t, theta). Ring N is the boundary r = R; rings 0..N-1 are unknowns.
// The disk r < r_min = r_0 e^{-dt/2} is the innermost cell's zero-flux core.
struct DiskGrid {
  double R = kR0;
  int ntheta = 128;
  int nrings = 0;  // interior rings
  double dt = 0;

  double t(int i) const { return std::log(R) - (nrings - i) * dt; }
  double r(int i) const { return std::exp(t(i)); }
  double r_min() const { return std::exp(t(0) - dt / 2); }
  double ratio() const { return std::exp(dt); }
  double theta(int m) const;

  static DiskGrid make(double R, int ntheta, double r_min_over_R = 1e-7);
};

// W = A_W r^{-a_W} x/|x|, V = A_V r^{-a_V}, both centered at the origin; norms over B_R in closed form.
struct PotentialPair {
  PowerLaw W;
  PowerLaw V;
  double s = 4;
  double t = 4;
  double R = kR0;

  void validate() const;
  double K() const { return W.norm(s, R); }
  double M() const { return V.norm(t, R); }
};

// Smooth field with analytic derivatives, used for boundary traces and chain-rule checks.
struct SmoothField {
  std::function<cplx(double, double)> u;
  std::function<std::array<cplx, 2>(double, double)> grad;
  std::function<cplx(double, double)> laplacian;
};
SmoothField harmonic_monomial(int n);  // Re(z^n)

struct DiskSolution {
  DiskGrid grid;
  std::vector<cplx> values;  // (nrings + 1) x ntheta, last ring is the boundary trace
  double residual = 0;       // relative residual of the linear system
  double condition_estimate = 0;
  std::string solver = "eigen-sparselu";

  cplx operator()(int i, int m) const { return values[size_t(i) * grid.ntheta + m]; }
  // interpolated value at a Cartesian point inside B_R (trig in theta, cubic in t)
  cplx eval(double x, double y) const;
  // sup over B_rho(center); origin-centered balls use ring samples with 4x angular refinement
  double sup_norm(double rho, double cx = 0, double cy = 0) const;
  double l2_norm(double rho) const;    // over B_rho(0)
  double grad_l2_sq(double rho) const;  // ||grad u||^2 over B_rho(0)

 private:
  mutable std::vector<cplx> modes_;  // per-ring DFT, built on first eval
  const std::vector<cplx>& modes() const;
};

DiskSolution solve_dirichlet(const DiskGrid& grid, const PotentialPair& pot, const std::function<cplx(double)>& g);
// max |u - exact| over all grid nodes
double max_error(const DiskSolution& u, const std::function<cplx(double, double)>& exact_polar);

struct VanishingFit {
  double order = 0;
  double residual = 0;  // RMS misfit of the log-log line
  std::vector<double> radii, sups;
};
VanishingFit vanishing_order_fit(const DiskSolution& u, const std::vector<double>& radii, double cx = 0,
                                 double cy = 0);

struct EmpiricalConstants {
  double C1 = 1, C2 = 1;
};
// C1 = tau*/K^kappa and C2 = tau*/M^mu at the power laws (exponent 0.3, or 1/t for t <= 10/3) whose
// proof-form absorption thresholds equal tau*, with C the Laplacian-estimate constant.
EmpiricalConstants empirical_constants(const PotentialRegularity& reg, double C, double tau_star = 2);

struct ThreeBallRecord {
  double r0 = 0, r1 = 0, R1 = 0;
  double K = 0, M = 0, k0 = 0, F_r0 = 0, F_r1 = 0, F_R1 = 0;
  double lhs = 0;
  double term_interp = 0;  // k0-interpolation summand with C = 1
  double term_exp = 0;     // exponential summand with C = 1
  double ratio = 0;        // lhs / (term_interp + term_exp): the C this u requires
  double log_term_interp = 0, log_term_exp = 0, log_ratio = 0;  // exact where the terms overflow
  double sup_small = 0, sup_large = 0;
};
// Balls centered at (cx, cy); K, M are the potential norms over B_R of the grid (upper bounds on any sub-ball).
ThreeBallRecord three_ball_check(const DiskSolution& u, double r0, double r1, double R1, const PotentialPair& pot,
                                 const PotentialRegularity& reg, const EmpiricalConstants& ec = {}, double cx = 0,
                                 double cy = 0);

struct CaccioppoliRecord {
  double r = 0, R = 0;
  double lhs = 0;        // ||grad u||^2_{L2(B_r)}
  double u_l2_sq = 0;    // ||u||^2_{L2(B_R)}
  double bracket = 0;    // (R-r)^-2 + M^{t/(t-1)+delta} + K^{2s/(s-2)+delta}
  double ratio = 0;      // lhs / (bracket * u_l2_sq)
  double prefactor = 0;  // lhs / u_l2_sq - (R-r)^-2, the part the potentials must cover
  // truncation step of the proof with unit constants
  double q_V = 0, M0 = 0, who_lhs = 0, who_rhs = 0;
  double q_W = 0, K0 = 0, mmo_lhs = 0, mmo_rhs = 0;
};
CaccioppoliRecord caccioppoli_check(const DiskSolution& u, double r, double R, const PotentialPair& pot, double delta);

struct RegularityRecord {
  double r = 0, lhs = 0, rhs = 0, ratio = 0, F = 0;
};
RegularityRecord regularity_sup_check(const DiskSolution& u, double r, const PotentialPair& pot,
                                      const PotentialRegularity& reg);

// u_R(x) = u(Rx), W_R = R W(Rx), V_R = R^2 V(Rx); norms over B_{R_pot / R_scale}
PotentialPair scale_potentials(const PotentialPair& pot, double R_scale);

struct ScalingCheck {
  double W_identity_error = 0;  // |‖W_R‖ - R^{1-2/s}‖W‖| / ‖W_R‖
  double V_identity_error = 0;
  double residual_identity_error = 0;  // max relative mismatch over the sample points
};
// Residual identity with derivatives of u_R taken by central differences at step h.
ScalingCheck check_scaling(const PotentialPair& pot, double R_scale, const SmoothField& u,
                           const std::vector<std::array<double, 2>>& points, double h = 1e-4);
// (Delta + W.grad + V) u at a Cartesian point
cplx equation_residual(const PotentialPair& pot, const SmoothField& u, double x, double y);

struct ChainStep {
  double cx = 0, cy = 0;
  ThreeBallRecord ball;
  double bound = 0;  // composed upper bound on ||u||_{L^inf(B_3r(x_i))}
};
struct ChainRecord {
  double r = 0;
  std::vector<ChainStep> steps;
  double ell = 0;          // ||u||_{L^inf(B_r(x_0))}, direct
  double target = 0;       // ||u||_{L^inf(B_3r(x_d))}, direct
  double ell_lower = 0;    // smallest ell the composed bounds allow given target
  bool consistent = false; // ell_lower <= ell
};
// Three-ball radii per step: r0 = r/2, r1 = 4r, R1 = 10r. Consecutive centers must lie within 2r.
ChainRecord propagation_chain(const DiskSolution& u, double r, const std::vector<std::array<double, 2>>& path,
                              const PotentialPair& pot, const PotentialRegularity& reg,
                              const EmpiricalConstants& ec = {});

// Caccioppoli prefactor against V amplitude: real constant V = M on the unit disk (t = inf, W = 0),
// fixed trace; exponent fitted over rungs whose prefactor is positive.
struct CaccioppoliLadder {
  std::vector<double> M, prefactor, ratio;
  double delta = 0;
  double exponent = 0;  // fitted d log prefactor / d log M; NaN with fewer than two usable rungs
  double expected = 0;  // t/(t-1) + delta at t = inf
  int used = 0;
};
CaccioppoliLadder caccioppoli_M_ladder(const std::vector<double>& M, int ntheta, double delta = 0.1);

// Vanishing order at 0 of the solution with trace e^{in theta} + 0.1 e^{i(n+1)theta} under V = M e^{i ang}.
// C, C2 fitted on the first two rungs (C2 >= 0), the bound C(1 + C2 M^mu) checked on the rest.
struct OrderLadder {
  std::vector<double> M, order, bound;
  double C = 0, C2 = 0, mu = 0;
  bool holds = false;
};
OrderLadder vanishing_M_ladder(const std::vector<double>& M, int ntheta, int n, double mu, double ang = 0.5);

// Radial cutoff: 1 on [a, b], 0 outside [a - w_in, b + w_out], quintic smoothstep transitions.
// With a = w_in = 0 it is 1 on B_b.
struct CutoffProfile {
  double a = 0, b = 1, w_in = 0, w_out = 1;
  static constexpr double kC1 = 15.0 / 8;   // max |smoothstep'|
  static constexpr double kC2 = 5.7735026918962576;  // max |smoothstep''| = 10/sqrt(3)

  void validate() const;
  double value(double r) const;
  double d1(double r) const;  // d/dr
  double d2(double r) const;
  double grad_bound() const { return kC1 / std::min(w_in > 0 ? w_in : w_out, w_out); }
  double hess_bound() const;  // bound on |D^2 eta| in the plane, includes the eta'/r term
};

// Seeded solution corpus: singular power-law potentials and random trigonometric traces.
struct LabCase {
  std::string id;
  std::uint64_t seed = 0;
  PotentialPair pot;
  PotentialRegularity reg;
  std::vector<std::pair<int, cplx>> trace;  // g(theta) = sum a_k e^{ik theta}

  cplx g(double theta) const;
};
std::vector<LabCase> generate_lab_corpus(std::uint64_t seed, int n, double R = kR0);
std::string lab_manifest_text(const std::vector<LabCase>& corpus);
std::vector<LabCase> read_lab_manifest(const std::string& path);

inline constexpr std::uint64_t kLabSeed = 20170612;
inline constexpr int kLabSize = 8;

}  // namespace uclab
