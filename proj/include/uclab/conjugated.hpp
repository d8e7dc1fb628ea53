#pragma once

#include <utility>
#include <vector>

#include "uclab/cylinder.hpp"
#include "uclab/record.hpp"

namespace uclab {

// One angular mode of L-_tau u sampled on grid.t(j).
struct ModeProfile {
  int k = 0;
  std::vector<cplx> g;
  double tau = 1;
  CylinderGrid grid;
};

// L-_tau u = sum_k (d/dt + tau phi' - k) P_k u, applied mode by mode.
CylinderField conjugate_apply(const CylinderField& u, double tau);
// e^{-tau phi} L- (e^{tau phi} u), for cross-checking the mode form.
CylinderField conjugate_apply_direct(const CylinderField& u, double tau);

// Solutions of (d/dt + tau phi' - k) f = g. High: f = -int_{s>t} S_k(s,t) g(s) ds.
// Low: f = int_{s<t} S_k(s,t) g(s) ds. Exact cell propagator, 8-point Gauss-Legendre per cell.
std::vector<cplx> solve_mode_high(const ModeProfile& m);
std::vector<cplx> solve_mode_low(const ModeProfile& m);
// max |(d/dt + tau phi' - k) f - g| over rows where the stencil is valid
double mode_residual(const ModeProfile& m, const std::vector<cplx>& f);

struct ProjectorSplit {
  double tau = 1;
  int M = 2;
  int N_of_t(double t) const;
};
ProjectorSplit make_split(double tau);
// (P+ v, P- v) with P+ = sum_{k > M} P_k
std::pair<CylinderField, CylinderField> split_apply(const CylinderField& v, int M);
// Midpoint of the t-support, used to freeze N(t) when a single split index is needed.
double support_midpoint(const CylinderField& v);

// S_k(s, t) = exp(k(t-s) + tau(phi(s) - phi(t)))
double log_kernel(int k, double tau, double s, double t);

enum class KernelBranch { HIGH, CASE1, CASE2 };
const char* kernel_branch_name(KernelBranch b);
struct KernelBound {
  double lhs = 0;
  double rhs = 0;
  KernelBranch branch = KernelBranch::HIGH;
};
KernelBound kernel_bound_check(int k, double tau, double t, double s);

struct KernelScan {
  long points = 0;
  long violations = 0;
  double worst = 0;  // max lhs / rhs
};
// n x n grid of (s, t) in [lo, hi]^2.
KernelScan kernel_scan(int k, double tau, double lo, double hi, int n);

// sup over the (s, t) grid of e^{-a2 tau (s-t)^2/t^2} (1 + sqrt(tau)|s-t|) / |t|, a2 = (2-p)/(2p)
double exp_bound_constant(double tau, double p, double lo, double hi, int n);

struct YoungNorm {
  double sigma = 0;
  double integral_value = 0;  // (int e^{-sigma k |z|/2} dz)^{1/sigma} by quadrature
  double closed_form = 0;     // (4/(sigma k))^{1/sigma}
  double k_exponent = 0;      // -1/sigma
  double bound_value = 0;     // (4/sigma)^{1/sigma} k^{1/p - 3/2}
};
YoungNorm young_norm_identity(int k, double p);

struct PartialSums {
  std::vector<double> K;
  std::vector<double> S;
  double tail_slope = 0;  // dS / d log K over the last decade
  bool converges = false;
};
// S(K) = sum_{k=M+1}^K k^{2/p-3}
PartialSums partial_sums(double p, int M, long K_max);

// ||t^{-1} e^{-tau phi} v||_2 <= C tau^beta ||t e^{-tau phi} L- v||_p, beta = (1-p)/p
VerificationRecord verify_carlpp(const CylinderField& v, double tau, double p);
// tau||t^{-1}e^{-tau phi}v|| + ||..d_t v|| + ||..Lambda v|| <= C ||t^{-1} e^{-tau phi} L+ v||
VerificationRecord verify_car22(const CylinderField& v, double tau);

}  // namespace uclab
