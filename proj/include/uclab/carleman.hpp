#pragma once

#include <string>
#include <vector>

#include "uclab/corpus.hpp"
#include "uclab/cylinder.hpp"
#include "uclab/exponents.hpp"
#include "uclab/record.hpp"

namespace uclab {

// Radial power law A r^{-a}. As a gradient potential it points along x/|x|.
struct PowerLaw {
  cplx amplitude = 0;
  double exponent = 0;

  cplx at(double r) const;
  // L^s norm over the annulus r1 < |x| < r2 (r1 = 0 gives the ball), closed form; inf when divergent
  double norm(double s, double r2, double r1 = 0) const;
};

// sup_{0 < r <= R} (log r)^2 r^alpha, alpha > 0
double holder_sup(double alpha, double R = kR0);

// Log-domain norms that appear in the estimates; u is the cylinder pull-back v.
double log_norm_u_L2(const CylinderField& v, double tau);                 // ||(log r)^-1 e^{-tau phi} u||_{L2(r^-2)}
double log_norm_u_Lq(const CylinderField& v, double tau, double q, double eps);
double log_norm_grad(const CylinderField& v, double tau);                 // ||(log r)^-1 e^{-tau phi} r grad u||_{L2(r^-2)}
double log_norm_rhs(const CylinderField& f, double tau, double p);        // ||(log r) e^{-tau phi} f||_{Lp(r^-2)}
CylinderField cylinder_laplacian(const CylinderField& v);                 // r^2 Delta u = L+ L- v
CylinderField gradient_term(const CylinderField& v, const PowerLaw& W);   // r^2 W . grad u
CylinderField potential_term(const CylinderField& v, const PowerLaw& V);  // r^2 V u

// Laplacian RHS computed on a uniform-r polar grid with 6th-order differences in r.
double log_rhs_disk_route(const TestFunctionSpec& spec, double tau, double p, int nr, int ntheta = 64);

VerificationRecord evaluate_carleman_laplacian(const CylinderField& v, double tau, double p, double q, double eps,
                                               double beta0_shift = 0);

// C is the empirical Laplacian-estimate constant entering the absorption step.
VerificationRecord evaluate_carleman_full(const CylinderField& v, const PowerLaw& W, const PowerLaw& V, double tau,
                                          const PotentialRegularity& reg, double C = 1);
VerificationRecord evaluate_carleman_pure(const CylinderField& v, const PowerLaw& V, double tau, double t, double eps,
                                          double C = 1);

struct HolderStep {
  double log_lhs = 0;
  double log_rhs = 0;
  bool holds() const { return log_lhs <= log_rhs + 1e-12; }
};
HolderStep holder_gradient(const CylinderField& v, const PowerLaw& W, double tau, double p);
HolderStep holder_potential_L2(const CylinderField& v, const PowerLaw& V, double tau, double p);
HolderStep holder_potential_Lq(const CylinderField& v, const PowerLaw& V, double tau, double p, double q, double eps);

enum class Inequality { LAPLACIAN, CAR22, CARLPP, FULL, PURE };
const char* inequality_name(Inequality i);
Inequality parse_inequality(const std::string& name);

struct SweepConfig {
  Inequality ineq = Inequality::LAPLACIAN;
  double p = 4.0 / 3, q = 4, eps = 0.1;  // carlpp uses p only
  PotentialRegularity reg{4, 4, 0.01, 0.1};
  PowerLaw W, V;
  double C = 1;
  double dt = 0.01;
  int ntheta = 64;
  std::vector<double> taus{1, 2, 4, 8, 16, 32, 64};
  double beta0_shift = 0;
};

struct ElementSweep {
  std::string id;
  std::vector<double> ratio;
  double slope = 0;
  double spread = 0;  // max / min
};

struct SweepResult {
  std::vector<VerificationRecord> records;
  std::vector<ElementSweep> elements;
  std::vector<double> envelope;  // max over corpus at each tau
  double envelope_slope = 0;
  double envelope_spread = 0;
  double max_element_slope = 0;
  double max_element_spread = 0;
  double empirical_C = 0;
  int below_threshold = 0;
};

SweepResult run_sweep(const std::vector<TestFunctionSpec>& corpus, const SweepConfig& cfg);

// max ratio over the non-degenerate records
double empirical_constant(const std::vector<VerificationRecord>& records);

// Potentials scaled so the proof-form absorption ratio reaches 1/2 at tau = 2 for multiplier 1.
struct ThresholdProbe {
  std::vector<double> norms;      // K or M of each ladder rung over B_R0
  std::vector<double> tau_star;   // proof-form threshold
  std::vector<double> tau_star_measured;
  double slope = 0;
  double measured_slope = 0;
  double expected = 0;            // mu or kappa
};
// Amplitude of A r^{-a} whose proof-form absorption ratio equals 1/2 at tau_star.
double threshold_amplitude_V(double t, double eps, double v_exponent, double C, double tau_star = 1);
double threshold_amplitude_W(const PotentialRegularity& reg, double w_exponent, double C, double tau_star = 1);
// V amplitude for the W-and-V operator (M-term from carleman_parameters(reg)).
double threshold_amplitude_V(const PotentialRegularity& reg, double v_exponent, double C, double tau_star = 1);

ThresholdProbe threshold_probe_V(double t, double eps, double v_exponent, const std::vector<double>& multipliers,
                                 double C, const CylinderField& v);
ThresholdProbe threshold_probe_W(const PotentialRegularity& reg, double w_exponent,
                                 const std::vector<double>& multipliers, double C, const CylinderField& v);

}  // namespace uclab
