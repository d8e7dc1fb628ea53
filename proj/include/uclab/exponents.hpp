#pragma once

#include <optional>
#include <string>

namespace uclab {

// s in (2, inf], t in (1, inf]; infinity is std::numeric_limits<double>::infinity().
struct PotentialRegularity {
  double s = 4;
  double t = 4;
  double eps = 0.01;
  double delta = 0.1;

  void validate() const;
};

double parse_extended(const std::string& text);
std::string format_extended(double x);

enum class Case { T_GE_S, MID, LOW, PURE_HIGH, PURE_LOW };
const char* case_name(Case c);

Case regularity_case(double s, double t);

struct ExponentReport {
  std::optional<double> kappa;
  double mu = 0;
  double p = 0;
  std::optional<double> q;
  std::optional<double> beta0;
  double beta1 = 0;
  Case case_id = Case::T_GE_S;
};

enum class PiBranch { HIGH_T, LOW_T };
const char* branch_name(PiBranch b);

struct InfinityReport {
  double Pi = 0;
  PiBranch branch = PiBranch::HIGH_T;
  double kappa_term = 0;
  double mu_term = 0;
  double piecewise = 0;
};

double kappa(const PotentialRegularity& reg);
double mu_full(const PotentialRegularity& reg);
double mu_pure(double t, double eps);
double mu_tilde(double t, double eps);

ExponentReport carleman_parameters(const PotentialRegularity& reg);
ExponentReport carleman_parameters_pure(double t, double eps);

struct Betas {
  double beta0;
  double beta1;
};
Betas beta_exponents(double p, double q, double eps);
double beta_minus(double p);

struct InterpolationSplit {
  double lambda;
  double theta;
  double eps;
};
InterpolationSplit interpolation_split(double q, double q_prime);

InfinityReport infinity_exponent(const PotentialRegularity& reg);
InfinityReport infinity_exponent_pure(double t, double eps);

double k_zero(double r0, double r1, double R1);
double f_delta(double r, double K, double M, const PotentialRegularity& reg);
double tau_threshold(double K, double M, const PotentialRegularity& reg, double C1,
                     double C2);

}  // namespace uclab
