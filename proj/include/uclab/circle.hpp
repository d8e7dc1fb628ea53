#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace uclab {

using cplx = std::complex<double>;

// Samples on theta_m = 2 pi m / n, n a power of two >= 64.
struct CircleFunction {
  std::vector<cplx> samples;

  int size() const { return int(samples.size()); }
  double theta(int m) const;
  static CircleFunction from(const std::function<cplx(double)>& f, int n);
};

// Coefficients against e_k = e^{ik theta}/sqrt(2pi), k in [-n/2, n/2).
struct ModeCoefficients {
  int n = 0;
  std::vector<cplx> c;  // index k mod n

  cplx operator[](int k) const { return c[index(k)]; }
  cplx& at(int k) { return c[index(k)]; }
  int index(int k) const { return ((k % n) + n) % n; }
};

void check_circle_size(int n);

ModeCoefficients analyze(const CircleFunction& v);
CircleFunction synthesize(const ModeCoefficients& c);

CircleFunction e_k(int k, int n);
CircleFunction project(const CircleFunction& v, int k);
CircleFunction lambda_apply(const CircleFunction& v);

// Trigonometric interpolant on a factor-times finer grid.
std::vector<cplx> oversample(const CircleFunction& v, int factor);

double l2_norm(const CircleFunction& v);
double lp_norm(const CircleFunction& v, double p);
double sup_norm(const CircleFunction& v);

// 1/sqrt(pi) for k != 0, 1/sqrt(2 pi) for k = 0.
double projection_sup_constant(int k);
double projection_sup_bound_check(const CircleFunction& v, int k);

// c[j] multiplies P_{N+j}; requires |c_k| <= 1.
double mixed_bound_check(const CircleFunction& v, const std::vector<cplx>& c, int N, int M, double p);

}  // namespace uclab
