#include "uclab/circle.hpp"

#include <cmath>
#include <numbers>

#include "uclab/errors.hpp"
#include "uclab/kernels.hpp"

namespace uclab {

namespace {

constexpr int kOversample = 4;
constexpr double kNyquistTol = 1e-10;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_band(int k, int n) {
  if (k < 0) throw BandError("mode index must be nonnegative");
  if (k >= n / 2) throw BandError("mode " + std::to_string(k) + " not below n/2 = " + std::to_string(n / 2));
}

}  // namespace

double CircleFunction::theta(int m) const { return 2 * std::numbers::pi * m / size(); }

CircleFunction CircleFunction::from(const std::function<cplx(double)>& f, int n) {
  check_circle_size(n);
  CircleFunction v;
  v.samples.resize(n);
  for (int m = 0; m < n; ++m) v.samples[m] = f(2 * std::numbers::pi * m / n);
  return v;
}

void check_circle_size(int n) {
  if (!power_of_two(n) || n < 64) throw SizeError("circle grid must be a power of two >= 64, got " + std::to_string(n));
}

ModeCoefficients analyze(const CircleFunction& v) {
  const int n = v.size();
  check_circle_size(n);
  kernels::DftTable tab(n);
  ModeCoefficients out{n, std::vector<cplx>(n)};
  kernels::serial::analyze_rows(tab, v.samples.data(), out.c.data(), 1);
  return out;
}

CircleFunction synthesize(const ModeCoefficients& c) {
  check_circle_size(c.n);
  kernels::DftTable tab(c.n);
  CircleFunction v;
  v.samples.resize(c.n);
  kernels::serial::synthesize_rows(tab, c.c.data(), v.samples.data(), 1);
  return v;
}

CircleFunction e_k(int k, int n) {
  const double s = 1 / std::sqrt(2 * std::numbers::pi);
  return CircleFunction::from([=](double th) { return s * std::polar(1.0, k * th); }, n);
}

CircleFunction project(const CircleFunction& v, int k) {
  check_band(k, v.size());
  ModeCoefficients c = analyze(v);
  ModeCoefficients out{c.n, std::vector<cplx>(c.n)};
  out.at(k) = c[k];
  if (k != 0) out.at(-k) = c[-k];
  return synthesize(out);
}

CircleFunction lambda_apply(const CircleFunction& v) {
  ModeCoefficients c = analyze(v);
  const int n = c.n;
  double total = 0;
  for (auto z : c.c) total += std::norm(z);
  if (std::abs(c[-n / 2]) > kNyquistTol * std::sqrt(total) + 1e-300)
    throw BandError("lambda_apply: input carries Nyquist content");
  for (int k = -n / 2; k < n / 2; ++k) c.at(k) *= double(std::abs(k));
  return synthesize(c);
}

std::vector<cplx> oversample(const CircleFunction& v, int factor) {
  ModeCoefficients c = analyze(v);
  kernels::DftTable fine(c.n * factor);
  std::vector<cplx> out(size_t(c.n) * factor);
  kernels::serial::synthesize_rows_fine(fine, c.n, c.c.data(), out.data(), 1);
  return out;
}

double l2_norm(const CircleFunction& v) {
  double s = 0;
  for (auto z : v.samples) s += std::norm(z);
  return std::sqrt(2 * std::numbers::pi / v.size() * s);
}

double lp_norm(const CircleFunction& v, double p) {
  if (!(p >= 1)) throw DomainError("lp_norm requires p >= 1");
  if (p == 2) return l2_norm(v);
  auto fine = oversample(v, kOversample);
  double s = 0;
  for (auto z : fine) s += std::pow(std::abs(z), p);
  return std::pow(2 * std::numbers::pi / fine.size() * s, 1 / p);
}

double sup_norm(const CircleFunction& v) {
  double m = 0;
  for (auto z : oversample(v, kOversample)) m = std::max(m, std::abs(z));
  return m;
}

double projection_sup_constant(int k) {
  return k == 0 ? 1 / std::sqrt(2 * std::numbers::pi) : 1 / std::sqrt(std::numbers::pi);
}

double projection_sup_bound_check(const CircleFunction& v, int k) {
  double n2 = l2_norm(v);
  if (n2 == 0) throw ZeroNormError("projection_sup_bound_check: v = 0");
  return sup_norm(project(v, k)) / n2;
}

double mixed_bound_check(const CircleFunction& v, const std::vector<cplx>& c, int N, int M, double p) {
  const int n = v.size();
  if (!(0 <= N && N <= M && M < n / 2)) throw BandError("mixed_bound_check requires 0 <= N <= M < n/2");
  if (int(c.size()) != M - N + 1) throw DomainError("mixed_bound_check: need M-N+1 coefficients");
  if (!(p >= 1 && p <= 2)) throw DomainError("mixed_bound_check requires p in [1, 2]");
  double csum = 0;
  for (auto z : c) {
    if (std::abs(z) > 1 + 1e-15) throw CoefficientError("mixed_bound_check: |c_k| > 1");
    csum += std::norm(z);
  }
  ModeCoefficients in = analyze(v);
  ModeCoefficients out{n, std::vector<cplx>(n)};
  for (int k = N; k <= M; ++k) {
    cplx ck = c[k - N];
    out.at(k) = ck * in[k];
    if (k != 0) out.at(-k) = ck * in[-k];
  }
  double num = l2_norm(synthesize(out));
  double den = std::pow(csum, 1 / p - 0.5) * lp_norm(v, p);
  if (den == 0) throw ZeroNormError("mixed_bound_check: vanishing denominator");
  return num / den;
}

}  // namespace uclab
