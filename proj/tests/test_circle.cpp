#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "uclab/circle.hpp"
#include "uclab/errors.hpp"

using namespace uclab;

namespace {

const double kPi = std::numbers::pi;

CircleFunction random_band_limited(std::mt19937_64& rng, int n, int band) {
  std::normal_distribution<double> g;
  std::vector<cplx> c(2 * band + 1);
  for (auto& z : c) z = {g(rng), g(rng)};
  return CircleFunction::from(
      [&](double th) {
        cplx s = 0;
        for (int k = -band; k <= band; ++k) s += c[k + band] * std::polar(1.0, k * th);
        return s / std::sqrt(2 * kPi);
      },
      n);
}

CircleFunction add(const CircleFunction& a, const CircleFunction& b, cplx sa = 1, cplx sb = 1) {
  CircleFunction o = a;
  for (int i = 0; i < a.size(); ++i) o.samples[i] = sa * a.samples[i] + sb * b.samples[i];
  return o;
}

double max_diff(const CircleFunction& a, const CircleFunction& b) {
  double m = 0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
  return m;
}

}  // namespace

TEST(Analyze, Examples) {
  auto c = analyze(e_k(3, 64));
  for (int k = -32; k < 32; ++k) EXPECT_NEAR(std::abs(c[k] - cplx(k == 3 ? 1 : 0)), 0, 1e-14) << k;
  auto one = analyze(CircleFunction::from([](double) { return cplx(1); }, 64));
  EXPECT_NEAR(std::abs(one[0] - std::sqrt(2 * kPi)), 0, 1e-13);
  auto v = add(e_k(2, 64), e_k(-5, 64), 3, 4);
  EXPECT_NEAR(l2_norm(v), 5, 1e-13);
  double parseval = 0;
  for (auto z : analyze(v).c) parseval += std::norm(z);
  EXPECT_NEAR(std::sqrt(parseval), 5, 1e-13);
}

TEST(Analyze, SizeErrors) {
  CircleFunction v;
  v.samples.assign(100, 1);
  EXPECT_THROW(analyze(v), SizeError);
  v.samples.assign(32, 1);
  EXPECT_THROW(analyze(v), SizeError);
}

TEST(Analyze, RoundTrip) {
  std::mt19937_64 rng(3);
  auto v = random_band_limited(rng, 128, 40);
  EXPECT_LT(max_diff(synthesize(analyze(v)), v), 1e-12);
}

TEST(Project, Examples) {
  auto e4 = e_k(4, 64);
  EXPECT_LT(max_diff(project(e4, 4), e4), 1e-14);
  EXPECT_LT(max_diff(project(e_k(-4, 64), 4), e_k(-4, 64)), 1e-14);
  EXPECT_LT(sup_norm(project(e_k(3, 64), 4)), 1e-14);
  auto v = add(e_k(2, 64), e_k(-5, 64), 3, 4);
  EXPECT_NEAR(l2_norm(project(v, 2)), 3, 1e-13);
  EXPECT_NEAR(l2_norm(project(v, 5)), 4, 1e-13);
  EXPECT_THROW(project(v, 32), BandError);
}

TEST(Project, IdempotentAndOrthogonal) {
  std::mt19937_64 rng(5);
  auto v = random_band_limited(rng, 64, 20);
  for (int k = 0; k < 8; ++k) {
    auto pk = project(v, k);
    EXPECT_LT(max_diff(project(pk, k), pk), 1e-13);
    for (int j = k + 1; j < 8; ++j) EXPECT_LT(sup_norm(project(pk, j)), 1e-13);
  }
}

TEST(Lambda, Examples) {
  auto one = CircleFunction::from([](double) { return cplx(1); }, 64);
  EXPECT_LT(sup_norm(lambda_apply(one)), 1e-13);
  auto c3 = CircleFunction::from([](double th) { return cplx(std::cos(3 * th)); }, 64);
  auto l3 = lambda_apply(c3);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(std::abs(l3.samples[i] - 3.0 * c3.samples[i]), 0, 1e-13);
  auto s2 = CircleFunction::from([](double th) { return cplx(std::sin(2 * th)); }, 64);
  auto l2 = lambda_apply(lambda_apply(s2));
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(std::abs(l2.samples[i] - 4.0 * s2.samples[i]), 0, 1e-12);
}

TEST(Lambda, NyquistRejected) {
  auto v = CircleFunction::from([](double th) { return cplx(std::cos(32 * th)); }, 64);
  EXPECT_THROW(lambda_apply(v), BandError);
}

TEST(SupBound, Examples) {
  const int n = 64;
  for (int k = 1; k < 10; ++k) {
    EXPECT_NEAR(projection_sup_bound_check(e_k(k, n), k), 1 / std::sqrt(2 * kPi), 1e-12);
    auto ext = add(e_k(k, n), e_k(-k, n));
    EXPECT_NEAR(projection_sup_bound_check(ext, k), 1 / std::sqrt(kPi), 1e-8);
  }
  EXPECT_NEAR(projection_sup_bound_check(e_k(0, n), 0), 1 / std::sqrt(2 * kPi), 1e-12);
  CircleFunction z;
  z.samples.assign(n, 0);
  EXPECT_THROW(projection_sup_bound_check(z, 1), ZeroNormError);
}

TEST(SupBound, RandomInputs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto v = random_band_limited(rng, 128, 30);
    for (int k = 0; k < 30; k += 3)
      EXPECT_LE(projection_sup_bound_check(v, k), projection_sup_constant(k) + 1e-8);
  }
}

TEST(SupBound, ProjectionSupVersusL2) {
  // equality for single exponentials; the sharp constant in general is 1/sqrt(pi)
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10; ++k) {
    auto single = e_k(k, 64);
    auto pk = project(single, k);
    EXPECT_NEAR(sup_norm(pk), l2_norm(pk) / std::sqrt(2 * kPi), 1e-12);
  }
  auto ext = project(add(e_k(3, 64), e_k(-3, 64)), 3);
  EXPECT_NEAR(sup_norm(ext), l2_norm(ext) / std::sqrt(kPi), 1e-12);
  EXPECT_GT(sup_norm(ext), 1.4 * l2_norm(ext) / std::sqrt(2 * kPi));
  for (int trial = 0; trial < 100; ++trial) {
    auto v = random_band_limited(rng, 64, 15);
    for (int k = 1; k < 15; ++k) {
      auto pk = project(v, k);
      EXPECT_LE(sup_norm(pk), l2_norm(pk) / std::sqrt(kPi) + 1e-12);
      EXPECT_LE(l2_norm(pk), l2_norm(v) + 1e-12);
    }
  }
}

TEST(Mixed, Examples) {
  std::mt19937_64 rng(17);
  const int n = 64, N = 2, M = 9;
  // v band-limited in [N, M]
  std::normal_distribution<double> g;
  CircleFunction v = CircleFunction::from([](double) { return cplx(0); }, n);
  for (int k = N; k <= M; ++k) v = add(v, add(e_k(k, n), e_k(-k, n), cplx(g(rng), g(rng)), cplx(g(rng), g(rng))));
  std::vector<cplx> ones(M - N + 1, 1.0);
  EXPECT_NEAR(mixed_bound_check(v, ones, N, M, 2.0), 1.0, 1e-12);

  // single coefficient at p = 1: ||P_k v||_2 / ||v||_1 <= 1/sqrt(pi)
  auto w = random_band_limited(rng, n, 20);
  for (int k = 0; k < 10; ++k) {
    double r = mixed_bound_check(w, {cplx(1)}, k, k, 1.0);
    double direct = l2_norm(project(w, k)) / lp_norm(w, 1.0);
    EXPECT_NEAR(r, direct, 1e-12);
    EXPECT_LE(r, 1 / std::sqrt(kPi) + 1e-8);
  }
  EXPECT_THROW(mixed_bound_check(w, {cplx(1.5)}, 2, 2, 1.5), CoefficientError);
}

TEST(Mixed, CorpusConstantAndInterpolation) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0, 1);
  const int n = 64;
  const std::vector<double> ps = {1.0, 1.25, 1.5, 1.75, 2.0};
  std::vector<double> worst(ps.size(), 0);
  for (int trial = 0; trial < 200; ++trial) {
    auto v = random_band_limited(rng, n, 1 + int(U(rng) * 25));
    int N = int(U(rng) * 10), M = N + int(U(rng) * 15);
    std::vector<cplx> c(M - N + 1);
    for (auto& z : c) z = std::polar(U(rng), 2 * kPi * U(rng));
    for (size_t i = 0; i < ps.size(); ++i) worst[i] = std::max(worst[i], mixed_bound_check(v, c, N, M, ps[i]));
  }
  for (size_t i = 0; i < ps.size(); ++i) {
    EXPECT_TRUE(std::isfinite(worst[i]));
    EXPECT_LE(worst[i], 1.0 + 1e-12) << "p=" << ps[i];
  }
  // the p = 2 end is saturated by c = 1 (Parseval); p = 1 sits below 1/sqrt(pi)
  EXPECT_LE(worst.front(), 1 / std::sqrt(kPi) + 1e-8);
  for (size_t i = 1; i < ps.size(); ++i) EXPECT_GE(worst[i], worst[i - 1] - 1e-12);
}

TEST(Norms, ParsevalAt256) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 1000; ++trial) {
    auto v = random_band_limited(rng, 256, 100);
    double s = 0;
    for (auto z : analyze(v).c) s += std::norm(z);
    EXPECT_NEAR(std::sqrt(s), l2_norm(v), 1e-10 * l2_norm(v));
  }
}

TEST(Norms, LpAndSup) {
  auto one = CircleFunction::from([](double) { return cplx(1); }, 64);
  EXPECT_NEAR(lp_norm(one, 1.0), 2 * kPi, 1e-12);
  EXPECT_NEAR(lp_norm(one, 1.5), std::pow(2 * kPi, 1 / 1.5), 1e-12);
  auto c = CircleFunction::from([](double th) { return cplx(std::cos(3 * th + 0.3)); }, 64);
  EXPECT_NEAR(sup_norm(c), 1.0, 1e-3);
  EXPECT_NEAR(lp_norm(c, 1.0), 4.0, 1e-3);
}
