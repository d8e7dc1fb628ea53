#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "uclab/cylinder.hpp"
#include "uclab/errors.hpp"
#include "support.hpp"

using namespace uclab;

namespace {

const double kPi = std::numbers::pi;

using uclab_test::PolyBump;

// band-limited, compactly supported test field and its exact cylinder Laplacian
struct SmoothCase {
  std::vector<PolyBump> bumps;
  std::vector<int> ks;
  std::vector<cplx> amps;
  cplx value(double t, double th, int dt_order = 0) const {
    cplx s = 0;
    for (size_t i = 0; i < ks.size(); ++i)
      s += amps[i] * bumps[i].value(t, dt_order) * std::polar(1.0, ks[i] * th);
    return s;
  }
  cplx lap(double t, double th) const {
    cplx s = 0;
    for (size_t i = 0; i < ks.size(); ++i)
      s += amps[i] * (bumps[i].value(t, 2) - double(ks[i] * ks[i]) * bumps[i].value(t, 0)) *
           std::polar(1.0, ks[i] * th);
    return s;
  }
};

SmoothCase random_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  SmoothCase sc;
  int nm = 1 + int(U(rng) * 3);
  for (int i = 0; i < nm; ++i) {
    sc.bumps.push_back({-6.0 + U(rng), 0.8 + 0.6 * U(rng), 10});
    sc.ks.push_back(int(U(rng) * 9) - 4);
    sc.amps.push_back({U(rng) - 0.5, U(rng) - 0.5});
  }
  return sc;
}

}  // namespace

TEST(Weight, PhiExamples) {
  double e = std::numbers::e;
  EXPECT_NEAR(phi(std::exp(-e)), -e + 2, 1e-14);
  for (int i = 1; i <= 200; ++i) {
    double r = kR0 * i / 200.0;
    EXPECT_LT(phi_prime(r), 1 / r);
    EXPECT_GT(phi_prime(r), 0);
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-12, -3);
  for (int i = 0; i < 100; ++i) {
    double r = std::exp(U(rng));
    EXPECT_NEAR(varphi(std::log(r)), phi(r), 1e-12);
  }
  EXPECT_THROW(phi(std::exp(-2.0)), DomainError);
  EXPECT_THROW(phi(0), DomainError);
}

TEST(Weight, VarphiExamples) {
  double e2 = std::exp(2.0);
  EXPECT_NEAR(varphi(-e2), -e2 + 4, 1e-13);
  EXPECT_DOUBLE_EQ(varphi_prime(-4), 0.5);
  EXPECT_NEAR(varphi_prime(-1e9), 1.0, 1e-8);
  EXPECT_THROW(varphi(-2), DomainError);
}

TEST(Weight, MonotonicityFacts) {
  for (double tau : {0.0, 1.0, 5.0, 40.0}) {
    double prev_dec = INFINITY, prev_inc = -INFINITY;
    for (int i = 1; i <= 400; ++i) {
      double r = kR0 * std::pow(1e-4, 1 - i / 400.0);
      double dec = -tau * phi(r);  // log e^{-tau phi}
      EXPECT_LE(dec, prev_dec + 1e-12);
      prev_dec = dec;
      double inc = tau * phi(r) + std::log(std::abs(std::log(r)) * r);
      EXPECT_GT(inc, prev_inc);
      prev_inc = inc;
    }
  }
}

TEST(Pullback, Examples) {
  std::vector<double> r;
  for (int i = 0; i < 200; ++i) r.push_back(std::exp(-9 + 6.0 * i / 199));
  auto u = DiskFunction::from(r, 64, [](double rr, double) { return cplx(rr * rr); });
  // r^2 has no compact support; geometric path copies samples verbatim
  EXPECT_THROW(to_cylinder(u), SupportError);
  CylinderGrid g{-9, 6.0 / 199, 200, 64};
  auto v = CylinderField::from(g, [](double t, double th) { return cplx(std::exp(t) * std::cos(th)); });
  auto back = from_cylinder(v);
  for (int i = 0; i < 200; i += 17)
    for (int m = 0; m < 64; m += 9)
      EXPECT_NEAR(back(i, m).real(), back.r[i] * std::cos(2 * kPi * m / 64), 1e-14);
  auto e2 = CylinderField::from(g, [](double t, double) { return cplx(std::exp(2 * t)); });
  auto d2 = from_cylinder(e2);
  EXPECT_NEAR(d2(50, 3).real(), d2.r[50] * d2.r[50], 1e-15);
}

TEST(Pullback, RoundTripConverges) {
  PolyBump b{-5.5, 1.2, 10};
  auto f = [&](double r, double th) { return cplx(b.value(std::log(r)) * std::cos(2 * th)); };
  double prev = 1;
  for (int nr : {400, 800, 1600}) {
    std::vector<double> rs;
    double lo = std::exp(-7.2), hi = std::exp(-3.6);
    for (int i = 0; i < nr; ++i) rs.push_back(lo + (hi - lo) * i / (nr - 1));
    auto u = DiskFunction::from(rs, 64, f);
    auto grid = CylinderGrid::spanning(-7.5, -3.2, 4.0 / nr, 64);
    auto v = to_cylinder(u, grid);
    auto back = resample(from_cylinder(v), rs);
    double err = 0, mx = 0;
    for (size_t i = 0; i < u.values.size(); ++i) {
      err = std::max(err, std::abs(back.values[i] - u.values[i]));
      mx = std::max(mx, std::abs(u.values[i]));
    }
    EXPECT_LT(err / mx, prev);
    prev = err / mx;
  }
  EXPECT_LT(prev, 1e-8);
}

TEST(ApplyL, HarmonicExamples) {
  auto g = CylinderGrid::spanning(-8, -4, 0.01, 64);
  auto e2 = CylinderField::from(g, [](double t, double) { return cplx(std::exp(2 * t)); });
  EXPECT_THROW(apply_L(e2, -1), SupportError);
  auto l = apply_L_interior(e2, -1);
  for (int j = 3; j < g.nt - 3; j += 37)
    EXPECT_NEAR(std::abs(l(j, 5) - 2.0 * e2(j, 5)) / std::abs(e2(j, 5)), 0, 1e-10);
  for (int k : {1, 3, 5}) {
    auto ek = CylinderField::from(g, [k](double t, double th) { return std::exp(k * t) * std::polar(1.0, k * th); });
    auto lm = apply_L_interior(ek, -1);
    auto emk = CylinderField::from(g, [k](double t, double th) { return std::exp(-k * t) * std::polar(1.0, k * th); });
    auto lp = apply_L_interior(emk, +1);
    for (int j = 3; j < g.nt - 3; j += 41) {
      EXPECT_LT(std::abs(lm(j, 7)) / std::abs(ek(j, 7)), 1e-9);
      EXPECT_LT(std::abs(lp(j, 7)) / std::abs(emk(j, 7)), 1e-9);
    }
  }
}

TEST(Factorization, HarmonicCases) {
  auto g = CylinderGrid::spanning(-8, -4, 0.01, 64);
  auto e2 = CylinderField::from(g, [](double t, double) { return cplx(std::exp(2 * t)); });
  auto r = factorization_residual(e2);
  EXPECT_LT(r.vs_laplacian / e2.max_abs(), 1e-9);
  EXPECT_LT(r.commutator / e2.max_abs(), 1e-13 / g.dt);
  auto z3 = CylinderField::from(g, [](double t, double th) { return cplx(std::exp(3 * t) * std::cos(3 * th)); });
  auto r3 = factorization_residual(z3);
  EXPECT_LT(r3.vs_laplacian / z3.max_abs(), 1e-9);
  // harmonic: e^{2t} Delta (Re z^3) = 0 up to discretization
  CylinderField zero(g);
  EXPECT_LT(laplacian_residual(z3, zero) / z3.max_abs(), 1e-8);
}

TEST(Factorization, SixthOrderConvergence) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    auto sc = random_case(rng);
    std::vector<double> hs, errs;
    for (double h : {0.04, 0.02, 0.01}) {
      auto g = CylinderGrid::spanning(-8.5, -3.5, h, 64);
      auto v = CylinderField::from(g, [&](double t, double th) { return sc.value(t, th); });
      auto ref = CylinderField::from(g, [&](double t, double th) { return sc.lap(t, th); });
      hs.push_back(g.dt);
      errs.push_back(laplacian_residual(v, ref));
    }
    double slope = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
    EXPECT_NEAR(slope, 6.0, 0.5) << "trial " << trial;
    auto g = CylinderGrid::spanning(-8.5, -3.5, 0.01, 64);
    auto v = CylinderField::from(g, [&](double t, double th) { return sc.value(t, th); });
    EXPECT_LT(factorization_residual(v).commutator, 1e-9 * v.max_abs() / (g.dt * g.dt));
  }
}

TEST(WeightedNorm, Examples) {
  auto g = CylinderGrid::spanning(-9, -3, 0.005, 64);
  CylinderField zero(g);
  EXPECT_EQ(weighted_norm(zero, 2, {}), 0.0);

  PolyBump b{-6, 1.5, 10};
  auto v = CylinderField::from(g, [&](double t, double th) { return cplx(b.value(t) * std::cos(3 * th)); });
  WeightSpec plain{0, 0, -2, 0, kR0};
  double s = 0;
  for (auto z : v.values) s += std::norm(z);
  EXPECT_NEAR(weighted_norm(v, 2, plain), std::sqrt(s * g.dt * 2 * kPi / 64), 1e-12);

  // mode-0 Gaussian, tau = 5, against a 1-D adaptive quadrature oracle
  auto gauss = [](double t) { return std::exp(-std::pow((t + 6) / 0.4, 2)); };
  auto vg = CylinderField::from(g, [&](double t, double) { return cplx(gauss(t)); });
  WeightSpec w{5, -1, -2, 0, kR0};
  auto integrand = [&](double t) {
    double x = std::exp(-5 * (t + std::log(t * t))) * gauss(t) / t;
    return x * x;
  };
  double ref = std::sqrt(2 * kPi * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -9, -3, 15, 1e-14));
  EXPECT_NEAR(weighted_norm(vg, 2, w) / ref, 1.0, 1e-8);
}

TEST(WeightedNorm, SupportBeyondR0) {
  auto g = CylinderGrid::spanning(-6, -2.5, 0.01, 64);
  auto v = CylinderField::from(g, [](double t, double) { return cplx(t > -2.8 ? 1.0 : 0.0); });
  EXPECT_THROW(weighted_norm(v, 2, {}), DomainError);
}

TEST(WeightedNorm, DiskCylinderMeasureIdentity) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(0, 1);
  const int nr = 6000;
  for (int trial = 0; trial < 100; ++trial) {
    double tc = -6.5 + 2 * U(rng), wd = 0.4 + 0.8 * U(rng);
    PolyBump b{tc, wd, 10};
    int k = int(U(rng) * 6);
    double p = 1 + U(rng);
    WeightSpec w{1 + 10 * U(rng), trial % 2 ? -1 : 1, trial % 3 ? -2.0 : -2 * (1 - 0.1), 0, kR0};
    auto f = [&](double t, double th) { return cplx(b.value(t) * std::cos(k * th), 0.3 * b.value(t)); };
    auto g = CylinderGrid::spanning(tc - wd - 0.1, std::min(tc + wd + 0.1, -3.0), 0.0005, 64);
    auto v = CylinderField::from(g, f);
    double lo = std::exp(tc - wd), hi = std::exp(tc + wd);
    std::vector<double> rs(nr);
    for (int i = 0; i < nr; ++i) rs[i] = lo + (hi - lo) * i / (nr - 1);
    auto u = DiskFunction::from(rs, 64, [&](double r, double th) { return f(std::log(r), th); });
    double a = log_weighted_norm(v, p, w), d = log_weighted_norm(u, p, w);
    EXPECT_NEAR(a, d, 1e-8) << "trial " << trial;
  }
}

TEST(Snapshot, Csv) {
  auto g = CylinderGrid::spanning(-5, -4, 0.5, 64);
  auto v = CylinderField::from(g, [](double t, double) { return cplx(t, 1); });
  std::ostringstream os;
  write_csv(v, os);
  auto s = os.str();
  EXPECT_EQ(s.substr(0, 14), "t,theta,re,im\n");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 3 * 64);
}
