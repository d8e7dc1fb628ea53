#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "uclab/errors.hpp"
#include "uclab/kernels.hpp"

using namespace uclab::kernels;

namespace {

std::vector<cplx> random_rows(int rows, int cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(size_t(rows) * cols);
  for (auto& z : v) z = {nd(gen), nd(gen)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct Threads {
  int saved = thread_count();
  explicit Threads(int n) { set_thread_count(n); }
  ~Threads() { set_thread_count(saved); }
};

}  // namespace

TEST(Kernels, AnalyzeMatchesDirectSum) {
  const int n = 12, rows = 3;
  DftTable tab(n);
  auto in = random_rows(rows, n, 1);
  std::vector<cplx> out(in.size());
  serial::analyze_rows(tab, in.data(), out.data(), rows);
  // samples u(theta_m), theta_m = 2 pi m / n; coefficient against e^{ik theta}/sqrt(2 pi)
  const double h = 2 * std::numbers::pi / n;
  for (int j = 0; j < rows; ++j)
    for (int k = 0; k < n; ++k) {
      cplx s = 0;
      for (int m = 0; m < n; ++m) s += in[j * n + m] * std::polar(1.0, -k * m * h);
      s *= h / std::sqrt(2 * std::numbers::pi);
      EXPECT_LT(std::abs(out[j * n + k] - s), 1e-12);
    }
}

TEST(Kernels, RoundTrip) {
  for (int n : {8, 15, 64}) {
    DftTable tab(n);
    auto in = random_rows(5, n, n);
    std::vector<cplx> c(in.size()), back(in.size());
    serial::analyze_rows(tab, in.data(), c.data(), 5);
    serial::synthesize_rows(tab, c.data(), back.data(), 5);
    EXPECT_LT(max_diff(in, back), 1e-12) << n;
  }
}

TEST(Kernels, FineSynthesisAgreesOnCoarseNodes) {
  const int n = 16, m = 64, rows = 4;
  DftTable coarse(n), fine(m);
  auto c = random_rows(rows, n, 7);
  // drop the Nyquist mode, whose fine extension is ambiguous
  for (int j = 0; j < rows; ++j) c[j * n + n / 2] = 0;
  std::vector<cplx> u(c.size()), uf(size_t(rows) * m);
  serial::synthesize_rows(coarse, c.data(), u.data(), rows);
  serial::synthesize_rows_fine(fine, n, c.data(), uf.data(), rows);
  for (int j = 0; j < rows; ++j)
    for (int k = 0; k < n; ++k) EXPECT_LT(std::abs(uf[j * m + k * (m / n)] - u[j * n + k]), 1e-12);
}

TEST(Kernels, OmpMatchesSerial) {
  Threads guard(std::max(2, omp_get_num_procs()));
  const int n = 32, m = 128, rows = 57;
  DftTable tab(n), fine(m);
  auto in = random_rows(rows, n, 3);
  std::vector<cplx> a(in.size()), b(in.size());

  serial::analyze_rows(tab, in.data(), a.data(), rows);
  omp::analyze_rows(tab, in.data(), b.data(), rows);
  EXPECT_LT(max_diff(a, b), 1e-13);

  serial::synthesize_rows(tab, in.data(), a.data(), rows);
  omp::synthesize_rows(tab, in.data(), b.data(), rows);
  EXPECT_LT(max_diff(a, b), 1e-13);

  std::vector<cplx> fa(size_t(rows) * m), fb(fa.size());
  serial::synthesize_rows_fine(fine, n, in.data(), fa.data(), rows);
  omp::synthesize_rows_fine(fine, n, in.data(), fb.data(), rows);
  EXPECT_LT(max_diff(fa, fb), 1e-13);

  std::vector<double> lw(rows), q(rows);
  for (int j = 0; j < rows; ++j) {
    lw[j] = 0.3 * j;
    q[j] = 1.0 / (1 + j);
  }
  for (double p : {1.0, 4.0 / 3, 2.0, 4.0}) {
    double s = serial::weighted_power_sum(in.data(), lw.data(), q.data(), rows, n, p, 10);
    double o = omp::weighted_power_sum(in.data(), lw.data(), q.data(), rows, n, p, 10);
    EXPECT_NEAR(o / s, 1, 1e-12) << p;
  }
}

TEST(Kernels, WeightedPowerSumClosedForm) {
  // all entries of modulus 2: sum_j e^{lw_j - shift} * cols * 2^p * q_j
  const int rows = 3, cols = 5;
  std::vector<cplx> v(rows * cols, cplx(0, 2));
  std::vector<double> lw{0, 1, 2}, q{1, 2, 3};
  double p = 1.5, shift = 2;
  double want = 0;
  for (int j = 0; j < rows; ++j) want += std::exp(lw[j] - shift) * cols * std::pow(2, p) * q[j];
  EXPECT_NEAR(serial::weighted_power_sum(v.data(), lw.data(), q.data(), rows, cols, p, shift), want, 1e-12 * want);
}

TEST(Kernels, DispatchUsesThreadCount) {
  const int n = 16, rows = 9;
  DftTable tab(n);
  auto in = random_rows(rows, n, 5);
  std::vector<cplx> a(in.size()), b(in.size());
  {
    Threads guard(1);
    analyze_rows(tab, in.data(), a.data(), rows);
  }
  {
    Threads guard(3);
    EXPECT_EQ(thread_count(), 3);
    analyze_rows(tab, in.data(), b.data(), rows);
  }
  EXPECT_LT(max_diff(a, b), 1e-13);
}

TEST(Kernels, ThreadEnv) {
  int saved = thread_count();
  setenv("CARLEMAN_LAB_THREADS", "3", 1);
  configure_threads_from_env();
  EXPECT_EQ(thread_count(), 3);
  for (const char* bad : {"0", "-2", "x", "2.5", ""}) {
    setenv("CARLEMAN_LAB_THREADS", bad, 1);
    EXPECT_THROW(configure_threads_from_env(), uclab::DomainError) << bad;
  }
  unsetenv("CARLEMAN_LAB_THREADS");
  set_thread_count(saved);
}
