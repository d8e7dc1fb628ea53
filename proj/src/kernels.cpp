#include "uclab/kernels.hpp"

#include "uclab/errors.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

namespace uclab::kernels {

namespace {

int g_threads = 0;  // 0: OpenMP default

inline double abs_pow(cplx z, double p) {
  double a = std::abs(z);
  if (p == 2) return a * a;
  if (p == 1) return a;
  return a == 0 ? 0.0 : std::pow(a, p);
}

inline int signed_mode(int idx, int n) { return idx < n / 2 ? idx : idx - n; }

void analyze_row(const DftTable& tab, const cplx* v, cplx* c) {
  const int n = tab.size();
  const cplx* w = tab.twiddle();
  const double scale = std::sqrt(2 * std::numbers::pi) / n;
  for (int k = 0; k < n; ++k) {
    cplx acc = 0;
    int idx = 0;
    for (int m = 0; m < n; ++m) {
      acc += v[m] * w[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    c[k] = acc * scale;
  }
}

void synthesize_row_fine(const DftTable& tab, int n, const cplx* c, cplx* v) {
  const int m_pts = tab.size();
  const cplx* w = tab.twiddle();
  const double scale = 1 / std::sqrt(2 * std::numbers::pi);
  for (int m = 0; m < m_pts; ++m) v[m] = 0;
  for (int idx = 0; idx < n; ++idx) {
    const cplx ck = c[idx];
    if (ck == cplx(0)) continue;
    int k = signed_mode(idx, n);
    int kk = ((k % m_pts) + m_pts) % m_pts;
    // e^{+ik theta} = conj(e^{-ik theta})
    int j = 0;
    for (int m = 0; m < m_pts; ++m) {
      v[m] += ck * std::conj(w[j]);
      j += kk;
      if (j >= m_pts) j -= m_pts;
    }
  }
  for (int m = 0; m < m_pts; ++m) v[m] *= scale;
}

}  // namespace

DftTable::DftTable(int n) : n_(n), w_(n) {
  for (int j = 0; j < n; ++j) {
    double a = -2 * std::numbers::pi * j / n;
    w_[j] = {std::cos(a), std::sin(a)};
  }
}

namespace serial {

void analyze_rows(const DftTable& tab, const cplx* in, cplx* out, int rows) {
  const int n = tab.size();
  for (int r = 0; r < rows; ++r) analyze_row(tab, in + size_t(r) * n, out + size_t(r) * n);
}

void synthesize_rows(const DftTable& tab, const cplx* in, cplx* out, int rows) {
  serial::synthesize_rows_fine(tab, tab.size(), in, out, rows);
}

void synthesize_rows_fine(const DftTable& tab, int n, const cplx* in, cplx* out, int rows) {
  const int m = tab.size();
  for (int r = 0; r < rows; ++r) synthesize_row_fine(tab, n, in + size_t(r) * n, out + size_t(r) * m);
}

double weighted_power_sum(const cplx* v, const double* row_log_w, const double* row_q, int rows,
                          int cols, double p, double shift) {
  double total = 0;
  for (int j = 0; j < rows; ++j) {
    if (row_q[j] == 0) continue;
    double s = 0;
    for (int m = 0; m < cols; ++m) s += abs_pow(v[size_t(j) * cols + m], p);
    if (s != 0) total += std::exp(row_log_w[j] - shift) * row_q[j] * s;
  }
  return total;
}

}  // namespace serial

namespace omp {

void analyze_rows(const DftTable& tab, const cplx* in, cplx* out, int rows) {
  const int n = tab.size();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) analyze_row(tab, in + size_t(r) * n, out + size_t(r) * n);
}

void synthesize_rows(const DftTable& tab, const cplx* in, cplx* out, int rows) {
  omp::synthesize_rows_fine(tab, tab.size(), in, out, rows);
}

void synthesize_rows_fine(const DftTable& tab, int n, const cplx* in, cplx* out, int rows) {
  const int m = tab.size();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) synthesize_row_fine(tab, n, in + size_t(r) * n, out + size_t(r) * m);
}

double weighted_power_sum(const cplx* v, const double* row_log_w, const double* row_q, int rows,
                          int cols, double p, double shift) {
  double total = 0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (int j = 0; j < rows; ++j) {
    if (row_q[j] == 0) continue;
    double s = 0;
    for (int m = 0; m < cols; ++m) s += abs_pow(v[size_t(j) * cols + m], p);
    if (s != 0) total += std::exp(row_log_w[j] - shift) * row_q[j] * s;
  }
  return total;
}

}  // namespace omp

int thread_count() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

void set_thread_count(int n) {
  g_threads = n > 0 ? n : 0;
  if (n > 0) omp_set_num_threads(n);
}

void configure_threads_from_env() {
  if (const char* env = std::getenv("CARLEMAN_LAB_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end == env || *end || n < 1 || n > 4096) throw DomainError("CARLEMAN_LAB_THREADS must be a positive integer");
    set_thread_count(int(n));
  }
}

void analyze_rows(const DftTable& tab, const cplx* in, cplx* out, int rows) {
  if (thread_count() > 1)
    omp::analyze_rows(tab, in, out, rows);
  else
    serial::analyze_rows(tab, in, out, rows);
}

void synthesize_rows(const DftTable& tab, const cplx* in, cplx* out, int rows) {
  if (thread_count() > 1)
    omp::synthesize_rows(tab, in, out, rows);
  else
    serial::synthesize_rows(tab, in, out, rows);
}

void synthesize_rows_fine(const DftTable& tab, int n, const cplx* in, cplx* out, int rows) {
  if (thread_count() > 1)
    omp::synthesize_rows_fine(tab, n, in, out, rows);
  else
    serial::synthesize_rows_fine(tab, n, in, out, rows);
}

double weighted_power_sum(const cplx* v, const double* row_log_w, const double* row_q, int rows,
                          int cols, double p, double shift) {
  if (thread_count() > 1) return omp::weighted_power_sum(v, row_log_w, row_q, rows, cols, p, shift);
  return serial::weighted_power_sum(v, row_log_w, row_q, rows, cols, p, shift);
}

}  // namespace uclab::kernels
