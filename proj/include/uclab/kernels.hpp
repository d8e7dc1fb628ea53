#pragma once

#include <complex>
#include <vector>

// Data-parallel primitives shared by the field types. Each kernel has a serial
// reference in kernels::serial and an OpenMP variant in kernels::omp with the
// same contract; the unqualified entry points dispatch on thread count.
namespace uclab::kernels {

using cplx = std::complex<double>;

class DftTable {
 public:
  explicit DftTable(int n);
  int size() const { return n_; }
  // e^{-2 pi i j / n}
  const cplx* twiddle() const { return w_.data(); }

 private:
  int n_;
  std::vector<cplx> w_;
};

// Row transforms: coefficients against orthonormal e_k = e^{ik theta}/sqrt(2pi),
// stored at index k mod n.
namespace serial {
void analyze_rows(const DftTable& tab, const cplx* in, cplx* out, int rows);
void synthesize_rows(const DftTable& tab, const cplx* in, cplx* out, int rows);
// Synthesize n-mode rows onto a finer m-point grid (m = tab.size() >= n).
void synthesize_rows_fine(const DftTable& tab, int n, const cplx* in, cplx* out, int rows);
// sum_j exp(row_log_w[j] - shift) * sum_m |v_jm|^p * row_q[j]
double weighted_power_sum(const cplx* v, const double* row_log_w, const double* row_q, int rows,
                          int cols, double p, double shift);
}  // namespace serial

namespace omp {
void analyze_rows(const DftTable& tab, const cplx* in, cplx* out, int rows);
void synthesize_rows(const DftTable& tab, const cplx* in, cplx* out, int rows);
void synthesize_rows_fine(const DftTable& tab, int n, const cplx* in, cplx* out, int rows);
double weighted_power_sum(const cplx* v, const double* row_log_w, const double* row_q, int rows,
                          int cols, double p, double shift);
}  // namespace omp

void analyze_rows(const DftTable& tab, const cplx* in, cplx* out, int rows);
void synthesize_rows(const DftTable& tab, const cplx* in, cplx* out, int rows);
void synthesize_rows_fine(const DftTable& tab, int n, const cplx* in, cplx* out, int rows);
double weighted_power_sum(const cplx* v, const double* row_log_w, const double* row_q, int rows,
                          int cols, double p, double shift);

// Thread budget; 1 selects the serial path.
int thread_count();
void set_thread_count(int n);
// Reads CARLEMAN_LAB_THREADS if set; DomainError unless it is a positive integer.
void configure_threads_from_env();

}  // namespace uclab::kernels
