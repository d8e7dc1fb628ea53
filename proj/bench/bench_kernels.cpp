#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "uclab/kernels.hpp"

using namespace uclab::kernels;

namespace {

std::vector<cplx> random_rows(int rows, int cols) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(size_t(rows) * cols);
  for (auto& z : v) z = {nd(gen), nd(gen)};
  return v;
}

// rows x n samples, the shape of a cylinder field at ntheta = n
template <void (*Fn)(const DftTable&, const cplx*, cplx*, int)>
void BM_rows(benchmark::State& st) {
  const int n = int(st.range(0)), rows = int(st.range(1));
  DftTable tab(n);
  auto in = random_rows(rows, n);
  std::vector<cplx> out(in.size());
  for (auto _ : st) {
    Fn(tab, in.data(), out.data(), rows);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * rows);
}

template <void (*Fn)(const DftTable&, int, const cplx*, cplx*, int)>
void BM_fine(benchmark::State& st) {
  const int n = int(st.range(0)), rows = int(st.range(1)), m = 4 * n;
  DftTable tab(m);
  auto in = random_rows(rows, n);
  std::vector<cplx> out(size_t(rows) * m);
  for (auto _ : st) {
    Fn(tab, n, in.data(), out.data(), rows);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * rows);
}

template <double (*Fn)(const cplx*, const double*, const double*, int, int, double, double)>
void BM_power(benchmark::State& st) {
  const int n = int(st.range(0)), rows = int(st.range(1));
  auto v = random_rows(rows, n);
  std::vector<double> lw(rows), q(rows, 1.0);
  for (int j = 0; j < rows; ++j) lw[j] = 1e-3 * j;
  for (auto _ : st) benchmark::DoNotOptimize(Fn(v.data(), lw.data(), q.data(), rows, n, 4.0 / 3, 0));
  st.SetItemsProcessed(st.iterations() * rows);
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int n : {64, 128}) b->Args({n, 512});
  b->UseRealTime();
}

}  // namespace

BENCHMARK(BM_rows<serial::analyze_rows>)->Name("analyze/serial")->Apply(shapes);
BENCHMARK(BM_rows<omp::analyze_rows>)->Name("analyze/omp")->Apply(shapes);
BENCHMARK(BM_rows<serial::synthesize_rows>)->Name("synthesize/serial")->Apply(shapes);
BENCHMARK(BM_rows<omp::synthesize_rows>)->Name("synthesize/omp")->Apply(shapes);
BENCHMARK(BM_fine<serial::synthesize_rows_fine>)->Name("synthesize_fine/serial")->Apply(shapes);
BENCHMARK(BM_fine<omp::synthesize_rows_fine>)->Name("synthesize_fine/omp")->Apply(shapes);
BENCHMARK(BM_power<serial::weighted_power_sum>)->Name("power_sum/serial")->Apply(shapes);
BENCHMARK(BM_power<omp::weighted_power_sum>)->Name("power_sum/omp")->Apply(shapes);

int main(int argc, char** argv) {
  configure_threads_from_env();
  benchmark::AddCustomContext("omp_threads", std::to_string(omp_get_max_threads()));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
}
