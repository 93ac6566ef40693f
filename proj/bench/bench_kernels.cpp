// OpenMP kernels against their serial references on desk-scale problem sizes.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "jspec/kernels.hpp"

using namespace jspec;

namespace {

std::vector<double> midpoints(int n) {
  std::vector<double> th(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) th[i] = (i + 0.5) * std::numbers::pi / n;
  return th;
}

const JacobiParams kParams(0.5, 1.5);

template <auto Fn>
void BM_basis_table(benchmark::State& state) {
  const auto th = midpoints(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(kParams, th, 256));
}

template <auto Fn>
void BM_kernel_matrix(benchmark::State& state) {
  const auto th = midpoints(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd b = kernels::basis_table(kParams, th, 128);
  std::vector<double> m(129);
  for (int n = 0; n <= 128; ++n) m[n] = std::exp(-0.01 * kParams.eigenvalue(n));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(b, m));
}

template <auto Fn>
void BM_maximal_sweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> edges(n + 1), nodes(n), values(n);
  for (int i = 0; i <= n; ++i) edges[i] = i * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (edges[i] + edges[i + 1]);
    values[i] = std::abs(std::sin(7.0 * nodes[i])) + (i % 17 == 0 ? 3.0 : 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Fn(edges, nodes, values, 64));
}

template <auto Fn>
void BM_square_function(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const auto th = midpoints(512);
  const Eigen::MatrixXd b = kernels::basis_table(kParams, th, modes - 1);
  std::vector<cplx> amp(modes);
  std::vector<double> rates(modes);
  for (int n = 0; n < modes; ++n) {
    amp[n] = cplx(std::cos(n), std::sin(0.5 * n)) / (1.0 + n);
    rates[n] = std::sqrt(kParams.eigenvalue(n));
  }
  std::vector<double> times, weights;
  for (int q = 0; q < 400; ++q) {
    times.push_back(std::exp(-32.0 + 0.1 * q));
    weights.push_back(0.1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Fn(b, amp, rates, 0.5, times, weights));
}

}  // namespace

BENCHMARK(BM_basis_table<kernels::basis_table>)->Name("basis_table/omp")->Arg(1024)->Arg(4096);
BENCHMARK(BM_basis_table<kernels::reference::basis_table>)->Name("basis_table/serial")->Arg(1024)->Arg(4096);
BENCHMARK(BM_kernel_matrix<kernels::kernel_matrix>)->Name("kernel_matrix/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_kernel_matrix<kernels::reference::kernel_matrix>)->Name("kernel_matrix/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_maximal_sweep<kernels::maximal_sweep>)->Name("maximal_sweep/omp")->Arg(1024)->Arg(4096);
BENCHMARK(BM_maximal_sweep<kernels::reference::maximal_sweep>)->Name("maximal_sweep/serial")->Arg(1024)->Arg(4096);
BENCHMARK(BM_square_function<kernels::square_function>)->Name("square_function/omp")->Arg(16)->Arg(64);
BENCHMARK(BM_square_function<kernels::reference::square_function>)->Name("square_function/serial")->Arg(16)->Arg(64);

BENCHMARK_MAIN();
