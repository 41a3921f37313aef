// Benchmark of the serial reference kernels against the OpenMP variants,
// plus a full teacher-forced training step at two model sizes. Confirms the
// dispatch cutoff and shows where the parallel path starts paying off.
#include <chrono>
#include <cstdio>
#include <vector>

#include "elcmp/completion.hpp"
#include "elcmp/kernels.hpp"
#include "elcmp/rng.hpp"
#include "elcmp/synthetic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace elcmp;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double bench_gemv(std::size_t rows, std::size_t cols, bool parallel, int reps) {
  Rng rng(42);
  std::vector<double> w(rows * cols), x(cols), y(rows);
  for (auto& v : w) v = rng.uniform(-1, 1);
  for (auto& v : x) v = rng.uniform(-1, 1);
  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) {
    if (parallel)
      kernels::omp::gemv(w.data(), x.data(), nullptr, y.data(), rows, cols);
    else
      kernels::serial::gemv(w.data(), x.data(), nullptr, y.data(), rows, cols);
  }
  return seconds_since(t0) / reps;
}

double bench_train_step(std::size_t hidden, kernels::Mode mode, int reps) {
  kernels::set_mode(mode);
  SyntheticCorpora data = generate_synthetic(7, 64);
  std::vector<std::vector<std::string>> sentences;
  for (const auto& ex : data.completion) {
    sentences.push_back(ex.source);
    sentences.push_back(ex.reference);
    for (const auto& t : ex.context) sentences.push_back(t.tokens);
  }
  CompletionConfig cfg;
  cfg.hidden = hidden;
  cfg.attn_dim = hidden;
  CompletionModel model(cfg, Vocabulary::build(sentences, 1), 11);
  Rng dropout(3);
  auto params = model.params();
  auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) {
    for (auto* p : params) p->zero_grad();
    model.example_loss(data.completion[r % data.completion.size()], true, dropout);
  }
  double dt = seconds_since(t0) / reps;
  kernels::set_mode(kernels::Mode::automatic);
  return dt;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel numbers run the serial path\n\n");
#endif

  std::printf("gemv: serial vs OpenMP (mean of 200 reps)\n");
  std::printf("%10s %10s %12s %12s %8s\n", "rows", "cols", "serial(us)", "omp(us)",
              "speedup");
  for (auto [rows, cols] : std::vector<std::pair<std::size_t, std::size_t>>{
           {64, 96}, {256, 128}, {300, 192}, {500, 1000}, {2000, 1000}, {4000, 2000}}) {
    double s = bench_gemv(rows, cols, false, 200);
    double p = bench_gemv(rows, cols, true, 200);
    std::printf("%10zu %10zu %12.2f %12.2f %8.2f\n", rows, cols, s * 1e6, p * 1e6,
                s / p);
  }

  std::printf("\nfull training step (teacher-forced example, mean of 16 reps)\n");
  std::printf("%10s %14s %14s %8s\n", "hidden", "serial(ms)", "parallel(ms)",
              "speedup");
  for (std::size_t hidden : {64, 128, 256}) {
    double s = bench_train_step(hidden, kernels::Mode::serial, 16);
    double p = bench_train_step(hidden, kernels::Mode::parallel, 16);
    std::printf("%10zu %14.2f %14.2f %8.2f\n", hidden, s * 1e3, p * 1e3, s / p);
  }
  return 0;
}
