#include "elcmp/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace elcmp::kernels {

namespace {
std::atomic<Mode> g_mode{Mode::automatic};

// Rough flop threshold below which forking a parallel region costs more than
// the loop itself. Tuned with bench_kernels on a 2-core box; the crossover
// sits near 32k MACs there and this errs on the serial side.
constexpr std::size_t kParallelCutoff = 32768;

inline bool go_parallel(std::size_t work) {
  switch (g_mode.load(std::memory_order_relaxed)) {
    case Mode::serial: return false;
    case Mode::parallel: return true;
    case Mode::automatic: break;
  }
#ifdef _OPENMP
  return work >= kParallelCutoff;
#else
  (void)work;
  return false;
#endif
}
}  // namespace

void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }
Mode mode() { return g_mode.load(std::memory_order_relaxed); }

namespace serial {

void gemv(const double* w, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* wr = w + i * cols;
    double acc = b ? b[i] : 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += wr[j] * x[j];
    y[i] = acc;
  }
}

void gemv_t_acc(const double* w, const double* yg, double* xg,
                std::size_t rows, std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) acc += w[i * cols + j] * yg[i];
    xg[j] += acc;
  }
}

void ger_acc(const double* yg, const double* x, double* wg,
             std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double g = yg[i];
    if (g == 0.0) continue;
    double* wr = wg + i * cols;
    for (std::size_t j = 0; j < cols; ++j) wr[j] += g * x[j];
  }
}

}  // namespace serial

namespace omp {

void gemv(const double* w, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    const double* wr = w + i * cols;
    double acc = b ? b[i] : 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += wr[j] * x[j];
    y[i] = acc;
  }
}

void gemv_t_acc(const double* w, const double* yg, double* xg,
                std::size_t rows, std::size_t cols) {
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) acc += w[i * cols + j] * yg[i];
    xg[j] += acc;
  }
}

void ger_acc(const double* yg, const double* x, double* wg,
             std::size_t rows, std::size_t cols) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    double g = yg[i];
    if (g == 0.0) continue;
    double* wr = wg + i * cols;
    for (std::size_t j = 0; j < cols; ++j) wr[j] += g * x[j];
  }
}

}  // namespace omp

void gemv(const double* w, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols) {
  if (go_parallel(rows * cols))
    omp::gemv(w, x, b, y, rows, cols);
  else
    serial::gemv(w, x, b, y, rows, cols);
}

void gemv_t_acc(const double* w, const double* yg, double* xg,
                std::size_t rows, std::size_t cols) {
  if (go_parallel(rows * cols))
    omp::gemv_t_acc(w, yg, xg, rows, cols);
  else
    serial::gemv_t_acc(w, yg, xg, rows, cols);
}

void ger_acc(const double* yg, const double* x, double* wg,
             std::size_t rows, std::size_t cols) {
  if (go_parallel(rows * cols))
    omp::ger_acc(yg, x, wg, rows, cols);
  else
    serial::ger_acc(yg, x, wg, rows, cols);
}

}  // namespace elcmp::kernels
