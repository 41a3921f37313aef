// Dense f64 kernels backing the tape ops. Every kernel exists twice: a plain
// serial loop (the reference) and an OpenMP variant. The parallel variants
// split work per output element and keep the per-element summation order
// identical to the serial code, so both modes produce bitwise-equal results.
#pragma once

#include <cstddef>

namespace elcmp::kernels {

enum class Mode { serial, parallel, automatic };

// Process-wide dispatch mode. `automatic` picks the parallel path only when
// the flop count is large enough to amortize the fork/join overhead.
void set_mode(Mode m);
Mode mode();

namespace serial {
// y[i] = sum_j w[i*cols+j] * x[j]  (+ b[i] if b != nullptr)
void gemv(const double* w, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols);
// xg[j] += sum_i w[i*cols+j] * yg[i]
void gemv_t_acc(const double* w, const double* yg, double* xg,
                std::size_t rows, std::size_t cols);
// wg[i*cols+j] += yg[i] * x[j]
void ger_acc(const double* yg, const double* x, double* wg,
             std::size_t rows, std::size_t cols);
}  // namespace serial

namespace omp {
void gemv(const double* w, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols);
void gemv_t_acc(const double* w, const double* yg, double* xg,
                std::size_t rows, std::size_t cols);
void ger_acc(const double* yg, const double* x, double* wg,
             std::size_t rows, std::size_t cols);
}  // namespace omp

// Dispatching entry points used by the tape.
void gemv(const double* w, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols);
void gemv_t_acc(const double* w, const double* yg, double* xg,
                std::size_t rows, std::size_t cols);
void ger_acc(const double* yg, const double* x, double* wg,
             std::size_t rows, std::size_t cols);

}  // namespace elcmp::kernels
