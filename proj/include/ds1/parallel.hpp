#pragma once

// Execution policies for the pointwise grid kernels.
//
// Every kernel is written once as a per-index body and dispatched through
// parallel_for. The serial policy is the reference the OpenMP policy is
// tested against (bitwise: bodies are independent per index, and reductions
// go through row partials summed in a fixed order).

#include <cstddef>
#include <span>
#include <vector>

namespace ds1::exec {

struct serial_t {};
struct omp_t {};

inline constexpr serial_t serial{};
inline constexpr omp_t omp{};

#if defined(DS1_HAVE_OPENMP)
using default_t = omp_t;
#else
using default_t = serial_t;
#endif
inline constexpr default_t parallel{};

template <class Fn>
void parallel_for(serial_t, std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

template <class Fn>
void parallel_for(omp_t, std::size_t n, Fn&& fn) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#if defined(DS1_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

/// Runtime choice between the two, for objects that carry their policy.
enum class Policy { serial, omp };

inline constexpr Policy default_policy =
#if defined(DS1_HAVE_OPENMP)
    Policy::omp;
#else
    Policy::serial;
#endif

template <class Fn>
void parallel_for(Policy policy, std::size_t n, Fn&& fn) {
  if (policy == Policy::omp)
    parallel_for(omp, n, fn);
  else
    parallel_for(serial, n, fn);
}

/// Deterministic sum of `rows` row partials. `row_sum(r)` must itself be
/// computed serially; only the rows are distributed across threads.
template <class Exec, class RowFn>
double sum_rows(Exec policy, std::size_t rows, RowFn&& row_sum) {
  std::vector<double> partial(rows);
  parallel_for(policy, rows, [&](std::size_t r) { partial[r] = row_sum(r); });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class Exec, class RowFn>
double max_rows(Exec policy, std::size_t rows, RowFn&& row_max) {
  std::vector<double> partial(rows);
  parallel_for(policy, rows, [&](std::size_t r) { partial[r] = row_max(r); });
  double best = 0.0;
  for (double p : partial) best = p > best ? p : best;
  return best;
}

int max_threads();
void set_num_threads(int n);

}  // namespace ds1::exec
