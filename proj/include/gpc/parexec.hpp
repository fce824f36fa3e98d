#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <vector>

// Deterministic data-parallel primitives on top of OpenMP.
//
// Results never depend on the worker count: map/for bodies write disjoint
// slots, and reduce_sum always accumulates in fixed 4096-element chunks
// (sequential within a chunk, chunks combined in ascending order), so the
// floating-point sum is bitwise identical for 1 worker and for N.
//
// If bodies throw, the error for the lowest failing index is rethrown after
// the loop; every index still runs (no short-circuit), which keeps the
// reported index independent of scheduling.

namespace gpc::par {

struct ExecPlan {
  int workers = default_workers();

  static int default_workers();  // hardware_concurrency, at least 1

  // Fixed reduction granularity; part of the determinism contract.
  static constexpr std::size_t kChunk = 4096;
};

namespace detail {

class ErrorSlot {
 public:
  void note(std::size_t index, std::exception_ptr error) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (index < index_) {
      index_ = index;
      error_ = error;
    }
  }

  void rethrow_if_set() {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::size_t index_ = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error_;
};

}  // namespace detail

// body(i) for i in [0, count). Exceptions from body never escape the OpenMP
// region; the lowest-index one is rethrown once the loop has finished.
template <class Body>
void parallel_for(std::size_t count, const ExecPlan& plan, Body&& body) {
  if (count == 0) return;
  const int workers = plan.workers > 0 ? plan.workers : 1;
  detail::ErrorSlot errors;

  const std::int64_t n = static_cast<std::int64_t>(count);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors.note(static_cast<std::size_t>(i), std::current_exception());
    }
  }
  errors.rethrow_if_set();
}

// out[i] = fn(i). T must be default-constructible.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, const ExecPlan& plan, Fn&& fn) {
  std::vector<T> out(count);
  parallel_for(count, plan, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

// Sum of term(i) over [0, count) with the fixed chunk tree described above.
template <class Term>
double reduce_sum(std::size_t count, const ExecPlan& plan, Term&& term) {
  if (count == 0) return 0.0;
  const std::size_t chunks = (count + ExecPlan::kChunk - 1) / ExecPlan::kChunk;
  std::vector<double> partial(chunks, 0.0);

  parallel_for(chunks, plan, [&](std::size_t c) {
    const std::size_t lo = c * ExecPlan::kChunk;
    const std::size_t hi = std::min(count, lo + ExecPlan::kChunk);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[c] = acc;
  });

  double total = 0.0;
  for (double p : partial) total += p;  // ascending chunk order, always serial
  return total;
}

}  // namespace gpc::par
