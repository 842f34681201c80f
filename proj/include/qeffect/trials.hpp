#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qeffect {

enum class Execution { Serial, Parallel };

/// Reference loop: trial i runs after trial i - 1.
template <class F>
auto run_trials_serial(std::size_t n, F&& f) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

/// OpenMP loop over independent trials. Each trial must derive its
/// randomness from its index alone; results land in index order, so the
/// output equals run_trials_serial element for element.
template <class F>
auto run_trials_parallel(std::size_t n, F&& f) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      slots[k].emplace(f(k));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

template <class F>
auto run_trials(std::size_t n, Execution execution, F&& f) {
  if (execution == Execution::Parallel) return run_trials_parallel(n, std::forward<F>(f));
  return run_trials_serial(n, std::forward<F>(f));
}

inline int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace qeffect
