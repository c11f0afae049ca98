#pragma once

#include <cstddef>

namespace hsr {

enum class Exec { serial, parallel };

// HSR_THREADS overrides the OpenMP default
int default_threads();
void set_threads(int n);
int current_threads();

template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < nn; ++i) f(static_cast<std::size_t>(i));
}

}  // namespace hsr
