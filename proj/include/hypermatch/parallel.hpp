#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include <omp.h>
#include <parallel/algorithm>

namespace hypermatch::par {

// Thread-count control for all parallel regions in the library. Results of
// every operation in this project are independent of the setting; it only
// changes how work is divided.
inline int num_threads() { return omp_get_max_threads(); }

inline void set_num_threads(int t) { omp_set_num_threads(t < 1 ? 1 : t); }

inline constexpr std::size_t kSerialCutoff = 2048;

template <typename F>
void parallel_for(std::size_t n, F&& body) {
  if (n < kSerialCutoff || num_threads() == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// out[i] = fn(i); slots are disjoint, so scheduling cannot affect the result.
template <typename T, typename F>
std::vector<T> tabulate(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

// Runs emit(i, buffer) for each i and concatenates the per-chunk buffers in
// index order, so the output sequence is the same as a serial left-to-right
// run regardless of thread count.
template <typename T, typename Emit>
std::vector<T> flat_collect(std::size_t n, Emit&& emit) {
  if (n < kSerialCutoff || num_threads() == 1) {
    std::vector<T> out;
    for (std::size_t i = 0; i < n; ++i) emit(i, out);
    return out;
  }
  int chunks = num_threads();
  std::vector<std::vector<T>> parts(chunks);
#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < chunks; ++c) {
    std::size_t lo = n * c / chunks;
    std::size_t hi = n * (c + 1) / chunks;
    for (std::size_t i = lo; i < hi; ++i) emit(i, parts[c]);
  }
  std::size_t total = 0;
  for (auto& p : parts) total += p.size();
  std::vector<T> out;
  out.reserve(total);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Comparators passed here must induce a strict total order (no ties between
// distinct elements); the sorted sequence is then unique and thread-count
// independent.
template <typename It, typename Cmp>
void sort(It first, It last, Cmp cmp) {
  if (static_cast<std::size_t>(last - first) < kSerialCutoff || num_threads() == 1) {
    std::sort(first, last, cmp);
  } else {
    __gnu_parallel::sort(first, last, cmp);
  }
}

template <typename It>
void sort(It first, It last) {
  par::sort(first, last, std::less<>{});
}

}  // namespace hypermatch::par
