#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace stvanka {

/// Calls f(i) for i in [0, n), split into contiguous chunks over `threads`
/// workers. With threads <= 1 the loop runs inline in ascending order.
template <class F> void parallel_for(int n, int threads, F &&f) {
  if (threads <= 1 || n < 2 * threads) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::jthread> workers;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([begin, end, &f] {
      for (int i = begin; i < end; ++i) f(i);
    });
  }
}

}  // namespace stvanka
