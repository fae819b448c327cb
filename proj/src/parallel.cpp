#include "stereoscope/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace stereoscope {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STEREOSCOPE_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  workers = std::min(resolve_workers(workers), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  // An exception in a worker is captured and rethrown after the join; the
  // lowest-index failure wins so error reporting does not depend on thread
  // timing.
  std::mutex mu;
  std::exception_ptr first_error;
  int first_index = n;

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
    int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([&, begin, end] {
      for (int i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (i < first_index) {
            first_index = i;
            first_error = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stereoscope
