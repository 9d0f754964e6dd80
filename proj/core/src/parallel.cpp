#include "hdg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace hdg {

namespace {
std::atomic<int> override_threads{0};

int env_threads() {
  const char* env = std::getenv("STOKES_HYBRID_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}
}  // namespace

int worker_threads() {
  const int o = override_threads.load();
  return o > 0 ? o : env_threads();
}

void set_worker_threads(int n) { override_threads.store(std::max(0, n)); }

void parallel_for(int begin, int end, const std::function<void(int)>& body) {
  const int n = end - begin;
  if (n <= 0) return;
  const int workers = std::min(worker_threads(), n);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = begin + w * chunk;
      const int hi = std::min(end, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([lo, hi, w, &body, &errors] {
        try {
          for (int i = lo; i < hi; ++i) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hdg
