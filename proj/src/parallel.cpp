#include "qpdwire/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qpdwire {

void parallel_for(int threads, long long num_jobs, const std::function<void(long long)>& fn) {
  if (num_jobs <= 0) return;
  int count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (count < 1) count = 1;
  if (static_cast<long long>(count) > num_jobs) count = static_cast<int>(num_jobs);

  if (count == 1) {
    for (long long j = 0; j < num_jobs; ++j) fn(j);
    return;
  }

  std::atomic<long long> next(0);
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const long long job = next.fetch_add(1);
      if (job >= num_jobs) return;
      try {
        fn(job);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qpdwire
