#include "opre/engine.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

namespace opre {

std::vector<double> replicate(std::uint64_t reps, int workers,
                              const std::function<double(std::uint64_t)>& f) {
  if (reps == 0) throw std::invalid_argument("replicate: need at least one replication");
  if (workers < 1) workers = 1;
  std::vector<double> out(reps, 0.0);
  if (workers == 1) {
    for (std::uint64_t i = 0; i < reps; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    while (true) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= reps || failed.load()) return;
      try {
        out[i] = f(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto nthreads = static_cast<std::size_t>(std::min<std::uint64_t>(workers, reps));
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
  return out;
}

EstimateRecord frequency_record(const std::string& name, const std::vector<double>& outcomes,
                                double seconds) {
  std::uint64_t hits = 0;
  for (double v : outcomes)
    if (v != 0.0) ++hits;
  EstimateRecord rec;
  rec.name = name;
  rec.n = outcomes.size();
  rec.estimate = static_cast<double>(hits) / static_cast<double>(outcomes.size());
  const auto ci = wilson_ci(hits, outcomes.size());
  rec.ci_lo = ci.lo;
  rec.ci_hi = ci.hi;
  rec.seconds = seconds;
  return rec;
}

double elapsed_seconds(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace opre
