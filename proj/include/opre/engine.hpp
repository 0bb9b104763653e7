#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "opre/stats.hpp"

namespace opre {

struct EstimateRecord {
  std::string name;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  std::uint64_t n = 0;
  double seconds = 0.0;
};

// Runs f(replication index) over a worker pool. Each replication derives its
// own seeds from its index, results land in a per-index slot and aggregation
// is sequential, so the outcome is bit-identical for every worker count.
std::vector<double> replicate(std::uint64_t reps, int workers,
                              const std::function<double(std::uint64_t)>& f);

// Wilson-interval record over 0/1 replication outcomes.
EstimateRecord frequency_record(const std::string& name, const std::vector<double>& outcomes,
                                double seconds);

double elapsed_seconds(const std::function<void()>& body);

}  // namespace opre
