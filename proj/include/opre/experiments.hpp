#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "opre/config_io.hpp"
#include "opre/engine.hpp"
#include "opre/percolation.hpp"

namespace opre {

inline constexpr const char* kVersion = "0.1.0";

// One OPRE survival replication: did the frontier from source reach `depth`?
bool opre_survival_rep(const StretchEnvironment& env, const ConnectionFamily& fam_v,
                       const ConnectionFamily& fam_e, std::int64_t depth, std::int64_t source,
                       std::uint64_t seed);

// CPPR survival replication on line(n) with horizon T. The recovery sets are
// the periodic shifts restricted to (0, T]: the initial individual starts
// freshly infected, a recovery atom at exactly time 0 does not count.
enum class CpprKind { uni, ber };
bool cppr_survival_rep(CpprKind kind, double q, double lambda, std::int64_t n, double T,
                       std::uint64_t seed);

// Temporal-stretch survival depth with per-layer stretches from nu_dist.
std::int64_t temporal_depth_rep(double p, const DistSpec& nu_dist, std::int64_t t_limit,
                                std::int64_t width_cap, std::uint64_t seed);

std::vector<EstimateRecord> run_experiment(const ExperimentConfig& cfg);

void write_records_csv(const std::vector<EstimateRecord>& recs, std::uint64_t cfg_hash,
                       std::uint64_t seed, std::ostream& out);
void write_records_json(const std::vector<EstimateRecord>& recs, std::uint64_t cfg_hash,
                        std::uint64_t seed, std::ostream& out);

// Exit codes: 0 ok, 1 validation error, 2 runtime error, 3 acceptance failure.
int run_experiment_main(const ExperimentConfig& cfg, const json& raw_config);

}  // namespace opre
