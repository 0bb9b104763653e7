#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "opre/dist.hpp"

namespace opre {

struct InsufficientColumns : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Columnar stretch environment: xi[x] weakens the vertices of column x,
// nu[x] the bonds between columns x and x+1. moment_exponent declares the
// (1+eps)-th moment the spec of the environment is supposed to have; specs
// known to violate it are admitted for exploration when heavy_tailed is set.
struct StretchSpec {
  DistSpec xi;
  DistSpec nu;
  double moment_exponent = 1.5;
  bool heavy_tailed = false;
};

struct StretchEnvironment {
  std::int64_t width = 0;
  std::vector<double> xi;  // size width
  std::vector<double> nu;  // size width - 1
};

// Stationarised renewal embedding. Points are the embedded column positions,
//   X_0 = chi,  X_{i+1} - X_i = ceil(xi_i) + ceil(nu_{i,i+1}),
// with the stretches integerised at embedding time (never at sampling time).
// B is the fair parity coin of the alternative embedding: vertices live at
// (t, X_i) with t + i + B even.
struct RenewalEmbedding {
  std::vector<std::int64_t> points;
  int B = 0;
  std::vector<std::int64_t> xi_at;   // size points.size()
  std::vector<std::int64_t> nu_gap;  // size points.size() - 1
  std::int64_t chi = 0;
  std::int64_t burn_in = 0;  // interarrivals consumed before X_0 (0 in zero mode)
};

struct ChiMode {
  enum Kind { zero, burn_in } kind = zero;
  std::int64_t n = 0;
  static ChiMode Zero() { return {zero, 0}; }
  static ChiMode BurnIn(std::int64_t n) { return {burn_in, n}; }
};

void validate(const StretchSpec& spec);

// i.i.d. draws; identical (spec, width, seed) gives identical output.
StretchEnvironment sample_stretches(const StretchSpec& spec, std::int64_t width, std::uint64_t seed);

// Builds the embedding from an environment. In burn_in(n) mode the first n
// interarrivals are consumed as warm-up: chi is the forward waiting time to
// the next renewal seen from a uniformly random integer time in the consumed
// window, which converges to the stationary delay of the integerised renewal.
RenewalEmbedding build_embedding(const StretchEnvironment& env, std::uint64_t parity_seed,
                                 ChiMode chi_mode = ChiMode::Zero());

// Integerised stretches governing column X_i and bond (X_i, X_{i+1});
// the bond is absent at the last point.
std::pair<std::int64_t, std::optional<std::int64_t>> gap_lookup(const RenewalEmbedding& emb,
                                                                std::int64_t i);

}  // namespace opre
