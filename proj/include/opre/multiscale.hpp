#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opre/environment.hpp"
#include "opre/stats.hpp"

namespace opre {

struct ConstraintViolation : std::runtime_error {
  explicit ConstraintViolation(const std::string& what, std::vector<std::string> items_)
      : std::runtime_error(what), items(std::move(items_)) {}
  std::vector<std::string> items;
};

// Renormalisation parameter schedule. L_k = L_{k-1} * floor(L_{k-1}^(gamma-1))
// stays in exact integers below 2^62; H_k is carried in log space because it
// explodes doubly exponentially (logH_k = log 2 + log floor(L_{k-1}^(gamma-1))
// + log ceil(exp(L_k^mu)) + logH_{k-1}, H_0 = L_0).
struct ScaleSchedule {
  double epsilon = 0.0, alpha = 0.0, gamma = 0.0, mu = 0.0, beta = 0.0;
  std::int64_t L0 = 0;
  std::vector<std::int64_t> L;     // L[k]
  std::vector<double> logH;        // logH[k], natural log
  std::int64_t K_max = 0;          // deepest computed scale
  bool relaxed = false;
  bool overflow_truncated = false;  // hit the 2^62 cap before the requested K_max
  std::vector<std::string> violations;  // nonempty only in relaxed mode
};

// Validates Parameters 1 & 2 and computes the scale sequences. Violations are
// reported with the admissible interval for each offending parameter; with
// relaxed = false any violation throws, with relaxed = true the schedule is
// computed anyway and the violations are carried in the result.
ScaleSchedule build_schedule(double epsilon, double alpha, double gamma, std::int64_t L0, double mu,
                             double beta, std::int64_t K_max, bool relaxed = false);

// floor(L^(gamma-1)) as used by the recursion.
std::int64_t scale_ratio(std::int64_t L, double gamma);

// good[k][i] for blocks I_{k,i} = [i L_k, (i+1) L_k) within [0, window).
// Scale 0: good iff the block meets X. Scale k: good iff at most one bad
// sub-block, or exactly two bad and consecutive.
struct BlockTree {
  std::vector<std::int64_t> block_len;          // L_k per scale
  std::vector<std::vector<std::uint8_t>> good;  // good[k][i]
};

BlockTree classify_blocks(const RenewalEmbedding& emb, const ScaleSchedule& sched, std::int64_t k_max,
                          std::int64_t window);

struct BadProbEstimate {
  double estimate = 0.0;
  Interval ci;
  double threshold = 0.0;  // L_k^-alpha
  bool within_threshold = false;
  std::uint64_t replications = 0;
};

// Monte Carlo frequency of a bad scale-k block under the stationarised
// embedding of the given spec. Desk scale only: k <= 2.
BadProbEstimate estimate_bad_prob(const StretchSpec& spec, const ScaleSchedule& sched, std::int64_t k,
                                  std::uint64_t replications, std::uint64_t seed);

// Fastest-path traversal of a bad area: enumerates the renewal points
// Z_0..Z_{m+1} inside [lo, hi] and returns log of the opening-probability
// lower bound -(Z_{m+1} - Z_0) together with the explicit diagonal path
// (vertices up to Z_m; the right-most column is not used).
struct TraversalBound {
  double log_prob = 0.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> vertices;  // (t offset, column index)
};

TraversalBound fastest_traverse_bound(const RenewalEmbedding& emb, std::int64_t lo, std::int64_t hi,
                                      std::int64_t t_start = 0);

// Renormalised 1-dependent site lattice over {0..T} x {0..l}, parity pattern
// j + i even. Site (j,i) is open iff LRC(j,i-1), RLC(j,i) and BTC(j,i) all
// occurred; at i = 0 the LRC and at i = l the RLC requirement is dropped.
struct CrossingTriple {
  bool lrc = true, rlc = true, btc = true;
};

struct RenormSiteGrid {
  std::int64_t T = 0, l = 0;
  std::vector<std::uint8_t> open;  // row-major over (j, i), valid parity only

  bool valid(std::int64_t j, std::int64_t i) const {
    return j >= 0 && j <= T && i >= 0 && i <= l && (((j + i) & 1) == 0);
  }
  std::size_t index(std::int64_t j, std::int64_t i) const {
    return static_cast<std::size_t>(j * (l + 1) + i);
  }
  bool is_open(std::int64_t j, std::int64_t i) const { return valid(j, i) && open[index(j, i)]; }
};

// triples[grid.index(j,i)] supplies the three indicators per valid site.
RenormSiteGrid build_renorm_grid(std::int64_t T, std::int64_t l, const std::vector<CrossingTriple>& triples);

// Directed bottom-top (j = 0 to j = T) site path through open sites.
bool renorm_btc_path_exists(const RenormSiteGrid& grid);

// Blocking contour: the closed-site frontier that witnesses the absence of a
// bottom-top crossing. Returned sites are exactly the closed sites that stop
// the reached region (plus the closed bottom-row sites); they block on their
// own, span columns from <=1 to >= l-1, and are listed in column order.
struct Contour {
  std::vector<std::pair<std::int64_t, std::int64_t>> sites;  // (j, i)
  std::int64_t length() const { return static_cast<std::int64_t>(sites.size()); }
};

std::optional<Contour> find_blocking_contour(const RenormSiteGrid& grid);

struct ContourCountAudit {
  std::int64_t m = 0;
  std::uint64_t count = 0;          // enumerated contours of m steps from a fixed site
  double bound = 0.0;               // 4^m
  std::int64_t min_extracted = 0;   // smallest independent-site extraction over all contours
  std::int64_t required = 0;        // ceil(m / 20)
};

// Exhaustively enumerates self-avoiding contour walks of m steps from a fixed
// site (4 diagonal neighbour moves of the renormalised lattice), checks the
// 4^m bound, and greedily extracts pairwise L-inf > 2 sites from each walk.
ContourCountAudit contour_count_audit(std::int64_t m);

}  // namespace opre
