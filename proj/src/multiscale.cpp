#include "opre/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opre/rng.hpp"

namespace opre {

std::int64_t scale_ratio(std::int64_t L, double gamma) {
  if (L < 1) throw std::invalid_argument("scale_ratio: L must be >= 1");
  long double v = std::pow(static_cast<long double>(L), static_cast<long double>(gamma) - 1.0L);
  long double r = std::floor(v);
  // nudge across representation error at near-integer powers
  if (v - r > 1.0L - 1e-12L) r += 1.0L;
  return static_cast<std::int64_t>(r);
}

namespace {
double log_ceil_exp(double x) {
  // log(ceil(exp(x))); exact below the integer-representable range, and the
  // ceiling correction is < e^-x afterwards.
  if (x < 0.0) x = 0.0;
  if (x <= 36.0) return std::log(std::ceil(std::exp(x)));
  return x;
}
}  // namespace

ScaleSchedule build_schedule(double epsilon, double alpha, double gamma, std::int64_t L0, double mu,
                             double beta, std::int64_t K_max, bool relaxed) {
  ScaleSchedule s;
  s.epsilon = epsilon;
  s.alpha = alpha;
  s.gamma = gamma;
  s.mu = mu;
  s.beta = beta;
  s.L0 = L0;
  s.relaxed = relaxed;

  auto fail = [&](const std::string& msg) { s.violations.push_back(msg); };
  std::ostringstream os;

  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(alpha > 0.0 && alpha <= epsilon / 2.0)) {
    os.str("");
    os << "alpha=" << alpha << " outside (0, epsilon/2] = (0, " << epsilon / 2.0 << "]";
    fail(os.str());
  }
  const double gamma_hi = 1.0 + alpha / (alpha + 2.0);
  if (!(gamma > 1.0 && gamma <= gamma_hi)) {
    os.str("");
    os << "gamma=" << gamma << " outside (1, 1+alpha/(alpha+2)] = (1, " << gamma_hi << "]";
    fail(os.str());
  }
  if (L0 < 2 || std::pow(static_cast<double>(L0), gamma - 1.0) < 5.0 - 1e-12) {
    os.str("");
    os << "L0=" << L0 << " violates L0^(gamma-1) >= 5";
    fail(os.str());
  }
  if (!(gamma > 1.0) || !(mu > 1.0 / gamma && mu < 1.0)) {
    os.str("");
    os << "mu=" << mu << " outside (1/gamma, 1) = (" << 1.0 / gamma << ", 1)";
    fail(os.str());
  }
  const double beta_lo = gamma * mu - gamma + 1.0;
  if (!(beta > beta_lo && beta < 1.0)) {
    os.str("");
    os << "beta=" << beta << " outside (gamma*mu-gamma+1, 1) = (" << beta_lo << ", 1)";
    fail(os.str());
  }
  if (!(beta + gamma - 1.0 > std::max(gamma * beta, gamma * mu))) {
    os.str("");
    os << "beta+gamma-1=" << beta + gamma - 1.0 << " not above max(gamma*beta, gamma*mu)="
       << std::max(gamma * beta, gamma * mu);
    fail(os.str());
  }
  if (K_max < 0) fail("K_max must be >= 0");

  if (!s.violations.empty() && !relaxed)
    throw ConstraintViolation("schedule constraints violated", s.violations);

  constexpr std::int64_t kCap = std::int64_t{1} << 62;
  s.L.push_back(L0);
  s.logH.push_back(std::log(static_cast<double>(L0)));
  for (std::int64_t k = 1; k <= K_max; ++k) {
    const std::int64_t prev = s.L.back();
    const std::int64_t ratio = scale_ratio(prev, gamma);
    if (ratio < 1 || prev > kCap / ratio) {
      s.overflow_truncated = true;
      break;
    }
    const std::int64_t next = prev * ratio;
    s.L.push_back(next);
    const double x = std::pow(static_cast<double>(next), mu);
    s.logH.push_back(std::log(2.0) + std::log(static_cast<double>(ratio)) + log_ceil_exp(x) +
                     s.logH[static_cast<std::size_t>(k - 1)]);
  }
  s.K_max = static_cast<std::int64_t>(s.L.size()) - 1;
  return s;
}

BlockTree classify_blocks(const RenewalEmbedding& emb, const ScaleSchedule& sched, std::int64_t k_max,
                          std::int64_t window) {
  if (k_max < 0 || k_max > sched.K_max) throw std::invalid_argument("classify_blocks: bad k_max");
  BlockTree tree;
  const std::int64_t L0 = sched.L[0];
  const std::int64_t n0 = window / L0;
  if (window / sched.L[static_cast<std::size_t>(k_max)] < 1)
    throw std::invalid_argument("classify_blocks: window too small for requested scale");
  tree.block_len.assign(sched.L.begin(), sched.L.begin() + k_max + 1);
  tree.good.resize(static_cast<std::size_t>(k_max + 1));
  auto& g0 = tree.good[0];
  g0.resize(static_cast<std::size_t>(n0));
  for (std::int64_t i = 0; i < n0; ++i) {
    const std::int64_t lo = i * L0;
    auto it = std::lower_bound(emb.points.begin(), emb.points.end(), lo);
    g0[static_cast<std::size_t>(i)] = (it != emb.points.end() && *it < lo + L0) ? 1 : 0;
  }
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const std::int64_t m = sched.L[static_cast<std::size_t>(k)] / sched.L[static_cast<std::size_t>(k - 1)];
    const auto& sub = tree.good[static_cast<std::size_t>(k - 1)];
    const std::int64_t n = static_cast<std::int64_t>(sub.size()) / m;
    auto& cur = tree.good[static_cast<std::size_t>(k)];
    cur.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      int bad = 0;
      std::int64_t first_bad = -1, last_bad = -1;
      for (std::int64_t j = i * m; j < (i + 1) * m; ++j) {
        if (!sub[static_cast<std::size_t>(j)]) {
          ++bad;
          if (first_bad < 0) first_bad = j;
          last_bad = j;
        }
      }
      cur[static_cast<std::size_t>(i)] =
          (bad <= 1 || (bad == 2 && last_bad == first_bad + 1)) ? 1 : 0;
    }
  }
  return tree;
}

BadProbEstimate estimate_bad_prob(const StretchSpec& spec, const ScaleSchedule& sched, std::int64_t k,
                                  std::uint64_t replications, std::uint64_t seed) {
  if (k < 0 || k > 2) throw std::invalid_argument("estimate_bad_prob: only scales k <= 2 are feasible");
  if (k > sched.K_max) throw std::invalid_argument("estimate_bad_prob: schedule too shallow");
  if (replications == 0) throw std::invalid_argument("estimate_bad_prob: need replications");
  validate(spec);

  const std::int64_t Lk = sched.L[static_cast<std::size_t>(k)];
  constexpr std::int64_t kBurn = 2048;
  std::uint64_t bad = 0;
  for (std::uint64_t rep = 0; rep < replications; ++rep) {
    Rng rng(derive_seed(seed, rep, "badprob"));
    // stationarised start: forward waiting time seen from a uniform time in
    // the burn-in window
    std::vector<std::int64_t> sums(1, 0);
    sums.reserve(kBurn + 1);
    for (std::int64_t j = 0; j < kBurn; ++j) {
      const auto gap = static_cast<std::int64_t>(std::ceil(sample(spec.xi, rng))) +
                       static_cast<std::int64_t>(std::ceil(sample(spec.nu, rng)));
      if (gap <= 0) throw std::invalid_argument("estimate_bad_prob: degenerate zero interarrival");
      sums.push_back(sums.back() + gap);
    }
    const auto tau = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(sums.back())));
    auto it = std::lower_bound(sums.begin(), sums.end(), tau);
    std::int64_t x = *it - tau;

    // generate points through [0, Lk) and classify the block tree rooted at 0
    RenewalEmbedding emb;
    while (x <= Lk) {
      emb.points.push_back(x);
      const auto gap = static_cast<std::int64_t>(std::ceil(sample(spec.xi, rng))) +
                       static_cast<std::int64_t>(std::ceil(sample(spec.nu, rng)));
      if (gap <= 0) throw std::invalid_argument("estimate_bad_prob: degenerate zero interarrival");
      x += gap;
    }
    if (emb.points.empty()) emb.points.push_back(x);  // first point beyond the block
    auto tree = classify_blocks(emb, sched, k, Lk);
    if (!tree.good[static_cast<std::size_t>(k)][0]) ++bad;
  }
  BadProbEstimate est;
  est.replications = replications;
  est.estimate = static_cast<double>(bad) / static_cast<double>(replications);
  est.ci = wilson_ci(bad, replications);
  est.threshold = std::pow(static_cast<double>(Lk), -sched.alpha);
  est.within_threshold = est.ci.lo <= est.threshold;
  return est;
}

TraversalBound fastest_traverse_bound(const RenewalEmbedding& emb, std::int64_t lo, std::int64_t hi,
                                      std::int64_t t_start) {
  if (lo > hi) throw std::invalid_argument("fastest_traverse_bound: bad segment");
  const auto& x = emb.points;
  auto first = std::lower_bound(x.begin(), x.end(), lo);
  auto last = std::upper_bound(x.begin(), x.end(), hi);
  const auto n = static_cast<std::int64_t>(last - first);
  if (n < 2) throw InsufficientColumns("fastest_traverse_bound: fewer than two renewal points");
  TraversalBound tb;
  tb.log_prob = -static_cast<double>(*(last - 1) - *first);
  const std::int64_t i0 = first - x.begin();
  const std::int64_t delta = ((t_start + i0 + emb.B) % 2 == 0) ? 0 : 1;
  for (std::int64_t r = 0; r < n - 1; ++r)
    tb.vertices.emplace_back(t_start + delta + r, i0 + r);
  return tb;
}

RenormSiteGrid build_renorm_grid(std::int64_t T, std::int64_t l, const std::vector<CrossingTriple>& triples) {
  if (T < 0 || l < 0) throw std::invalid_argument("build_renorm_grid: bad extents");
  RenormSiteGrid grid;
  grid.T = T;
  grid.l = l;
  grid.open.assign(static_cast<std::size_t>((T + 1) * (l + 1)), 0);
  if (triples.size() != grid.open.size())
    throw std::invalid_argument("build_renorm_grid: triples size mismatch");
  for (std::int64_t j = 0; j <= T; ++j)
    for (std::int64_t i = (j & 1); i <= l; i += 2) {
      const auto& tr = triples[grid.index(j, i)];
      const bool lrc = (i == 0) ? true : tr.lrc;
      const bool rlc = (i == l) ? true : tr.rlc;
      grid.open[grid.index(j, i)] = (lrc && rlc && tr.btc) ? 1 : 0;
    }
  return grid;
}

namespace {

std::vector<std::uint8_t> renorm_reach(const RenormSiteGrid& grid,
                                       const std::vector<std::uint8_t>& closed_override,
                                       bool use_override) {
  auto is_open = [&](std::int64_t j, std::int64_t i) {
    if (!grid.valid(j, i)) return false;
    if (use_override) return closed_override[grid.index(j, i)] == 0;
    return grid.open[grid.index(j, i)] != 0;
  };
  std::vector<std::uint8_t> reached(grid.open.size(), 0);
  for (std::int64_t i = 0; i <= grid.l; i += 2)
    if (is_open(0, i)) reached[grid.index(0, i)] = 1;
  for (std::int64_t j = 0; j < grid.T; ++j)
    for (std::int64_t i = (j & 1); i <= grid.l; i += 2) {
      if (!grid.valid(j, i) || !reached[grid.index(j, i)]) continue;
      for (std::int64_t di : {-1, +1}) {
        const std::int64_t ni = i + di;
        if (grid.valid(j + 1, ni) && is_open(j + 1, ni)) reached[grid.index(j + 1, ni)] = 1;
      }
    }
  return reached;
}

bool top_reached(const RenormSiteGrid& grid, const std::vector<std::uint8_t>& reached) {
  for (std::int64_t i = (grid.T & 1); i <= grid.l; i += 2)
    if (reached[grid.index(grid.T, i)]) return true;
  return false;
}

}  // namespace

bool renorm_btc_path_exists(const RenormSiteGrid& grid) {
  auto reached = renorm_reach(grid, {}, false);
  return top_reached(grid, reached);
}

std::optional<Contour> find_blocking_contour(const RenormSiteGrid& grid) {
  auto reached = renorm_reach(grid, {}, false);
  if (top_reached(grid, reached)) return std::nullopt;

  // Witness frontier: closed bottom-row sites plus closed sites one step above
  // the reached region. This set blocks on its own and spans the grid width.
  std::vector<std::pair<std::int64_t, std::int64_t>> sites;
  std::vector<std::uint8_t> in_witness(grid.open.size(), 0);
  for (std::int64_t i = 0; i <= grid.l; i += 2)
    if (!grid.is_open(0, i)) {
      in_witness[grid.index(0, i)] = 1;
      sites.emplace_back(0, i);
    }
  for (std::int64_t j = 0; j < grid.T; ++j)
    for (std::int64_t i = (j & 1); i <= grid.l; i += 2) {
      if (!grid.valid(j, i) || !reached[grid.index(j, i)]) continue;
      for (std::int64_t di : {-1, +1}) {
        const std::int64_t ni = i + di;
        if (grid.valid(j + 1, ni) && !grid.is_open(j + 1, ni) && !in_witness[grid.index(j + 1, ni)]) {
          in_witness[grid.index(j + 1, ni)] = 1;
          sites.emplace_back(j + 1, ni);
        }
      }
    }

  // Internal certificate: the witness set alone must still block.
  std::vector<std::uint8_t> closed_override(grid.open.size(), 0);
  for (const auto& s : sites) closed_override[grid.index(s.first, s.second)] = 1;
  auto relaxed = renorm_reach(grid, closed_override, true);
  if (top_reached(grid, relaxed))
    throw std::logic_error("find_blocking_contour: witness frontier failed to block");

  std::sort(sites.begin(), sites.end(),
            [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
  Contour c;
  c.sites = std::move(sites);
  return c;
}

ContourCountAudit contour_count_audit(std::int64_t m) {
  if (m < 1 || m > 12) throw std::invalid_argument("contour_count_audit: m must be in [1, 12]");
  ContourCountAudit audit;
  audit.m = m;
  audit.bound = std::pow(4.0, static_cast<double>(m));
  audit.required = (m + 19) / 20;
  audit.min_extracted = m + 1;

  // self-avoiding walks of m diagonal steps from the origin of the L2 pattern
  std::vector<std::pair<std::int64_t, std::int64_t>> walk{{0, 0}};
  auto visited = [&](std::int64_t j, std::int64_t i) {
    for (const auto& s : walk)
      if (s.first == j && s.second == i) return true;
    return false;
  };
  auto extract = [&]() {
    std::vector<std::pair<std::int64_t, std::int64_t>> kept;
    for (const auto& s : walk) {
      bool ok = true;
      for (const auto& t : kept)
        if (std::max(std::llabs(s.first - t.first), std::llabs(s.second - t.second)) <= 2) {
          ok = false;
          break;
        }
      if (ok) kept.push_back(s);
    }
    return static_cast<std::int64_t>(kept.size());
  };
  std::uint64_t count = 0;
  std::int64_t min_kept = m + 1;
  auto dfs = [&](auto&& self, std::int64_t depth) -> void {
    if (depth == m) {
      ++count;
      min_kept = std::min(min_kept, extract());
      return;
    }
    const std::int64_t moves[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    const auto [j, i] = walk.back();
    for (const auto& mv : moves) {
      const std::int64_t nj = j + mv[0], ni = i + mv[1];
      if (visited(nj, ni)) continue;
      walk.emplace_back(nj, ni);
      self(self, depth + 1);
      walk.pop_back();
    }
  };
  dfs(dfs, 0);
  audit.count = count;
  audit.min_extracted = min_kept;
  return audit;
}

}  // namespace opre
