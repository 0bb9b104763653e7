#include "opre/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "opre/couplings.hpp"
#include "opre/engine.hpp"
#include "opre/experiments.hpp"
#include "opre/multiscale.hpp"
#include "opre/percolation.hpp"
#include "opre/rng.hpp"
#include "opre/stats.hpp"

namespace opre {

namespace {

constexpr std::uint64_t kSeed = 0x0507A11CE5EEDull;

struct Check {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

// --------------------------------------------------------------- criterion 1

// independent oracle: plain recurrence partial sum of the Poisson CDF
double cdf_oracle(double lambda, std::int64_t k) {
  double term = std::exp(-lambda), cdf = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    cdf += term;
    term *= lambda / static_cast<double>(i + 1);
  }
  return cdf;
}

CriterionResult criterion_poisson_tail(int workers) {
  Check c;
  const std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0, 8.0};
  double worst = 0.0;
  for (double lam : lambdas)
    for (std::int64_t k = 0; k <= 30; ++k) {
      const double err = std::fabs(poisson_tail(lam, k) - (1.0 - cdf_oracle(lam, k)));
      worst = std::max(worst, err);
    }
  c.require(worst <= 1e-12, "tail vs partial-sum residual " + std::to_string(worst));

  // Monte Carlo: k Exp(lambda) variables summing to <= 1
  constexpr std::uint64_t kTrials = 100000;
  std::vector<std::pair<double, std::int64_t>> grid;
  for (double lam : lambdas)
    for (std::int64_t k = 0; k <= 30; ++k) grid.emplace_back(lam, k);
  auto results = replicate(grid.size(), workers, [&](std::uint64_t g) {
    const auto [lam, k] = grid[g];
    if (k == 0) return 1.0;  // empty sum is 0 <= 1
    Rng rng(derive_seed(kSeed, g, "acc1"));
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < kTrials; ++t) {
      double s = 0.0;
      for (std::int64_t i = 0; i < k && s <= 1.0; ++i) s += rng.exponential(lam);
      if (s <= 1.0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(kTrials);
  });
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto [lam, k] = grid[g];
    const double p = poisson_tail(lam, k);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(kTrials));
    if (std::fabs(results[g] - p) > 3.0 * sigma + 1e-12) {
      std::ostringstream os;
      os << "MC off at lambda=" << lam << ", k=" << k << " (freq " << results[g] << " vs " << p << ")";
      c.require(false, os.str());
    }
  }
  return {1, "poisson-tail-identity", c.pass, c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 2

CriterionResult criterion_kernel_bound(int) {
  Check c;
  auto r1 = check_kernel_bounds(ConnectionFamily::cppr_uniform(2.0), 1, 10000);
  c.require(r1.violations == 0, "cppr_uniform(2) violates on s in 1..1e4");
  auto r2 = check_kernel_bounds(ConnectionFamily::cppr_bernoulli(100.0), 1, 1000000);
  c.require(r2.violations == 0, "cppr_bernoulli(100) violates on s in 1..1e6");
  std::ostringstream d;
  d << "min margins " << r1.min_margin << " (uni), " << r2.min_margin << " (ber)";
  if (!c.pass) d << "; " << c.detail.str();
  return {2, "kernel-lower-bound", c.pass, d.str(), 0.0};
}

// --------------------------------------------------------------- criterion 3

CriterionResult criterion_coupling_identities(int) {
  Check c;
  Rng rng(derive_seed(kSeed, 0, "acc3"));
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double lam = 0.1 + 99.9 * rng.next_double();
    const double S = rng.next_double_pos();
    const double lhs = eval_kernel(ConnectionFamily::cppr_uniform(lam), -std::log(S));
    const double rhs = -std::expm1(-lam * S);
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  c.require(worst <= 1e-12, "uniform identity residual " + std::to_string(worst));
  for (double lam : {2.0, 50.0}) {
    const auto fam = ConnectionFamily::cppr_bernoulli(lam);
    for (std::int64_t k = 0; k <= 1000; ++k) {
      const double lhs = eval_kernel(fam, static_cast<double>(k) * static_cast<double>(k));
      const double rhs = (k == 0) ? 1.0 : poisson_tail(lam, k);
      if (lhs != rhs) {
        c.require(false, "bernoulli identity not exact at K=" + std::to_string(k));
        break;
      }
    }
  }
  return {3, "coupling-identities", c.pass, c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 4

CriterionResult criterion_distribution_validators(int) {
  Check c;
  {
    Rng rng(derive_seed(kSeed, 0, "acc4.uni"));
    std::vector<double> nu(100000);
    for (auto& v : nu) {
      double d = std::fabs(rng.next_double() - rng.next_double());
      d = std::min(d, 1.0 - d);
      while (d == 0.0) {
        d = std::fabs(rng.next_double() - rng.next_double());
        d = std::min(d, 1.0 - d);
      }
      v = -std::log(2.0 * d);
    }
    std::sort(nu.begin(), nu.end());
    const double d = ks_statistic(nu, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
    const double p = ks_pvalue(d, nu.size());
    std::ostringstream os;
    os << "nu KS p=" << p;
    c.require(p > 1e-3, os.str());
  }
  for (double p_good : {0.3, 0.5}) {
    Rng rng(derive_seed(kSeed, p_good == 0.3 ? 1 : 2, "acc4.cpre"));
    std::vector<double> observed(41, 0.0);
    std::uint64_t n = 0;
    std::int64_t gap = 0;
    while (n < 100000) {
      ++gap;
      if (rng.next_double() < p_good) {
        const auto bin = std::min<std::int64_t>(gap, 40);
        observed[static_cast<std::size_t>(bin)] += 1.0;
        ++n;
        gap = 0;
      }
    }
    std::vector<double> expected(41, 0.0);
    for (std::int64_t k = 1; k <= 40; ++k)
      expected[static_cast<std::size_t>(k)] =
          static_cast<double>(n) * p_good * std::pow(1.0 - p_good, static_cast<double>(k - 1));
    expected[40] = static_cast<double>(n) * std::pow(1.0 - p_good, 39.0);
    std::vector<double> obs(observed.begin() + 1, observed.end());
    std::vector<double> exp(expected.begin() + 1, expected.end());
    const double pv = chi2_gof_pvalue(obs, exp);
    std::ostringstream os;
    os << "cpre gap chi2 p=" << pv << " at p=" << p_good;
    c.require(pv > 1e-3, os.str());
  }
  return {4, "distribution-validators", c.pass, c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 5

CriterionResult criterion_replay(int) {
  Check c;
  const std::pair<CouplingKind, const char*> kinds[] = {{CouplingKind::d2_block, "d2_block"},
                                                        {CouplingKind::cppr_uni, "cppr_uni"},
                                                        {CouplingKind::cppr_ber, "cppr_ber"},
                                                        {CouplingKind::cpre, "cpre"}};
  std::ostringstream d;
  for (const auto& [kind, name] : kinds) {
    const auto rep = validate_coupling(kind, 200, derive_seed(kSeed, 0, name));
    d << name << ": " << rep.paths << " paths";
    if (rep.failures) d << " (" << rep.failures << " FAILED: " << rep.first_error << ")";
    d << "; ";
    c.require(rep.failures == 0, std::string(name) + " replay failures");
    c.require(rep.paths >= 200, std::string(name) + " produced too few paths");
    c.require(rep.max_identity_error <= 1e-12, std::string(name) + " identity error");
  }
  return {5, "replay-soundness", c.pass, d.str() + c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 6

bool oracle_btc_exists(const RenormSiteGrid& g) {
  // independent recursive search
  std::vector<std::int8_t> memo(g.open.size(), -1);
  auto visit = [&](auto&& self, std::int64_t j, std::int64_t i) -> bool {
    if (!g.is_open(j, i)) return false;
    if (j == g.T) return true;
    auto& m = memo[g.index(j, i)];
    if (m >= 0) return m != 0;
    m = 0;
    const bool ok = self(self, j + 1, i - 1) || self(self, j + 1, i + 1);
    m = ok ? 1 : 0;
    return ok;
  };
  for (std::int64_t i = 0; i <= g.l; i += 2)
    if (visit(visit, 0, i)) return true;
  return false;
}

CriterionResult criterion_duality(int workers) {
  Check c;
  std::vector<std::pair<std::int64_t, std::int64_t>> geoms;
  for (std::int64_t T = 1; T <= 5; ++T)
    for (std::int64_t l = 1; l <= 8; ++l) {
      std::int64_t sites = 0;
      for (std::int64_t j = 0; j <= T; ++j)
        for (std::int64_t i = j & 1; i <= l; i += 2) ++sites;
      if (sites >= 2 && sites <= 16) geoms.emplace_back(T, l);
    }
  auto bad = replicate(geoms.size(), workers, [&](std::uint64_t gi) {
    const auto [T, l] = geoms[gi];
    std::vector<std::pair<std::int64_t, std::int64_t>> slots;
    for (std::int64_t j = 0; j <= T; ++j)
      for (std::int64_t i = j & 1; i <= l; i += 2) slots.emplace_back(j, i);
    RenormSiteGrid grid;
    grid.T = T;
    grid.l = l;
    std::uint64_t mismatches = 0;
    for (std::uint64_t mask = 0; mask < (1ull << slots.size()); ++mask) {
      grid.open.assign(static_cast<std::size_t>((T + 1) * (l + 1)), 0);
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask & (1ull << s)) grid.open[grid.index(slots[s].first, slots[s].second)] = 1;
      const bool contour = find_blocking_contour(grid).has_value();
      const bool path = oracle_btc_exists(grid);
      if (contour == path) ++mismatches;
    }
    return static_cast<double>(mismatches);
  });
  std::uint64_t total_mismatch = 0;
  for (double b : bad) total_mismatch += static_cast<std::uint64_t>(b);
  std::ostringstream d;
  d << geoms.size() << " geometries exhausted";
  c.require(total_mismatch == 0, "XOR failed " + std::to_string(total_mismatch) + " times");

  for (std::int64_t m : {1, 4, 6, 9, 12}) {
    const auto audit = contour_count_audit(m);
    c.require(static_cast<double>(audit.count) <= audit.bound,
              "contour count " + std::to_string(audit.count) + " exceeds 4^" + std::to_string(m));
    c.require(audit.min_extracted >= audit.required,
              "independent-site extraction failed at m=" + std::to_string(m));
  }
  return {6, "contour-crossing-duality", c.pass, d.str() + "; " + c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 7

// simple per-layer set propagation, independent of the bitset machinery
std::vector<std::set<std::int64_t>> oracle_reach(const OpenConfiguration& cfg,
                                                 const std::vector<std::int64_t>& sources,
                                                 std::int64_t depth) {
  std::vector<std::set<std::int64_t>> layers(static_cast<std::size_t>(depth) + 1);
  for (auto s : sources)
    if (cfg.vertex_is_open(0, s)) layers[0].insert(s);
  for (std::int64_t t = 0; t < depth; ++t)
    for (auto ccol : layers[static_cast<std::size_t>(t)]) {
      if (cfg.edge_is_open(t, ccol, +1) && cfg.vertex_is_open(t + 1, ccol + 1))
        layers[static_cast<std::size_t>(t + 1)].insert(ccol + 1);
      if (cfg.edge_is_open(t, ccol, -1) && cfg.vertex_is_open(t + 1, ccol - 1))
        layers[static_cast<std::size_t>(t + 1)].insert(ccol - 1);
    }
  return layers;
}

bool oracle_crossing(const OpenConfiguration& cfg, std::int64_t t0, std::int64_t t1, std::int64_t c_lo,
                     std::int64_t c_hi, CrossingKind kind) {
  // memoised recursion over (t, c)
  std::map<std::pair<std::int64_t, std::int64_t>, bool> memo;
  auto target = [&](std::int64_t t, std::int64_t cc) {
    if (kind == CrossingKind::LRC) return cc == c_hi;
    if (kind == CrossingKind::RLC) return cc == c_lo;
    return t == t1;
  };
  auto go = [&](auto&& self, std::int64_t t, std::int64_t cc) -> bool {
    if (cc < c_lo || cc > c_hi || t > t1 || !cfg.vertex_is_open(t, cc)) return false;
    if (target(t, cc)) return true;
    auto key = std::make_pair(t, cc);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    memo[key] = false;
    bool ok = false;
    if (t < t1) {
      if (cfg.edge_is_open(t, cc, +1)) ok = ok || self(self, t + 1, cc + 1);
      if (!ok && cfg.edge_is_open(t, cc, -1)) ok = self(self, t + 1, cc - 1);
    }
    memo[key] = ok;
    return ok;
  };
  bool found = false;
  if (kind == CrossingKind::BTC) {
    for (std::int64_t cc = c_lo; cc <= c_hi && !found; ++cc) found = go(go, t0, cc);
  } else {
    const std::int64_t start = (kind == CrossingKind::LRC) ? c_lo : c_hi;
    for (std::int64_t t = t0; t <= t1 && !found; ++t) found = go(go, t, start);
  }
  return found;
}

OpenConfiguration blank_config(std::int64_t t_max, std::int64_t x_max) {
  OpenConfiguration cfg;
  cfg.window = {t_max, x_max, WindowVariant::plain};
  cfg.parity = 0;
  cfg.vertex_open.assign(static_cast<std::size_t>(t_max + 1), BitRow(x_max + 1));
  cfg.edge_up.assign(static_cast<std::size_t>(t_max), BitRow(x_max + 1));
  cfg.edge_down.assign(static_cast<std::size_t>(t_max), BitRow(x_max + 1));
  return cfg;
}

bool reach_matches_oracle(const OpenConfiguration& cfg) {
  std::vector<std::int64_t> sources;
  for (std::int64_t cc = 0; cc <= cfg.window.x_max; cc += 2) sources.push_back(cc);
  auto fast = reach(cfg, sources, cfg.window.t_max);
  auto oracle = oracle_reach(cfg, sources, cfg.window.t_max);
  for (std::int64_t t = 0; t <= cfg.window.t_max; ++t)
    for (std::int64_t cc = 0; cc <= cfg.window.x_max; ++cc)
      if (fast[static_cast<std::size_t>(t)].test(cc) !=
          (oracle[static_cast<std::size_t>(t)].count(cc) > 0))
        return false;
  return true;
}

bool crossings_match_oracle(const OpenConfiguration& cfg, const RenewalEmbedding& emb) {
  Rectangle rect{0, cfg.window.t_max, 0, cfg.window.x_max};
  ReducedRectangle red;
  try {
    red = reduce_rectangle(emb, rect);
  } catch (const InsufficientColumns&) {
    return true;
  }
  for (auto kind : {CrossingKind::LRC, CrossingKind::RLC, CrossingKind::BTC}) {
    const bool fast = crossing(cfg, emb, rect, kind);
    const bool slow = oracle_crossing(cfg, rect.t0, rect.t1, red.i_lo, red.i_hi, kind);
    if (fast != slow) return false;
  }
  return true;
}

CriterionResult criterion_reach_oracle(int workers) {
  Check c;
  // exhaustive small windows: every shape with at most 20 valid vertices
  std::vector<std::pair<std::int64_t, std::int64_t>> shapes;
  for (std::int64_t t = 1; t <= 6; ++t)
    for (std::int64_t x = 1; x <= 6; ++x) {
      std::int64_t v = 0;
      for (std::int64_t tt = 0; tt <= t; ++tt)
        for (std::int64_t cc = tt & 1; cc <= x; cc += 2) ++v;
      if (v <= 20) shapes.emplace_back(t, x);
    }
  auto shape_bad = replicate(shapes.size(), workers, [&](std::uint64_t si) {
    const auto [t_max, x_max] = shapes[si];
    std::vector<std::pair<std::int64_t, std::int64_t>> vslots;
    for (std::int64_t t = 0; t <= t_max; ++t)
      for (std::int64_t cc = t & 1; cc <= x_max; cc += 2) vslots.emplace_back(t, cc);
    auto emb = trivial_embedding(x_max + 1);
    std::uint64_t bad = 0;
    // vertex-state exhaustive, all edges open
    for (std::uint64_t mask = 0; mask < (1ull << vslots.size()); ++mask) {
      auto cfg = blank_config(t_max, x_max);
      for (auto& row : cfg.edge_up)
        for (auto& w : row.words()) w = ~0ull;
      for (auto& row : cfg.edge_down)
        for (auto& w : row.words()) w = ~0ull;
      for (std::size_t s = 0; s < vslots.size(); ++s)
        if (mask & (1ull << s)) cfg.vertex_open[static_cast<std::size_t>(vslots[s].first)].set(vslots[s].second);
      if (!reach_matches_oracle(cfg) || !crossings_match_oracle(cfg, emb)) ++bad;
    }
    // edge-state exhaustive, all vertices open, when feasible
    std::vector<std::tuple<std::int64_t, std::int64_t, int>> eslots;
    for (std::int64_t t = 0; t < t_max; ++t)
      for (std::int64_t cc = t & 1; cc <= x_max; cc += 2) {
        if (cc + 1 <= x_max) eslots.emplace_back(t, cc, +1);
        if (cc >= 1) eslots.emplace_back(t, cc, -1);
      }
    if (eslots.size() <= 18) {
      for (std::uint64_t mask = 0; mask < (1ull << eslots.size()); ++mask) {
        auto cfg = blank_config(t_max, x_max);
        for (std::int64_t t = 0; t <= t_max; ++t)
          for (std::int64_t cc = t & 1; cc <= x_max; cc += 2)
            cfg.vertex_open[static_cast<std::size_t>(t)].set(cc);
        for (std::size_t s = 0; s < eslots.size(); ++s) {
          if (!(mask & (1ull << s))) continue;
          const auto [t, cc, dir] = eslots[s];
          if (dir > 0)
            cfg.edge_up[static_cast<std::size_t>(t)].set(cc);
          else
            cfg.edge_down[static_cast<std::size_t>(t)].set(cc);
        }
        if (!reach_matches_oracle(cfg) || !crossings_match_oracle(cfg, emb)) ++bad;
      }
    }
    return static_cast<double>(bad);
  });
  std::uint64_t bad_total = 0;
  for (double b : shape_bad) bad_total += static_cast<std::uint64_t>(b);
  c.require(bad_total == 0, std::to_string(bad_total) + " exhaustive mismatches");

  // 1000 random larger instances
  auto rand_bad = replicate(1000, workers, [&](std::uint64_t i) {
    Rng rng(derive_seed(kSeed, i, "acc7.rand"));
    const std::int64_t t_max = 6 + static_cast<std::int64_t>(rng.next_below(10));
    const std::int64_t x_max = 6 + static_cast<std::int64_t>(rng.next_below(10));
    const double pv = 0.3 + 0.6 * rng.next_double();
    const double pe = 0.3 + 0.6 * rng.next_double();
    auto cfg = blank_config(t_max, x_max);
    for (std::int64_t t = 0; t <= t_max; ++t)
      for (std::int64_t cc = t & 1; cc <= x_max; cc += 2) {
        if (rng.next_double() < pv) cfg.vertex_open[static_cast<std::size_t>(t)].set(cc);
        if (t < t_max) {
          if (cc + 1 <= x_max && rng.next_double() < pe) cfg.edge_up[static_cast<std::size_t>(t)].set(cc);
          if (cc >= 1 && rng.next_double() < pe) cfg.edge_down[static_cast<std::size_t>(t)].set(cc);
        }
      }
    auto emb = trivial_embedding(x_max + 1);
    return (reach_matches_oracle(cfg) && crossings_match_oracle(cfg, emb)) ? 0.0 : 1.0;
  });
  std::uint64_t rand_fail = 0;
  for (double b : rand_bad) rand_fail += static_cast<std::uint64_t>(b);
  c.require(rand_fail == 0, std::to_string(rand_fail) + " random-instance mismatches");
  return {7, "reachability-oracle", c.pass, c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 8

CriterionResult criterion_schedule(int) {
  Check c;
  Rng rng(derive_seed(kSeed, 0, "acc8"));
  int built = 0;
  long double worst_logh = 0.0L;
  for (int trial = 0; built < 50 && trial < 5000; ++trial) {
    const double eps = 1.0 + 7.0 * rng.next_double();
    const double alpha = (eps / 2.0) * (0.2 + 0.8 * rng.next_double());
    const double gamma = 1.0 + (alpha / (alpha + 2.0)) * (0.3 + 0.7 * rng.next_double());
    const auto L0_min = static_cast<std::int64_t>(std::ceil(std::pow(5.0, 1.0 / (gamma - 1.0))));
    if (L0_min > 1000000) continue;
    const std::int64_t L0 = L0_min + static_cast<std::int64_t>(rng.next_below(64));
    const double mu = 1.0 / gamma + (1.0 - 1.0 / gamma) * (0.2 + 0.6 * rng.next_double());
    const double blo = gamma * mu - gamma + 1.0;
    const double beta = blo + (1.0 - blo) * (0.2 + 0.6 * rng.next_double());
    ScaleSchedule sched;
    try {
      sched = build_schedule(eps, alpha, gamma, L0, mu, beta, 3);
    } catch (const ConstraintViolation& e) {
      c.require(false, "valid tuple rejected: " + std::string(e.items.empty() ? "?" : e.items[0]));
      continue;
    }
    ++built;
    c.require(sched.beta + sched.gamma - 1.0 > std::max(sched.gamma * sched.beta, sched.gamma * sched.mu),
              "beta property violated");
    // estimate-L_k sandwich, in long double logs
    for (std::int64_t k = 1; k <= sched.K_max; ++k) {
      const long double logLk = std::log(static_cast<long double>(sched.L[static_cast<std::size_t>(k)]));
      const long double hi = std::pow(static_cast<long double>(gamma), static_cast<long double>(k)) *
                             std::log(static_cast<long double>(L0));
      const long double lo = hi + static_cast<long double>(k) * std::log(0.5L);
      c.require(logLk <= hi + 1e-9L && logLk >= lo - 1e-9L, "estimate-L_k sandwich violated");
    }
    // extended-precision logH oracle
    long double lh = std::log(static_cast<long double>(L0));
    for (std::int64_t k = 1; k <= sched.K_max; ++k) {
      const std::int64_t ratio =
          sched.L[static_cast<std::size_t>(k)] / sched.L[static_cast<std::size_t>(k - 1)];
      const long double x = std::pow(static_cast<long double>(sched.L[static_cast<std::size_t>(k)]),
                                     static_cast<long double>(mu));
      long double lceil;
      if (x <= 40.0L)
        lceil = std::log(std::ceil(std::exp(x)));
      else
        lceil = x;
      lh = std::log(2.0L) + std::log(static_cast<long double>(ratio)) + lceil + lh;
      const long double rel =
          std::fabs(static_cast<long double>(sched.logH[static_cast<std::size_t>(k)]) - lh) /
          std::max(1.0L, std::fabs(lh));
      worst_logh = std::max(worst_logh, rel);
    }
  }
  c.require(built == 50, "only built " + std::to_string(built) + " schedules");
  c.require(worst_logh <= 1e-9L, "logH oracle relative error too large");
  std::ostringstream d;
  d << "50 tuples, logH worst rel err " << static_cast<double>(worst_logh);
  return {8, "schedule-arithmetic", c.pass, d.str() + "; " + c.detail.str(), 0.0};
}

// --------------------------------------------------------------- criterion 9

CriterionResult criterion_monotone_phase(int workers) {
  Check c;
  // pilot-chosen grid for the fixed seeded environment below (see README)
  const std::vector<double> grid{0.5, 1.0, 1.5, 2.0, 3.0, 5.0};
  const std::int64_t depth = 200;
  const std::uint64_t reps = 1000;
  StretchSpec spec;
  spec.xi = DistSpec::exponential(1.0);
  spec.nu = DistSpec::exponential(1.0);
  const auto env = sample_stretches(spec, depth + 1, derive_seed(kSeed, 0, "acc9.env"));

  std::vector<std::vector<double>> indicators(grid.size());
  auto flat = replicate(reps, workers, [&](std::uint64_t i) {
    double packed = 0.0;
    bool prev = false;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto fam = ConnectionFamily::power(grid[g]);
      const bool surv =
          opre_survival_rep(env, fam, fam, depth, 0, derive_seed(kSeed, i, "acc9.cfg"));
      if (g > 0 && prev && !surv) return -1.0;  // per-replication monotonicity broken
      prev = surv;
      if (surv) packed += std::pow(2.0, static_cast<double>(g));
    }
    return packed;
  });
  std::vector<std::uint64_t> hits(grid.size(), 0);
  std::uint64_t broken = 0;
  for (double v : flat) {
    if (v < 0.0) {
      ++broken;
      continue;
    }
    const auto bits = static_cast<std::uint64_t>(v);
    for (std::size_t g = 0; g < grid.size(); ++g)
      if (bits & (1ull << g)) ++hits[g];
  }
  c.require(broken == 0, std::to_string(broken) + " replications broke shared-uniform monotonicity");
  const double lo_freq = static_cast<double>(hits.front()) / static_cast<double>(reps);
  const double hi_freq = static_cast<double>(hits.back()) / static_cast<double>(reps);
  std::ostringstream d;
  d << "survival " << lo_freq << " at lambda=" << grid.front() << " -> " << hi_freq
    << " at lambda=" << grid.back();
  c.require(lo_freq < 0.05, "low-lambda frequency not < 0.05");
  c.require(hi_freq > 0.5, "high-lambda frequency not > 0.5");
  return {9, "monotone-phase", c.pass, d.str() + "; " + c.detail.str(), 0.0};
}

// -------------------------------------------------------------- criterion 10

CriterionResult criterion_temporal_extinction(int workers) {
  Check c;
  const double p = 0.9;
  const std::vector<std::int64_t> t_grid{16, 64, 256, 1024, 4096, 10000};
  const std::int64_t t_limit = 10000, width_cap = 512;
  const std::uint64_t reps = 1000;

  auto depths = replicate(reps, workers, [&](std::uint64_t i) {
    return static_cast<double>(temporal_depth_rep(p, DistSpec::stretched_exponential(0.5), t_limit,
                                                  width_cap, derive_seed(kSeed, i, "acc10.heavy")));
  });
  std::vector<double> freq(t_grid.size());
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    std::uint64_t hits = 0;
    for (double d : depths)
      if (d >= static_cast<double>(t_grid[g])) ++hits;
    freq[g] = static_cast<double>(hits) / static_cast<double>(reps);
  }
  for (std::size_t g = 1; g < freq.size(); ++g)
    c.require(freq[g] <= freq[g - 1], "tail frequency increased in T");
  std::int64_t t_star = -1;
  for (std::size_t g = 0; g < freq.size(); ++g)
    if (freq[g] < 0.05) {
      t_star = t_grid[g];
      break;
    }
  std::ostringstream d;
  d << "heavy tail freq";
  for (std::size_t g = 0; g < freq.size(); ++g) d << " " << t_grid[g] << ":" << freq[g];
  c.require(t_star > 0, "no T <= 1e4 with tail frequency < 0.05");
  if (t_star > 0) {
    auto light = replicate(reps, workers, [&](std::uint64_t i) {
      return static_cast<double>(temporal_depth_rep(p, DistSpec::constant(1.0), t_star, width_cap,
                                                    derive_seed(kSeed, i, "acc10.light")));
    });
    std::uint64_t hits = 0;
    for (double v : light)
      if (v >= static_cast<double>(t_star)) ++hits;
    const double light_freq = static_cast<double>(hits) / static_cast<double>(reps);
    d << "; light freq at T=" << t_star << ": " << light_freq;
    c.require(light_freq > 0.5, "light-stretch frequency not > 0.5");
  }
  return {10, "temporal-extinction", c.pass, d.str() + "; " + c.detail.str(), 0.0};
}

// -------------------------------------------------------------- criterion 11

CriterionResult criterion_cppr_survival(int workers) {
  Check c;
  const std::vector<double> grid{1.0, 5.0, 20.0, 50.0};
  const std::int64_t n = 400;
  const double T = 200.0;
  const std::uint64_t reps = 1000;
  std::ostringstream d;
  for (auto kind : {CpprKind::uni, CpprKind::ber}) {
    const char* name = (kind == CpprKind::uni) ? "uni" : "ber";
    std::vector<EstimateRecord> recs;
    for (double lambda : grid) {
      auto outcomes = replicate(reps, workers, [&](std::uint64_t i) {
        return cppr_survival_rep(kind, 0.5, lambda, n, T,
                                 derive_seed(kSeed, i, std::string("acc11.") + name)) ? 1.0 : 0.0;
      });
      recs.push_back(frequency_record(name, outcomes, 0.0));
    }
    d << name << ":";
    for (std::size_t g = 0; g < grid.size(); ++g) d << " " << grid[g] << ":" << recs[g].estimate;
    for (std::size_t g = 1; g < recs.size(); ++g)
      c.require(recs[g].ci_hi >= recs[g - 1].ci_lo,
                std::string(name) + " survival decreased beyond CI width");
    c.require(recs.back().estimate >= 0.5, std::string(name) + " survival at lambda=50 below 0.5");
    auto low = replicate(reps, workers, [&](std::uint64_t i) {
      return cppr_survival_rep(kind, 0.5, 0.2, n, T,
                               derive_seed(kSeed, i, std::string("acc11lo.") + name)) ? 1.0 : 0.0;
    });
    std::uint64_t hits = 0;
    for (double v : low)
      if (v != 0.0) ++hits;
    const double lo_freq = static_cast<double>(hits) / static_cast<double>(reps);
    d << " low:" << lo_freq << "; ";
    c.require(lo_freq <= 0.05, std::string(name) + " survival at lambda=0.2 above 0.05");
  }
  return {11, "cppr-survival-trend", c.pass, d.str() + c.detail.str(), 0.0};
}

// -------------------------------------------------------------- criterion 12

CriterionResult criterion_determinism(int) {
  Check c;
  auto run_with = [&](int workers) {
    std::ostringstream out;
    out.precision(17);
    StretchSpec spec;
    spec.xi = DistSpec::exponential(1.0);
    spec.nu = DistSpec::exponential(1.0);
    const auto env = sample_stretches(spec, 65, derive_seed(kSeed, 0, "acc12.env"));
    const auto fam = ConnectionFamily::power(2.5);
    auto a = replicate(200, workers, [&](std::uint64_t i) {
      return opre_survival_rep(env, fam, fam, 64, 0, derive_seed(kSeed, i, "acc12.perc")) ? 1.0 : 0.0;
    });
    auto b = replicate(50, workers, [&](std::uint64_t i) {
      return cppr_survival_rep(CpprKind::uni, 0.5, 20.0, 50, 40.0, derive_seed(kSeed, i, "acc12.cppr"))
                 ? 1.0
                 : 0.0;
    });
    auto dsum = replicate(100, workers, [&](std::uint64_t i) {
      return static_cast<double>(temporal_depth_rep(0.8, DistSpec::stretched_exponential(0.5), 256, 64,
                                                    derive_seed(kSeed, i, "acc12.tmp")));
    });
    for (double v : a) out << v << ",";
    for (double v : b) out << v << ",";
    for (double v : dsum) out << v << ",";
    return out.str();
  };
  const auto one = run_with(1);
  const auto eight = run_with(8);
  c.require(one == eight, "results differ between workers=1 and workers=8");

  std::set<std::uint64_t> seen;
  bool collision = false;
  for (std::uint64_t i = 0; i < 1000000; ++i)
    if (!seen.insert(derive_seed(kSeed, i, "acc12.collision")).second) collision = true;
  c.require(!collision, "derived-seed collision within 1e6 streams");
  return {12, "determinism-parallel-invariance", c.pass, c.detail.str(), 0.0};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(int workers, std::ostream& log,
                                            const std::vector<int>& only) {
  using Fn = CriterionResult (*)(int);
  const std::vector<Fn> criteria{
      criterion_poisson_tail,     criterion_kernel_bound,  criterion_coupling_identities,
      criterion_distribution_validators, criterion_replay, criterion_duality,
      criterion_reach_oracle,     criterion_schedule,      criterion_monotone_phase,
      criterion_temporal_extinction, criterion_cppr_survival, criterion_determinism};
  std::vector<CriterionResult> results;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    CriterionResult r;
    const double secs = elapsed_seconds([&] { r = criteria[k](workers); });
    r.seconds = secs;
    results.push_back(r);
    log << (r.pass ? "PASS" : "FAIL") << "  " << r.id << ". " << r.name << "  [" << secs << " s]";
    if (!r.detail.empty()) log << "  -- " << r.detail;
    log << std::endl;
  }
  return results;
}

}  // namespace opre
