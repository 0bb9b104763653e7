#include "opre/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "opre/rng.hpp"

namespace opre {

namespace {

double torus_distance(double u, double v) {
  const double d = std::fabs(u - v);
  return std::min(d, 1.0 - d);
}

// does (2Z + phi), restricted to t >= 0, meet the closed interval [a, b]?
bool periodic_hits(double phi, double a, double b) {
  a = std::max(a, 0.0);
  if (a > b) return false;
  const double lo = std::ceil((a - phi) / 2.0);
  return phi + 2.0 * lo <= b;
}

// smallest point of xs strictly inside (a, b), or nullopt
std::optional<double> first_point_inside(const std::vector<double>& xs, double a, double b) {
  auto it = std::upper_bound(xs.begin(), xs.end(), a);
  if (it == xs.end() || *it >= b) return std::nullopt;
  return *it;
}

// smallest point >= a and < b, or nullopt
std::optional<double> first_point_at_least(const std::vector<double>& xs, double a, double b) {
  auto it = std::lower_bound(xs.begin(), xs.end(), a);
  if (it == xs.end() || *it >= b) return std::nullopt;
  return *it;
}

}  // namespace

// ---------------------------------------------------------------------------
// path extraction

std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> extract_open_paths(
    const OpenConfiguration& config, std::int64_t source_col, std::uint64_t max_paths,
    std::uint64_t seed) {
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> paths;
  if (!config.vertex_is_open(0, source_col)) return paths;
  Rng rng(derive_seed(seed, 0, "paths"));
  for (std::uint64_t attempt = 0; attempt < max_paths * 4 && paths.size() < max_paths; ++attempt) {
    std::vector<std::pair<std::int64_t, std::int64_t>> path{{0, source_col}};
    while (true) {
      const auto [t, c] = path.back();
      if (t >= config.window.t_max) break;
      std::int64_t options[2];
      int n = 0;
      if (config.edge_is_open(t, c, +1) && config.vertex_is_open(t + 1, c + 1)) options[n++] = c + 1;
      if (config.edge_is_open(t, c, -1) && config.vertex_is_open(t + 1, c - 1)) options[n++] = c - 1;
      if (n == 0) break;
      const std::int64_t pick = options[(n == 1) ? 0 : static_cast<std::int64_t>(rng.next_below(2))];
      path.emplace_back(t + 1, pick);
    }
    if (path.size() < 2) continue;
    if (std::find(paths.begin(), paths.end(), path) == paths.end()) paths.push_back(std::move(path));
  }
  return paths;
}

// ---------------------------------------------------------------------------
// d2_block

D2Coupling couple_d2(std::vector<PointSetWindow> Y, std::vector<PointSetWindow> X, double t_block,
                     double mu, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("couple_d2: n must be >= 2");
  if (!(t_block > 0.0) || !(mu > 0.0)) throw std::invalid_argument("couple_d2: bad scales");
  D2Coupling c;
  c.n = n;
  c.t_block = t_block;
  c.mu = mu;
  c.graph = make_ne_quadrant(n);
  if (Y.size() != static_cast<std::size_t>(c.graph.vertex_count()) || X.size() != c.graph.edges.size())
    throw std::invalid_argument("couple_d2: realisation sizes do not match the quadrant");
  c.Y = std::move(Y);
  c.X = std::move(X);
  c.parity = static_cast<int>((n - 1) & 1);
  const std::int64_t extent = 2 * (n - 1);
  c.horizon = static_cast<double>(extent + 1) * t_block;
  rederive_d2_config(c);
  return c;
}

void rederive_d2_config(D2Coupling& c) {
  const std::int64_t n = c.n;
  const double t_block = c.t_block;
  const double mu = c.mu;
  const std::int64_t extent = 2 * (n - 1);
  OpenConfiguration& cfg = c.config;
  cfg.window = {extent, extent, WindowVariant::plain};
  cfg.parity = c.parity;
  cfg.provenance = {"d2_block", "block-empty", "block-contact", mu, 0};
  cfg.vertex_open.assign(static_cast<std::size_t>(extent + 1), BitRow(extent + 1));
  cfg.edge_up.assign(static_cast<std::size_t>(extent), BitRow(extent + 1));
  cfg.edge_down.assign(static_cast<std::size_t>(extent), BitRow(extent + 1));

  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> edge_index;
  for (std::size_t e = 0; e < c.graph.edges.size(); ++e)
    edge_index[c.graph.edges[e]] = static_cast<std::int64_t>(e);

  auto quadrant = [&](std::int64_t j, std::int64_t i) -> std::optional<std::int64_t> {
    const std::int64_t a2 = j + i - (n - 1), b2 = j - i + (n - 1);
    if (a2 < 0 || b2 < 0 || (a2 & 1) || (b2 & 1)) return std::nullopt;
    const std::int64_t a = a2 / 2, b = b2 / 2;
    if (a >= n || b >= n) return std::nullopt;
    return a * n + b;
  };

  for (std::int64_t j = 0; j <= extent; ++j)
    for (std::int64_t i = (j + c.parity) & 1; i <= extent; i += 2) {
      auto w = quadrant(j, i);
      if (!w) continue;
      const double lo = mu * (static_cast<double>(j - 1) * t_block) + c.corrupt_shift;
      const double hi = mu * (static_cast<double>(j + 1) * t_block) + c.corrupt_shift;
      if (!set_hits_interval(c.Y[static_cast<std::size_t>(*w)], lo, hi))
        cfg.vertex_open[static_cast<std::size_t>(j)].set(i);
    }
  for (std::int64_t j = 0; j < extent; ++j)
    for (std::int64_t i = (j + c.parity) & 1; i <= extent; i += 2) {
      auto w = quadrant(j, i);
      if (!w) continue;
      const double lo = static_cast<double>(j) * t_block + c.corrupt_shift;
      const double hi = static_cast<double>(j + 1) * t_block + c.corrupt_shift;
      for (int dir : {+1, -1}) {
        const std::int64_t ni = i + dir;
        auto wn = quadrant(j + 1, ni);
        if (!wn) continue;
        auto it = edge_index.find({*w, *wn});
        if (it == edge_index.end()) continue;
        if (set_hits_interval(c.X[static_cast<std::size_t>(it->second)], lo, hi)) {
          if (dir > 0)
            cfg.edge_up[static_cast<std::size_t>(j)].set(i);
          else
            cfg.edge_down[static_cast<std::size_t>(j)].set(i);
        }
      }
    }
}

std::optional<std::int64_t> d2_vertex_of(const D2Coupling& c, std::int64_t j, std::int64_t i) {
  const std::int64_t a2 = j + i - (c.n - 1), b2 = j - i + (c.n - 1);
  if (a2 < 0 || b2 < 0 || (a2 & 1) || (b2 & 1)) return std::nullopt;
  const std::int64_t a = a2 / 2, b = b2 / 2;
  if (a >= c.n || b >= c.n) return std::nullopt;
  return a * c.n + b;
}

ReplayResult replay_d2(const D2Coupling& c, std::uint64_t max_paths, std::uint64_t seed) {
  ReplayResult res;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> edge_index;
  for (std::size_t e = 0; e < c.graph.edges.size(); ++e)
    edge_index[c.graph.edges[e]] = static_cast<std::int64_t>(e);

  auto paths = extract_open_paths(c.config, c.n - 1, max_paths, seed);
  for (const auto& path : paths) {
    ++res.paths;
    auto fail = [&](const std::string& m) {
      ++res.failures;
      if (res.first_error.empty()) res.first_error = m;
    };
    std::vector<std::int64_t> verts;
    bool ok = true;
    for (const auto& [j, i] : path) {
      auto w = d2_vertex_of(c, j, i);
      if (!w) {
        fail("path leaves the quadrant image");
        ok = false;
        break;
      }
      verts.push_back(*w);
    }
    if (!ok) continue;
    // contact times: earliest X point in the true (uncorrupted) block window
    std::vector<double> times;
    for (std::size_t r = 0; r + 1 < verts.size(); ++r) {
      auto it = edge_index.find({verts[r], verts[r + 1]});
      if (it == edge_index.end()) {
        fail("path uses a non-edge");
        ok = false;
        break;
      }
      const auto& xs = c.X[static_cast<std::size_t>(it->second)].points;
      const double lo = static_cast<double>(r) * c.t_block;
      const double hi = static_cast<double>(r + 1) * c.t_block;
      auto t = first_point_at_least(xs, lo, std::nextafter(hi, 1e300));
      if (!t) {
        fail("no contact inside the block window");
        ok = false;
        break;
      }
      times.push_back(*t);
    }
    if (!ok) continue;
    // Def-1.4 legs against recoveries mu^-1 Y
    double prev = 0.0;
    for (std::size_t r = 0; r < verts.size(); ++r) {
      const double up = (r < times.size()) ? times[r] : prev;
      if (up < prev) {
        fail("contact times decrease");
        ok = false;
        break;
      }
      if (set_hits_interval(c.Y[static_cast<std::size_t>(verts[r])], c.mu * prev, c.mu * up)) {
        fail("recovery inside a leg");
        ok = false;
        break;
      }
      prev = up;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// cppr_uni

UniCoupling couple_cppr_uniform(const std::vector<double>& U_raw, double lambda) {
  if (U_raw.size() < 2) throw std::invalid_argument("couple_cppr_uniform: need at least two shifts");
  if (!(lambda >= 0.0)) throw std::invalid_argument("couple_cppr_uniform: bad lambda");
  UniCoupling c;
  c.lambda = lambda;
  const std::size_t n = U_raw.size();
  c.U.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = U_raw[i] - U_raw[0] + 0.5;
    u -= std::floor(u);
    c.U[i] = u;
  }
  c.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.phi[i] = 2.0 * c.U[i];
  c.S.resize(n - 1);
  c.nu.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s = 2.0 * torus_distance(c.U[i], c.U[i + 1]);
    if (s == 0.0)
      throw std::invalid_argument("couple_cppr_uniform: coinciding shifts give a zero-length window");
    c.S[i] = s;
    c.nu[i] = -std::log(s);
  }
  c.z.resize(n);
  c.z[0] = 2;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::int64_t k = (c.phi[i] > c.phi[i + 1]) ? 1 : 0;
    c.z[i + 1] = c.z[i] + 1 - 2 * k;
  }
  c.env.width = static_cast<std::int64_t>(n);
  c.env.xi.assign(n, 0.0);
  c.env.nu = c.nu;
  c.vertex_fam = ConnectionFamily::constant(1.0);
  c.edge_fam = ConnectionFamily::cppr_uniform(lambda);
  return c;
}

double UniCoupling::anchor(std::int64_t j, std::int64_t i) const {
  return phi[static_cast<std::size_t>(i)] + static_cast<double>(j - z[static_cast<std::size_t>(i)]);
}

namespace {
// largest incoming transfer-window length of lattice vertex (j, i)
double uni_max_in_window(const UniCoupling& c, std::int64_t j, std::int64_t i) {
  if (j == 0) return 0.0;
  double m = 0.0;
  if (i > 0) m = std::max(m, c.S[static_cast<std::size_t>(i - 1)]);
  if (static_cast<std::size_t>(i + 1) < c.phi.size()) m = std::max(m, c.S[static_cast<std::size_t>(i)]);
  return m;
}
}  // namespace

std::pair<double, double> UniCoupling::window(std::int64_t j, std::int64_t from, std::int64_t to) const {
  const double rho_u = anchor(j + 1, to);
  const double rho_v = anchor(j, from);
  const double s = S[static_cast<std::size_t>(std::min(from, to))];
  // truncated so every contact in the window follows the sender's own
  // infection time, whatever incoming edge produced it
  const double start = std::max(rho_u, rho_v + uni_max_in_window(*this, j, from)) + corrupt_shift;
  const double end = rho_u + s + corrupt_shift;
  return {start, end};
}

OpenConfiguration derive_config_uni(const UniCoupling& c, const std::vector<PointSetWindow>& X_pair,
                                    std::int64_t t_max) {
  const auto n = static_cast<std::int64_t>(c.phi.size());
  if (X_pair.size() + 1 != static_cast<std::size_t>(n))
    throw std::invalid_argument("derive_config_uni: pair realisations mismatch");
  OpenConfiguration cfg;
  cfg.window = {t_max, n - 1, WindowVariant::plain};
  cfg.parity = 0;
  cfg.provenance = {"cppr_uni", "constant(1)", c.edge_fam.name(), c.lambda, 0};
  cfg.vertex_open.assign(static_cast<std::size_t>(t_max + 1), BitRow(n));
  cfg.edge_up.assign(static_cast<std::size_t>(t_max), BitRow(n));
  cfg.edge_down.assign(static_cast<std::size_t>(t_max), BitRow(n));
  for (std::int64_t t = 0; t <= t_max; ++t)
    for (std::int64_t i = t & 1; i < n; i += 2) cfg.vertex_open[static_cast<std::size_t>(t)].set(i);
  for (std::int64_t t = 0; t < t_max; ++t)
    for (std::int64_t i = t & 1; i < n; i += 2) {
      if (i + 1 < n) {
        auto [a, b] = c.window(t, i, i + 1);
        if (a < b && first_point_inside(X_pair[static_cast<std::size_t>(i)].points, a, b))
          cfg.edge_up[static_cast<std::size_t>(t)].set(i);
      }
      if (i >= 1) {
        auto [a, b] = c.window(t, i, i - 1);
        if (a < b && first_point_inside(X_pair[static_cast<std::size_t>(i - 1)].points, a, b))
          cfg.edge_down[static_cast<std::size_t>(t)].set(i);
      }
    }
  return cfg;
}

ReplayResult replay_uni(const UniCoupling& c, const std::vector<PointSetWindow>& X_pair,
                        const OpenConfiguration& config, std::uint64_t max_paths, std::uint64_t seed) {
  ReplayResult res;
  auto paths = extract_open_paths(config, 0, max_paths, seed);
  for (const auto& path : paths) {
    ++res.paths;
    auto fail = [&](const std::string& m) {
      ++res.failures;
      if (res.first_error.empty()) res.first_error = m;
    };
    std::vector<double> times;
    bool ok = true;
    for (std::size_t r = 0; r + 1 < path.size(); ++r) {
      const auto [j, i] = path[r];
      const std::int64_t to = path[r + 1].second;
      // true window: geometry without the corruption hook
      const double rho_u = c.anchor(j + 1, to);
      const double rho_v = c.anchor(j, i);
      const double s = c.S[static_cast<std::size_t>(std::min(i, to))];
      const double a = std::max(rho_u, rho_v + uni_max_in_window(c, j, i));
      const double b = rho_u + s;
      auto t = first_point_inside(X_pair[static_cast<std::size_t>(std::min(i, to))].points, a, b);
      if (!t) {
        fail("no contact in the transfer window");
        ok = false;
        break;
      }
      times.push_back(*t);
    }
    if (!ok) continue;
    // literal Def-1.4 check against the periodic recovery sets
    double prev = 0.0;
    for (std::size_t r = 0; r < path.size(); ++r) {
      const double up = (r < times.size()) ? times[r] : prev;
      if (up < prev) {
        fail("contact times decrease");
        ok = false;
        break;
      }
      if (periodic_hits(c.phi[static_cast<std::size_t>(path[r].second)], prev, up)) {
        fail("recovery inside a leg");
        ok = false;
        break;
      }
      prev = up;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// cppr_ber

std::vector<std::int64_t> extract_runs(const std::vector<int>& B) {
  std::vector<std::int64_t> N;
  std::size_t s = 0;
  while (s < B.size()) {
    const int v = B[s];
    std::size_t e = s + 1;
    while (e < B.size() && B[e] == v) ++e;
    if (e == B.size()) break;  // no terminator: drop the incomplete interval
    N.push_back(static_cast<std::int64_t>(e - s + 1));
    s = e + 1;
  }
  return N;
}

std::vector<std::int64_t> dominate_runs(const std::vector<std::int64_t>& N, double q,
                                        std::uint64_t seed, std::int64_t* violations) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("dominate_runs: q must be in (0,1)");
  const double r = std::max(q, 1.0 - q);
  // interval-length law: start value v ~ Bernoulli(q), then 1 + Geom(s_v)
  auto cdf = [&](std::int64_t n) {  // P(N <= n), n >= 1
    if (n < 2) return 0.0;
    const double m = static_cast<double>(n - 1);
    const double f0 = 1.0 - std::pow(1.0 - q, m);  // run of 0s, success prob q
    const double f1 = 1.0 - std::pow(q, m);
    return (1.0 - q) * f0 + q * f1;
  };
  std::vector<std::int64_t> K;
  K.reserve(N.size());
  std::int64_t viol = 0;
  Rng rng(derive_seed(seed, 0, "dominate"));
  for (std::size_t i = 0; i < N.size(); ++i) {
    const double lo = cdf(N[i] - 1), hi = cdf(N[i]);
    const double u = lo + (hi - lo) * rng.next_double_pos();
    // K = F_K^{-1}(u) with P(K <= k) = 1 - r^k
    const double k = std::ceil(std::log1p(-u) / std::log(r));
    const auto ki = std::max<std::int64_t>(1, static_cast<std::int64_t>(k));
    if (ki < N[i]) ++viol;
    K.push_back(ki);
  }
  if (violations) *violations = viol;
  return K;
}

BerCoupling couple_cppr_bernoulli(const std::vector<int>& B, double q, double lambda,
                                  std::uint64_t domination_seed) {
  if (B.empty()) throw std::invalid_argument("couple_cppr_bernoulli: empty shift sequence");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("couple_cppr_bernoulli: q must be in (0,1)");
  BerCoupling c;
  c.B = B;
  c.q = q;
  c.lambda = lambda;
  c.N = extract_runs(B);
  if (c.N.empty()) throw std::invalid_argument("couple_cppr_bernoulli: no complete interval in sequence");
  c.K = dominate_runs(c.N, q, domination_seed, &c.domination_violations);
  c.cols.push_back(0);
  std::int64_t pos = -1;
  for (auto n : c.N) {
    pos += n;
    c.cols.push_back(pos);
  }
  c.env.width = static_cast<std::int64_t>(c.cols.size());
  c.env.xi.assign(c.cols.size(), 0.0);
  for (auto k : c.K) c.env.nu.push_back(static_cast<double>(k * k));
  c.vertex_fam = ConnectionFamily::constant(1.0);
  c.edge_fam = ConnectionFamily::cppr_bernoulli(lambda);
  return c;
}

namespace {

// Ordered-contact event across the real vertices between two lattice columns,
// inside the unit slot [slot, slot+1). Returns the chosen contact times, or
// nullopt. Legs are exact: sender free on [slot, t_1], intermediate x_r free
// on [t_r, t_{r+1}], receiver free on [t_R, slot+1).
std::optional<std::vector<double>> ber_slot_event(const BerCoupling& c,
                                                  const std::vector<PointSetWindow>& X_edge,
                                                  double horizon, std::int64_t from_col,
                                                  std::int64_t to_col, double slot) {
  const double slot_end = std::min(slot + 1.0, horizon);
  if (slot >= slot_end) return std::nullopt;
  const std::int64_t step = (to_col > from_col) ? 1 : -1;
  std::vector<std::int64_t> verts;
  for (std::int64_t x = from_col;; x += step) {
    verts.push_back(x);
    if (x == to_col) break;
  }
  const auto R = static_cast<std::size_t>(std::llabs(to_col - from_col));

  auto recovery_in = [&](std::int64_t x, double a, double b_closed) {
    return periodic_hits(static_cast<double>(c.B[static_cast<std::size_t>(x)]), a, b_closed);
  };
  auto recovery_in_half_open = [&](std::int64_t x, double a, double b_open) {
    return periodic_hits(static_cast<double>(c.B[static_cast<std::size_t>(x)]), a,
                         std::nextafter(b_open, -1e300));
  };

  // feasible contact times per leg; the per-vertex recovery point inside the
  // slot splits the candidates, so carry the whole (small) feasible set
  std::vector<double> feas;
  {
    const auto e = static_cast<std::size_t>(std::min(verts[0], verts[1]));
    for (double t : X_edge[e].points) {
      if (t < slot || t >= slot_end) continue;
      if (!recovery_in(verts[0], slot, t)) feas.push_back(t);  // sender leg [slot, t_1]
    }
  }
  std::vector<std::vector<double>> chosen_per_leg(R);
  // reconstruct by DP: keep, per feasible t at leg r, the predecessor
  std::vector<std::vector<std::pair<double, double>>> dp(R);  // (t, predecessor t)
  for (double t : feas) dp[0].emplace_back(t, -1.0);
  for (std::size_t r = 1; r < R; ++r) {
    const auto e = static_cast<std::size_t>(std::min(verts[r], verts[r + 1]));
    for (double t : X_edge[e].points) {
      if (t < slot || t >= slot_end) continue;
      for (const auto& [tp, _] : dp[r - 1]) {
        if (tp <= t && !recovery_in(verts[r], tp, t)) {
          dp[r].emplace_back(t, tp);
          break;  // any feasible predecessor works for reconstruction
        }
      }
    }
    if (dp[r].empty()) return std::nullopt;
  }
  if (dp.empty() || dp[R - 1].empty()) return std::nullopt;
  // receiver must stay recovery-free to the end of the slot
  for (const auto& [t_last, _] : dp[R - 1]) {
    if (recovery_in_half_open(verts[R], t_last, slot_end)) continue;
    // walk predecessors back
    std::vector<double> times(R);
    times[R - 1] = t_last;
    double cur = t_last;
    for (std::size_t r = R - 1; r > 0; --r) {
      for (const auto& [t, tp] : dp[r]) {
        if (t == cur) {
          times[r - 1] = tp;
          cur = tp;
          break;
        }
      }
    }
    return times;
  }
  return std::nullopt;
}

}  // namespace

OpenConfiguration derive_config_ber(const BerCoupling& c, const std::vector<PointSetWindow>& X_edge,
                                    double horizon, std::int64_t t_max) {
  const auto m = static_cast<std::int64_t>(c.cols.size());
  OpenConfiguration cfg;
  cfg.window = {t_max, m - 1, WindowVariant::plain};
  cfg.parity = 0;
  cfg.provenance = {"cppr_ber", "constant(1)", c.edge_fam.name(), c.lambda, 0};
  cfg.vertex_open.assign(static_cast<std::size_t>(t_max + 1), BitRow(m));
  cfg.edge_up.assign(static_cast<std::size_t>(t_max), BitRow(m));
  cfg.edge_down.assign(static_cast<std::size_t>(t_max), BitRow(m));
  for (std::int64_t t = 0; t <= t_max; ++t)
    for (std::int64_t i = t & 1; i < m; i += 2) cfg.vertex_open[static_cast<std::size_t>(t)].set(i);
  for (std::int64_t t = 0; t < t_max; ++t)
    for (std::int64_t i = t & 1; i < m; i += 2) {
      if (i + 1 < m && ber_slot_event(c, X_edge, horizon, c.cols[static_cast<std::size_t>(i)],
                                      c.cols[static_cast<std::size_t>(i + 1)], static_cast<double>(t)))
        cfg.edge_up[static_cast<std::size_t>(t)].set(i);
      if (i >= 1 && ber_slot_event(c, X_edge, horizon, c.cols[static_cast<std::size_t>(i)],
                                   c.cols[static_cast<std::size_t>(i - 1)], static_cast<double>(t)))
        cfg.edge_down[static_cast<std::size_t>(t)].set(i);
    }
  return cfg;
}

ReplayResult replay_ber(const BerCoupling& c, const std::vector<PointSetWindow>& X_edge,
                        double horizon, const OpenConfiguration& config, std::uint64_t max_paths,
                        std::uint64_t seed) {
  ReplayResult res;
  auto paths = extract_open_paths(config, 0, max_paths, seed);
  for (const auto& path : paths) {
    ++res.paths;
    auto fail = [&](const std::string& m) {
      ++res.failures;
      if (res.first_error.empty()) res.first_error = m;
    };
    // stitch the per-edge slot events into one real-vertex chain
    std::vector<std::int64_t> chain{c.cols[static_cast<std::size_t>(path[0].second)]};
    std::vector<double> times;
    bool ok = true;
    for (std::size_t r = 0; r + 1 < path.size(); ++r) {
      const auto from = c.cols[static_cast<std::size_t>(path[r].second)];
      const auto to = c.cols[static_cast<std::size_t>(path[r + 1].second)];
      auto ev = ber_slot_event(c, X_edge, horizon, from, to, static_cast<double>(path[r].first));
      if (!ev) {
        fail("slot event vanished on replay");
        ok = false;
        break;
      }
      const std::int64_t step = (to > from) ? 1 : -1;
      std::int64_t x = from;
      for (double t : *ev) {
        x += step;
        chain.push_back(x);
        times.push_back(t);
      }
    }
    if (!ok) continue;
    // literal Def-1.4 legs on the full chain
    double prev = 0.0;
    for (std::size_t r = 0; r < chain.size(); ++r) {
      const double up = (r < times.size()) ? times[r] : prev;
      if (up < prev) {
        fail("contact times decrease");
        ok = false;
        break;
      }
      if (periodic_hits(static_cast<double>(c.B[static_cast<std::size_t>(chain[r])]),
                        std::max(prev, 1e-12), up)) {
        // recoveries live on (0, horizon]: the atom at time 0 does not count
        fail("recovery inside a leg");
        ok = false;
        break;
      }
      if (r < times.size() &&
          !set_contains(X_edge[static_cast<std::size_t>(std::min(chain[r], chain[r + 1]))], times[r])) {
        fail("contact time not in X_e");
        ok = false;
        break;
      }
      prev = up;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// cpre

CpreCoupling couple_cpre(double p, std::int64_t L, const std::vector<double>& delta_samples,
                         std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("couple_cpre: p must be in (0,1)");
  if (L < 2) throw std::invalid_argument("couple_cpre: L must be >= 2");
  if (delta_samples.size() < 2) throw std::invalid_argument("couple_cpre: need locations");
  CpreCoupling c;
  c.p = p;
  c.L = L;
  c.delta = 1.0 / (static_cast<double>(L) * static_cast<double>(L));
  c.delta_x = delta_samples;
  Rng rng(derive_seed(seed, 0, "cpre.good"));
  c.good.resize(delta_samples.size());
  for (std::size_t x = 0; x < delta_samples.size(); ++x) {
    c.good[x] = (rng.next_double() < p) ? 1 : 0;
    if (c.good[x]) c.locs.push_back(static_cast<std::int64_t>(x));
  }
  if (c.locs.size() < 2) throw std::invalid_argument("couple_cpre: fewer than two good locations");
  for (std::size_t b = 0; b + 1 < c.locs.size(); ++b) {
    const std::int64_t n = c.locs[b + 1] - c.locs[b];
    c.N.push_back(n);
    double nu = static_cast<double>(n) * std::log(static_cast<double>(n));
    double free_prob = 1.0;
    for (std::int64_t x = c.locs[b] + 1; x < c.locs[b + 1]; ++x) {
      nu += c.delta_x[static_cast<std::size_t>(x)];
      free_prob *= std::exp(-c.delta_x[static_cast<std::size_t>(x)]);
    }
    c.nu.push_back(nu);
    const double per_trial = poisson_tail(1.0, n) * free_prob;
    c.edge_prob.push_back(-std::expm1(static_cast<double>(L) * std::log1p(-per_trial)));
  }
  c.env.width = static_cast<std::int64_t>(c.locs.size());
  c.env.xi.assign(c.locs.size(), 0.0);
  c.env.nu = c.nu;
  c.vertex_fam = ConnectionFamily::cpre_vertex(L);
  c.edge_fam = ConnectionFamily::cpre_edge(L);
  return c;
}

namespace {

// A_e(k)-style event: N ordered contacts in [a, a+1) across the real edges
// between two good locations, all strictly-between vertices recovery-free on
// the whole unit interval.
std::optional<std::vector<double>> cpre_slot_event(const CpreCoupling&,
                                                   const std::vector<PointSetWindow>& X_edge,
                                                   const std::vector<PointSetWindow>& Y_vertex,
                                                   std::int64_t from_loc, std::int64_t to_loc,
                                                   double a) {
  const double b = a + 1.0;
  const std::int64_t step = (to_loc > from_loc) ? 1 : -1;
  for (std::int64_t x = from_loc + step; x != to_loc; x += step)
    if (set_hits_interval(Y_vertex[static_cast<std::size_t>(x)], a, std::nextafter(b, -1e300)))
      return std::nullopt;
  std::vector<double> times;
  double cur = a;
  for (std::int64_t x = from_loc; x != to_loc; x += step) {
    const auto e = static_cast<std::size_t>(std::min(x, x + step));
    auto t = first_point_at_least(X_edge[e].points, cur, b);
    if (!t) return std::nullopt;
    times.push_back(*t);
    cur = *t;
  }
  return times;
}

}  // namespace

OpenConfiguration derive_config_cpre(const CpreCoupling& c, const std::vector<PointSetWindow>& X_edge,
                                     const std::vector<PointSetWindow>& Y_vertex, std::int64_t t_max) {
  const auto m = static_cast<std::int64_t>(c.locs.size());
  if (Y_vertex.size() != c.good.size() || X_edge.size() + 1 != c.good.size())
    throw std::invalid_argument("derive_config_cpre: realisation sizes mismatch");
  OpenConfiguration cfg;
  cfg.window = {t_max, m - 1, WindowVariant::plain};
  cfg.parity = 0;
  cfg.provenance = {"cpre", c.vertex_fam.name(), c.edge_fam.name(), static_cast<double>(c.L), 0};
  cfg.vertex_open.assign(static_cast<std::size_t>(t_max + 1), BitRow(m));
  cfg.edge_up.assign(static_cast<std::size_t>(t_max), BitRow(m));
  cfg.edge_down.assign(static_cast<std::size_t>(t_max), BitRow(m));
  const auto Ld = static_cast<double>(c.L);
  for (std::int64_t j = 0; j <= t_max; ++j)
    for (std::int64_t i = j & 1; i < m; i += 2) {
      const auto loc = static_cast<std::size_t>(c.locs[static_cast<std::size_t>(i)]);
      const double lo = static_cast<double>(j - 1) * Ld;
      const double hi = static_cast<double>(j + 1) * Ld;
      if (!set_hits_interval(Y_vertex[loc], lo, std::nextafter(hi, -1e300)))
        cfg.vertex_open[static_cast<std::size_t>(j)].set(i);
    }
  for (std::int64_t j = 0; j < t_max; ++j)
    for (std::int64_t i = j & 1; i < m; i += 2)
      for (int dir : {+1, -1}) {
        const std::int64_t ni = i + dir;
        if (ni < 0 || ni >= m) continue;
        bool open = false;
        for (std::int64_t k = 0; k < c.L && !open; ++k) {
          if (cpre_slot_event(c, X_edge, Y_vertex, c.locs[static_cast<std::size_t>(i)],
                              c.locs[static_cast<std::size_t>(ni)],
                              static_cast<double>(j) * Ld + static_cast<double>(k)))
            open = true;
        }
        if (open) {
          if (dir > 0)
            cfg.edge_up[static_cast<std::size_t>(j)].set(i);
          else
            cfg.edge_down[static_cast<std::size_t>(j)].set(i);
        }
      }
  return cfg;
}

ReplayResult replay_cpre(const CpreCoupling& c, const std::vector<PointSetWindow>& X_edge,
                         const std::vector<PointSetWindow>& Y_vertex, const OpenConfiguration& config,
                         std::uint64_t max_paths, std::uint64_t seed) {
  ReplayResult res;
  const auto Ld = static_cast<double>(c.L);
  auto paths = extract_open_paths(config, 0, max_paths, seed);
  for (const auto& path : paths) {
    ++res.paths;
    auto fail = [&](const std::string& m) {
      ++res.failures;
      if (res.first_error.empty()) res.first_error = m;
    };
    std::vector<std::int64_t> chain{c.locs[static_cast<std::size_t>(path[0].second)]};
    std::vector<double> times;
    bool ok = true;
    for (std::size_t r = 0; r + 1 < path.size() && ok; ++r) {
      const auto from = c.locs[static_cast<std::size_t>(path[r].second)];
      const auto to = c.locs[static_cast<std::size_t>(path[r + 1].second)];
      std::optional<std::vector<double>> ev;
      for (std::int64_t k = 0; k < c.L && !ev; ++k)
        ev = cpre_slot_event(c, X_edge, Y_vertex, from, to,
                             static_cast<double>(path[r].first) * Ld + static_cast<double>(k));
      if (!ev) {
        fail("slot event vanished on replay");
        ok = false;
        break;
      }
      const std::int64_t step = (to > from) ? 1 : -1;
      std::int64_t x = from;
      for (double t : *ev) {
        x += step;
        chain.push_back(x);
        times.push_back(t);
      }
    }
    if (!ok) continue;
    double prev = 0.0;
    for (std::size_t r = 0; r < chain.size(); ++r) {
      const double up = (r < times.size()) ? times[r] : prev;
      if (up < prev) {
        fail("contact times decrease");
        ok = false;
        break;
      }
      if (set_hits_interval(Y_vertex[static_cast<std::size_t>(chain[r])], prev, up)) {
        fail("recovery inside a leg");
        ok = false;
        break;
      }
      if (r < times.size() &&
          !set_contains(X_edge[static_cast<std::size_t>(std::min(chain[r], chain[r + 1]))], times[r])) {
        fail("contact time not in X_e");
        ok = false;
        break;
      }
      prev = up;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// validation harness

CouplingReport validate_coupling(CouplingKind kind, std::uint64_t replications, std::uint64_t seed) {
  CouplingReport rep;
  rep.kind = kind;
  rep.replications = replications;
  auto note_replay = [&](const ReplayResult& r) {
    rep.paths += r.paths;
    rep.failures += r.failures;
    if (rep.first_error.empty()) rep.first_error = r.first_error;
  };

  for (std::uint64_t it = 0; it < replications; ++it) {
    const std::uint64_t s = derive_seed(seed, it, "validate");
    switch (kind) {
      case CouplingKind::d2_block: {
        const std::int64_t n = 5;
        const double t_block = 1.0, mu = 0.7;
        const double horizon = static_cast<double>(2 * (n - 1) + 1) * t_block;
        auto graph = make_ne_quadrant(n);
        std::vector<PointSetWindow> Y, X;
        for (std::int64_t v = 0; v < graph.vertex_count(); ++v)
          Y.push_back(sample_closed_set(ClosedSetSpec::Ppp(0.08), 0.0, mu * horizon,
                                        derive_seed(s, static_cast<std::uint64_t>(v), "d2.Y")));
        for (std::size_t e = 0; e < graph.edges.size(); ++e)
          X.push_back(sample_closed_set(ClosedSetSpec::Ppp(1.5), 0.0, horizon,
                                        derive_seed(s, e, "d2.X")));
        auto c = couple_d2(std::move(Y), std::move(X), t_block, mu, n);
        note_replay(replay_d2(c, 8, derive_seed(s, 0, "d2.paths")));
        break;
      }
      case CouplingKind::cppr_uni: {
        const std::int64_t n = 8, t_max = 12;
        const double lambda = 6.0;
        Rng rng(derive_seed(s, 0, "uni.U"));
        std::vector<double> U(static_cast<std::size_t>(n));
        for (auto& u : U) u = rng.next_double();
        auto c = couple_cppr_uniform(U, lambda);
        const double horizon = static_cast<double>(t_max + n + 4);
        std::vector<PointSetWindow> X;
        for (std::int64_t i = 0; i + 1 < n; ++i)
          X.push_back(sample_closed_set(ClosedSetSpec::Ppp(lambda), 0.0, horizon,
                                        derive_seed(s, static_cast<std::uint64_t>(i), "uni.X")));
        auto cfg = derive_config_uni(c, X, t_max);
        note_replay(replay_uni(c, X, cfg, 8, derive_seed(s, 0, "uni.paths")));
        for (std::int64_t g = 1; g < 50; ++g) {
          const double S = static_cast<double>(g) / 50.0;
          const double lhs = eval_kernel(c.edge_fam, -std::log(S));
          const double rhs = -std::expm1(-lambda * S);
          rep.max_identity_error = std::max(rep.max_identity_error, std::fabs(lhs - rhs));
        }
        break;
      }
      case CouplingKind::cppr_ber: {
        const std::int64_t t_max = 10;
        const double q = 0.5, lambda = 5.0;
        Rng rng(derive_seed(s, 0, "ber.B"));
        std::vector<int> B(48);
        for (auto& b : B) b = rng.next_double() < q ? 1 : 0;
        BerCoupling c;
        try {
          c = couple_cppr_bernoulli(B, q, lambda, derive_seed(s, 0, "ber.dom"));
        } catch (const std::invalid_argument&) {
          break;  // degenerate all-equal sequence
        }
        const double horizon = static_cast<double>(t_max + 2);
        std::vector<PointSetWindow> X;
        for (std::size_t e = 0; e + 1 < B.size(); ++e)
          X.push_back(sample_closed_set(ClosedSetSpec::Ppp(lambda), 0.0, horizon,
                                        derive_seed(s, e, "ber.X")));
        auto cfg = derive_config_ber(c, X, horizon, t_max);
        note_replay(replay_ber(c, X, horizon, cfg, 8, derive_seed(s, 0, "ber.paths")));
        for (std::int64_t k = 0; k <= 20; ++k) {
          const double lhs = eval_kernel(c.edge_fam, static_cast<double>(k * k));
          const double rhs = (k == 0) ? 1.0 : poisson_tail(lambda, k);
          rep.max_identity_error = std::max(rep.max_identity_error, std::fabs(lhs - rhs));
        }
        break;
      }
      case CouplingKind::cpre: {
        const std::int64_t t_max = 8, L = 6;
        const double p = 0.6;
        Rng rng(derive_seed(s, 0, "cpre.delta"));
        std::vector<double> delta(40);
        for (auto& d : delta) d = rng.exponential(1.0);
        CpreCoupling c;
        try {
          c = couple_cpre(p, L, delta, derive_seed(s, 0, "cpre.mask"));
        } catch (const std::invalid_argument&) {
          break;
        }
        const double horizon = static_cast<double>((t_max + 2) * L);
        std::vector<PointSetWindow> X, Y;
        for (std::size_t e = 0; e + 1 < delta.size(); ++e)
          X.push_back(sample_closed_set(ClosedSetSpec::Ppp(1.0), 0.0, horizon,
                                        derive_seed(s, e, "cpre.X")));
        for (std::size_t x = 0; x < delta.size(); ++x) {
          const double rate = c.good[x] ? c.delta : delta[x];
          Y.push_back(sample_closed_set(ClosedSetSpec::Ppp(rate), 0.0, horizon,
                                        derive_seed(s, x, "cpre.Y")));
        }
        auto cfg = derive_config_cpre(c, X, Y, t_max);
        note_replay(replay_cpre(c, X, Y, cfg, 8, derive_seed(s, 0, "cpre.paths")));
        for (std::size_t b = 0; b < c.N.size(); ++b) {
          double fp = 1.0;
          for (std::int64_t x = c.locs[b] + 1; x < c.locs[b + 1]; ++x)
            fp *= std::exp(-c.delta_x[static_cast<std::size_t>(x)]);
          const double per_trial = poisson_tail(1.0, c.N[b]) * fp;
          const double formula = -std::expm1(static_cast<double>(L) * std::log1p(-per_trial));
          rep.max_identity_error =
              std::max(rep.max_identity_error, std::fabs(formula - c.edge_prob[b]));
        }
        break;
      }
    }
  }
  return rep;
}

}  // namespace opre
