#include "opre/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

#include "opre/rng.hpp"

namespace opre {

namespace {

struct Probs {
  std::vector<double> vertex;  // per column
  std::vector<double> up;      // per gap c -> c+1
};

OpenConfiguration sample_from_probs(const Probs& probs, const LatticeWindow& window, int parity,
                                    std::uint64_t seed) {
  const std::int64_t cols = window.x_max + 1;
  OpenConfiguration cfg;
  cfg.window = window;
  cfg.parity = parity;
  cfg.provenance.seed = seed;
  cfg.vertex_open.assign(static_cast<std::size_t>(window.t_max + 1), BitRow(cols));
  cfg.edge_up.assign(static_cast<std::size_t>(window.t_max), BitRow(cols));
  cfg.edge_down.assign(static_cast<std::size_t>(window.t_max), BitRow(cols));

  Rng rv(derive_seed(seed, 0, "perc.vertex"));
  Rng ru(derive_seed(seed, 0, "perc.edge_up"));
  Rng rd(derive_seed(seed, 0, "perc.edge_down"));

  // Fixed draw order over parity-valid slots: configurations sampled with the
  // same seed but different kernel parameters are monotonically coupled.
  for (std::int64_t t = 0; t <= window.t_max; ++t) {
    auto& row = cfg.vertex_open[static_cast<std::size_t>(t)];
    for (std::int64_t c = (t + parity) & 1; c < cols; c += 2)
      if (rv.next_double() < probs.vertex[static_cast<std::size_t>(c)]) row.set(c);
  }
  for (std::int64_t t = 0; t < window.t_max; ++t) {
    auto& up = cfg.edge_up[static_cast<std::size_t>(t)];
    auto& down = cfg.edge_down[static_cast<std::size_t>(t)];
    for (std::int64_t c = (t + parity) & 1; c < cols; c += 2) {
      if (c + 1 < cols && ru.next_double() < probs.up[static_cast<std::size_t>(c)]) up.set(c);
      if (c >= 1 && rd.next_double() < probs.up[static_cast<std::size_t>(c - 1)]) down.set(c);
    }
  }
  return cfg;
}

}  // namespace

OpenConfiguration sample_opre(const StretchEnvironment& env, const ConnectionFamily& fam_v,
                              const ConnectionFamily& fam_e, const LatticeWindow& window,
                              std::uint64_t seed) {
  validate(fam_v);
  validate(fam_e);
  if (window.t_max < 1 || window.x_max < 0) throw std::invalid_argument("sample_opre: bad window");
  if (env.width < window.x_max + 1)
    throw std::invalid_argument("sample_opre: window exceeds environment width");
  Probs probs;
  probs.vertex.resize(static_cast<std::size_t>(window.x_max + 1));
  probs.up.resize(static_cast<std::size_t>(window.x_max + 1), 0.0);
  for (std::int64_t c = 0; c <= window.x_max; ++c) {
    probs.vertex[static_cast<std::size_t>(c)] = eval_kernel(fam_v, env.xi[static_cast<std::size_t>(c)]);
    if (c < window.x_max)
      probs.up[static_cast<std::size_t>(c)] = eval_kernel(fam_e, env.nu[static_cast<std::size_t>(c)]);
  }
  LatticeWindow w = window;
  w.variant = WindowVariant::plain;
  auto cfg = sample_from_probs(probs, w, 0, seed);
  cfg.provenance.vertex_kernel = fam_v.name();
  cfg.provenance.edge_kernel = fam_e.name();
  cfg.provenance.lambda = fam_v.lambda;
  cfg.provenance.environment = "plain";
  return cfg;
}

OpenConfiguration sample_opre(const RenewalEmbedding& emb, const ConnectionFamily& fam_v,
                              const ConnectionFamily& fam_e, const LatticeWindow& window,
                              std::uint64_t seed) {
  validate(fam_v);
  validate(fam_e);
  if (window.t_max < 1 || window.x_max < 0) throw std::invalid_argument("sample_opre: bad window");
  if (static_cast<std::int64_t>(emb.points.size()) < window.x_max + 1)
    throw std::invalid_argument("sample_opre: window exceeds embedding width");
  Probs probs;
  probs.vertex.resize(static_cast<std::size_t>(window.x_max + 1));
  probs.up.resize(static_cast<std::size_t>(window.x_max + 1), 0.0);
  for (std::int64_t c = 0; c <= window.x_max; ++c) {
    probs.vertex[static_cast<std::size_t>(c)] =
        eval_kernel(fam_v, static_cast<double>(emb.xi_at[static_cast<std::size_t>(c)]));
    if (c < window.x_max)
      probs.up[static_cast<std::size_t>(c)] =
          eval_kernel(fam_e, static_cast<double>(emb.nu_gap[static_cast<std::size_t>(c)]));
  }
  LatticeWindow w = window;
  w.variant = WindowVariant::embedded;
  auto cfg = sample_from_probs(probs, w, emb.B, seed);
  cfg.provenance.vertex_kernel = fam_v.name();
  cfg.provenance.edge_kernel = fam_e.name();
  cfg.provenance.lambda = fam_v.lambda;
  cfg.provenance.environment = "embedded";
  return cfg;
}

OpenConfiguration sample_temporal(double p, const std::vector<double>& nu_temporal,
                                  const LatticeWindow& window, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("sample_temporal: p must be in (0,1)");
  if (static_cast<std::int64_t>(nu_temporal.size()) < window.t_max)
    throw std::invalid_argument("sample_temporal: not enough temporal stretches");
  const std::int64_t cols = window.x_max + 1;
  OpenConfiguration cfg;
  cfg.window = window;
  cfg.window.variant = WindowVariant::plain;
  cfg.parity = 0;
  cfg.provenance = {"temporal", "constant(1)", "p^nu", p, seed};
  cfg.vertex_open.assign(static_cast<std::size_t>(window.t_max + 1), BitRow(cols));
  cfg.edge_up.assign(static_cast<std::size_t>(window.t_max), BitRow(cols));
  cfg.edge_down.assign(static_cast<std::size_t>(window.t_max), BitRow(cols));
  for (std::int64_t t = 0; t <= window.t_max; ++t)
    for (std::int64_t c = t & 1; c < cols; c += 2) cfg.vertex_open[static_cast<std::size_t>(t)].set(c);
  Rng rng(derive_seed(seed, 0, "perc.temporal"));
  for (std::int64_t t = 0; t < window.t_max; ++t) {
    const double q = std::pow(p, nu_temporal[static_cast<std::size_t>(t)]);
    auto& up = cfg.edge_up[static_cast<std::size_t>(t)];
    auto& down = cfg.edge_down[static_cast<std::size_t>(t)];
    for (std::int64_t c = t & 1; c < cols; c += 2) {
      if (c + 1 < cols && rng.next_double() < q) up.set(c);
      if (c >= 1 && rng.next_double() < q) down.set(c);
    }
  }
  return cfg;
}

OpenConfiguration sample_temporal(double p, const StretchSpec& tail_spec, const LatticeWindow& window,
                                  std::uint64_t seed) {
  validate(tail_spec.nu);
  Rng rng(derive_seed(seed, 0, "temporal.nu"));
  std::vector<double> nu(static_cast<std::size_t>(window.t_max));
  for (auto& v : nu) v = sample(tail_spec.nu, rng);
  return sample_temporal(p, nu, window, derive_seed(seed, 0, "temporal.cfg"));
}

std::vector<BitRow> reach(const OpenConfiguration& config, const std::vector<std::int64_t>& source_cols,
                          std::int64_t depth) {
  if (depth < 0 || depth > config.window.t_max) throw std::invalid_argument("reach: bad depth");
  std::vector<BitRow> layers;
  layers.reserve(static_cast<std::size_t>(depth + 1));
  BitRow front(config.cols());
  for (auto c : source_cols)
    if (config.vertex_is_open(0, c)) front.set(c);
  layers.push_back(front);
  for (std::int64_t t = 0; t < depth; ++t) {
    BitRow next = ((front & config.edge_up[static_cast<std::size_t>(t)]).shifted_up() |
                   (front & config.edge_down[static_cast<std::size_t>(t)]).shifted_down()) &
                  config.vertex_open[static_cast<std::size_t>(t + 1)];
    layers.push_back(next);
    front = layers.back();
  }
  return layers;
}

std::int64_t survival_depth(const OpenConfiguration& config, std::int64_t source_col) {
  BitRow front(config.cols());
  if (config.vertex_is_open(0, source_col)) front.set(source_col);
  if (!front.any()) return -1;  // closed source never gets started
  std::int64_t last = 0;
  for (std::int64_t t = 0; t < config.window.t_max; ++t) {
    front = ((front & config.edge_up[static_cast<std::size_t>(t)]).shifted_up() |
             (front & config.edge_down[static_cast<std::size_t>(t)]).shifted_down()) &
            config.vertex_open[static_cast<std::size_t>(t + 1)];
    if (!front.any()) break;
    last = t + 1;
  }
  return last;
}

std::int64_t temporal_survival_depth(double p, const std::vector<double>& nu_temporal,
                                     std::int64_t t_limit, std::uint64_t seed,
                                     std::int64_t width_cap) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("temporal_survival_depth: bad p");
  if (static_cast<std::int64_t>(nu_temporal.size()) < t_limit)
    throw std::invalid_argument("temporal_survival_depth: not enough stretches");
  Rng rng(derive_seed(seed, 0, "perc.temporal.stream"));
  const std::int64_t cols = (width_cap > 0) ? std::min(width_cap, t_limit + 1) : t_limit + 1;
  BitRow front(cols), next(cols);
  front.set(0);
  std::int64_t lo = 0, hi = 0, depth = 0;
  for (std::int64_t t = 0; t < t_limit; ++t) {
    const double q = std::pow(p, nu_temporal[static_cast<std::size_t>(t)]);
    next = BitRow(cols);
    std::int64_t nlo = cols, nhi = -1;
    for (std::int64_t c = lo; c <= hi; ++c) {
      if (!front.test(c)) continue;
      if (c + 1 < cols && rng.next_double() < q) {
        next.set(c + 1);
        nlo = std::min(nlo, c + 1);
        nhi = std::max(nhi, c + 1);
      }
      if (c >= 1 && rng.next_double() < q) {
        next.set(c - 1);
        nlo = std::min(nlo, c - 1);
        nhi = std::max(nhi, c - 1);
      }
    }
    if (nhi < 0) break;
    front = next;
    lo = nlo;
    hi = nhi;
    depth = t + 1;
  }
  return depth;
}

ReducedRectangle reduce_rectangle(const RenewalEmbedding& emb, const Rectangle& rect) {
  if (rect.t0 >= rect.t1 || rect.a >= rect.b) throw std::invalid_argument("reduce_rectangle: bad rectangle");
  const auto& x = emb.points;
  auto lo_it = std::lower_bound(x.begin(), x.end(), rect.a);
  // points inside [a, b]
  auto hi_it = std::upper_bound(x.begin(), x.end(), rect.b);
  const auto in_count = static_cast<std::int64_t>(hi_it - lo_it);
  if (in_count < 2) throw InsufficientColumns("reduce_rectangle: fewer than two renewal points in [a,b]");
  ReducedRectangle red;
  red.i_lo = lo_it - x.begin();
  red.a0 = x[static_cast<std::size_t>(red.i_lo)];
  // b0 = max{X_{i-1} : X_i <= b}; the largest such i is hi_it - 1.
  const auto i_last = static_cast<std::int64_t>(hi_it - x.begin()) - 1;
  red.i_hi = i_last - 1;
  red.b0 = x[static_cast<std::size_t>(red.i_hi)];
  return red;
}

namespace {

bool crossing_scan(const OpenConfiguration& config, std::int64_t t0, std::int64_t t1,
                   std::int64_t c_lo, std::int64_t c_hi, CrossingKind kind) {
  const std::int64_t cols = config.cols();
  BitRow mask(cols);
  for (std::int64_t c = c_lo; c <= c_hi; ++c) mask.set(c);
  const std::int64_t start_col = (kind == CrossingKind::RLC) ? c_hi : c_lo;
  const std::int64_t target_col = (kind == CrossingKind::RLC) ? c_lo : c_hi;

  BitRow front(cols);
  if (kind == CrossingKind::BTC) {
    front = config.vertex_open[static_cast<std::size_t>(t0)] & mask;
    if (t1 == t0) return front.any();
  } else {
    if (config.vertex_is_open(t0, start_col)) front.set(start_col);
    if (front.test(target_col)) return true;
  }
  for (std::int64_t t = t0; t < t1; ++t) {
    BitRow next = ((front & config.edge_up[static_cast<std::size_t>(t)]).shifted_up() |
                   (front & config.edge_down[static_cast<std::size_t>(t)]).shifted_down()) &
                  config.vertex_open[static_cast<std::size_t>(t + 1)] & mask;
    if (kind != CrossingKind::BTC) {
      // new starts may join at any layer
      if (config.vertex_is_open(t + 1, start_col)) next.set(start_col);
      if (next.test(target_col)) return true;
    }
    front = next;
    if (!front.any() && kind != CrossingKind::BTC) {
      // later starts can still seed the frontier; continue
      continue;
    }
    if (!front.any()) return false;
  }
  return kind == CrossingKind::BTC ? front.any() : false;
}

}  // namespace

bool crossing(const OpenConfiguration& config, const RenewalEmbedding& emb, const Rectangle& rect,
              CrossingKind kind) {
  auto red = reduce_rectangle(emb, rect);
  if (rect.t0 < 0 || rect.t1 > config.window.t_max || red.i_hi > config.window.x_max)
    throw std::invalid_argument("crossing: rectangle outside configuration window");
  return crossing_scan(config, rect.t0, rect.t1, red.i_lo, red.i_hi, kind);
}

RenewalEmbedding trivial_embedding(std::int64_t width, int parity) {
  RenewalEmbedding emb;
  emb.B = parity;
  emb.points.resize(static_cast<std::size_t>(width));
  emb.xi_at.assign(static_cast<std::size_t>(width), 0);
  if (width > 1) emb.nu_gap.assign(static_cast<std::size_t>(width - 1), 1);
  for (std::int64_t i = 0; i < width; ++i) emb.points[static_cast<std::size_t>(i)] = i;
  return emb;
}

namespace {
constexpr char kMagic[8] = {'O', 'P', 'R', 'E', 'C', 'F', 'G', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("config dump truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_rows(std::ostream& out, const std::vector<BitRow>& rows) {
  for (const auto& r : rows)
    for (auto w : r.words()) write_u64(out, w);
}

void read_rows(std::istream& in, std::vector<BitRow>& rows, std::int64_t n, std::int64_t bits) {
  rows.assign(static_cast<std::size_t>(n), BitRow(bits));
  for (auto& r : rows)
    for (auto& w : r.words()) w = read_u64(in);
}
}  // namespace

void save_config(const OpenConfiguration& config, std::ostream& out) {
  out.write(kMagic, 8);
  write_u64(out, 1);  // version
  write_u64(out, static_cast<std::uint64_t>(config.window.variant));
  write_u64(out, static_cast<std::uint64_t>(config.parity));
  write_u64(out, static_cast<std::uint64_t>(config.window.t_max));
  write_u64(out, static_cast<std::uint64_t>(config.window.x_max));
  write_u64(out, config.provenance.seed);
  write_rows(out, config.vertex_open);
  write_rows(out, config.edge_up);
  write_rows(out, config.edge_down);
}

OpenConfiguration load_config(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad config magic");
  if (read_u64(in) != 1) throw std::runtime_error("unsupported config version");
  OpenConfiguration cfg;
  cfg.window.variant = static_cast<WindowVariant>(read_u64(in));
  cfg.parity = static_cast<int>(read_u64(in));
  cfg.window.t_max = static_cast<std::int64_t>(read_u64(in));
  cfg.window.x_max = static_cast<std::int64_t>(read_u64(in));
  cfg.provenance.seed = read_u64(in);
  const std::int64_t cols = cfg.window.x_max + 1;
  read_rows(in, cfg.vertex_open, cfg.window.t_max + 1, cols);
  read_rows(in, cfg.edge_up, cfg.window.t_max, cols);
  read_rows(in, cfg.edge_down, cfg.window.t_max, cols);
  return cfg;
}

void save_config_file(const OpenConfiguration& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  save_config(config, out);
}

OpenConfiguration load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_config(in);
}

}  // namespace opre
