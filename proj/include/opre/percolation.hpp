#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "opre/bitrow.hpp"
#include "opre/environment.hpp"
#include "opre/kernels.hpp"

namespace opre {

// Finite window of the oriented lattice. Columns are indexed 0..x_max; in the
// plain variant column c sits at spatial position c, in the embedded variant
// at X_c. A vertex (t, c) exists iff t + c + parity is even; edges go
// (t,c) -> (t+1, c+/-1).
enum class WindowVariant { plain, embedded };

struct LatticeWindow {
  std::int64_t t_max = 0;  // layers 0..t_max
  std::int64_t x_max = 0;  // columns 0..x_max
  WindowVariant variant = WindowVariant::plain;
};

struct Provenance {
  std::string environment;
  std::string vertex_kernel;
  std::string edge_kernel;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

struct OpenConfiguration {
  LatticeWindow window;
  int parity = 0;  // B
  std::vector<BitRow> vertex_open;  // t_max + 1 rows
  std::vector<BitRow> edge_up;      // t rows; bit c: (t,c) -> (t+1,c+1)
  std::vector<BitRow> edge_down;    // t rows; bit c: (t,c) -> (t+1,c-1)
  Provenance provenance;

  std::int64_t cols() const { return window.x_max + 1; }
  bool vertex_valid(std::int64_t t, std::int64_t c) const {
    return t >= 0 && t <= window.t_max && c >= 0 && c <= window.x_max && ((t + c + parity) & 1) == 0;
  }
  bool vertex_is_open(std::int64_t t, std::int64_t c) const {
    return vertex_valid(t, c) && vertex_open[static_cast<std::size_t>(t)].test(c);
  }
  // dir = +1 up edge, -1 down edge, anchored at the source column
  bool edge_is_open(std::int64_t t, std::int64_t c, int dir) const {
    if (t < 0 || t >= window.t_max || !vertex_valid(t, c)) return false;
    if (dir > 0) return c + 1 <= window.x_max && edge_up[static_cast<std::size_t>(t)].test(c);
    return c >= 1 && edge_down[static_cast<std::size_t>(t)].test(c);
  }
};

struct Rectangle {
  std::int64_t t0 = 0, t1 = 0;  // time range
  std::int64_t a = 0, b = 0;    // spatial range
};

struct ReducedRectangle {
  std::int64_t a0 = 0, b0 = 0;  // spatial positions
  std::int64_t i_lo = 0, i_hi = 0;  // column indices of a0 and b0
};

enum class CrossingKind { LRC, RLC, BTC };

// Plain-variant OPRE over the raw environment stretches.
OpenConfiguration sample_opre(const StretchEnvironment& env, const ConnectionFamily& fam_v,
                              const ConnectionFamily& fam_e, const LatticeWindow& window,
                              std::uint64_t seed);

// Embedded-variant OPRE over the integerised stretches at the renewal columns.
OpenConfiguration sample_opre(const RenewalEmbedding& emb, const ConnectionFamily& fam_v,
                              const ConnectionFamily& fam_e, const LatticeWindow& window,
                              std::uint64_t seed);

// Temporal-stretch model: every edge leaving layer t is open with probability
// p^nu[t] independently; all vertices open. An infinite nu closes the layer.
OpenConfiguration sample_temporal(double p, const std::vector<double>& nu_temporal,
                                  const LatticeWindow& window, std::uint64_t seed);
OpenConfiguration sample_temporal(double p, const StretchSpec& tail_spec,
                                  const LatticeWindow& window, std::uint64_t seed);

// Layer-by-layer frontier from source columns at layer 0. Closed sources drop out.
std::vector<BitRow> reach(const OpenConfiguration& config, const std::vector<std::int64_t>& source_cols,
                          std::int64_t depth);

// Largest t whose frontier from the single source is nonempty.
std::int64_t survival_depth(const OpenConfiguration& config, std::int64_t source_col);

// Streaming survival depth for the temporal model; avoids materialising
// windows. width_cap > 0 restricts the spatial extent (survival on the capped
// strip lower-bounds the uncapped window).
std::int64_t temporal_survival_depth(double p, const std::vector<double>& nu_temporal,
                                     std::int64_t t_limit, std::uint64_t seed,
                                     std::int64_t width_cap = 0);

ReducedRectangle reduce_rectangle(const RenewalEmbedding& emb, const Rectangle& rect);

bool crossing(const OpenConfiguration& config, const RenewalEmbedding& emb, const Rectangle& rect,
              CrossingKind kind);

// Identity embedding (X_i = i, all integer stretches zero) so plain windows can
// use the rectangle machinery.
RenewalEmbedding trivial_embedding(std::int64_t width, int parity = 0);

// Portable binary dump (magic, version, extents, bitset payload).
void save_config(const OpenConfiguration& config, std::ostream& out);
OpenConfiguration load_config(std::istream& in);
void save_config_file(const OpenConfiguration& config, const std::string& path);
OpenConfiguration load_config_file(const std::string& path);

}  // namespace opre
