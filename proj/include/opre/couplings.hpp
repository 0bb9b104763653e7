#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opre/contact.hpp"
#include "opre/environment.hpp"
#include "opre/kernels.hpp"
#include "opre/percolation.hpp"

namespace opre {

// The four explicit couplings between contact-process data and oriented
// bond-site percolation. Each coupling stores its geometry map as plain data
// (per-edge transfer windows or event templates), a config can be derived
// mechanically from contact realisations, and every open oriented path of a
// derived config replays to a Def-1.4-valid infection path.

enum class CouplingKind { d2_block, cppr_uni, cppr_ber, cpre };

struct ReplayResult {
  std::uint64_t paths = 0;
  std::uint64_t failures = 0;
  std::string first_error;
};

// ---------------------------------------------------------------------------
// d2_block: block discretisation of a generalised contact process on the
// oriented north-east quadrant. Vertex (j,i) of the lattice is open iff
// mu^-1 Y_w has no point in [(j-1)t, (j+1)t]; the edge to layer j+1 is open
// iff X_e has a point in [jt, (j+1)t].
struct D2Coupling {
  std::int64_t n = 0;          // quadrant side
  double t_block = 1.0;
  double mu = 1.0;
  double horizon = 0.0;
  int parity = 0;              // (n-1) mod 2: quadrant (a,b) -> (a+b, a-b+n-1)
  double corrupt_shift = 0.0;  // test hook: offsets the block windows
  std::vector<PointSetWindow> Y;  // per quadrant vertex, unscaled
  std::vector<PointSetWindow> X;  // per quadrant directed edge
  ContactGraph graph;             // ne_quadrant(n)
  OpenConfiguration config;
};

D2Coupling couple_d2(std::vector<PointSetWindow> Y, std::vector<PointSetWindow> X, double t_block,
                     double mu, std::int64_t n);

// re-derives the config from the stored realisations (honours corrupt_shift)
void rederive_d2_config(D2Coupling& c);

// quadrant vertex of lattice column/layer; nullopt outside the quadrant image
std::optional<std::int64_t> d2_vertex_of(const D2Coupling& c, std::int64_t j, std::int64_t i);

ReplayResult replay_d2(const D2Coupling& c, std::uint64_t max_paths, std::uint64_t seed);

// ---------------------------------------------------------------------------
// cppr_uni: contact process with uniformly shifted period-2 recoveries.
// After the normalisation U_i -> U_i - U_0 + 1/2 the stretches are
// nu_i = -log(2 d_T(U_i, U_{i+1})) and the edge kernel is cppr_uniform.
struct UniCoupling {
  std::vector<double> U;      // normalised shifts, U[0] = 1/2
  std::vector<double> phi;    // 2 U mod 2
  std::vector<double> S;      // 2 d_T(U_i, U_{i+1})
  std::vector<double> nu;     // -log S
  std::vector<std::int64_t> z;  // per-column lattice parity offsets, z[0] = 2
  double lambda = 0.0;
  StretchEnvironment env;         // xi = 0, nu as above
  ConnectionFamily vertex_fam;    // constant(1)
  ConnectionFamily edge_fam;      // cppr_uniform(lambda)
  double corrupt_shift = 0.0;     // test hook: offsets transfer windows

  // epoch anchor of lattice vertex (j, i): its defining recovery time
  double anchor(std::int64_t j, std::int64_t i) const;
  // transfer window of the edge (j, from) -> (j+1, to); empty when the
  // ordering truncation devours it
  std::pair<double, double> window(std::int64_t j, std::int64_t from, std::int64_t to) const;
};

UniCoupling couple_cppr_uniform(const std::vector<double>& U, double lambda);

// X_pair[i] carries the contact points of line edge {i, i+1} on [0, horizon].
OpenConfiguration derive_config_uni(const UniCoupling& c, const std::vector<PointSetWindow>& X_pair,
                                    std::int64_t t_max);

ReplayResult replay_uni(const UniCoupling& c, const std::vector<PointSetWindow>& X_pair,
                        const OpenConfiguration& config, std::uint64_t max_paths, std::uint64_t seed);

// ---------------------------------------------------------------------------
// cppr_ber: Bernoulli-shifted period-2 recoveries. The shift sequence is cut
// into intervals of consecutive equal values ending in the first opposite one;
// their lengths N_i are the crossing counts. The dominating environment
// replaces them by i.i.d. geometric K_i with tail max(q, 1-q)^l via quantile
// coupling (domination violations are counted, not hidden).
struct BerCoupling {
  std::vector<int> B;            // shifts per line vertex
  std::vector<std::int64_t> N;   // interval lengths
  std::vector<std::int64_t> K;   // dominated i.i.d. geometric
  std::int64_t domination_violations = 0;
  std::vector<std::int64_t> cols;  // real vertex of lattice column i
  double q = 0.5;
  double lambda = 0.0;
  StretchEnvironment env;        // xi = 0, nu_i = K_i^2
  ConnectionFamily vertex_fam;   // constant(1)
  ConnectionFamily edge_fam;     // cppr_bernoulli(lambda)
};

std::vector<std::int64_t> extract_runs(const std::vector<int>& B);
std::vector<std::int64_t> dominate_runs(const std::vector<std::int64_t>& N, double q,
                                        std::uint64_t seed, std::int64_t* violations = nullptr);

BerCoupling couple_cppr_bernoulli(const std::vector<int>& B, double q, double lambda,
                                  std::uint64_t domination_seed = 0);

// X_edge[x] carries the contacts of real line edge (x, x+1); recoveries are
// (2Z + B_x) restricted to (0, horizon] (no atom at the start of time).
OpenConfiguration derive_config_ber(const BerCoupling& c, const std::vector<PointSetWindow>& X_edge,
                                    double horizon, std::int64_t t_max);

ReplayResult replay_ber(const BerCoupling& c, const std::vector<PointSetWindow>& X_edge,
                        double horizon, const OpenConfiguration& config, std::uint64_t max_paths,
                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// cpre: contact process in a Cox environment, discretised into blocks of
// length L with delta = L^-2. Lattice columns sit at the good locations;
// crossing a gap of N_b bad vertices needs N_b ordered contacts inside one of
// the L unit slots of the layer (events A_e(k)).
struct CpreCoupling {
  double p = 0.5;
  std::int64_t L = 2;
  double delta = 0.0;                 // L^-2
  std::vector<std::uint8_t> good;     // per real location
  std::vector<std::int64_t> locs;     // good locations in order
  std::vector<std::int64_t> N;        // gaps, geometric(p)
  std::vector<double> delta_x;        // Delta per location (used at bad ones)
  std::vector<double> nu;             // N log N + sum Delta over the gap
  std::vector<double> edge_prob;      // recorded conditional formula per gap
  StretchEnvironment env;
  ConnectionFamily vertex_fam;        // cpre_vertex(L)
  ConnectionFamily edge_fam;          // cpre_edge(L)
};

CpreCoupling couple_cpre(double p, std::int64_t L, const std::vector<double>& delta_samples,
                         std::uint64_t seed);

OpenConfiguration derive_config_cpre(const CpreCoupling& c, const std::vector<PointSetWindow>& X_edge,
                                     const std::vector<PointSetWindow>& Y_vertex, std::int64_t t_max);

ReplayResult replay_cpre(const CpreCoupling& c, const std::vector<PointSetWindow>& X_edge,
                         const std::vector<PointSetWindow>& Y_vertex, const OpenConfiguration& config,
                         std::uint64_t max_paths, std::uint64_t seed);

// ---------------------------------------------------------------------------
struct CouplingReport {
  CouplingKind kind;
  std::uint64_t replications = 0;
  double max_identity_error = 0.0;   // exact kernel identity residual
  std::uint64_t paths = 0;
  std::uint64_t failures = 0;
  std::string first_error;
};

// Samples fresh realisations per replication, derives configs, extracts open
// oriented paths and replays every one of them.
CouplingReport validate_coupling(CouplingKind kind, std::uint64_t replications, std::uint64_t seed);

// Maximal open oriented paths from (0, source_col), randomly sampled.
std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> extract_open_paths(
    const OpenConfiguration& config, std::int64_t source_col, std::uint64_t max_paths,
    std::uint64_t seed);

}  // namespace opre
