#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opre/dist.hpp"

namespace opre {

// Random closed sets restricted to locally finite realisations on a window.
//   ppp(rate)              homogeneous Poisson process
//   periodic_uniform       2(Z + U), U ~ Uniform[0,1)
//   periodic_bernoulli(q)  2Z + B, B ~ Bernoulli(q)
//   cox_bds(p, delta, D)   PPP(delta) with prob p, else PPP(Delta), Delta ~ D
//   cox_ppp(D)             PPP(Delta), Delta ~ D
//   empty                  no points
//   scaled(mu, inner)      mu^-1 * inner realisation
enum class ClosedSetKind {
  ppp,
  periodic_uniform,
  periodic_bernoulli,
  cox_bds,
  cox_ppp,
  empty,
  scaled,
};

struct ClosedSetSpec {
  ClosedSetKind kind = ClosedSetKind::empty;
  double rate = 1.0;      // ppp
  double q = 0.5;         // periodic_bernoulli
  double p = 0.5;         // cox_bds good-location probability
  double delta = 0.1;     // cox_bds good rate
  DistSpec intensity;     // cox Delta law
  double mu = 1.0;        // scaled
  std::shared_ptr<ClosedSetSpec> inner;  // scaled

  static ClosedSetSpec Ppp(double rate);
  static ClosedSetSpec PeriodicUniform();
  static ClosedSetSpec PeriodicBernoulli(double q);
  static ClosedSetSpec CoxBds(double p, double delta, DistSpec intensity);
  static ClosedSetSpec CoxPpp(DistSpec intensity);
  static ClosedSetSpec Empty();
  static ClosedSetSpec Scaled(double mu, ClosedSetSpec inner);
};

void validate(const ClosedSetSpec& spec);

struct PointSetWindow {
  double t_lo = 0.0, t_hi = 0.0;
  std::vector<double> points;  // sorted, deduplicated, within [t_lo, t_hi]
  std::string spec_id;
};

PointSetWindow sample_closed_set(const ClosedSetSpec& spec, double t_lo, double t_hi,
                                 std::uint64_t seed);

// Z_t = min{s >= 0 : s + t in Y}; nullopt when no point of the window remains.
std::optional<double> earliest_recovery(const PointSetWindow& y, double t);

// closed-interval intersection / membership queries on a point set
bool set_hits_interval(const PointSetWindow& s, double a, double b);
bool set_contains(const PointSetWindow& s, double t);

// Finite graphs of Def-style contact processes: a line on Z>=0 with undirected
// nearest-neighbour edges, or the oriented north-east quadrant on Z^2>=0.
struct ContactGraph {
  enum Kind { line, ne_quadrant } kind = line;
  std::int64_t n = 0;  // vertices per axis
  bool directed = false;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;  // (u, v); directed u -> v when directed

  std::int64_t vertex_count() const { return kind == line ? n : n * n; }
};

ContactGraph make_line(std::int64_t n);
ContactGraph make_ne_quadrant(std::int64_t n);

struct ContactInstance {
  ContactGraph graph;
  std::vector<PointSetWindow> contact;   // per edge (matches graph.edges)
  std::vector<PointSetWindow> recovery;  // per vertex
  std::vector<std::int64_t> initial;     // J0
  double horizon = 0.0;                  // T; every window is [0, T]
};

// Samples all realisations of an instance from per-object derived seeds.
ContactInstance make_instance(ContactGraph graph, const ClosedSetSpec& contact_spec,
                              const ClosedSetSpec& recovery_spec, std::vector<std::int64_t> initial,
                              double horizon, std::uint64_t seed);

// One accepted infection event. Vertex `vertex` is infectious on
// [time, window_end): window_end is its first recovery point >= time (or
// beyond the horizon). source/edge are -1 for initial infections.
struct InfectionEvent {
  double time = 0.0;
  std::int64_t vertex = -1;
  std::int64_t source = -1;
  std::int64_t edge = -1;
  double window_end = 0.0;
  std::int64_t parent_event = -1;
};

struct InfectionTrace {
  std::vector<InfectionEvent> events;                       // time-ordered
  std::vector<std::vector<std::pair<double, double>>> windows;  // per-vertex [start, end)
};

// Event-driven forward sweep. Closed-interval tie rule: a recovery exactly at
// a contact time blocks the leg, and an initial infection with 0 in Y_v never
// starts. Re-infection is allowed and only coverage-extending windows are kept
// (events arrive in time order, so the kept windows union to exactly J_t).
InfectionTrace run_contact(const ContactInstance& inst);

bool infected_at(const InfectionTrace& trace, std::int64_t vertex, double t);

// J_T nonempty?
bool survival_probe(const ContactInstance& inst);
bool survival_probe(const ContactInstance& inst, const InfectionTrace& trace);

// Replays every event back to J0 and checks both Def-1.4 conditions exactly.
bool verify_trace(const ContactInstance& inst, const InfectionTrace& trace,
                  std::string* first_error = nullptr);

}  // namespace opre
