#include "opre/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "opre/rng.hpp"

namespace opre {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ClosedSetSpec ClosedSetSpec::Ppp(double rate) {
  ClosedSetSpec s;
  s.kind = ClosedSetKind::ppp;
  s.rate = rate;
  return s;
}
ClosedSetSpec ClosedSetSpec::PeriodicUniform() {
  ClosedSetSpec s;
  s.kind = ClosedSetKind::periodic_uniform;
  return s;
}
ClosedSetSpec ClosedSetSpec::PeriodicBernoulli(double q) {
  ClosedSetSpec s;
  s.kind = ClosedSetKind::periodic_bernoulli;
  s.q = q;
  return s;
}
ClosedSetSpec ClosedSetSpec::CoxBds(double p, double delta, DistSpec intensity) {
  ClosedSetSpec s;
  s.kind = ClosedSetKind::cox_bds;
  s.p = p;
  s.delta = delta;
  s.intensity = intensity;
  return s;
}
ClosedSetSpec ClosedSetSpec::CoxPpp(DistSpec intensity) {
  ClosedSetSpec s;
  s.kind = ClosedSetKind::cox_ppp;
  s.intensity = intensity;
  return s;
}
ClosedSetSpec ClosedSetSpec::Empty() { return {}; }
ClosedSetSpec ClosedSetSpec::Scaled(double mu, ClosedSetSpec inner) {
  ClosedSetSpec s;
  s.kind = ClosedSetKind::scaled;
  s.mu = mu;
  s.inner = std::make_shared<ClosedSetSpec>(std::move(inner));
  return s;
}

void validate(const ClosedSetSpec& spec) {
  switch (spec.kind) {
    case ClosedSetKind::ppp:
      if (!(spec.rate > 0.0)) throw std::invalid_argument("ppp rate must be > 0");
      return;
    case ClosedSetKind::periodic_uniform:
    case ClosedSetKind::empty:
      return;
    case ClosedSetKind::periodic_bernoulli:
      if (!(spec.q > 0.0 && spec.q < 1.0)) throw std::invalid_argument("bernoulli q must be in (0,1)");
      return;
    case ClosedSetKind::cox_bds:
      if (!(spec.p > 0.0 && spec.p < 1.0)) throw std::invalid_argument("cox p must be in (0,1)");
      if (!(spec.delta > 0.0)) throw std::invalid_argument("cox delta must be > 0");
      validate(spec.intensity);
      return;
    case ClosedSetKind::cox_ppp:
      validate(spec.intensity);
      return;
    case ClosedSetKind::scaled:
      if (!(spec.mu > 0.0)) throw std::invalid_argument("scale mu must be > 0");
      if (!spec.inner) throw std::invalid_argument("scaled spec needs an inner spec");
      validate(*spec.inner);
      return;
  }
  throw std::invalid_argument("unsupported closed-set kind");
}

namespace {

void append_ppp(std::vector<double>& pts, double rate, double t_lo, double t_hi, Rng& rng) {
  double t = t_lo;
  while (true) {
    t += rng.exponential(rate);
    if (t > t_hi) break;
    pts.push_back(t);
  }
}

void append_periodic(std::vector<double>& pts, double shift, double t_lo, double t_hi) {
  // points shift + 2k
  auto k0 = static_cast<std::int64_t>(std::ceil((t_lo - shift) / 2.0));
  for (std::int64_t k = k0;; ++k) {
    const double p = shift + 2.0 * static_cast<double>(k);
    if (p > t_hi) break;
    if (p >= t_lo) pts.push_back(p);
  }
}

}  // namespace

PointSetWindow sample_closed_set(const ClosedSetSpec& spec, double t_lo, double t_hi,
                                 std::uint64_t seed) {
  validate(spec);
  if (!(t_lo <= t_hi)) throw std::invalid_argument("sample_closed_set: bad window");
  PointSetWindow w;
  w.t_lo = t_lo;
  w.t_hi = t_hi;
  Rng rng(derive_seed(seed, 0, "closedset"));
  switch (spec.kind) {
    case ClosedSetKind::ppp:
      w.spec_id = "ppp";
      append_ppp(w.points, spec.rate, t_lo, t_hi, rng);
      break;
    case ClosedSetKind::periodic_uniform: {
      w.spec_id = "periodic_uniform";
      const double u = rng.next_double();
      append_periodic(w.points, 2.0 * u, t_lo, t_hi);
      break;
    }
    case ClosedSetKind::periodic_bernoulli: {
      w.spec_id = "periodic_bernoulli";
      const double b = (rng.next_double() < spec.q) ? 1.0 : 0.0;
      append_periodic(w.points, b, t_lo, t_hi);
      break;
    }
    case ClosedSetKind::cox_bds: {
      w.spec_id = "cox_bds";
      const bool good = rng.next_double() < spec.p;
      const double rate = good ? spec.delta : sample(spec.intensity, rng);
      append_ppp(w.points, rate, t_lo, t_hi, rng);
      break;
    }
    case ClosedSetKind::cox_ppp: {
      w.spec_id = "cox_ppp";
      const double rate = sample(spec.intensity, rng);
      append_ppp(w.points, rate, t_lo, t_hi, rng);
      break;
    }
    case ClosedSetKind::empty:
      w.spec_id = "empty";
      break;
    case ClosedSetKind::scaled: {
      // realisation of mu^-1 * inner: the seed passes through unchanged so the
      // scaling identity holds exactly realisation by realisation
      auto inner = sample_closed_set(*spec.inner, spec.mu * t_lo, spec.mu * t_hi, seed);
      w.spec_id = "scaled(" + inner.spec_id + ")";
      w.points.reserve(inner.points.size());
      for (double p : inner.points) w.points.push_back(p / spec.mu);
      break;
    }
  }
  std::sort(w.points.begin(), w.points.end());
  w.points.erase(std::unique(w.points.begin(), w.points.end()), w.points.end());
  return w;
}

std::optional<double> earliest_recovery(const PointSetWindow& y, double t) {
  if (t < y.t_lo || t > y.t_hi) throw std::out_of_range("earliest_recovery: t outside window");
  auto it = std::lower_bound(y.points.begin(), y.points.end(), t);
  if (it == y.points.end()) return std::nullopt;
  return *it - t;
}

ContactGraph make_line(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("make_line: n must be >= 1");
  ContactGraph g;
  g.kind = ContactGraph::line;
  g.n = n;
  g.directed = false;
  for (std::int64_t i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

ContactGraph make_ne_quadrant(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("make_ne_quadrant: n must be >= 1");
  ContactGraph g;
  g.kind = ContactGraph::ne_quadrant;
  g.n = n;
  g.directed = true;
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = 0; b < n; ++b) {
      if (a + 1 < n) g.edges.emplace_back(a * n + b, (a + 1) * n + b);
      if (b + 1 < n) g.edges.emplace_back(a * n + b, a * n + b + 1);
    }
  return g;
}

ContactInstance make_instance(ContactGraph graph, const ClosedSetSpec& contact_spec,
                              const ClosedSetSpec& recovery_spec, std::vector<std::int64_t> initial,
                              double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("make_instance: horizon must be > 0");
  ContactInstance inst;
  inst.graph = std::move(graph);
  inst.horizon = horizon;
  inst.initial = std::move(initial);
  inst.contact.reserve(inst.graph.edges.size());
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e)
    inst.contact.push_back(sample_closed_set(contact_spec, 0.0, horizon, derive_seed(seed, e, "contact.X")));
  const auto nv = static_cast<std::size_t>(inst.graph.vertex_count());
  inst.recovery.reserve(nv);
  for (std::size_t v = 0; v < nv; ++v)
    inst.recovery.push_back(sample_closed_set(recovery_spec, 0.0, horizon, derive_seed(seed, v, "contact.Y")));
  return inst;
}

namespace {

// first recovery point >= t, or +inf
double next_recovery(const PointSetWindow& y, double t) {
  auto it = std::lower_bound(y.points.begin(), y.points.end(), t);
  return (it == y.points.end()) ? kInf : *it;
}

struct PendingEvent {
  double time;
  std::uint64_t seq;
  std::int64_t vertex, source, edge;
  double window_end;
  std::int64_t parent_event;
};

struct PendingOrder {
  bool operator()(const PendingEvent& a, const PendingEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

}  // namespace

InfectionTrace run_contact(const ContactInstance& inst) {
  const auto nv = static_cast<std::size_t>(inst.graph.vertex_count());
  if (inst.recovery.size() != nv || inst.contact.size() != inst.graph.edges.size())
    throw std::invalid_argument("run_contact: malformed instance");

  // incident edge lists (outgoing only when directed)
  std::vector<std::vector<std::int64_t>> incident(nv);
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
    const auto [u, v] = inst.graph.edges[e];
    incident[static_cast<std::size_t>(u)].push_back(static_cast<std::int64_t>(e));
    if (!inst.graph.directed) incident[static_cast<std::size_t>(v)].push_back(static_cast<std::int64_t>(e));
  }

  InfectionTrace trace;
  trace.windows.assign(nv, {});
  std::vector<double> max_end(nv, -1.0);

  std::priority_queue<PendingEvent, std::vector<PendingEvent>, PendingOrder> queue;
  std::uint64_t seq = 0;

  for (auto v : inst.initial) {
    if (v < 0 || static_cast<std::size_t>(v) >= nv) throw std::invalid_argument("run_contact: bad J0");
    const double end = next_recovery(inst.recovery[static_cast<std::size_t>(v)], 0.0);
    if (end == 0.0) continue;  // 0 in Y_v: never infected at all
    queue.push({0.0, seq++, v, -1, -1, end, -1});
  }

  while (!queue.empty()) {
    const PendingEvent ev = queue.top();
    queue.pop();
    const auto v = static_cast<std::size_t>(ev.vertex);
    if (ev.window_end <= max_end[v]) continue;  // covered by an earlier window
    const auto event_index = static_cast<std::int64_t>(trace.events.size());
    trace.events.push_back({ev.time, ev.vertex, ev.source, ev.edge, ev.window_end, ev.parent_event});
    trace.windows[v].emplace_back(ev.time, ev.window_end);
    max_end[v] = ev.window_end;

    // schedule transmissions from [ev.time, ev.window_end)
    for (auto e : incident[v]) {
      const auto& edge = inst.graph.edges[static_cast<std::size_t>(e)];
      const std::int64_t u = (edge.first == ev.vertex) ? edge.second : edge.first;
      const auto& xs = inst.contact[static_cast<std::size_t>(e)].points;
      const auto& yu = inst.recovery[static_cast<std::size_t>(u)];
      auto it = std::lower_bound(xs.begin(), xs.end(), ev.time);
      while (it != xs.end() && *it < ev.window_end) {
        const double t = *it;
        const double end = next_recovery(yu, t);
        if (end == t) {  // recovery exactly at the contact blocks the leg
          ++it;
          continue;
        }
        queue.push({t, seq++, u, ev.vertex, e, end, event_index});
        // later contacts before `end` only yield sub-windows
        it = std::lower_bound(it, xs.end(), end);
      }
    }
  }
  return trace;
}

bool infected_at(const InfectionTrace& trace, std::int64_t vertex, double t) {
  for (const auto& w : trace.windows[static_cast<std::size_t>(vertex)])
    if (w.first <= t && t < w.second) return true;
  return false;
}

bool survival_probe(const ContactInstance& inst, const InfectionTrace& trace) {
  for (std::size_t v = 0; v < trace.windows.size(); ++v)
    for (const auto& w : trace.windows[v])
      if (w.first <= inst.horizon && inst.horizon < w.second) return true;
  return false;
}

bool survival_probe(const ContactInstance& inst) {
  auto trace = run_contact(inst);
  return survival_probe(inst, trace);
}

bool set_hits_interval(const PointSetWindow& s, double a, double b) {
  // [a, b] closed
  auto it = std::lower_bound(s.points.begin(), s.points.end(), a);
  return it != s.points.end() && *it <= b;
}

bool set_contains(const PointSetWindow& s, double t) {
  auto it = std::lower_bound(s.points.begin(), s.points.end(), t);
  return it != s.points.end() && *it == t;
}

bool verify_trace(const ContactInstance& inst, const InfectionTrace& trace, std::string* first_error) {
  auto fail = [&](const std::string& msg) {
    if (first_error) *first_error = msg;
    return false;
  };
  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    const auto& ev = trace.events[k];
    // walk back to J0
    std::vector<const InfectionEvent*> chain;
    const InfectionEvent* cur = &ev;
    while (true) {
      chain.push_back(cur);
      if (cur->parent_event < 0) break;
      cur = &trace.events[static_cast<std::size_t>(cur->parent_event)];
    }
    std::reverse(chain.begin(), chain.end());
    if (chain.front()->source != -1 ||
        std::find(inst.initial.begin(), inst.initial.end(), chain.front()->vertex) == inst.initial.end())
      return fail("chain does not start in J0");
    double prev_time = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const auto* c = chain[i];
      if (c->time < prev_time) return fail("contact times decrease along the chain");
      if (i > 0) {
        if (!set_contains(inst.contact[static_cast<std::size_t>(c->edge)], c->time))
          return fail("contact time not in X_e");
        const auto& edge = inst.graph.edges[static_cast<std::size_t>(c->edge)];
        const bool matches = (edge.first == chain[i - 1]->vertex && edge.second == c->vertex) ||
                             (!inst.graph.directed && edge.second == chain[i - 1]->vertex &&
                              edge.first == c->vertex);
        if (!matches) return fail("edge does not join source and target");
        // the source must stay recovery-free from its infection to this contact
        if (set_hits_interval(inst.recovery[static_cast<std::size_t>(chain[i - 1]->vertex)],
                          chain[i - 1]->time, c->time))
          return fail("source recovered inside the leg");
      }
      // the infected vertex must not recover exactly at its infection time
      if (set_hits_interval(inst.recovery[static_cast<std::size_t>(c->vertex)], c->time, c->time))
        return fail("vertex recovered at its infection time");
      prev_time = c->time;
    }
  }
  return true;
}

}  // namespace opre
