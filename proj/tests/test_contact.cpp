#include <doctest.h>

#include <cmath>

#include "opre/contact.hpp"
#include "opre/rng.hpp"
#include "opre/stats.hpp"

using namespace opre;

namespace {
PointSetWindow pts(std::vector<double> v, double lo = 0.0, double hi = 10.0) {
  PointSetWindow w;
  w.t_lo = lo;
  w.t_hi = hi;
  w.points = std::move(v);
  return w;
}

ContactInstance line_instance(std::int64_t n, double T) {
  ContactInstance inst;
  inst.graph = make_line(n);
  inst.horizon = T;
  inst.initial = {0};
  inst.contact.assign(inst.graph.edges.size(), pts({}, 0.0, T));
  inst.recovery.assign(static_cast<std::size_t>(n), pts({}, 0.0, T));
  return inst;
}

// reference implementation: fixpoint iteration over all contact points,
// keeping every maximal infection window
std::vector<std::vector<std::pair<double, double>>> naive_windows(const ContactInstance& inst) {
  const auto nv = static_cast<std::size_t>(inst.graph.vertex_count());
  std::vector<std::vector<std::pair<double, double>>> wins(nv);
  auto next_rec = [&](std::size_t v, double t) {
    auto it = std::lower_bound(inst.recovery[v].points.begin(), inst.recovery[v].points.end(), t);
    return it == inst.recovery[v].points.end() ? std::numeric_limits<double>::infinity() : *it;
  };
  auto add = [&](std::size_t v, double s) {
    const double e = next_rec(v, s);
    if (e == s) return false;
    for (const auto& w : wins[v])
      if (w.first <= s && e <= w.second) return false;  // covered
    wins[v].emplace_back(s, e);
    return true;
  };
  for (auto v : inst.initial) add(static_cast<std::size_t>(v), 0.0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
      const auto [a, b] = inst.graph.edges[e];
      for (double t : inst.contact[e].points) {
        auto fire = [&](std::int64_t u, std::int64_t v) {
          for (const auto& w : wins[static_cast<std::size_t>(u)])
            if (w.first <= t && t < w.second) {
              if (add(static_cast<std::size_t>(v), t)) changed = true;
              break;
            }
        };
        fire(a, b);
        if (!inst.graph.directed) fire(b, a);
      }
    }
  }
  return wins;
}

bool naive_infected_at(const std::vector<std::vector<std::pair<double, double>>>& wins,
                       std::int64_t v, double t) {
  for (const auto& w : wins[static_cast<std::size_t>(v)])
    if (w.first <= t && t < w.second) return true;
  return false;
}
}  // namespace

TEST_CASE("closed-set samplers") {
  SUBCASE("periodic uniform window restriction") {
    // 2(Z + U) with U = 0.25 gives {0.5, 2.5, 4.5} on [0,5]; pin via direct points
    PointSetWindow w;
    w.points.clear();
    for (std::int64_t k = 0;; ++k) {
      const double p = 2.0 * (0.25 + static_cast<double>(k));
      if (p > 5.0) break;
      w.points.push_back(p);
    }
    CHECK(w.points == std::vector<double>{0.5, 2.5, 4.5});
    // and the sampler realises some shifted copy of the same pattern
    auto s = sample_closed_set(ClosedSetSpec::PeriodicUniform(), 0.0, 5.0, 11);
    REQUIRE(s.points.size() >= 2);
    CHECK(s.points[1] - s.points[0] == doctest::Approx(2.0));
  }
  SUBCASE("periodic bernoulli both shifts") {
    bool saw0 = false, saw1 = false;
    for (std::uint64_t seed = 0; seed < 64 && (!saw0 || !saw1); ++seed) {
      auto s = sample_closed_set(ClosedSetSpec::PeriodicBernoulli(0.5), 0.0, 5.0, seed);
      if (s.points == std::vector<double>{1.0, 3.0, 5.0}) saw1 = true;
      if (s.points == std::vector<double>{0.0, 2.0, 4.0}) saw0 = true;
    }
    CHECK(saw0);
    CHECK(saw1);
  }
  SUBCASE("ppp count and interarrival law") {
    auto s = sample_closed_set(ClosedSetSpec::Ppp(2.0), 0.0, 10000.0, 5);
    const double n = static_cast<double>(s.points.size());
    CHECK(std::fabs(n - 20000.0) <= 3.0 * std::sqrt(20000.0));
    std::vector<double> gaps;
    for (std::size_t i = 1; i < s.points.size(); ++i) gaps.push_back(s.points[i] - s.points[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    const double d = ks_statistic(gaps, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-2.0 * x); });
    CHECK(ks_pvalue(d, gaps.size()) > 1e-3);
  }
  SUBCASE("scaled is the inner realisation divided by mu") {
    const double mu = 4.0;
    auto inner = sample_closed_set(ClosedSetSpec::Ppp(1.0), 0.0, mu * 20.0, 77);
    auto scaled = sample_closed_set(ClosedSetSpec::Scaled(mu, ClosedSetSpec::Ppp(1.0)), 0.0, 20.0, 77);
    REQUIRE(scaled.points.size() == inner.points.size());
    for (std::size_t i = 0; i < inner.points.size(); ++i)
      CHECK(scaled.points[i] == inner.points[i] / mu);
  }
}

TEST_CASE("earliest recovery") {
  auto y = pts({1.5, 3.0});
  CHECK(*earliest_recovery(y, 2.0) == doctest::Approx(1.0));
  CHECK(*earliest_recovery(y, 1.5) == doctest::Approx(0.0));
  auto y2 = pts({1.5});
  CHECK_FALSE(earliest_recovery(y2, 2.0).has_value());
  CHECK_THROWS_AS(earliest_recovery(y2, 11.0), std::out_of_range);
}

TEST_CASE("hand-traced two-vertex dynamics") {
  SUBCASE("infection passes before any recovery") {
    auto inst = line_instance(2, 1.0);
    inst.contact[0] = pts({0.5}, 0.0, 1.0);
    inst.recovery[0] = pts({2.0}, 0.0, 1.0);  // outside horizon, kept for shape
    inst.recovery[0].points = {};             // no recovery of v0 in [0,1]
    inst.recovery[1] = pts({0.3}, 0.0, 1.0);
    auto trace = run_contact(inst);
    CHECK(infected_at(trace, 1, 0.5));
    CHECK(verify_trace(inst, trace));
    CHECK(survival_probe(inst, trace));  // v1 infected at 0.5, no later recovery
  }
  SUBCASE("an early recovery of the source kills the leg") {
    auto inst = line_instance(2, 1.0);
    inst.contact[0] = pts({0.5}, 0.0, 1.0);
    inst.recovery[0] = pts({0.2}, 0.0, 1.0);
    auto trace = run_contact(inst);
    CHECK_FALSE(infected_at(trace, 1, 0.5));
    CHECK(verify_trace(inst, trace));
  }
  SUBCASE("recovery exactly at the contact blocks it") {
    auto inst = line_instance(2, 1.0);
    inst.contact[0] = pts({0.5}, 0.0, 1.0);
    inst.recovery[0] = pts({0.5}, 0.0, 1.0);
    auto trace = run_contact(inst);
    CHECK_FALSE(infected_at(trace, 1, 0.6));
  }
  SUBCASE("no contacts: J stays inside J0 until the first recovery") {
    auto inst = line_instance(3, 5.0);
    inst.recovery[0] = pts({1.25}, 0.0, 5.0);
    auto trace = run_contact(inst);
    CHECK(infected_at(trace, 0, 1.2));
    CHECK_FALSE(infected_at(trace, 0, 1.25));
    CHECK_FALSE(infected_at(trace, 1, 0.5));
    CHECK_FALSE(survival_probe(inst, trace));
  }
}

TEST_CASE("integer recovery lattice dies immediately under integer contacts") {
  auto inst = line_instance(3, 2.0);
  for (auto& y : inst.recovery) y = pts({0.0, 1.0, 2.0}, 0.0, 2.0);
  for (auto& x : inst.contact) x = pts({1.0, 2.0}, 0.0, 2.0);
  auto trace = run_contact(inst);
  CHECK(trace.events.empty());  // 0 in Y_v blocks the initial infection itself
  CHECK_FALSE(survival_probe(inst, trace));
}

TEST_CASE("re-infection extends windows") {
  auto inst = line_instance(2, 10.0);
  inst.contact[0] = pts({1.0, 4.0}, 0.0, 10.0);
  inst.recovery[1] = pts({2.0, 9.0}, 0.0, 10.0);
  auto trace = run_contact(inst);
  CHECK(infected_at(trace, 1, 1.5));
  CHECK_FALSE(infected_at(trace, 1, 2.5));
  CHECK(infected_at(trace, 1, 4.5));   // re-infected at 4.0
  CHECK_FALSE(infected_at(trace, 1, 9.5));
  CHECK(verify_trace(inst, trace));
}

TEST_CASE("event sweep agrees with the naive fixpoint reference") {
  Rng rng(6);
  for (int it = 0; it < 300; ++it) {
    const std::int64_t n = 3 + static_cast<std::int64_t>(rng.next_below(4));
    const double T = 8.0;
    const bool quadrant = rng.next_bool();
    ContactInstance inst;
    inst.graph = quadrant ? make_ne_quadrant(3) : make_line(n);
    inst.horizon = T;
    inst.initial = {0};
    const std::uint64_t s = 5000 + static_cast<std::uint64_t>(it);
    for (std::size_t e = 0; e < inst.graph.edges.size(); ++e)
      inst.contact.push_back(sample_closed_set(ClosedSetSpec::Ppp(0.6), 0.0, T, derive_seed(s, e, "X")));
    for (std::int64_t v = 0; v < inst.graph.vertex_count(); ++v)
      inst.recovery.push_back(sample_closed_set(ClosedSetSpec::Ppp(0.4), 0.0, T,
                                                derive_seed(s, static_cast<std::uint64_t>(v), "Y")));
    auto trace = run_contact(inst);
    CHECK(verify_trace(inst, trace));
    auto ref = naive_windows(inst);
    for (std::int64_t v = 0; v < inst.graph.vertex_count(); ++v)
      for (double t : {0.0, 0.5, 1.7, 3.1, 4.9, 6.3, 7.9})
        CHECK(infected_at(trace, v, t) == naive_infected_at(ref, v, t));
  }
}

TEST_CASE("monotonicity: more contacts or fewer recoveries never shrink J_t") {
  Rng rng(14);
  for (int it = 0; it < 100; ++it) {
    const std::uint64_t s = 800 + static_cast<std::uint64_t>(it);
    auto inst = line_instance(5, 8.0);
    for (std::size_t e = 0; e < inst.contact.size(); ++e)
      inst.contact[e] = sample_closed_set(ClosedSetSpec::Ppp(0.5), 0.0, 8.0, derive_seed(s, e, "X"));
    for (std::size_t v = 0; v < inst.recovery.size(); ++v)
      inst.recovery[v] = sample_closed_set(ClosedSetSpec::Ppp(0.5), 0.0, 8.0, derive_seed(s, v, "Y"));
    auto richer = inst;
    // add a contact point and drop a recovery point
    richer.contact[static_cast<std::size_t>(rng.next_below(richer.contact.size()))].points.push_back(
        8.0 * rng.next_double());
    for (auto& x : richer.contact) std::sort(x.points.begin(), x.points.end());
    auto& y = richer.recovery[static_cast<std::size_t>(rng.next_below(richer.recovery.size()))];
    if (!y.points.empty()) y.points.erase(y.points.begin() + static_cast<std::ptrdiff_t>(
                                              rng.next_below(y.points.size())));
    auto base = run_contact(inst);
    auto more = run_contact(richer);
    for (std::int64_t v = 0; v < 5; ++v)
      for (double t : {0.3, 1.1, 2.7, 5.5, 7.7})
        if (infected_at(base, v, t)) CHECK(infected_at(more, v, t));
  }
}

TEST_CASE("Z_t audit: recovery delays of a ppp average to 1/rate") {
  const double delta = 0.5;
  double acc = 0.0;
  std::uint64_t n = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto y = sample_closed_set(ClosedSetSpec::Ppp(delta), 0.0, 200.0, seed);
    for (double t = 0.0; t < 100.0; t += 7.3) {
      auto z = earliest_recovery(y, t);
      if (z) {
        acc += *z;
        ++n;
      }
    }
  }
  const double mean = acc / static_cast<double>(n);
  CHECK(mean == doctest::Approx(1.0 / delta).epsilon(0.1));
}

TEST_CASE("scaling identity: scaled recoveries equal divided recoveries exactly") {
  const double mu = 3.0;
  const double T = 12.0;
  auto inst_a = line_instance(4, T);
  auto inst_b = line_instance(4, T);
  for (std::size_t e = 0; e < inst_a.contact.size(); ++e) {
    inst_a.contact[e] = sample_closed_set(ClosedSetSpec::Ppp(1.0), 0.0, T, derive_seed(33, e, "X"));
    inst_b.contact[e] = inst_a.contact[e];
  }
  for (std::size_t v = 0; v < inst_a.recovery.size(); ++v) {
    inst_a.recovery[v] = sample_closed_set(ClosedSetSpec::Scaled(mu, ClosedSetSpec::Ppp(0.7)), 0.0, T,
                                           derive_seed(33, v, "Y"));
    auto inner = sample_closed_set(ClosedSetSpec::Ppp(0.7), 0.0, mu * T, derive_seed(33, v, "Y"));
    for (auto& p : inner.points) p /= mu;
    inner.t_hi = T;
    inst_b.recovery[v] = inner;
  }
  auto ta = run_contact(inst_a);
  auto tb = run_contact(inst_b);
  REQUIRE(ta.events.size() == tb.events.size());
  for (std::size_t i = 0; i < ta.events.size(); ++i) {
    CHECK(ta.events[i].time == tb.events[i].time);
    CHECK(ta.events[i].vertex == tb.events[i].vertex);
    CHECK(ta.events[i].window_end == tb.events[i].window_end);
  }
}
