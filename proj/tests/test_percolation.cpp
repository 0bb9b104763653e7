#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "opre/percolation.hpp"
#include "opre/rng.hpp"

using namespace opre;

namespace {

StretchEnvironment constant_env(std::int64_t width, double xi, double nu) {
  StretchEnvironment env;
  env.width = width;
  env.xi.assign(static_cast<std::size_t>(width), xi);
  env.nu.assign(static_cast<std::size_t>(width - 1), nu);
  return env;
}

// brute-force reach by recursive path enumeration (no memo, tiny windows only)
std::set<std::pair<std::int64_t, std::int64_t>> enumerate_reached(const OpenConfiguration& cfg,
                                                                  std::int64_t source) {
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  auto walk = [&](auto&& self, std::int64_t t, std::int64_t c) -> void {
    if (!cfg.vertex_is_open(t, c)) return;
    out.insert({t, c});
    if (t == cfg.window.t_max) return;
    if (cfg.edge_is_open(t, c, +1)) self(self, t + 1, c + 1);
    if (cfg.edge_is_open(t, c, -1)) self(self, t + 1, c - 1);
  };
  walk(walk, 0, source);
  return out;
}

OpenConfiguration all_open(std::int64_t t_max, std::int64_t x_max) {
  auto env = constant_env(x_max + 1, 0.0, 0.0);
  return sample_opre(env, ConnectionFamily::constant(1.0), ConnectionFamily::constant(1.0),
                     {t_max, x_max, WindowVariant::plain}, 1);
}

}  // namespace

TEST_CASE("all-open fan-out respects the quadrant boundary") {
  auto cfg = all_open(2, 4);
  auto layers = reach(cfg, {0}, 2);
  CHECK(layers[2].test(0));
  CHECK(layers[2].test(2));
  CHECK(layers[2].count() == 2);  // {(2,0),(2,2)}
  CHECK(layers[1].count() == 1);  // only (1,1): (1,-1) does not exist
}

TEST_CASE("closed vertices stop everything") {
  auto env = constant_env(5, 0.0, 0.0);
  auto cfg = sample_opre(env, ConnectionFamily::constant(0.0), ConnectionFamily::constant(1.0),
                         {3, 4, WindowVariant::plain}, 1);
  auto layers = reach(cfg, {0, 2, 4}, 3);
  for (const auto& l : layers) CHECK_FALSE(l.any());
}

TEST_CASE("sampling frequencies land within 3 sigma") {
  SUBCASE("constant half") {
    auto env = constant_env(2001, 0.0, 0.0);
    auto cfg = sample_opre(env, ConnectionFamily::constant(0.5), ConnectionFamily::constant(0.5),
                           {999, 2000, WindowVariant::plain}, 77);
    std::int64_t open = 0, total = 0;
    for (std::int64_t t = 0; t <= 999; ++t) {
      open += cfg.vertex_open[static_cast<std::size_t>(t)].count();
      total += 1000 + ((t & 1) ? 0 : 1);
    }
    const double freq = static_cast<double>(open) / static_cast<double>(total);
    const double sigma = std::sqrt(0.25 / static_cast<double>(total));
    CHECK(std::fabs(freq - 0.5) <= 3.0 * sigma);
  }
  SUBCASE("power kernel with unit stretches") {
    auto env = constant_env(2001, 1.0, 1.0);
    auto cfg = sample_opre(env, ConnectionFamily::power(std::log(2.0)),
                           ConnectionFamily::power(std::log(2.0)), {999, 2000, WindowVariant::plain}, 78);
    std::int64_t open = 0, total = 0;
    for (std::int64_t t = 0; t <= 999; ++t) {
      open += cfg.vertex_open[static_cast<std::size_t>(t)].count();
      total += 1000 + ((t & 1) ? 0 : 1);
    }
    const double freq = static_cast<double>(open) / static_cast<double>(total);
    const double sigma = std::sqrt(0.25 / static_cast<double>(total));
    CHECK(std::fabs(freq - 0.5) <= 3.0 * sigma);
  }
}

TEST_CASE("random small windows agree with exhaustive path enumeration") {
  Rng rng(5);
  for (int it = 0; it < 30; ++it) {
    auto cfg = all_open(5, 5);
    for (std::int64_t t = 0; t <= 5; ++t)
      for (std::int64_t c = t & 1; c <= 5; c += 2) {
        if (rng.next_double() < 0.4) cfg.vertex_open[static_cast<std::size_t>(t)].reset(c);
        if (t < 5) {
          if (rng.next_double() < 0.4) cfg.edge_up[static_cast<std::size_t>(t)].reset(c);
          if (rng.next_double() < 0.4) cfg.edge_down[static_cast<std::size_t>(t)].reset(c);
        }
      }
    auto layers = reach(cfg, {0}, 5);
    auto oracle = enumerate_reached(cfg, 0);
    for (std::int64_t t = 0; t <= 5; ++t)
      for (std::int64_t c = 0; c <= 5; ++c)
        CHECK(layers[static_cast<std::size_t>(t)].test(c) == (oracle.count({t, c}) > 0));
  }
}

TEST_CASE("temporal model edge cases") {
  SUBCASE("zero stretches leave everything open") {
    auto cfg = sample_temporal(0.5, std::vector<double>{0.0, 0.0}, {2, 4, WindowVariant::plain}, 3);
    CHECK(survival_depth(cfg, 0) == 2);
    for (std::int64_t t = 0; t < 2; ++t)
      for (std::int64_t c = t & 1; c < 4; c += 2) CHECK(cfg.edge_is_open(t, c, +1));
  }
  SUBCASE("infinite stretch closes the layer") {
    const double inf = std::numeric_limits<double>::infinity();
    auto cfg = sample_temporal(0.5, std::vector<double>{inf, 0.0}, {2, 4, WindowVariant::plain}, 3);
    CHECK(survival_depth(cfg, 0) == 0);
  }
  SUBCASE("edge frequency within 3 sigma") {
    auto cfg = sample_temporal(0.5, std::vector<double>(1000, 1.0), {1000, 2000, WindowVariant::plain}, 9);
    std::int64_t open = 0, total = 0;
    for (std::int64_t t = 0; t < 1000; ++t) {
      open += cfg.edge_up[static_cast<std::size_t>(t)].count() +
              cfg.edge_down[static_cast<std::size_t>(t)].count();
      for (std::int64_t c = t & 1; c <= 2000; c += 2) total += (c + 1 <= 2000 ? 1 : 0) + (c >= 1 ? 1 : 0);
    }
    const double freq = static_cast<double>(open) / static_cast<double>(total);
    CHECK(std::fabs(freq - 0.5) <= 3.0 * std::sqrt(0.25 / static_cast<double>(total)));
  }
}

TEST_CASE("temporal cut: a fully closed layer caps the survival depth") {
  // force layer 2 closed via an effectively infinite stretch
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> nu{0.0, 0.0, inf, 0.0, 0.0};
  auto cfg = sample_temporal(0.9, nu, {5, 8, WindowVariant::plain}, 11);
  CHECK(survival_depth(cfg, 0) == 2);
  CHECK(temporal_survival_depth(0.9, nu, 5, 11) == 2);
}

TEST_CASE("streaming and materialised temporal models have matching tails") {
  std::vector<double> nu(200);
  Rng rng(13);
  for (auto& v : nu) v = rng.exponential(0.5);
  int deep_stream = 0, deep_mat = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    if (temporal_survival_depth(0.8, nu, 200, s) == 200) ++deep_stream;
    auto cfg = sample_temporal(0.8, nu, {200, 200, WindowVariant::plain}, s + 9000);
    if (survival_depth(cfg, 0) == 200) ++deep_mat;
  }
  CHECK(std::abs(deep_stream - deep_mat) < 80);  // same law, different draws
}

TEST_CASE("reduce_rectangle follows the definition") {
  RenewalEmbedding emb;
  emb.points = {2, 5, 7, 11};
  auto red = reduce_rectangle(emb, {0, 4, 0, 12});
  CHECK(red.a0 == 2);
  CHECK(red.b0 == 7);
  emb.points = {0, 2};
  red = reduce_rectangle(emb, {0, 4, 0, 3});
  CHECK(red.a0 == 0);
  CHECK(red.b0 == 0);
  emb.points = {4};
  CHECK_THROWS_AS(reduce_rectangle(emb, {0, 4, 0, 5}), InsufficientColumns);
}

TEST_CASE("crossings on hand-built configurations") {
  const std::int64_t width = 6;
  auto emb = trivial_embedding(width);
  SUBCASE("all open gives every crossing") {
    auto cfg = all_open(8, width - 1);
    Rectangle rect{0, 8, 0, width - 1};
    CHECK(crossing(cfg, emb, rect, CrossingKind::LRC));
    CHECK(crossing(cfg, emb, rect, CrossingKind::RLC));
    CHECK(crossing(cfg, emb, rect, CrossingKind::BTC));
  }
  SUBCASE("all vertices closed gives none") {
    auto env = constant_env(width, 0.0, 0.0);
    auto cfg = sample_opre(env, ConnectionFamily::constant(0.0), ConnectionFamily::constant(1.0),
                           {8, width - 1, WindowVariant::plain}, 2);
    Rectangle rect{0, 8, 0, width - 1};
    CHECK_FALSE(crossing(cfg, emb, rect, CrossingKind::LRC));
    CHECK_FALSE(crossing(cfg, emb, rect, CrossingKind::RLC));
    CHECK_FALSE(crossing(cfg, emb, rect, CrossingKind::BTC));
  }
}

TEST_CASE("adding open bits never shrinks reach") {
  Rng rng(19);
  for (int it = 0; it < 20; ++it) {
    auto env = constant_env(9, 1.0, 1.0);
    auto fam = ConnectionFamily::power(1.0);
    auto cfg = sample_opre(env, fam, fam, {8, 8, WindowVariant::plain}, 100 + it);
    auto bigger = cfg;
    for (std::int64_t t = 0; t <= 8; ++t)
      for (std::int64_t c = t & 1; c <= 8; c += 2) {
        if (rng.next_double() < 0.3) bigger.vertex_open[static_cast<std::size_t>(t)].set(c);
        if (t < 8 && rng.next_double() < 0.3 && c + 1 <= 8)
          bigger.edge_up[static_cast<std::size_t>(t)].set(c);
        if (t < 8 && rng.next_double() < 0.3 && c >= 1)
          bigger.edge_down[static_cast<std::size_t>(t)].set(c);
      }
    auto small = reach(cfg, {0, 2, 4, 6, 8}, 8);
    auto large = reach(bigger, {0, 2, 4, 6, 8}, 8);
    for (std::int64_t t = 0; t <= 8; ++t)
      for (std::int64_t c = 0; c <= 8; ++c)
        if (small[static_cast<std::size_t>(t)].test(c))
          CHECK(large[static_cast<std::size_t>(t)].test(c));
  }
}

TEST_CASE("shared-uniform coupling makes crossing frequency monotone in lambda") {
  StretchEnvironment env = constant_env(17, 0.0, 0.0);
  Rng rng(23);
  for (auto& v : env.nu) v = rng.exponential(1.0);
  auto emb = trivial_embedding(17);
  Rectangle rect{0, 24, 0, 16};
  const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    bool prev = false;
    for (double lam : grid) {
      auto fam = ConnectionFamily::power(lam);
      auto cfg = sample_opre(env, fam, fam, {24, 16, WindowVariant::plain}, seed);
      const bool cur = crossing(cfg, emb, rect, CrossingKind::LRC);
      if (prev) CHECK(cur);  // exact per-replication monotonicity
      prev = cur;
    }
  }
}

TEST_CASE("embedded sampling uses the integerised stretches") {
  StretchEnvironment env;
  env.width = 3;
  env.xi = {0.0, 0.0, 0.0};
  env.nu = {2.3, 0.4};
  auto emb = build_embedding(env, 3);
  auto cfg = sample_opre(emb, ConnectionFamily::constant(1.0), ConnectionFamily::power(std::log(2.0)),
                         {300, 2, WindowVariant::embedded}, 5);
  // up edges from column 0 carry ceil(2.3) = 3 -> probability 1/8
  std::int64_t open0 = 0, total0 = 0, open1 = 0, total1 = 0;
  for (std::int64_t t = 0; t < 300; ++t) {
    if (cfg.vertex_valid(t, 0)) {
      ++total0;
      if (cfg.edge_is_open(t, 0, +1)) ++open0;
    }
    if (cfg.vertex_valid(t, 1)) {
      ++total1;
      if (cfg.edge_is_open(t, 1, +1)) ++open1;
    }
  }
  const double f0 = static_cast<double>(open0) / static_cast<double>(total0);
  const double f1 = static_cast<double>(open1) / static_cast<double>(total1);
  CHECK(std::fabs(f0 - 0.125) <= 3.0 * std::sqrt(0.125 * 0.875 / static_cast<double>(total0)));
  CHECK(std::fabs(f1 - 0.5) <= 3.0 * std::sqrt(0.25 / static_cast<double>(total1)));
}

TEST_CASE("binary dump round trip") {
  auto env = constant_env(9, 1.0, 1.0);
  auto fam = ConnectionFamily::power(1.3);
  auto cfg = sample_opre(env, fam, fam, {12, 8, WindowVariant::plain}, 4242);
  std::stringstream buf;
  save_config(cfg, buf);
  auto back = load_config(buf);
  CHECK(back.window.t_max == cfg.window.t_max);
  CHECK(back.window.x_max == cfg.window.x_max);
  CHECK(back.parity == cfg.parity);
  CHECK(back.provenance.seed == cfg.provenance.seed);
  for (std::int64_t t = 0; t <= 12; ++t) {
    CHECK(back.vertex_open[static_cast<std::size_t>(t)] == cfg.vertex_open[static_cast<std::size_t>(t)]);
    if (t < 12) {
      CHECK(back.edge_up[static_cast<std::size_t>(t)] == cfg.edge_up[static_cast<std::size_t>(t)]);
      CHECK(back.edge_down[static_cast<std::size_t>(t)] == cfg.edge_down[static_cast<std::size_t>(t)]);
    }
  }
  std::stringstream bad("not a config");
  CHECK_THROWS(load_config(bad));
}

TEST_CASE("window larger than the environment is rejected") {
  auto env = constant_env(4, 0.0, 0.0);
  CHECK_THROWS_AS(sample_opre(env, ConnectionFamily::constant(1.0), ConnectionFamily::constant(1.0),
                              {3, 6, WindowVariant::plain}, 1),
                  std::invalid_argument);
}
