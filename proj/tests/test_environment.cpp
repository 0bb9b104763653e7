#include <doctest.h>

#include <cmath>
#include <numeric>

#include "opre/environment.hpp"
#include "opre/stats.hpp"

using namespace opre;

namespace {
StretchSpec exp_spec(double rx, double rn) {
  StretchSpec s;
  s.xi = DistSpec::exponential(rx);
  s.nu = DistSpec::exponential(rn);
  return s;
}
}  // namespace

TEST_CASE("constant environment is exact") {
  StretchSpec s;
  s.xi = DistSpec::constant(0.0);
  s.nu = DistSpec::constant(0.0);
  const auto env = sample_stretches(s, 3, 123);
  CHECK(env.xi == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(env.nu == std::vector<double>{0.0, 0.0});
}

TEST_CASE("environments are deterministic in the seed") {
  const auto a = sample_stretches(exp_spec(1.0, 2.0), 64, 99);
  const auto b = sample_stretches(exp_spec(1.0, 2.0), 64, 99);
  const auto c = sample_stretches(exp_spec(1.0, 2.0), 64, 100);
  CHECK(a.xi == b.xi);
  CHECK(a.nu == b.nu);
  CHECK(a.xi != c.xi);
}

TEST_CASE("exponential sample mean lands in the CLT interval") {
  const auto env = sample_stretches(exp_spec(1.0, 1.0), 100000, 7);
  const double mean = std::accumulate(env.xi.begin(), env.xi.end(), 0.0) / env.xi.size();
  CHECK(mean > 0.99);
  CHECK(mean < 1.01);
}

TEST_CASE("squared-geometric P(nu = 1) is the success probability") {
  StretchSpec s;
  s.xi = DistSpec::constant(0.0);
  s.nu = DistSpec::squared_geometric(0.7);
  const auto env = sample_stretches(s, 100001, 21);
  std::uint64_t ones = 0;
  for (double v : env.nu)
    if (v == 1.0) ++ones;
  const double n = static_cast<double>(env.nu.size());
  const double sigma = std::sqrt(0.7 * 0.3 / n);
  CHECK(std::fabs(static_cast<double>(ones) / n - 0.7) <= 3.0 * sigma);
}

TEST_CASE("moment audit against analytic values") {
  const double p = 1.5;
  SUBCASE("exponential") {
    const auto env = sample_stretches(exp_spec(1.0, 1.0), 1000000, 3);
    double acc = 0.0, acc2 = 0.0;
    for (double v : env.xi) {
      const double m = std::pow(v, p);
      acc += m;
      acc2 += m * m;
    }
    const double n = static_cast<double>(env.xi.size());
    const double mean = acc / n;
    const double sd = std::sqrt((acc2 / n - mean * mean) / n);
    const double want = analytic_moment(DistSpec::exponential(1.0), p);
    CHECK(std::fabs(mean - want) <= 5.0 * sd);
  }
  SUBCASE("geometric") {
    StretchSpec s;
    s.xi = DistSpec::geometric(0.4);
    s.nu = DistSpec::constant(0.0);
    const auto env = sample_stretches(s, 1000000, 4);
    double acc = 0.0, acc2 = 0.0;
    for (double v : env.xi) {
      const double m = std::pow(v, p);
      acc += m;
      acc2 += m * m;
    }
    const double n = static_cast<double>(env.xi.size());
    const double mean = acc / n;
    const double sd = std::sqrt((acc2 / n - mean * mean) / n);
    const double want = analytic_moment(DistSpec::geometric(0.4), p);
    CHECK(std::fabs(mean - want) <= 5.0 * sd);
  }
}

TEST_CASE("embedding gap recursion") {
  StretchEnvironment env;
  env.width = 2;
  env.xi = {1.0, 2.0};
  env.nu = {3.0};
  const auto emb = build_embedding(env, 5);
  CHECK(emb.points == std::vector<std::int64_t>{0, 4});
  CHECK(emb.chi == 0);

  StretchEnvironment frac;
  frac.width = 2;
  frac.xi = {0.2, 0.2};
  frac.nu = {0.5};
  const auto emb2 = build_embedding(frac, 5);
  CHECK(emb2.points == std::vector<std::int64_t>{0, 2});
}

TEST_CASE("gap identity holds for every interior point") {
  const auto env = sample_stretches(exp_spec(0.7, 1.3), 300, 17);
  const auto emb = build_embedding(env, 17);
  REQUIRE(emb.points.size() == 300);
  for (std::size_t i = 0; i + 1 < emb.points.size(); ++i) {
    CHECK(emb.points[i + 1] - emb.points[i] == emb.xi_at[i] + emb.nu_gap[i]);
    CHECK(emb.points[i + 1] > emb.points[i]);
  }
}

TEST_CASE("gap lookup and boundaries") {
  StretchEnvironment env;
  env.width = 2;
  env.xi = {1.0, 2.0};
  env.nu = {3.0};
  const auto emb = build_embedding(env, 1);
  const auto [xi0, nu0] = gap_lookup(emb, 0);
  CHECK(xi0 == 1);
  REQUIRE(nu0.has_value());
  CHECK(*nu0 == 3);
  const auto [xi1, nu1] = gap_lookup(emb, 1);
  CHECK(xi1 == 2);
  CHECK_FALSE(nu1.has_value());
  CHECK_THROWS_AS(gap_lookup(emb, 2), std::out_of_range);
  CHECK_THROWS_AS(gap_lookup(emb, -1), std::out_of_range);
}

TEST_CASE("parity bit is a fair deterministic coin") {
  const auto env = sample_stretches(exp_spec(1.0, 1.0), 4, 1);
  int ones = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) ones += build_embedding(env, s).B;
  CHECK(ones > 850);
  CHECK(ones < 1150);
  CHECK(build_embedding(env, 77).B == build_embedding(env, 77).B);
}

TEST_CASE("degenerate zero interarrivals are rejected") {
  StretchEnvironment env;
  env.width = 2;
  env.xi = {0.0, 0.0};
  env.nu = {0.0};
  CHECK_THROWS_AS(build_embedding(env, 1), std::invalid_argument);
}

TEST_CASE("burn-in chi matches the stationary delay of the integerised renewal") {
  // xi = 0, nu ~ Exp(1): integerised interarrival T = ceil(Exp(1)),
  // P(T > v) = e^-v, E[T] = 1/(1-e^-1), stationary delay P(V = v) = e^-v (1 - e^-1).
  StretchSpec s;
  s.xi = DistSpec::constant(0.0);
  s.nu = DistSpec::exponential(1.0);
  const std::int64_t burn = 10000;
  const int reps = 4000;
  std::vector<double> chi(reps);
  for (int r = 0; r < reps; ++r) {
    const auto env = sample_stretches(s, burn + 2, 1000 + static_cast<std::uint64_t>(r));
    const auto emb = build_embedding(env, 2000 + static_cast<std::uint64_t>(r), ChiMode::BurnIn(burn));
    chi[static_cast<std::size_t>(r)] = static_cast<double>(emb.chi);
    CHECK(emb.burn_in == burn);
  }
  // discrete KS: both CDFs step at integers only, so the supremum of
  // |F_n - F| is attained at the post-jump values over integer cut points
  std::sort(chi.begin(), chi.end());
  double d = 0.0;
  const auto n = static_cast<double>(chi.size());
  for (std::int64_t v = 0; v <= static_cast<std::int64_t>(chi.back()); ++v) {
    const auto below = std::upper_bound(chi.begin(), chi.end(), static_cast<double>(v)) - chi.begin();
    const double emp = static_cast<double>(below) / n;
    const double theo = 1.0 - std::exp(-static_cast<double>(v + 1));
    d = std::max(d, std::fabs(emp - theo));
  }
  // conservative against the continuous Kolmogorov law
  CHECK(ks_pvalue(d, chi.size()) > 1e-3);
}
