#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "opre/dist.hpp"
#include "opre/rng.hpp"
#include "opre/stats.hpp"

using namespace opre;

TEST_CASE("derived seeds separate streams and stay stable") {
  const std::uint64_t s = 42;
  CHECK(derive_seed(s, 0, "env") != derive_seed(s, 0, "perc"));
  CHECK(derive_seed(s, 0, "env") == derive_seed(s, 0, "env"));
  CHECK(derive_seed(s, 1, "env") != derive_seed(s, 0, "env"));
}

TEST_CASE("derived seeds are collision-free over many indices") {
  std::set<std::uint64_t> seen;
  bool ok = true;
  for (std::uint64_t i = 0; i < 200000; ++i) ok = ok && seen.insert(derive_seed(9, i, "x")).second;
  CHECK(ok);
}

TEST_CASE("rng doubles live in [0,1)") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("wilson interval endpoints") {
  CHECK(wilson_ci(0, 100).lo == doctest::Approx(0.0));
  CHECK(wilson_ci(100, 100).hi == doctest::Approx(1.0));
  const auto ci = wilson_ci(50, 100);
  CHECK(ci.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(ci.hi == doctest::Approx(0.5962).epsilon(1e-3));
  CHECK_THROWS_AS(wilson_ci(1, 0), std::invalid_argument);
}

TEST_CASE("normal quantile reference values") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959964).epsilon(1e-6));
}

TEST_CASE("incomplete gamma against chi-square facts") {
  // chi2 with 2 dof: sf(x) = exp(-x/2)
  CHECK(chi2_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  CHECK(chi2_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("kolmogorov survival sanity") {
  CHECK(kolmogorov_sf(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_sf(1.36) == doctest::Approx(0.0505).epsilon(2e-2));
  CHECK(kolmogorov_sf(5.0) < 1e-10);
}

TEST_CASE("ks statistic separates right from wrong law") {
  Rng rng(7);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = rng.exponential(1.0);
  std::sort(xs.begin(), xs.end());
  auto cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  CHECK(ks_pvalue(ks_statistic(xs, cdf), xs.size()) > 1e-3);
  auto wrong = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-2.0 * x); };
  CHECK(ks_pvalue(ks_statistic(xs, wrong), xs.size()) < 1e-6);
}

TEST_CASE("distribution samplers match analytic facts") {
  Rng rng(11);
  SUBCASE("exponential mean") {
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += sample(DistSpec::exponential(2.0), rng);
    CHECK(acc / n == doctest::Approx(0.5).epsilon(0.02));
  }
  SUBCASE("geometric pmf at 1") {
    int ones = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      if (sample(DistSpec::geometric(0.7), rng) == 1.0) ++ones;
    CHECK(static_cast<double>(ones) / n == doctest::Approx(0.7).epsilon(0.02));
  }
  SUBCASE("stretched exponential tail") {
    const int n = 200000;
    int above = 0;
    for (int i = 0; i < n; ++i)
      if (sample(DistSpec::stretched_exponential(0.5), rng) > 4.0) ++above;
    // P(X > 4) = exp(-2)
    CHECK(static_cast<double>(above) / n == doctest::Approx(std::exp(-2.0)).epsilon(0.05));
  }
  SUBCASE("pareto analytic moment guard") {
    CHECK(analytic_moment(DistSpec::pareto(3.0, 1.0), 1.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(analytic_moment(DistSpec::pareto(1.2, 1.0), 1.5), std::domain_error);
  }
}

TEST_CASE("invalid distribution parameters are rejected") {
  CHECK_THROWS_AS(validate(DistSpec::exponential(-1.0)), std::invalid_argument);
  CHECK_THROWS_AS(validate(DistSpec::geometric(1.5)), std::invalid_argument);
  CHECK_THROWS_AS(validate(DistSpec::stretched_exponential(1.0)), std::invalid_argument);
}
