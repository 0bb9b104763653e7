#include <doctest.h>


#include <stdexcept>
#include <cmath>

#include "opre/kernels.hpp"

using namespace opre;

namespace {
// independent series oracle for the closed probability of cppr_uniform:
// 1 - kappa = exp(-lambda e^-s), so log(1-kappa) = -lambda e^-s exactly.
// e^-s is evaluated by squaring a short Taylor series of e^(-s/64) to stay
// clear of the library exp().
double oracle_log_closed_uniform(double lambda, double s) {
  const double y = -s / 64.0;
  double es = 1.0, term = 1.0;
  for (int k = 1; k <= 30; ++k) {
    term *= y / k;
    es += term;
  }
  for (int d = 0; d < 6; ++d) es *= es;
  return -lambda * es;
}
}  // namespace

TEST_CASE("kernel point values") {
  CHECK(eval_kernel(ConnectionFamily::power(std::log(2.0)), 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eval_kernel(ConnectionFamily::cppr_uniform(1.0), 0.0) ==
        doctest::Approx(0.6321206).epsilon(1e-6));
  CHECK(eval_kernel(ConnectionFamily::cppr_uniform(2.0), 1.0) ==
        doctest::Approx(0.520857).epsilon(1e-5));
  CHECK(eval_kernel(ConnectionFamily::constant(0.25), 3.0) == doctest::Approx(0.25));
  CHECK(eval_kernel(ConnectionFamily::cpre_vertex(4), 17.0) == doctest::Approx(std::exp(-0.5)));
  // cpre_edge at s=1: 1 - (1 - e^-1)^L
  CHECK(eval_kernel(ConnectionFamily::cpre_edge(3), 1.0) ==
        doctest::Approx(1.0 - std::pow(1.0 - std::exp(-1.0), 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(eval_kernel(ConnectionFamily::power(1.0), -0.5), std::domain_error);
}

TEST_CASE("log_closed matches the complement to 1e-12") {
  const double cases[][2] = {{std::log(2.0), 1.0}, {2.0, 3.0}, {0.7, 10.0}};
  for (const auto& cs : cases) {
    for (auto kind : {KernelKind::power, KernelKind::cppr_uniform, KernelKind::cppr_bernoulli}) {
      ConnectionFamily fam;
      fam.kind = kind;
      fam.lambda = cs[0];
      const double lc = log_closed(fam, cs[1]);
      const double direct = 1.0 - eval_kernel(fam, cs[1]);
      if (direct > 0.0) CHECK(std::exp(lc) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
  SUBCASE("power kernel trivial value") {
    CHECK(log_closed(ConnectionFamily::power(std::log(2.0)), 1.0) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
  }
  SUBCASE("sentinel at kappa = 1") {
    CHECK(log_closed(ConnectionFamily::constant(1.0), 5.0) ==
          -std::numeric_limits<double>::infinity());
    CHECK(log_closed(ConnectionFamily::cpre_edge(4), 0.0) ==
          -std::numeric_limits<double>::infinity());
  }
  SUBCASE("underflow-free tail: cppr_uniform at s=50") {
    const auto fam = ConnectionFamily::cppr_uniform(1.0);
    const double lc = log_closed(fam, 50.0);
    const double oracle = oracle_log_closed_uniform(1.0, 50.0);
    CHECK(lc == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(lc == doctest::Approx(-std::exp(-50.0)).epsilon(1e-12));
  }
}

TEST_CASE("poisson tail values and identity") {
  CHECK(poisson_tail(1.0, 0) == doctest::Approx(1.0));
  CHECK(poisson_tail(1.0, 1) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(poisson_tail(2.0, 5) == doctest::Approx(1.0 - 7.0 * std::exp(-2.0)).epsilon(1e-12));
  // complement identity over a grid
  for (double lam : {0.5, 3.0, 12.0, 30.0})
    for (std::int64_t k = 0; k <= 100; ++k) {
      double cdf = 0.0, term = std::exp(-lam);
      for (std::int64_t i = 0; i < k; ++i) {
        cdf += term;
        term *= lam / static_cast<double>(i + 1);
      }
      CHECK(poisson_tail(lam, k) + cdf == doctest::Approx(1.0).epsilon(1e-12));
    }
  // paper lower bound e^-lam lam^k / k!
  for (std::int64_t k : {1, 5, 20}) {
    const double pmf = std::exp(-3.0 + k * std::log(3.0) - std::lgamma(k + 1.0));
    CHECK(poisson_tail(3.0, k) >= pmf * (1.0 - 1e-12));
  }
  // log version consistent deep in the tail
  CHECK(log_poisson_tail(2.0, 400) == doctest::Approx(-400.0 * std::log(200.0)).epsilon(0.2));
  CHECK(std::exp(log_poisson_tail(4.0, 9)) == doctest::Approx(poisson_tail(4.0, 9)).epsilon(1e-12));
}

TEST_CASE("integer square root is exact at perfect squares") {
  CHECK(isqrt_floor(9.0) == 3);
  CHECK(isqrt_floor(8.9999999) == 2);
  CHECK(isqrt_floor(1e12) == 1000000);
  CHECK(isqrt_floor(999999999999.0) == 999999);
  CHECK(isqrt_floor(0.5) == 0);
}

TEST_CASE("cppr_bernoulli equals the poisson tail at perfect squares") {
  const auto fam = ConnectionFamily::cppr_bernoulli(4.0);
  for (std::int64_t k = 0; k <= 40; ++k) {
    const double v = eval_kernel(fam, static_cast<double>(k * k));
    const double want = (k == 0) ? 1.0 : poisson_tail(4.0, k);
    CHECK(v == want);  // exact, same arithmetic path
  }
}

TEST_CASE("kernels decrease in s and increase in lambda") {
  for (auto kind : {KernelKind::power, KernelKind::cppr_uniform, KernelKind::cppr_bernoulli}) {
    ConnectionFamily fam;
    fam.kind = kind;
    fam.lambda = 2.5;
    double prev = 2.0;
    for (double s : {0.0, 0.5, 1.0, 2.0, 4.0, 9.0, 16.0, 100.0}) {
      const double v = eval_kernel(fam, s);
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
    double prev_l = -1.0;
    for (double lam : {0.1, 0.5, 1.0, 2.0, 8.0, 32.0}) {
      fam.lambda = lam;
      const double v = eval_kernel(fam, 3.0);
      CHECK(v >= prev_l - 1e-15);
      prev_l = v;
    }
    fam.lambda = 5000.0;
    CHECK(eval_kernel(fam, 3.0) > 1.0 - 1e-6);
  }
  // cpre kinds approach 1 as L grows
  CHECK(eval_kernel(ConnectionFamily::cpre_edge(1 << 20), 3.0) > 1.0 - 1e-6);
  CHECK(eval_kernel(ConnectionFamily::cpre_vertex(1 << 22), 3.0) > 1.0 - 1e-6);
}

TEST_CASE("kernel bound checker") {
  SUBCASE("cppr_uniform stays above e^-s") {
    const auto rep = check_kernel_bounds(ConnectionFamily::cppr_uniform(2.0), 1, 2000);
    CHECK(rep.violations == 0);
    CHECK(rep.min_margin > 0.0);
  }
  SUBCASE("constant e^-2 fails at s=1") {
    const auto rep = check_kernel_bounds(ConnectionFamily::constant(std::exp(-2.0)), 1, 1);
    CHECK(rep.violations == 1);
    CHECK(rep.first_violations.front() == 1);
  }
  SUBCASE("sigma rescaling enters both sides") {
    auto fam = ConnectionFamily::constant(std::exp(-2.0));
    fam.sigma = 3.0;
    CHECK(check_kernel_bounds(fam, 1, 1).violations == 0);  // e^-2 >= e^-3
  }
}

TEST_CASE("kernel validation rejects bad parameters") {
  CHECK_THROWS_AS(validate(ConnectionFamily::constant(1.5)), std::invalid_argument);
  CHECK_THROWS_AS(validate(ConnectionFamily::cpre_edge(0)), std::invalid_argument);
  auto fam = ConnectionFamily::power(1.0);
  fam.sigma = 0.0;
  CHECK_THROWS_AS(validate(fam), std::invalid_argument);
}
