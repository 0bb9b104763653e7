#include "opre/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace opre {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 - e^x) for x <= 0, stable near both ends.
double log1mexp(double x) {
  if (x >= 0.0) return (x == 0.0) ? kNegInf : std::numeric_limits<double>::quiet_NaN();
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double log_poisson_pmf(double lambda, std::int64_t i) {
  return -lambda + static_cast<double>(i) * std::log(lambda) - std::lgamma(static_cast<double>(i) + 1.0);
}
}  // namespace

ConnectionFamily ConnectionFamily::constant(double p) {
  ConnectionFamily f;
  f.kind = KernelKind::constant;
  f.p = p;
  return f;
}
ConnectionFamily ConnectionFamily::power(double lambda, double sigma) {
  return {KernelKind::power, lambda, sigma, 1.0, 2};
}
ConnectionFamily ConnectionFamily::cppr_uniform(double lambda, double sigma) {
  return {KernelKind::cppr_uniform, lambda, sigma, 1.0, 2};
}
ConnectionFamily ConnectionFamily::cppr_bernoulli(double lambda, double sigma) {
  return {KernelKind::cppr_bernoulli, lambda, sigma, 1.0, 2};
}
ConnectionFamily ConnectionFamily::cpre_edge(std::int64_t L, double sigma) {
  return {KernelKind::cpre_edge, 0.0, sigma, 1.0, L};
}
ConnectionFamily ConnectionFamily::cpre_vertex(std::int64_t L) {
  return {KernelKind::cpre_vertex, 0.0, 1.0, 1.0, L};
}

std::string ConnectionFamily::name() const {
  switch (kind) {
    case KernelKind::constant: return "constant(" + std::to_string(p) + ")";
    case KernelKind::power: return "power(lambda=" + std::to_string(lambda) + ")";
    case KernelKind::cppr_uniform: return "cppr_uniform(lambda=" + std::to_string(lambda) + ")";
    case KernelKind::cppr_bernoulli: return "cppr_bernoulli(lambda=" + std::to_string(lambda) + ")";
    case KernelKind::cpre_edge: return "cpre_edge(L=" + std::to_string(L) + ")";
    case KernelKind::cpre_vertex: return "cpre_vertex(L=" + std::to_string(L) + ")";
  }
  return "?";
}

void validate(const ConnectionFamily& fam) {
  if (!(fam.sigma > 0.0)) throw std::invalid_argument("kernel sigma must be > 0");
  switch (fam.kind) {
    case KernelKind::constant:
      if (!(fam.p >= 0.0 && fam.p <= 1.0)) throw std::invalid_argument("constant kernel needs p in [0,1]");
      return;
    case KernelKind::power:
    case KernelKind::cppr_uniform:
    case KernelKind::cppr_bernoulli:
      if (!(fam.lambda >= 0.0)) throw std::invalid_argument("kernel lambda must be >= 0");
      return;
    case KernelKind::cpre_edge:
    case KernelKind::cpre_vertex:
      if (fam.L < 1) throw std::invalid_argument("cpre kernel needs L >= 1");
      return;
  }
  throw std::invalid_argument("unsupported kernel kind");
}

std::int64_t isqrt_floor(double s) {
  if (s < 0.0) throw std::domain_error("isqrt_floor: negative argument");
  auto n = static_cast<std::int64_t>(std::floor(s));
  if (n <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

double poisson_tail(double lambda, std::int64_t k) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson_tail: lambda must be > 0");
  if (k <= 0) return 1.0;
  if (static_cast<double>(k) > lambda) {
    // Upper series from i=k; terms decay since i > lambda.
    double sum = 0.0;
    double term = std::exp(log_poisson_pmf(lambda, k));
    for (std::int64_t i = k; i < k + 100000; ++i) {
      sum += term;
      term *= lambda / static_cast<double>(i + 1);
      if (term < sum * 1e-18) break;
    }
    return sum;
  }
  double cdf = 0.0;
  double term = std::exp(-lambda);
  for (std::int64_t i = 0; i < k; ++i) {
    cdf += term;
    term *= lambda / static_cast<double>(i + 1);
  }
  return 1.0 - cdf;
}

double log_poisson_tail(double lambda, std::int64_t k) {
  if (!(lambda > 0.0)) throw std::invalid_argument("log_poisson_tail: lambda must be > 0");
  if (k <= 0) return 0.0;
  if (static_cast<double>(k) > lambda) {
    // log-sum-exp over the upper series, factored at the leading term.
    double lead = log_poisson_pmf(lambda, k);
    double rest = 0.0;
    double ratio = 1.0;
    for (std::int64_t i = k; i < k + 100000; ++i) {
      rest += ratio;
      ratio *= lambda / static_cast<double>(i + 1);
      if (ratio < rest * 1e-18) break;
    }
    return lead + std::log(rest);
  }
  return std::log(poisson_tail(lambda, k));
}

double eval_kernel(const ConnectionFamily& fam, double s) {
  if (s < 0.0) throw std::domain_error("eval_kernel: negative stretch");
  const double z = fam.sigma * s;
  switch (fam.kind) {
    case KernelKind::constant:
      return fam.p;
    case KernelKind::power: {
      if (fam.lambda == 0.0) return (z == 0.0) ? 1.0 : 0.0;
      return std::exp(z * log1mexp(-fam.lambda));
    }
    case KernelKind::cppr_uniform:
      return -std::expm1(-fam.lambda * std::exp(-z));
    case KernelKind::cppr_bernoulli:
      if (fam.lambda == 0.0) return (isqrt_floor(z) == 0) ? 1.0 : 0.0;
      return poisson_tail(fam.lambda, isqrt_floor(z));
    case KernelKind::cpre_edge:
      if (z == 0.0) return 1.0;
      return -std::expm1(static_cast<double>(fam.L) * log1mexp(-z));
    case KernelKind::cpre_vertex:
      return std::exp(-2.0 / static_cast<double>(fam.L));
  }
  throw std::invalid_argument("unsupported kernel kind");
}

double log_open(const ConnectionFamily& fam, double s) {
  if (s < 0.0) throw std::domain_error("log_open: negative stretch");
  const double z = fam.sigma * s;
  switch (fam.kind) {
    case KernelKind::constant:
      return (fam.p == 0.0) ? kNegInf : std::log(fam.p);
    case KernelKind::power: {
      if (fam.lambda == 0.0) return (z == 0.0) ? 0.0 : kNegInf;
      return z * log1mexp(-fam.lambda);
    }
    case KernelKind::cppr_uniform: {
      if (fam.lambda == 0.0) return kNegInf;
      const double x = fam.lambda * std::exp(-z);
      // kappa = 1 - e^-x ~ x(1 - x/2 + x^2/6) for tiny x; the direct route
      // underflows long before log kappa does
      if (x < 1e-6) return std::log(fam.lambda) - z + std::log1p(-x / 2.0 + x * x / 6.0);
      return log1mexp(-x);
    }
    case KernelKind::cppr_bernoulli: {
      if (fam.lambda == 0.0) return (isqrt_floor(z) == 0) ? 0.0 : kNegInf;
      return log_poisson_tail(fam.lambda, isqrt_floor(z));
    }
    case KernelKind::cpre_edge: {
      if (z == 0.0) return 0.0;
      const double Ld = static_cast<double>(fam.L);
      // kappa = 1 - (1-e^-z)^L ~ L e^-z for large z
      if (z > 300.0) return std::log(Ld) - z;
      const double x = Ld * std::exp(-z);
      if (x < 1e-6) return std::log(Ld) - z + std::log1p(-(Ld - 1.0) * std::exp(-z) / 2.0);
      return log1mexp(Ld * log1mexp(-z));
    }
    case KernelKind::cpre_vertex:
      return -2.0 / static_cast<double>(fam.L);
  }
  throw std::invalid_argument("unsupported kernel kind");
}

double log_closed(const ConnectionFamily& fam, double s) {
  if (s < 0.0) throw std::domain_error("log_closed: negative stretch");
  const double z = fam.sigma * s;
  switch (fam.kind) {
    case KernelKind::constant:
      return (fam.p == 1.0) ? kNegInf : std::log1p(-fam.p);
    case KernelKind::power: {
      if (fam.lambda == 0.0) return (z == 0.0) ? kNegInf : 0.0;
      return log1mexp(z * log1mexp(-fam.lambda));
    }
    case KernelKind::cppr_uniform:
      // 1 - kappa = exp(-lambda e^-z) exactly.
      return -fam.lambda * std::exp(-z);
    case KernelKind::cppr_bernoulli: {
      const std::int64_t k = isqrt_floor(z);
      if (k == 0) return kNegInf;
      if (fam.lambda == 0.0) return 0.0;
      // 1 - kappa = P(Poisson < k); log-sum-exp over i < k.
      double lead = log_poisson_pmf(fam.lambda, 0);
      double best = lead;
      for (std::int64_t i = 1; i < k; ++i) best = std::max(best, log_poisson_pmf(fam.lambda, i));
      double acc = 0.0;
      for (std::int64_t i = 0; i < k; ++i) acc += std::exp(log_poisson_pmf(fam.lambda, i) - best);
      return best + std::log(acc);
    }
    case KernelKind::cpre_edge: {
      if (z == 0.0) return kNegInf;
      return static_cast<double>(fam.L) * log1mexp(-z);
    }
    case KernelKind::cpre_vertex:
      return log1mexp(-2.0 / static_cast<double>(fam.L));
  }
  throw std::invalid_argument("unsupported kernel kind");
}

KernelBoundReport check_kernel_bounds(const ConnectionFamily& fam, std::int64_t s_lo, std::int64_t s_hi) {
  if (s_lo < 1 || s_hi < s_lo) throw std::invalid_argument("check_kernel_bounds: need 1 <= s_lo <= s_hi");
  KernelBoundReport rep;
  rep.kernel = fam.name();
  rep.sigma = fam.sigma;
  rep.min_margin = std::numeric_limits<double>::infinity();

  // For cppr_bernoulli the kernel only depends on isqrt(s); cache per block.
  double cached_log = 0.0;
  std::int64_t cached_key = -1;
  for (std::int64_t s = s_lo; s <= s_hi; ++s) {
    double lo;
    if (fam.kind == KernelKind::cppr_bernoulli) {
      std::int64_t key = isqrt_floor(fam.sigma * static_cast<double>(s));
      if (key != cached_key) {
        cached_key = key;
        cached_log = (fam.lambda == 0.0) ? ((key == 0) ? 0.0 : kNegInf)
                                         : log_poisson_tail(fam.lambda, key);
      }
      lo = cached_log;
    } else {
      lo = log_open(fam, static_cast<double>(s));
    }
    const double margin = lo + fam.sigma * static_cast<double>(s);
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin_s = s;
    }
    if (margin < 0.0) {
      ++rep.violations;
      if (rep.first_violations.size() < 10) rep.first_violations.push_back(s);
    }
  }
  return rep;
}

}  // namespace opre
