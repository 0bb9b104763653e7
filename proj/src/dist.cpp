#include "opre/dist.hpp"

#include <cmath>

namespace opre {

void validate(const DistSpec& d) {
  switch (d.kind) {
    case DistKind::constant:
      if (d.a < 0.0) throw std::invalid_argument("constant stretch must be >= 0");
      return;
    case DistKind::exponential:
      if (!(d.a > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
      return;
    case DistKind::geometric:
    case DistKind::squared_geometric:
      if (!(d.a > 0.0 && d.a < 1.0)) throw std::invalid_argument("geometric success prob must be in (0,1)");
      return;
    case DistKind::pareto:
      if (!(d.a > 0.0) || !(d.b > 0.0)) throw std::invalid_argument("pareto shape and scale must be > 0");
      return;
    case DistKind::stretched_exponential:
      if (!(d.a > 0.0 && d.a < 1.0)) throw std::invalid_argument("stretched-exponential exponent must be in (0,1)");
      return;
  }
  throw std::invalid_argument("unsupported distribution kind");
}

namespace {
std::int64_t sample_geometric_count(double q, Rng& rng) {
  // P(K >= l+1) = (1-q)^l; inversion on the tail.
  double u = rng.next_double_pos();
  double k = std::floor(std::log(u) / std::log1p(-q));
  if (k < 0.0) k = 0.0;
  return static_cast<std::int64_t>(k) + 1;
}
}  // namespace

double sample(const DistSpec& d, Rng& rng) {
  switch (d.kind) {
    case DistKind::constant:
      return d.a;
    case DistKind::exponential:
      return rng.exponential(d.a);
    case DistKind::geometric:
      return static_cast<double>(sample_geometric_count(d.a, rng));
    case DistKind::squared_geometric: {
      double k = static_cast<double>(sample_geometric_count(d.a, rng));
      return k * k;
    }
    case DistKind::pareto:
      return d.b * std::pow(rng.next_double_pos(), -1.0 / d.a);
    case DistKind::stretched_exponential: {
      double e = rng.exponential(1.0);
      return std::pow(e, 1.0 / d.a);
    }
  }
  throw std::invalid_argument("unsupported distribution kind");
}

std::string dist_kind_name(DistKind k) {
  switch (k) {
    case DistKind::constant: return "constant";
    case DistKind::exponential: return "exponential";
    case DistKind::geometric: return "geometric";
    case DistKind::squared_geometric: return "squared_geometric";
    case DistKind::pareto: return "pareto";
    case DistKind::stretched_exponential: return "stretched_exponential";
  }
  return "?";
}

DistKind dist_kind_from_name(const std::string& s) {
  if (s == "constant") return DistKind::constant;
  if (s == "exponential") return DistKind::exponential;
  if (s == "geometric") return DistKind::geometric;
  if (s == "squared_geometric") return DistKind::squared_geometric;
  if (s == "pareto") return DistKind::pareto;
  if (s == "stretched_exponential") return DistKind::stretched_exponential;
  throw std::invalid_argument("unknown distribution kind: " + s);
}

double analytic_moment(const DistSpec& d, double p) {
  switch (d.kind) {
    case DistKind::constant:
      return std::pow(d.a, p);
    case DistKind::exponential:
      // E[X^p] = Gamma(p+1) / rate^p
      return std::exp(std::lgamma(p + 1.0)) / std::pow(d.a, p);
    case DistKind::geometric:
    case DistKind::squared_geometric: {
      double power = (d.kind == DistKind::geometric) ? p : 2.0 * p;
      double r = 1.0 - d.a;
      double sum = 0.0;
      double weight = d.a;  // P(K = k) = q (1-q)^(k-1)
      for (int k = 1; k < 100000; ++k) {
        double term = std::pow(static_cast<double>(k), power) * weight;
        sum += term;
        if (term < sum * 1e-16 && k > 10) break;
        weight *= r;
      }
      return sum;
    }
    case DistKind::pareto: {
      if (p >= d.a) throw std::domain_error("pareto moment diverges");
      return std::pow(d.b, p) * d.a / (d.a - p);
    }
    case DistKind::stretched_exponential:
      // X = E^(1/a), E ~ Exp(1): E[X^p] = Gamma(p/a + 1)
      return std::exp(std::lgamma(p / d.a + 1.0));
  }
  throw std::invalid_argument("unsupported distribution kind");
}

}  // namespace opre
