#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "opre/rng.hpp"

namespace opre {

// Non-negative stretch distributions. Geometric follows the tail convention
// P(K >= l+1) = (1-q)^l for success probability q, so K takes values in
// {1, 2, ...} and P(K = 1) = q. squared_geometric is K^2 for such a K.
// stretched_exponential has the tail P(X > s) = exp(-s^a), a in (0,1).
enum class DistKind {
  constant,
  exponential,
  geometric,
  squared_geometric,
  pareto,
  stretched_exponential,
};

struct DistSpec {
  DistKind kind = DistKind::constant;
  double a = 0.0;  // value | rate | success prob | shape | tail exponent
  double b = 0.0;  // pareto scale; unused otherwise

  static DistSpec constant(double v) { return {DistKind::constant, v, 0.0}; }
  static DistSpec exponential(double rate) { return {DistKind::exponential, rate, 0.0}; }
  static DistSpec geometric(double q) { return {DistKind::geometric, q, 0.0}; }
  static DistSpec squared_geometric(double q) { return {DistKind::squared_geometric, q, 0.0}; }
  static DistSpec pareto(double shape, double scale) { return {DistKind::pareto, shape, scale}; }
  static DistSpec stretched_exponential(double a) { return {DistKind::stretched_exponential, a, 0.0}; }
};

void validate(const DistSpec& d);
double sample(const DistSpec& d, Rng& rng);

std::string dist_kind_name(DistKind k);
DistKind dist_kind_from_name(const std::string& s);

// E[X^p] where a closed form or a convergent series exists; throws otherwise.
double analytic_moment(const DistSpec& d, double p);

}  // namespace opre
