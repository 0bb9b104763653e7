#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opre {

// Connection functions mapping a stretch s >= 0 to an open probability.
//   constant(p)        : p
//   power              : (1 - e^-lambda)^s
//   cppr_uniform       : 1 - exp(-lambda e^-s)
//   cppr_bernoulli     : P(Poisson(lambda) >= floor(sqrt(s)))
//   cpre_edge(L)       : 1 - (1 - e^-s)^L
//   cpre_vertex(L)     : exp(-2/L), constant in s
// The sigma field rescales the argument: the family evaluates kappa(sigma * s),
// so environments stay kernel-agnostic and sigma-normalisation lives here.
enum class KernelKind {
  constant,
  power,
  cppr_uniform,
  cppr_bernoulli,
  cpre_edge,
  cpre_vertex,
};

struct ConnectionFamily {
  KernelKind kind = KernelKind::constant;
  double lambda = 0.0;
  double sigma = 1.0;
  double p = 1.0;       // constant kind
  std::int64_t L = 2;   // cpre kinds

  static ConnectionFamily constant(double p);
  static ConnectionFamily power(double lambda, double sigma = 1.0);
  static ConnectionFamily cppr_uniform(double lambda, double sigma = 1.0);
  static ConnectionFamily cppr_bernoulli(double lambda, double sigma = 1.0);
  static ConnectionFamily cpre_edge(std::int64_t L, double sigma = 1.0);
  static ConnectionFamily cpre_vertex(std::int64_t L);

  std::string name() const;
};

void validate(const ConnectionFamily& fam);

// kappa_lambda(sigma s), in [0,1]; throws on s < 0.
double eval_kernel(const ConnectionFamily& fam, double s);

// log kappa_lambda(sigma s), underflow-free (-inf when the kernel vanishes).
double log_open(const ConnectionFamily& fam, double s);

// log(1 - kappa_lambda(sigma s)); -inf sentinel when kappa = 1 exactly.
double log_closed(const ConnectionFamily& fam, double s);

// P(Poisson(lambda) >= k).
double poisson_tail(double lambda, std::int64_t k);
double log_poisson_tail(double lambda, std::int64_t k);

// floor(sqrt(floor(s))) via integer arithmetic; exact at perfect squares.
std::int64_t isqrt_floor(double s);

struct KernelBoundReport {
  std::string kernel;
  double sigma = 1.0;
  double min_margin = 0.0;   // min over the grid of log kappa(s) + sigma s
  std::int64_t argmin_s = 0;
  std::uint64_t violations = 0;
  std::vector<std::int64_t> first_violations;  // at most 10
};

// Checks kappa(s) >= exp(-sigma s) on integer s in [s_lo, s_hi], in log space.
KernelBoundReport check_kernel_bounds(const ConnectionFamily& fam, std::int64_t s_lo, std::int64_t s_hi);

}  // namespace opre
