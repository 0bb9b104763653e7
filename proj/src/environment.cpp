#include "opre/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace opre {

void validate(const StretchSpec& spec) {
  validate(spec.xi);
  validate(spec.nu);
  if (!(spec.moment_exponent > 1.0)) throw std::invalid_argument("moment exponent must exceed 1");
}

StretchEnvironment sample_stretches(const StretchSpec& spec, std::int64_t width, std::uint64_t seed) {
  validate(spec);
  if (width < 1) throw std::invalid_argument("sample_stretches: width must be >= 1");
  StretchEnvironment env;
  env.width = width;
  env.xi.resize(static_cast<std::size_t>(width));
  if (width > 1) env.nu.resize(static_cast<std::size_t>(width - 1));
  Rng rx(derive_seed(seed, 0, "env.xi"));
  Rng rn(derive_seed(seed, 0, "env.nu"));
  for (auto& v : env.xi) v = sample(spec.xi, rx);
  for (auto& v : env.nu) v = sample(spec.nu, rn);
  return env;
}

namespace {
std::int64_t iceil(double v) {
  if (v < 0.0) throw std::invalid_argument("stretch must be >= 0");
  return static_cast<std::int64_t>(std::ceil(v));
}
}  // namespace

RenewalEmbedding build_embedding(const StretchEnvironment& env, std::uint64_t parity_seed,
                                 ChiMode chi_mode) {
  if (env.width < 1 || env.xi.size() != static_cast<std::size_t>(env.width) ||
      env.nu.size() + 1 != static_cast<std::size_t>(env.width))
    throw std::invalid_argument("build_embedding: malformed environment");

  RenewalEmbedding emb;
  Rng rng(derive_seed(parity_seed, 0, "emb"));
  emb.B = rng.next_bool() ? 1 : 0;

  std::int64_t start = 0;
  if (chi_mode.kind == ChiMode::burn_in) {
    const std::int64_t n = chi_mode.n;
    if (n < 1 || n >= env.width) throw std::invalid_argument("build_embedding: burn-in exceeds width");
    // Renewals at S_0 = 0, S_j = S_{j-1} + gap_j over the first n interarrivals.
    std::vector<std::int64_t> s(static_cast<std::size_t>(n) + 1, 0);
    for (std::int64_t j = 0; j < n; ++j)
      s[static_cast<std::size_t>(j + 1)] =
          s[static_cast<std::size_t>(j)] + iceil(env.xi[static_cast<std::size_t>(j)]) +
          iceil(env.nu[static_cast<std::size_t>(j)]);
    const std::int64_t span = s.back();
    if (span <= 0) {
      emb.chi = 0;  // all-zero interarrivals degenerate to delay 0
    } else {
      const auto tau = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(span)));
      auto it = std::lower_bound(s.begin(), s.end(), tau);
      emb.chi = *it - tau;
    }
    emb.burn_in = n;
    start = n;
  }

  const std::int64_t m = env.width - start;
  emb.points.reserve(static_cast<std::size_t>(m));
  emb.xi_at.reserve(static_cast<std::size_t>(m));
  std::int64_t x = emb.chi;
  for (std::int64_t i = start; i < env.width; ++i) {
    emb.points.push_back(x);
    emb.xi_at.push_back(iceil(env.xi[static_cast<std::size_t>(i)]));
    if (i + 1 < env.width) {
      const std::int64_t gap = iceil(env.xi[static_cast<std::size_t>(i)]) +
                               iceil(env.nu[static_cast<std::size_t>(i)]);
      if (gap <= 0)
        throw std::invalid_argument("build_embedding: zero interarrival breaks strict monotonicity");
      emb.nu_gap.push_back(iceil(env.nu[static_cast<std::size_t>(i)]));
      x += gap;
    }
  }
  return emb;
}

std::pair<std::int64_t, std::optional<std::int64_t>> gap_lookup(const RenewalEmbedding& emb,
                                                                std::int64_t i) {
  if (i < 0 || static_cast<std::size_t>(i) >= emb.points.size())
    throw std::out_of_range("gap_lookup: index out of range");
  std::optional<std::int64_t> nu;
  if (static_cast<std::size_t>(i) < emb.nu_gap.size()) nu = emb.nu_gap[static_cast<std::size_t>(i)];
  return {emb.xi_at[static_cast<std::size_t>(i)], nu};
}

}  // namespace opre
