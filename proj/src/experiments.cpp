#include "opre/experiments.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "opre/acceptance.hpp"
#include "opre/couplings.hpp"
#include "opre/multiscale.hpp"
#include "opre/rng.hpp"

namespace opre {

bool opre_survival_rep(const StretchEnvironment& env, const ConnectionFamily& fam_v,
                       const ConnectionFamily& fam_e, std::int64_t depth, std::int64_t source,
                       std::uint64_t seed) {
  LatticeWindow w{depth, env.width - 1, WindowVariant::plain};
  auto cfg = sample_opre(env, fam_v, fam_e, w, seed);
  return survival_depth(cfg, source) == depth;
}

bool cppr_survival_rep(CpprKind kind, double q, double lambda, std::int64_t n, double T,
                       std::uint64_t seed) {
  ContactInstance inst;
  inst.graph = make_line(n);
  inst.horizon = T;
  inst.initial = {0};
  inst.contact.reserve(inst.graph.edges.size());
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e)
    inst.contact.push_back(
        sample_closed_set(ClosedSetSpec::Ppp(lambda), 0.0, T, derive_seed(seed, e, "cppr.X")));
  const auto spec =
      (kind == CpprKind::uni) ? ClosedSetSpec::PeriodicUniform() : ClosedSetSpec::PeriodicBernoulli(q);
  inst.recovery.reserve(static_cast<std::size_t>(n));
  for (std::int64_t v = 0; v < n; ++v) {
    auto y = sample_closed_set(spec, 0.0, T, derive_seed(seed, static_cast<std::uint64_t>(v), "cppr.Y"));
    if (!y.points.empty() && y.points.front() == 0.0) y.points.erase(y.points.begin());
    inst.recovery.push_back(std::move(y));
  }
  return survival_probe(inst);
}

std::int64_t temporal_depth_rep(double p, const DistSpec& nu_dist, std::int64_t t_limit,
                                std::int64_t width_cap, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0, "temporal.nu"));
  std::vector<double> nu(static_cast<std::size_t>(t_limit));
  for (auto& v : nu) v = sample(nu_dist, rng);
  return temporal_survival_depth(p, nu, t_limit, derive_seed(seed, 0, "temporal.cfg"), width_cap);
}

namespace {

std::vector<double> lambda_grid_from(const json& params, double fallback) {
  std::vector<double> grid;
  if (params.contains("lambda_grid")) {
    for (const auto& v : params["lambda_grid"]) grid.push_back(v.get<double>());
  } else if (params.contains("lambda")) {
    grid.push_back(params["lambda"].get<double>());
  } else {
    grid.push_back(fallback);
  }
  if (grid.empty()) throw ConfigError("params.lambda_grid: empty");
  return grid;
}

ConnectionFamily with_lambda(ConnectionFamily f, double lambda) {
  f.lambda = lambda;
  return f;
}

std::vector<EstimateRecord> experiment_percolate(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  if (!p.contains("env")) throw ConfigError("params.env: missing");
  const auto spec = stretch_spec_from_json(p["env"], "params.env");
  const auto width = p.value("width", std::int64_t{256});
  const auto depth = p.value("depth", std::int64_t{200});
  const auto source = p.value("source", std::int64_t{0});
  const bool resample = p.value("resample_env", false);
  auto fam_v = p.contains("vertex_kernel") ? kernel_from_json(p["vertex_kernel"], "params.vertex_kernel")
                                           : ConnectionFamily::power(1.0);
  auto fam_e = p.contains("edge_kernel") ? kernel_from_json(p["edge_kernel"], "params.edge_kernel")
                                         : fam_v;
  const auto grid = lambda_grid_from(p, fam_v.lambda);
  const auto fixed_env = sample_stretches(spec, width, derive_seed(cfg.seed, 0, "percolate.env"));

  std::vector<EstimateRecord> recs;
  for (double lambda : grid) {
    const auto fv = with_lambda(fam_v, lambda);
    const auto fe = with_lambda(fam_e, lambda);
    std::vector<double> outcomes;
    const double secs = elapsed_seconds([&] {
      outcomes = replicate(cfg.reps, cfg.workers, [&](std::uint64_t i) {
        const auto env = resample
                             ? sample_stretches(spec, width, derive_seed(cfg.seed, i, "percolate.env"))
                             : fixed_env;
        return opre_survival_rep(env, fv, fe, depth, source, derive_seed(cfg.seed, i, "percolate.cfg"))
                   ? 1.0
                   : 0.0;
      });
    });
    std::ostringstream name;
    name << "survival(lambda=" << lambda << ",depth=" << depth << ")";
    recs.push_back(frequency_record(name.str(), outcomes, secs));
  }
  return recs;
}

std::vector<EstimateRecord> experiment_crossing(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  if (!p.contains("env")) throw ConfigError("params.env: missing");
  const auto spec = stretch_spec_from_json(p["env"], "params.env");
  const auto width = p.value("width", std::int64_t{128});
  if (!p.contains("rect")) throw ConfigError("params.rect: missing");
  Rectangle rect{p["rect"].value("t0", std::int64_t{0}), p["rect"].value("t1", std::int64_t{32}),
                 p["rect"].value("a", std::int64_t{0}), p["rect"].value("b", std::int64_t{32})};
  const auto kind_s = p.value("kind", std::string("LRC"));
  CrossingKind kind = kind_s == "RLC" ? CrossingKind::RLC
                                      : (kind_s == "BTC" ? CrossingKind::BTC : CrossingKind::LRC);
  auto fam_v = p.contains("vertex_kernel") ? kernel_from_json(p["vertex_kernel"], "params.vertex_kernel")
                                           : ConnectionFamily::power(1.0);
  auto fam_e = p.contains("edge_kernel") ? kernel_from_json(p["edge_kernel"], "params.edge_kernel")
                                         : fam_v;
  const auto grid = lambda_grid_from(p, fam_v.lambda);

  std::vector<EstimateRecord> recs;
  for (double lambda : grid) {
    const auto fv = with_lambda(fam_v, lambda);
    const auto fe = with_lambda(fam_e, lambda);
    std::vector<double> outcomes;
    const double secs = elapsed_seconds([&] {
      outcomes = replicate(cfg.reps, cfg.workers, [&](std::uint64_t i) {
        const auto env = sample_stretches(spec, width, derive_seed(cfg.seed, i, "crossing.env"));
        const auto emb = build_embedding(env, derive_seed(cfg.seed, i, "crossing.emb"));
        LatticeWindow w{rect.t1, static_cast<std::int64_t>(emb.points.size()) - 1,
                        WindowVariant::embedded};
        auto config = sample_opre(emb, fv, fe, w, derive_seed(cfg.seed, i, "crossing.cfg"));
        try {
          return crossing(config, emb, rect, kind) ? 1.0 : 0.0;
        } catch (const InsufficientColumns&) {
          return 0.0;
        }
      });
    });
    std::ostringstream name;
    name << kind_s << "(lambda=" << lambda << ")";
    recs.push_back(frequency_record(name.str(), outcomes, secs));
  }
  return recs;
}

std::vector<EstimateRecord> experiment_blocks(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  if (!p.contains("env")) throw ConfigError("params.env: missing");
  const auto spec = stretch_spec_from_json(p["env"], "params.env");
  if (!p.contains("schedule")) throw ConfigError("params.schedule: missing");
  const auto& s = p["schedule"];
  const auto sched = build_schedule(s.value("epsilon", 1.0), s.value("alpha", 0.5),
                                    s.value("gamma", 1.2), s.value("L0", std::int64_t{64}),
                                    s.value("mu", 0.9), s.value("beta", 0.95),
                                    s.value("K_max", std::int64_t{2}), s.value("relaxed", false));
  const auto k = p.value("k", std::int64_t{0});
  EstimateRecord rec;
  BadProbEstimate est;
  const double secs = elapsed_seconds(
      [&] { est = estimate_bad_prob(spec, sched, k, cfg.reps, derive_seed(cfg.seed, 0, "blocks")); });
  std::ostringstream name;
  name << "bad_block(k=" << k << ",L=" << sched.L[static_cast<std::size_t>(k)] << ")";
  rec.name = name.str();
  rec.estimate = est.estimate;
  rec.ci_lo = est.ci.lo;
  rec.ci_hi = est.ci.hi;
  rec.n = est.replications;
  rec.seconds = secs;
  EstimateRecord thr{"threshold(L_k^-alpha)", est.threshold, est.threshold, est.threshold, est.replications, 0.0};
  return {rec, thr};
}

std::vector<EstimateRecord> experiment_contact(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  const auto model = p.value("model", std::string("cppr_uni"));
  const auto n = p.value("n", std::int64_t{100});
  const double T = p.value("horizon", 100.0);
  const auto grid = lambda_grid_from(p, 1.0);
  const double q = p.value("q", 0.5);

  std::vector<EstimateRecord> recs;
  for (double lambda : grid) {
    std::vector<double> outcomes;
    const double secs = elapsed_seconds([&] {
      outcomes = replicate(cfg.reps, cfg.workers, [&](std::uint64_t i) {
        const auto s = derive_seed(cfg.seed, i, "contact");
        if (model == "cppr_uni") return cppr_survival_rep(CpprKind::uni, q, lambda, n, T, s) ? 1.0 : 0.0;
        if (model == "cppr_ber") return cppr_survival_rep(CpprKind::ber, q, lambda, n, T, s) ? 1.0 : 0.0;
        // generic: explicit contact/recovery specs
        if (!p.contains("contact") || !p.contains("recovery"))
          throw ConfigError("params.contact / params.recovery: missing for generic model");
        auto cs = closed_set_from_json(p["contact"], "params.contact");
        if (cs.kind == ClosedSetKind::ppp) cs.rate = lambda;
        const auto rs = closed_set_from_json(p["recovery"], "params.recovery");
        auto inst = make_instance(make_line(n), cs, rs, {0}, T, s);
        return survival_probe(inst) ? 1.0 : 0.0;
      });
    });
    std::ostringstream name;
    name << model << ".survival(lambda=" << lambda << ",T=" << T << ")";
    recs.push_back(frequency_record(name.str(), outcomes, secs));
  }
  return recs;
}

std::vector<EstimateRecord> experiment_temporal(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  const double prob = p.value("p", 0.9);
  if (!(prob > 0.0 && prob < 1.0)) throw ConfigError("params.p: must be in (0,1)");
  DistSpec nu_dist = DistSpec::stretched_exponential(0.5);
  if (p.contains("env"))
    nu_dist = stretch_spec_from_json(p["env"], "params.env").nu;
  else if (p.contains("nu"))
    nu_dist = dist_from_json(p["nu"], "params.nu");
  std::vector<std::int64_t> t_grid{16, 64, 256, 1024, 4096, 10000};
  if (p.contains("t_grid")) {
    t_grid.clear();
    for (const auto& v : p["t_grid"]) t_grid.push_back(v.get<std::int64_t>());
  }
  const auto width_cap = p.value("width_cap", std::int64_t{512});
  const std::int64_t t_limit = *std::max_element(t_grid.begin(), t_grid.end());

  std::vector<double> depths;
  const double secs = elapsed_seconds([&] {
    depths = replicate(cfg.reps, cfg.workers, [&](std::uint64_t i) {
      return static_cast<double>(
          temporal_depth_rep(prob, nu_dist, t_limit, width_cap, derive_seed(cfg.seed, i, "temporal")));
    });
  });
  std::vector<EstimateRecord> recs;
  for (auto T : t_grid) {
    std::vector<double> tail(depths.size());
    for (std::size_t i = 0; i < depths.size(); ++i)
      tail[i] = (depths[i] >= static_cast<double>(T)) ? 1.0 : 0.0;
    std::ostringstream name;
    name << "depth_tail(T=" << T << ")";
    recs.push_back(frequency_record(name.str(), tail, secs / static_cast<double>(t_grid.size())));
  }
  return recs;
}

std::vector<EstimateRecord> experiment_couple(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  const auto kind_s = p.value("kind", std::string("cppr_uni"));
  CouplingKind kind;
  if (kind_s == "d2_block")
    kind = CouplingKind::d2_block;
  else if (kind_s == "cppr_uni")
    kind = CouplingKind::cppr_uni;
  else if (kind_s == "cppr_ber")
    kind = CouplingKind::cppr_ber;
  else if (kind_s == "cpre")
    kind = CouplingKind::cpre;
  else
    throw ConfigError("params.kind: unknown coupling '" + kind_s + "'");
  CouplingReport rep;
  const double secs =
      elapsed_seconds([&] { rep = validate_coupling(kind, cfg.reps, derive_seed(cfg.seed, 0, "couple")); });
  std::vector<EstimateRecord> recs;
  recs.push_back({kind_s + ".replay_failures", static_cast<double>(rep.failures), 0.0,
                  static_cast<double>(rep.paths), rep.paths, secs});
  recs.push_back({kind_s + ".max_identity_error", rep.max_identity_error, 0.0, rep.max_identity_error,
                  rep.replications, 0.0});
  return recs;
}

std::vector<EstimateRecord> experiment_kernel_audit(const ExperimentConfig& cfg) {
  const auto& p = cfg.params;
  if (!p.contains("kernel")) throw ConfigError("params.kernel: missing");
  const auto fam = kernel_from_json(p["kernel"], "params.kernel");
  const auto s_lo = p.value("s_lo", std::int64_t{1});
  const auto s_hi = p.value("s_hi", std::int64_t{10000});
  KernelBoundReport rep;
  const double secs = elapsed_seconds([&] { rep = check_kernel_bounds(fam, s_lo, s_hi); });
  std::vector<EstimateRecord> recs;
  recs.push_back({fam.name() + ".violations", static_cast<double>(rep.violations), 0.0,
                  static_cast<double>(rep.violations), static_cast<std::uint64_t>(s_hi - s_lo + 1), secs});
  recs.push_back({fam.name() + ".min_margin(at s=" + std::to_string(rep.argmin_s) + ")", rep.min_margin,
                  rep.min_margin, rep.min_margin, 1, 0.0});
  return recs;
}

}  // namespace

std::vector<EstimateRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "percolate") return experiment_percolate(cfg);
  if (cfg.experiment == "crossing") return experiment_crossing(cfg);
  if (cfg.experiment == "blocks") return experiment_blocks(cfg);
  if (cfg.experiment == "contact") return experiment_contact(cfg);
  if (cfg.experiment == "temporal") return experiment_temporal(cfg);
  if (cfg.experiment == "couple") return experiment_couple(cfg);
  if (cfg.experiment == "kernel-audit") return experiment_kernel_audit(cfg);
  throw ConfigError("experiment: unknown kind '" + cfg.experiment + "'");
}

void write_records_csv(const std::vector<EstimateRecord>& recs, std::uint64_t cfg_hash,
                       std::uint64_t seed, std::ostream& out) {
  out << "# config_hash=" << cfg_hash << " seed=" << seed << " version=" << kVersion << "\n";
  out << "name,estimate,ci_lo,ci_hi,n,seconds\n";
  out.precision(12);
  for (const auto& r : recs)
    out << r.name << "," << r.estimate << "," << r.ci_lo << "," << r.ci_hi << "," << r.n << ","
        << r.seconds << "\n";
}

void write_records_json(const std::vector<EstimateRecord>& recs, std::uint64_t cfg_hash,
                        std::uint64_t seed, std::ostream& out) {
  json j;
  j["config_hash"] = cfg_hash;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["records"] = json::array();
  for (const auto& r : recs)
    j["records"].push_back({{"name", r.name},
                            {"estimate", r.estimate},
                            {"ci_lo", r.ci_lo},
                            {"ci_hi", r.ci_hi},
                            {"n", r.n},
                            {"seconds", r.seconds}});
  out << j.dump(2) << "\n";
}

int run_experiment_main(const ExperimentConfig& cfg, const json& raw_config) {
  try {
    std::vector<EstimateRecord> recs;
    int acceptance_failures = 0;
    if (cfg.experiment == "acceptance") {
      auto results = run_acceptance(cfg.workers, std::cout);
      for (const auto& r : results) {
        recs.push_back({"acceptance." + r.name, r.pass ? 1.0 : 0.0, 0.0, 1.0, 1, r.seconds});
        if (!r.pass) ++acceptance_failures;
      }
    } else {
      recs = run_experiment(cfg);
    }
    const auto hash = config_hash(raw_config);
    if (cfg.out.empty()) {
      if (cfg.format == "json")
        write_records_json(recs, hash, cfg.seed, std::cout);
      else
        write_records_csv(recs, hash, cfg.seed, std::cout);
    } else {
      std::ofstream out(cfg.out);
      if (!out) throw std::runtime_error("cannot open output file: " + cfg.out);
      if (cfg.format == "json")
        write_records_json(recs, hash, cfg.seed, out);
      else
        write_records_csv(recs, hash, cfg.seed, out);
    }
    return acceptance_failures > 0 ? 3 : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace opre
