#include "opre/config_io.hpp"

#include <fstream>

#include "opre/rng.hpp"

namespace opre {

namespace {
double require_number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(path + "." + key + ": missing or not a number");
  return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  return (j.contains(key) && j[key].is_number()) ? j[key].get<double>() : fallback;
}
}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw ConfigError("experiment: missing or not a string");
  cfg.experiment = j["experiment"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("reps")) {
    cfg.reps = j["reps"].get<std::uint64_t>();
    if (cfg.reps < 1) throw ConfigError("reps: must be >= 1");
  }
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("format")) {
    cfg.format = j["format"].get<std::string>();
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format: must be csv or json");
  }
  if (j.contains("params")) cfg.params = j["params"];
  return cfg;
}

ExperimentConfig load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

DistSpec dist_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(path + ": expected {kind, ...}");
  DistSpec d;
  d.kind = dist_kind_from_name(j["kind"].get<std::string>());
  switch (d.kind) {
    case DistKind::constant:
      d.a = require_number(j, "value", path);
      break;
    case DistKind::exponential:
      d.a = require_number(j, "rate", path);
      break;
    case DistKind::geometric:
    case DistKind::squared_geometric:
      d.a = require_number(j, "q", path);
      break;
    case DistKind::pareto:
      d.a = require_number(j, "shape", path);
      d.b = require_number(j, "scale", path);
      break;
    case DistKind::stretched_exponential:
      d.a = require_number(j, "a", path);
      break;
  }
  try {
    validate(d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return d;
}

json dist_to_json(const DistSpec& d) {
  json j{{"kind", dist_kind_name(d.kind)}};
  switch (d.kind) {
    case DistKind::constant: j["value"] = d.a; break;
    case DistKind::exponential: j["rate"] = d.a; break;
    case DistKind::geometric:
    case DistKind::squared_geometric: j["q"] = d.a; break;
    case DistKind::pareto:
      j["shape"] = d.a;
      j["scale"] = d.b;
      break;
    case DistKind::stretched_exponential: j["a"] = d.a; break;
  }
  return j;
}

StretchSpec stretch_spec_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected object");
  StretchSpec s;
  if (!j.contains("xi")) throw ConfigError(path + ".xi: missing");
  if (!j.contains("nu")) throw ConfigError(path + ".nu: missing");
  s.xi = dist_from_json(j["xi"], path + ".xi");
  s.nu = dist_from_json(j["nu"], path + ".nu");
  s.moment_exponent = number_or(j, "moment_exponent", 1.5);
  if (j.contains("heavy_tailed")) s.heavy_tailed = j["heavy_tailed"].get<bool>();
  return s;
}

json stretch_spec_to_json(const StretchSpec& s) {
  return json{{"xi", dist_to_json(s.xi)},
              {"nu", dist_to_json(s.nu)},
              {"moment_exponent", s.moment_exponent},
              {"heavy_tailed", s.heavy_tailed}};
}

ConnectionFamily kernel_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(path + ": expected {kind, ...}");
  const auto kind = j["kind"].get<std::string>();
  ConnectionFamily f;
  if (kind == "constant") {
    f = ConnectionFamily::constant(require_number(j, "p", path));
  } else if (kind == "power") {
    f = ConnectionFamily::power(require_number(j, "lambda", path));
  } else if (kind == "cppr_uniform") {
    f = ConnectionFamily::cppr_uniform(require_number(j, "lambda", path));
  } else if (kind == "cppr_bernoulli") {
    f = ConnectionFamily::cppr_bernoulli(require_number(j, "lambda", path));
  } else if (kind == "cpre_edge") {
    f = ConnectionFamily::cpre_edge(static_cast<std::int64_t>(require_number(j, "L", path)));
  } else if (kind == "cpre_vertex") {
    f = ConnectionFamily::cpre_vertex(static_cast<std::int64_t>(require_number(j, "L", path)));
  } else {
    throw ConfigError(path + ".kind: unknown kernel '" + kind + "'");
  }
  f.sigma = number_or(j, "sigma", 1.0);
  try {
    validate(f);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return f;
}

json kernel_to_json(const ConnectionFamily& f) {
  json j;
  switch (f.kind) {
    case KernelKind::constant:
      j = {{"kind", "constant"}, {"p", f.p}};
      break;
    case KernelKind::power:
      j = {{"kind", "power"}, {"lambda", f.lambda}};
      break;
    case KernelKind::cppr_uniform:
      j = {{"kind", "cppr_uniform"}, {"lambda", f.lambda}};
      break;
    case KernelKind::cppr_bernoulli:
      j = {{"kind", "cppr_bernoulli"}, {"lambda", f.lambda}};
      break;
    case KernelKind::cpre_edge:
      j = {{"kind", "cpre_edge"}, {"L", f.L}};
      break;
    case KernelKind::cpre_vertex:
      j = {{"kind", "cpre_vertex"}, {"L", f.L}};
      break;
  }
  j["sigma"] = f.sigma;
  return j;
}

ClosedSetSpec closed_set_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(path + ": expected {kind, ...}");
  const auto kind = j["kind"].get<std::string>();
  ClosedSetSpec s;
  if (kind == "ppp") {
    s = ClosedSetSpec::Ppp(require_number(j, "rate", path));
  } else if (kind == "periodic_uniform") {
    s = ClosedSetSpec::PeriodicUniform();
  } else if (kind == "periodic_bernoulli") {
    s = ClosedSetSpec::PeriodicBernoulli(require_number(j, "q", path));
  } else if (kind == "cox_bds") {
    if (!j.contains("intensity")) throw ConfigError(path + ".intensity: missing");
    s = ClosedSetSpec::CoxBds(require_number(j, "p", path), require_number(j, "delta", path),
                              dist_from_json(j["intensity"], path + ".intensity"));
  } else if (kind == "cox_ppp") {
    if (!j.contains("intensity")) throw ConfigError(path + ".intensity: missing");
    s = ClosedSetSpec::CoxPpp(dist_from_json(j["intensity"], path + ".intensity"));
  } else if (kind == "empty") {
    s = ClosedSetSpec::Empty();
  } else if (kind == "scaled") {
    if (!j.contains("inner")) throw ConfigError(path + ".inner: missing");
    s = ClosedSetSpec::Scaled(require_number(j, "mu", path),
                              closed_set_from_json(j["inner"], path + ".inner"));
  } else {
    throw ConfigError(path + ".kind: unknown closed-set kind '" + kind + "'");
  }
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return s;
}

json closed_set_to_json(const ClosedSetSpec& s) {
  switch (s.kind) {
    case ClosedSetKind::ppp: return {{"kind", "ppp"}, {"rate", s.rate}};
    case ClosedSetKind::periodic_uniform: return {{"kind", "periodic_uniform"}};
    case ClosedSetKind::periodic_bernoulli: return {{"kind", "periodic_bernoulli"}, {"q", s.q}};
    case ClosedSetKind::cox_bds:
      return {{"kind", "cox_bds"}, {"p", s.p}, {"delta", s.delta}, {"intensity", dist_to_json(s.intensity)}};
    case ClosedSetKind::cox_ppp: return {{"kind", "cox_ppp"}, {"intensity", dist_to_json(s.intensity)}};
    case ClosedSetKind::empty: return {{"kind", "empty"}};
    case ClosedSetKind::scaled:
      return {{"kind", "scaled"}, {"mu", s.mu}, {"inner", closed_set_to_json(*s.inner)}};
  }
  return {};
}

std::uint64_t config_hash(const json& j) { return fnv1a64(j.dump()); }

}  // namespace opre
