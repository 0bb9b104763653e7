#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "opre/contact.hpp"
#include "opre/environment.hpp"
#include "opre/kernels.hpp"

namespace opre {

using json = nlohmann::json;

struct ExperimentConfig {
  std::string experiment;  // percolate | crossing | blocks | contact | couple | temporal | kernel-audit | acceptance
  std::uint64_t seed = 1;
  std::uint64_t reps = 100;
  int workers = 1;
  std::string out;          // empty: stdout
  std::string format = "csv";
  json params = json::object();
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config_json(const std::string& path);

DistSpec dist_from_json(const json& j, const std::string& field_path);
json dist_to_json(const DistSpec& d);

StretchSpec stretch_spec_from_json(const json& j, const std::string& field_path);
json stretch_spec_to_json(const StretchSpec& s);

ConnectionFamily kernel_from_json(const json& j, const std::string& field_path);
json kernel_to_json(const ConnectionFamily& f);

ClosedSetSpec closed_set_from_json(const json& j, const std::string& field_path);
json closed_set_to_json(const ClosedSetSpec& s);

// FNV-1a hash of the canonical dump; embedded in every result file.
std::uint64_t config_hash(const json& j);

}  // namespace opre
