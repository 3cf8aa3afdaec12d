// Copyright 2026 The isingchaos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cmath>
#include <string>

#include "isingchaos/chaos.hpp"
#include "isingchaos/errors.hpp"
#include "isingchaos/io.hpp"
#include "json.hpp"

namespace isingchaos {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Run manifest: the fields that determine a result table, plus bookkeeping
// ("artifact_version", "timestamp", "state") that does not enter the hash.
struct RunManifest {
  ChaosRunConfig config;
  std::string artifact_version = kArtifactVersion;
  std::string timestamp;
  std::string results_checksum;  // of the last written results file
  bool complete = false;
  std::uint64_t records = 0;
};

namespace manifest_detail {

using nlohmann::json;

inline json config_json(const ChaosRunConfig& c) {
  json j;
  j["family"] = std::string(family_tag(c.family.family));
  if (c.family.family == Family::Chain)
    j["chain"] = {{"J", c.family.chain_j}, {"antiferromagnetic", c.family.antiferromagnetic}};
  j["sizes"] = c.sizes;
  j["sigmas"] = c.sigmas;
  j["instances"] = c.n_instances;
  j["realizations"] = c.n_realizations;
  j["master_seed"] = c.master_seed;
  json s;
  s["kind"] = std::string(solver_tag(c.solver.kind));
  if (c.solver.kind == SolverProfile::Kind::ParallelTempering) {
    s["replicas"] = c.solver.pt.n_replicas;
    s["beta_min"] = c.solver.pt.beta_min;
    s["beta_max"] = c.solver.pt.beta_max;
    s["sweeps"] = c.solver.pt.sweeps;
    s["exchange_period"] = c.solver.pt.exchange_period;
    s["houdayer"] = c.solver.pt.houdayer;
  }
  if (c.solver.kind == SolverProfile::Kind::Elimination) s["max_width"] = c.solver.max_width;
  j["solver"] = s;
  j["descent_sweeps"] = c.descent_sweeps;
  j["targets"] = c.effective_targets() == NoiseTargets::CouplingsOnly ? "couplings" : "couplings+fields";
  j["clamp"] = c.clamp ? json(*c.clamp) : json(nullptr);
  return j;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) && !j[key].is_null() ? j[key].get<T>() : fallback;
}

inline ChaosRunConfig config_from_json(const json& j) {
  ChaosRunConfig c;
  c.family.family = parse_family(j.at("family").get<std::string>());
  if (j.contains("chain")) {
    c.family.chain_j = get_or(j["chain"], "J", 1.0);
    c.family.antiferromagnetic = get_or(j["chain"], "antiferromagnetic", true);
  }
  c.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
  c.sigmas = j.at("sigmas").get<std::vector<double>>();
  c.n_instances = j.at("instances").get<std::uint64_t>();
  c.n_realizations = j.at("realizations").get<std::uint64_t>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    c.solver.kind = parse_solver(s.at("kind").get<std::string>());
    c.solver.pt.n_replicas = get_or<std::size_t>(s, "replicas", c.solver.pt.n_replicas);
    c.solver.pt.beta_min = get_or(s, "beta_min", c.solver.pt.beta_min);
    c.solver.pt.beta_max = get_or(s, "beta_max", c.solver.pt.beta_max);
    c.solver.pt.sweeps = get_or<std::uint64_t>(s, "sweeps", c.solver.pt.sweeps);
    c.solver.pt.exchange_period = get_or<std::uint64_t>(s, "exchange_period", c.solver.pt.exchange_period);
    c.solver.pt.houdayer = get_or(s, "houdayer", c.solver.pt.houdayer);
    c.solver.max_width = get_or<std::size_t>(s, "max_width", c.solver.max_width);
  }
  c.descent_sweeps = get_or(j, "descent_sweeps", 100);
  if (j.contains("targets") && !j["targets"].is_null()) {
    const auto t = j["targets"].get<std::string>();
    if (t == "couplings") c.targets = NoiseTargets::CouplingsOnly;
    else if (t == "couplings+fields") c.targets = NoiseTargets::CouplingsAndFields;
    else throw ValidationError("unknown noise targets '" + t + "'");
  }
  if (j.contains("clamp") && !j["clamp"].is_null()) c.clamp = j["clamp"].get<double>();
  c.validate();
  if (c.solver.kind == SolverProfile::Kind::ParallelTempering) c.solver.pt.validate();
  return c;
}

}  // namespace manifest_detail

inline std::string manifest_hash(const ChaosRunConfig& c) {
  return io::hex64(io::fnv1a(manifest_detail::config_json(c).dump()));
}

inline nlohmann::json to_json(const RunManifest& m) {
  auto j = manifest_detail::config_json(m.config);
  j["artifact_version"] = m.artifact_version;
  j["timestamp"] = m.timestamp;
  j["state"] = {{"manifest_hash", manifest_hash(m.config)},
                {"results_checksum", m.results_checksum},
                {"complete", m.complete},
                {"records", m.records}};
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.config = manifest_detail::config_from_json(j);
    m.artifact_version = manifest_detail::get_or<std::string>(j, "artifact_version", kArtifactVersion);
    m.timestamp = manifest_detail::get_or<std::string>(j, "timestamp", "");
    if (j.contains("state")) {
      const auto& s = j["state"];
      m.results_checksum = manifest_detail::get_or<std::string>(s, "results_checksum", "");
      m.complete = manifest_detail::get_or(s, "complete", false);
      m.records = manifest_detail::get_or<std::uint64_t>(s, "records", 0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest schema error: ") + e.what());
  }
  return m;
}

// JSON mirror of a result table. Statistics of non-chaos rows are null.
inline nlohmann::json results_json(const ResultTable& table) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json rows = json::array();
  for (const auto& r : table.records) {
    json row = {{"family", std::string(family_tag(r.family))},
                {"n", r.n},
                {"sigma", r.sigma},
                {"instance_id", r.instance_id},
                {"realization_id", r.realization_id},
                {"outcome", std::string(outcome_tag(r.outcome))}};
    const bool event = r.outcome == Outcome::ChaosEvent;
    row["delta_e0"] = event ? num(r.delta_e0) : json(nullptr);
    row["D"] = event ? json(r.D) : json(nullptr);
    row["W"] = event ? json(r.W) : json(nullptr);
    row["z"] = event ? num(r.z) : json(nullptr);
    row["e_intended"] = event ? num(r.e_intended) : json(nullptr);
    rows.push_back(std::move(row));
  }
  json failures = json::array();
  for (const auto& f : table.failures)
    failures.push_back({{"size", f.size},
                        {"instance_id", f.instance_id},
                        {"realization_id", f.realization_id},
                        {"sigma", f.sigma},
                        {"message", f.message}});
  return {{"manifest_hash", table.manifest_hash}, {"records", rows}, {"failures", failures}};
}

}  // namespace isingchaos
