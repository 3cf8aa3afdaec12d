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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "isingchaos/errors.hpp"
#include "isingchaos/generators.hpp"
#include "isingchaos/model.hpp"
#include "isingchaos/noise.hpp"
#include "isingchaos/parallel_tempering.hpp"
#include "isingchaos/solvers.hpp"
#include "isingchaos/stats.hpp"

namespace isingchaos {

enum class Outcome { Preserved, TrivialExcitation, ChaosEvent };

inline std::string_view outcome_tag(Outcome o) {
  switch (o) {
    case Outcome::Preserved: return "preserved";
    case Outcome::TrivialExcitation: return "trivial";
    case Outcome::ChaosEvent: return "chaos";
  }
  return "unknown";
}

inline Outcome parse_outcome(std::string_view tag) {
  if (tag == "preserved") return Outcome::Preserved;
  if (tag == "trivial") return Outcome::TrivialExcitation;
  if (tag == "chaos") return Outcome::ChaosEvent;
  throw ValidationError("unknown outcome '" + std::string(tag) + "'");
}

// One (instance, sigma, realization) cell. The event statistics are NaN/zero
// unless outcome == ChaosEvent.
struct ChaosRecord {
  Family family = Family::Chain;
  std::uint64_t n = 0;  // nominal size (8 L^2 for Chimera, L^2 for grids)
  double sigma = 0.0;
  std::uint64_t instance_id = 0;
  std::uint64_t realization_id = 0;
  Outcome outcome = Outcome::Preserved;
  double delta_e0 = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t D = 0;
  std::uint64_t W = 0;
  double z = std::numeric_limits<double>::quiet_NaN();
  double e_intended = std::numeric_limits<double>::quiet_NaN();

  auto key() const { return std::tuple{n, sigma, instance_id, realization_id}; }
  bool success() const { return outcome != Outcome::ChaosEvent; }
};

using Solver = std::function<SolveResult(const Instance&, const StreamLabels&)>;

// Classifies a candidate ground state of an implemented Hamiltonian. The
// candidate counts as a change only if it lies strictly below every intended
// ground state on the implemented Hamiltonian and is not itself an intended
// ground state; it is then relaxed by steepest descent on the intended
// Hamiltonian to separate trivial excitations from topologically non-trivial
// ones. Statistics refer to the nearest intended ground state (first listed
// on ties). Identifiers are left for the caller.
inline ChaosRecord classify_candidate(const Instance& intended, const Instance& implemented,
                                      const SpinConfiguration& candidate, double sigma,
                                      int descent_sweeps = 100) {
  if (intended.known_ground_states.empty())
    throw ValidationError("classification needs known intended ground states");
  ChaosRecord rec;
  rec.family = intended.family;
  rec.n = nominal_size(intended);
  rec.sigma = sigma;

  double e_ground = std::numeric_limits<double>::infinity();
  double e_impl_ground = std::numeric_limits<double>::infinity();
  for (const auto& g : intended.known_ground_states) {
    e_ground = std::min(e_ground, energy(intended, g));
    e_impl_ground = std::min(e_impl_ground, energy(implemented, g));
  }
  const double tol = kEnergyTolerance * std::max(1.0, std::abs(e_ground));
  const double e_impl_found = energy(implemented, candidate);
  const bool lower = e_impl_found < e_impl_ground - 1e-12 * std::max(1.0, std::abs(e_impl_ground));
  if (!lower || energy(intended, candidate) <= e_ground + tol) return rec;

  const SpinConfiguration relaxed = steepest_descent(intended, candidate, descent_sweeps);
  const double e_relaxed = energy(intended, relaxed);
  if (e_relaxed <= e_ground + tol) {
    rec.outcome = Outcome::TrivialExcitation;
    return rec;
  }

  const SpinConfiguration* ref = &intended.known_ground_states.front();
  std::size_t best_d = hamming_distance(*ref, relaxed);
  for (const auto& g : intended.known_ground_states) {
    const auto d = hamming_distance(g, relaxed);
    if (d < best_d) {
      best_d = d;
      ref = &g;
    }
  }
  const OverlapStats ov = overlaps(intended, *ref, relaxed, sigma);
  rec.outcome = Outcome::ChaosEvent;
  rec.delta_e0 = e_relaxed - e_ground;
  rec.D = ov.D;
  rec.W = ov.W;
  rec.z = z_parameter(rec.delta_e0, sigma, ov.W + ov.D);
  rec.e_intended = e_relaxed;
  return rec;
}

// Perturbs the intended instance, solves the implemented one and classifies
// the answer. `solver` is called as solver(implemented, stream labels).
template <class SolverFn>
ChaosRecord classify_realization(const Instance& intended, const NoiseSpec& spec,
                                 SolverFn&& solver, int descent_sweeps = 100) {
  if (intended.known_ground_states.empty())
    throw ValidationError("classify_realization needs known intended ground states");
  const Instance implemented = perturb(intended, spec);
  const SolveResult found = solver(implemented, spec.stream);
  ChaosRecord rec =
      classify_candidate(intended, implemented, found.best_config, spec.sigma, descent_sweeps);
  rec.instance_id = spec.stream.instance_id;
  rec.realization_id = spec.stream.realization;
  return rec;
}

struct SolverProfile {
  enum class Kind { Exhaustive, GridDp, ChainDp, Elimination, ParallelTempering };
  Kind kind = Kind::Elimination;
  PtParams pt;
  std::size_t max_width = kEliminationMaxWidth;
};

inline std::string_view solver_tag(SolverProfile::Kind k) {
  using K = SolverProfile::Kind;
  switch (k) {
    case K::Exhaustive: return "exact";
    case K::GridDp: return "grid-dp";
    case K::ChainDp: return "chain-dp";
    case K::Elimination: return "elimination";
    case K::ParallelTempering: return "pt";
  }
  return "unknown";
}

inline SolverProfile::Kind parse_solver(std::string_view tag) {
  using K = SolverProfile::Kind;
  if (tag == "exact" || tag == "exhaustive") return K::Exhaustive;
  if (tag == "grid-dp") return K::GridDp;
  if (tag == "chain-dp") return K::ChainDp;
  if (tag == "elimination") return K::Elimination;
  if (tag == "pt") return K::ParallelTempering;
  throw ValidationError("unknown solver '" + std::string(tag) + "'");
}

inline Solver make_solver(const SolverProfile& profile) {
  using K = SolverProfile::Kind;
  switch (profile.kind) {
    case K::Exhaustive:
      return [](const Instance& inst, const StreamLabels&) { return exhaustive_solve(inst).result; };
    case K::GridDp:
      return [](const Instance& inst, const StreamLabels&) { return grid_dp_solve(inst); };
    case K::ChainDp:
      return [](const Instance& inst, const StreamLabels&) { return chain_dp_solve(inst); };
    case K::Elimination:
      return [w = profile.max_width](const Instance& inst, const StreamLabels&) {
        return elimination_solve(inst, w);
      };
    case K::ParallelTempering:
      return [pt = profile.pt](const Instance& inst, const StreamLabels& s) {
        return pt_solve(inst, pt, s);
      };
  }
  throw ValidationError("unknown solver profile");
}

// Best available exact ground state for an intended instance.
inline SolveResult solve_exactly(const Instance& inst) {
  if (inst.family == Family::SquareGrid) {
    if (auto L = inst.meta_int("L"); L && static_cast<std::size_t>(*L) <= kGridDpMaxWidth)
      return grid_dp_solve(inst);
  }
  if (inst.family == Family::Chain) return chain_dp_solve(inst);
  if (inst.n_spins <= 24) return exhaustive_solve(inst).result;
  return elimination_solve(inst);
}

struct FamilyParams {
  Family family = Family::Chimera;
  double chain_j = 1.0;
  bool antiferromagnetic = true;
};

struct ChaosRunConfig {
  FamilyParams family;
  std::vector<std::uint64_t> sizes;  // chain/xorsat: n; grid/chimera: L
  std::vector<double> sigmas;
  std::uint64_t n_instances = 1;
  std::uint64_t n_realizations = 1;
  std::uint64_t master_seed = 0;
  SolverProfile solver;
  int descent_sweeps = 100;
  std::optional<NoiseTargets> targets;  // family default when empty
  std::optional<double> clamp;

  NoiseTargets effective_targets() const {
    if (targets) return *targets;
    return family.family == Family::Chain || family.family == Family::SquareGrid
               ? NoiseTargets::CouplingsOnly
               : NoiseTargets::CouplingsAndFields;
  }

  void validate() const {
    if (sizes.empty()) throw ValidationError("run config needs at least one size");
    if (sigmas.empty()) throw ValidationError("run config needs at least one sigma");
    for (double s : sigmas)
      if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("sigma must be finite and >= 0");
    if (n_instances == 0 || n_realizations == 0)
      throw ValidationError("instance and realization counts must be positive");
    if (n_instances >= (1ULL << 32)) throw ValidationError("too many instances");
    if (descent_sweeps < 0) throw ValidationError("descent sweeps must be non-negative");
  }
};

inline std::uint64_t instance_seed(const ChaosRunConfig& cfg, std::uint64_t size,
                                   std::uint64_t instance_id) {
  return derive_key({cfg.master_seed, static_cast<std::uint64_t>(cfg.family.family), size, instance_id});
}

inline Instance generate_instance(const FamilyParams& fam, std::uint64_t size, std::uint64_t seed) {
  switch (fam.family) {
    case Family::Chain: return gen_chain(size, fam.chain_j, fam.antiferromagnetic);
    case Family::SquareGrid: return gen_square_grid(size, seed);
    case Family::Chimera: return gen_planted_chimera(size, seed);
    case Family::Xorsat3: return gen_xorsat(size, seed);
  }
  throw ValidationError("unknown family");
}

struct CellFailure {
  std::uint64_t size = 0;
  std::uint64_t instance_id = 0;
  std::uint64_t realization_id = 0;
  double sigma = 0.0;
  std::string message;
};

struct ResultTable {
  std::vector<ChaosRecord> records;  // sorted by key
  std::string manifest_hash;
  std::vector<CellFailure> failures;
  std::map<std::string, std::string> notes;

  void sort() {
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.key() < b.key(); });
  }

  bool keys_unique() const {
    std::set<decltype(ChaosRecord{}.key())> keys;
    for (const auto& r : records)
      if (!keys.insert(r.key()).second) return false;
    return true;
  }
};

struct RunOptions {
  unsigned jobs = 1;
  // Stop after this many newly classified cells (0 = no limit).
  std::uint64_t max_new_cells = 0;
};

// Runs every (size, instance, realization, sigma) cell not already present in
// `resume`. Cells are pure functions of the configuration and their labels,
// so a resumed table matches an uninterrupted one and the result does not
// depend on `jobs`.
inline ResultTable run_sweep(const ChaosRunConfig& cfg, const RunOptions& opts = {},
                             const ResultTable* resume = nullptr) {
  cfg.validate();
  ResultTable table;
  if (resume) table = *resume;

  std::set<decltype(ChaosRecord{}.key())> done;
  for (const auto& r : table.records) done.insert(r.key());

  struct Cell {
    std::uint64_t realization;
    double sigma;
  };
  struct Unit {
    std::uint64_t size, instance_id;
    std::vector<Cell> cells;
  };
  std::vector<Unit> units;
  std::uint64_t scheduled = 0;
  bool full = false;
  for (auto size : cfg.sizes) {
    // Records carry the nominal size, which needs one generated instance.
    const std::uint64_t nominal =
        cfg.family.family == Family::Chimera      ? 8 * size * size
        : cfg.family.family == Family::SquareGrid ? size * size
                                                  : size;
    for (std::uint64_t id = 0; id < cfg.n_instances && !full; ++id) {
      Unit u{size, id, {}};
      for (std::uint64_t r = 0; r < cfg.n_realizations && !full; ++r)
        for (double s : cfg.sigmas) {
          if (done.contains({nominal, s, id, r})) continue;
          if (opts.max_new_cells && scheduled >= opts.max_new_cells) {
            full = true;
            break;
          }
          u.cells.push_back({r, s});
          ++scheduled;
        }
      if (!u.cells.empty()) units.push_back(std::move(u));
    }
  }

  const Solver solver = make_solver(cfg.solver);
  const NoiseTargets targets = cfg.effective_targets();
  std::vector<std::vector<ChaosRecord>> produced(units.size());
  std::vector<std::vector<CellFailure>> failed(units.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t ui = next++; ui < units.size(); ui = next++) {
      const Unit& u = units[ui];
      Instance intended;
      try {
        intended = generate_instance(cfg.family, u.size, instance_seed(cfg, u.size, u.instance_id));
        if (intended.known_ground_states.empty()) {
          const SolveResult gs = solve_exactly(intended);
          intended.known_ground_states = {gs.best_config};
          if (!intended.has_arity(1) && !intended.has_arity(3))
            intended.known_ground_states.push_back(gs.best_config.flipped());
        }
      } catch (const Error& e) {
        for (const auto& c : u.cells)
          failed[ui].push_back({u.size, u.instance_id, c.realization, c.sigma, e.what()});
        continue;
      }
      for (const auto& c : u.cells) {
        NoiseSpec spec;
        spec.sigma = c.sigma;
        spec.targets = targets;
        spec.clamp = cfg.clamp;
        spec.stream = {cfg.master_seed, (u.size << 32) | u.instance_id, c.realization};
        try {
          ChaosRecord rec = classify_realization(intended, spec, solver, cfg.descent_sweeps);
          rec.instance_id = u.instance_id;
          produced[ui].push_back(rec);
        } catch (const Error& e) {
          failed[ui].push_back({u.size, u.instance_id, c.realization, c.sigma, e.what()});
        }
      }
    }
  };

  const unsigned jobs = std::max(1u, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (auto& v : produced) table.records.insert(table.records.end(), v.begin(), v.end());
  for (auto& v : failed) table.failures.insert(table.failures.end(), v.begin(), v.end());
  table.sort();
  if (cfg.family.family == Family::SquareGrid)
    table.notes["ground_state_caveat"] = "W measured against one solver-found ground state pair";
  return table;
}

struct GroupKey {
  Family family = Family::Chimera;
  std::uint64_t n = 0;
  double sigma = 0.0;
};

// Per-instance success fractions of one (family, n, sigma) group, ordered by
// instance id. Trivial excitations count as successes unless
// `preserved_only` is set.
inline std::vector<double> per_instance_success(const ResultTable& table, const GroupKey& g,
                                                bool preserved_only = false) {
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> counts;
  for (const auto& r : table.records) {
    if (r.family != g.family || r.n != g.n || r.sigma != g.sigma) continue;
    auto& [ok, total] = counts[r.instance_id];
    ok += preserved_only ? r.outcome == Outcome::Preserved : r.success();
    ++total;
  }
  std::vector<double> out;
  for (const auto& [id, c] : counts)
    out.push_back(static_cast<double>(c.first) / static_cast<double>(c.second));
  return out;
}

struct PsEstimate {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double bootstrap_sd = 0.0;
  std::size_t instances = 0;
};

// Median per-instance success probability with a two-standard-deviation
// bootstrap interval (resampling instances).
inline PsEstimate estimate_ps(const ResultTable& table, const GroupKey& g,
                              std::size_t resamples = 1000, std::uint64_t seed = 0,
                              bool preserved_only = false) {
  const auto ps = per_instance_success(table, g, preserved_only);
  if (ps.empty()) throw InsufficientDataError("estimate_ps: empty group");
  if (ps.size() < 2) throw InsufficientDataError("estimate_ps: need at least two instances");
  PsEstimate e;
  e.instances = ps.size();
  e.median = stats::median(ps);
  e.bootstrap_sd = stats::bootstrap_sd(
      ps, [](std::vector<double>& v) { return stats::median(v); }, resamples, seed);
  e.lo = std::max(0.0, e.median - 2.0 * e.bootstrap_sd);
  e.hi = std::min(1.0, e.median + 2.0 * e.bootstrap_sd);
  return e;
}

// Distinct (n, sigma) groups of a family present in the table, in key order.
inline std::vector<GroupKey> groups_of(const ResultTable& table, Family family) {
  std::set<std::pair<std::uint64_t, double>> seen;
  for (const auto& r : table.records)
    if (r.family == family) seen.insert({r.n, r.sigma});
  std::vector<GroupKey> out;
  for (const auto& [n, s] : seen) out.push_back({family, n, s});
  return out;
}

}  // namespace isingchaos
