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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "isingchaos/errors.hpp"
#include "isingchaos/model.hpp"
#include "isingchaos/noise.hpp"
#include "isingchaos/random.hpp"
#include "isingchaos/solvers.hpp"

namespace isingchaos {

// Replica-exchange schedule. Defaults follow the production setting: 32
// geometric temperatures on beta in [0.1, 20], swaps and cluster moves every
// 10 sweeps. Desk-scale runs lower `sweeps`.
struct PtParams {
  std::size_t n_replicas = 32;
  double beta_min = 0.1;
  double beta_max = 20.0;
  std::uint64_t sweeps = 2'000'000;
  std::uint64_t exchange_period = 10;
  bool houdayer = true;

  void validate() const {
    if (n_replicas < 2) throw ValidationError("parallel tempering needs at least 2 replicas");
    if (!(beta_min > 0.0) || !(beta_min < beta_max))
      throw ValidationError("need 0 < beta_min < beta_max");
    if (exchange_period == 0) throw ValidationError("exchange period must be positive");
  }
};

inline std::vector<double> beta_ladder(const PtParams& p) {
  p.validate();
  std::vector<double> b(p.n_replicas);
  const double ratio = p.beta_max / p.beta_min;
  for (std::size_t k = 0; k < p.n_replicas; ++k)
    b[k] = p.beta_min * std::pow(ratio, static_cast<double>(k) / static_cast<double>(p.n_replicas - 1));
  return b;
}

struct HoudayerOutcome {
  bool accepted = false;
  std::vector<Site> cluster;  // empty when the replicas agree everywhere
  double delta = 0.0;         // change in energy(a) + energy(b) of the proposal
};

// Houdayer cluster move between two replicas at the same temperature. The
// cluster is the connected set of sites with a_i != b_i reachable through
// 2-body terms from a random seed site; it is flipped in both replicas. With
// only 1- and 2-body terms the move conserves the pair energy and is always
// accepted; otherwise it is a Metropolis proposal on the pair energy.
template <class Rng>
HoudayerOutcome houdayer_move(const Instance& inst, const Incidence& inc, SpinConfiguration& a,
                              SpinConfiguration& b, double beta, Rng& rng,
                              std::vector<std::uint8_t>& scratch) {
  HoudayerOutcome out;
  const std::size_t n = inst.n_spins;
  std::vector<Site> disagree;
  for (Site i = 0; i < n; ++i)
    if (a[i] != b[i]) disagree.push_back(i);
  if (disagree.empty()) return out;

  scratch.assign(n, 0);
  const Site seed = disagree[uniform_index(rng, disagree.size())];
  out.cluster.push_back(seed);
  scratch[seed] = 1;
  for (std::size_t head = 0; head < out.cluster.size(); ++head) {
    const Site v = out.cluster[head];
    for (auto ti : inc.terms_of(v)) {
      const auto& t = inst.terms[ti];
      if (t.arity != 2) continue;
      const Site w = t.sites[0] == v ? t.sites[1] : t.sites[0];
      if (!scratch[w] && a[w] != b[w]) {
        scratch[w] = 1;
        out.cluster.push_back(w);
      }
    }
  }

  const bool pairwise = !inst.has_arity(3);
  if (pairwise) {
    for (auto v : out.cluster) {
      a.flip(v);
      b.flip(v);
    }
    out.accepted = true;
    return out;
  }

  // Terms touching the cluster, each counted once.
  double before = 0.0;
  std::vector<std::uint32_t> touched;
  for (auto v : out.cluster)
    for (auto ti : inc.terms_of(v)) touched.push_back(ti);
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (auto ti : touched) before += term_value(inst.terms[ti], a) + term_value(inst.terms[ti], b);
  for (auto v : out.cluster) {
    a.flip(v);
    b.flip(v);
  }
  double after = 0.0;
  for (auto ti : touched) after += term_value(inst.terms[ti], a) + term_value(inst.terms[ti], b);
  out.delta = after - before;
  out.accepted = out.delta <= 0.0 || uniform01(rng) < std::exp(-beta * out.delta);
  if (!out.accepted) {
    for (auto v : out.cluster) {
      a.flip(v);
      b.flip(v);
    }
  }
  return out;
}

// Stand-alone form: draws its randomness from the given stream labels.
inline HoudayerOutcome houdayer_move(const Instance& inst, SpinConfiguration& a,
                                     SpinConfiguration& b, double beta,
                                     const StreamLabels& stream) {
  detail::check_size(inst, a);
  detail::check_size(inst, b);
  Xoshiro256 rng(stream.key(salt::kSolver));
  const Incidence inc(inst);
  std::vector<std::uint8_t> scratch;
  return houdayer_move(inst, inc, a, b, beta, rng, scratch);
}

struct Replica {
  SpinConfiguration config;
  double energy = 0.0;
  std::uint32_t id = 0;
  std::uint8_t last_end = 0;  // 0 none, 1 hottest end, 2 coldest end
};

// Parallel tempering over two independent replica sets on the same ladder.
// Each period: Metropolis sweeps (one attempted flip per site, random order),
// Houdayer moves between the two sets at every temperature, then neighbour
// swaps within each set. Tracks the lowest-energy configuration visited.
class ParallelTempering {
 public:
  ParallelTempering(const Instance& inst, const PtParams& params, const StreamLabels& stream)
      : inst_(inst), params_(params), betas_(beta_ladder(params)), inc_(inst),
        rng_(stream.key(salt::kSolver)), order_(inst.n_spins) {
    std::iota(order_.begin(), order_.end(), Site{0});
    for (auto& set : sets_) {
      set.resize(params.n_replicas);
      for (std::size_t k = 0; k < set.size(); ++k) {
        auto& r = set[k];
        r.id = static_cast<std::uint32_t>(k);
        r.last_end = k == 0 ? 1 : 0;
        std::vector<std::int8_t> s(inst.n_spins);
        for (auto& x : s) x = (rng_() >> 63) ? 1 : -1;
        r.config = SpinConfiguration(std::move(s));
        r.energy = energy(inst, r.config);
        track(r);
      }
    }
  }

  // One Metropolis sweep of every replica; every exchange_period-th call is
  // followed by the cluster and swap moves.
  void sweep() {
    for (auto& set : sets_)
      for (std::size_t k = 0; k < set.size(); ++k) {
        metropolis_sweep(set[k], betas_[k]);
        track(set[k]);
      }
    if (++sweeps_done_ % params_.exchange_period == 0) {
      if (params_.houdayer) cluster_moves();
      swap_moves();
    }
  }

  void run(std::uint64_t sweeps) {
    for (std::uint64_t i = 0; i < sweeps; ++i) sweep();
  }

  const std::vector<double>& betas() const { return betas_; }
  // Replica currently at temperature index k of replica set `set` (0 or 1).
  const Replica& replica(std::size_t set, std::size_t k) const { return sets_[set][k]; }

  SolveResult result() const {
    SolveResult r;
    r.best_config = best_.config;
    r.best_energy = energy(inst_, best_.config);
    r.exact = false;
    r.diagnostics["sweeps"] = static_cast<double>(sweeps_done_);
    r.diagnostics["swap_acceptance"] = ratio(swap_accepts_, swap_tries_);
    r.diagnostics["houdayer_acceptance"] = ratio(cluster_accepts_, cluster_tries_);
    r.diagnostics["round_trips"] = static_cast<double>(round_trips_);
    return r;
  }

 private:
  static double ratio(std::uint64_t a, std::uint64_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  }

  void track(const Replica& r) {
    if (r.energy < best_.energy - 1e-12) best_ = r;
  }

  void metropolis_sweep(Replica& r, double beta) {
    shuffle(rng_, order_);
    for (Site i : order_) {
      const double d = flip_delta(inst_, inc_, r.config, i);
      if (d <= 0.0 || uniform01(rng_) < std::exp(-beta * d)) {
        r.config.flip(i);
        r.energy += d;
      }
    }
  }

  void cluster_moves() {
    for (std::size_t k = 0; k < betas_.size(); ++k) {
      auto& ra = sets_[0][k];
      auto& rb = sets_[1][k];
      auto mv = houdayer_move(inst_, inc_, ra.config, rb.config, betas_[k], rng_, scratch_);
      if (mv.cluster.empty()) continue;
      ++cluster_tries_;
      if (!mv.accepted) continue;
      ++cluster_accepts_;
      ra.energy = energy(inst_, ra.config);
      rb.energy = energy(inst_, rb.config);
      track(ra);
      track(rb);
    }
  }

  void swap_moves() {
    for (auto& set : sets_)
      for (std::size_t k = 0; k + 1 < set.size(); ++k) {
        ++swap_tries_;
        const double x = (betas_[k + 1] - betas_[k]) * (set[k + 1].energy - set[k].energy);
        if (x >= 0.0 || uniform01(rng_) < std::exp(x)) {
          std::swap(set[k], set[k + 1]);
          ++swap_accepts_;
        }
      }
    // A round trip is a hottest -> coldest -> hottest passage of one replica.
    for (auto& set : sets_) {
      auto& hot = set.front();
      if (hot.last_end == 2) ++round_trips_;
      hot.last_end = 1;
      auto& cold = set.back();
      if (cold.last_end == 1) cold.last_end = 2;
    }
  }

  const Instance& inst_;
  PtParams params_;
  std::vector<double> betas_;
  Incidence inc_;
  Xoshiro256 rng_;
  std::vector<Site> order_;
  std::vector<std::uint8_t> scratch_;
  std::array<std::vector<Replica>, 2> sets_;
  Replica best_{SpinConfiguration{}, std::numeric_limits<double>::infinity(), 0, 0};
  std::uint64_t sweeps_done_ = 0;
  std::uint64_t round_trips_ = 0;
  std::uint64_t swap_tries_ = 0, swap_accepts_ = 0, cluster_tries_ = 0, cluster_accepts_ = 0;
};

// Lowest-energy state found by parallel tempering; never flagged exact.
inline SolveResult pt_solve(const Instance& inst, const PtParams& params,
                            const StreamLabels& stream) {
  ParallelTempering pt(inst, params, stream);
  pt.run(params.sweeps);
  return pt.result();
}

}  // namespace isingchaos
