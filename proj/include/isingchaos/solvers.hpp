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
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "isingchaos/errors.hpp"
#include "isingchaos/model.hpp"

namespace isingchaos {

struct SolveResult {
  SpinConfiguration best_config;
  double best_energy = std::numeric_limits<double>::infinity();
  bool exact = false;
  std::map<std::string, double> diagnostics;
};

// Flips below this magnitude count as zero energy change.
inline constexpr double kEnergyTolerance = 1e-9;

// Steepest-descent post-processing: ascending site order, a flip is kept only
// if it strictly lowers the energy. Stops early after a sweep with no flip.
inline SpinConfiguration steepest_descent(const Instance& inst, SpinConfiguration start,
                                          int sweeps) {
  detail::check_size(inst, start);
  const Incidence inc(inst);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool changed = false;
    for (Site i = 0; i < inst.n_spins; ++i) {
      if (flip_delta(inst, inc, start, i) < -1e-12) {
        start.flip(i);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return start;
}

inline bool is_one_flip_stable(const Instance& inst, const SpinConfiguration& c) {
  const Incidence inc(inst);
  for (Site i = 0; i < inst.n_spins; ++i)
    if (flip_delta(inst, inc, c, i) < -1e-12) return false;
  return true;
}

struct ExhaustiveResult {
  SolveResult result;
  std::vector<SpinConfiguration> ground_states;  // every minimizer, sorted
};

inline constexpr std::size_t kExhaustiveMaxSpins = 30;

// Full enumeration in Gray-code order with incremental energy updates.
inline ExhaustiveResult exhaustive_solve(const Instance& inst) {
  const std::size_t n = inst.n_spins;
  if (n > kExhaustiveMaxSpins)
    throw SolverGuardError("exhaustive_solve: " + std::to_string(n) + " spins exceeds limit of " +
                           std::to_string(kExhaustiveMaxSpins));
  const Incidence inc(inst);
  std::vector<std::int8_t> s(n, 1);
  std::uint64_t mask = 0;  // bit i set <=> spin i is -1
  double e = 0.0;
  for (const auto& t : inst.terms) e += t.coupling;

  double best = e;
  std::vector<std::uint64_t> candidates{0};
  const std::uint64_t total = n == 0 ? 1 : (std::uint64_t{1} << n);
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto i = static_cast<Site>(std::countr_zero(k));
    e += flip_delta(inst, inc, s, i);
    s[i] = static_cast<std::int8_t>(-s[i]);
    mask ^= std::uint64_t{1} << i;
    if (e < best - kEnergyTolerance) {
      best = e;
      candidates.clear();
      candidates.push_back(mask);
    } else if (e <= best + kEnergyTolerance) {
      best = std::min(best, e);
      candidates.push_back(mask);
    }
  }

  // Settle ties on freshly computed energies rather than the running sum.
  std::vector<std::pair<double, SpinConfiguration>> exact;
  for (auto m : candidates) {
    std::vector<std::int8_t> cfg(n);
    for (std::size_t i = 0; i < n; ++i) cfg[i] = (m >> i) & 1 ? -1 : 1;
    SpinConfiguration c(std::move(cfg));
    exact.emplace_back(energy(inst, c), std::move(c));
  }
  double emin = std::numeric_limits<double>::infinity();
  for (const auto& [en, c] : exact) emin = std::min(emin, en);

  ExhaustiveResult out;
  for (auto& [en, c] : exact)
    if (en <= emin + kEnergyTolerance) out.ground_states.push_back(std::move(c));
  std::sort(out.ground_states.begin(), out.ground_states.end(), std::greater<>{});
  out.result.best_config = out.ground_states.front();
  out.result.best_energy = energy(inst, out.result.best_config);
  out.result.exact = true;
  out.result.diagnostics["configurations"] = static_cast<double>(total);
  out.result.diagnostics["ground_states"] = static_cast<double>(out.ground_states.size());
  return out;
}

inline constexpr std::size_t kGridDpMaxWidth = 16;

// Exact ground state of a square grid by raster-order dynamic programming.
// The state is the window of the last L spins; adding site k couples it to
// the window's oldest spin (k - L, above) and newest spin (k - 1, left).
inline SolveResult grid_dp_solve(const Instance& inst) {
  if (inst.family != Family::SquareGrid) throw ValidationError("grid_dp_solve needs a square grid");
  const auto L_meta = inst.meta_int("L");
  if (!L_meta || *L_meta < 2) throw ValidationError("grid instance lacks side length L");
  const auto W = static_cast<std::size_t>(*L_meta);
  if (W > kGridDpMaxWidth)
    throw SolverGuardError("grid_dp_solve: width " + std::to_string(W) + " exceeds " +
                           std::to_string(kGridDpMaxWidth));
  const std::size_t n = W * W;
  if (inst.n_spins != n) throw ValidationError("grid instance size does not match L*L");

  std::vector<double> field(n, 0.0), right(n, 0.0), down(n, 0.0);
  for (const auto& t : inst.terms) {
    if (t.arity == 1) {
      field[t.sites[0]] += t.coupling;
    } else if (t.arity == 2) {
      const Site a = t.sites[0], b = t.sites[1];
      if (b == a + 1 && (a % W) + 1 < W) right[a] += t.coupling;
      else if (b == a + W) down[a] += t.coupling;
      else throw ValidationError("grid_dp_solve: term is not a nearest-neighbour edge");
    } else {
      throw ValidationError("grid_dp_solve: 3-body terms unsupported");
    }
  }

  const std::size_t states = std::size_t{1} << W;
  const std::size_t mask = states - 1;
  const std::size_t top = W - 1;
  auto spin = [](std::size_t bit) { return bit ? -1.0 : 1.0; };

  std::vector<double> dp(states, 0.0), next(states);
  std::vector<std::vector<std::uint8_t>> choice(n, std::vector<std::uint8_t>(states));
  for (std::size_t k = 0; k < n; ++k) {
    const bool has_up = k >= W;
    const bool has_left = k % W != 0;
    for (std::size_t sn = 0; sn < states; ++sn) {
      const double x = spin(sn >> top);
      const double left = spin((sn >> (top - 1)) & 1);
      double local = field[k] * x;
      if (has_left) local += right[k - 1] * x * left;
      double best = std::numeric_limits<double>::infinity();
      std::uint8_t arg = 0;
      for (std::uint8_t d = 0; d < 2; ++d) {
        const std::size_t prev = ((sn << 1) & mask) | d;
        double c = dp[prev] + local;
        if (has_up) c += down[k - W] * x * spin(d);
        if (c < best) {
          best = c;
          arg = d;
        }
      }
      next[sn] = best;
      choice[k][sn] = arg;
    }
    dp.swap(next);
  }

  std::size_t state = static_cast<std::size_t>(std::min_element(dp.begin(), dp.end()) - dp.begin());
  std::vector<std::int8_t> s(n);
  for (std::size_t k = n; k-- > 0;) {
    s[k] = static_cast<std::int8_t>(spin(state >> top));
    state = ((state << 1) & mask) | choice[k][state];
  }
  SolveResult r;
  r.best_config = SpinConfiguration(std::move(s));
  r.best_energy = energy(inst, r.best_config);
  r.exact = true;
  r.diagnostics["states"] = static_cast<double>(states);
  return r;
}

// Exact ground state of an open chain (nearest-neighbour terms and fields)
// by a two-state Viterbi pass. Without fields this reduces to the per-bond
// sign test.
inline SolveResult chain_dp_solve(const Instance& inst) {
  const std::size_t n = inst.n_spins;
  if (n == 0) throw ValidationError("empty chain");
  std::vector<double> field(n, 0.0), bond(n, 0.0);
  for (const auto& t : inst.terms) {
    if (t.arity == 1) field[t.sites[0]] += t.coupling;
    else if (t.arity == 2 && t.sites[1] == t.sites[0] + 1) bond[t.sites[0]] += t.coupling;
    else throw ValidationError("chain_dp_solve: term is not a chain bond or field");
  }
  auto spin = [](int b) { return b ? -1.0 : 1.0; };
  std::array<double, 2> cost{field[0], -field[0]};
  std::vector<std::array<std::uint8_t, 2>> from(n);
  for (std::size_t k = 1; k < n; ++k) {
    std::array<double, 2> nc{};
    for (int x = 0; x < 2; ++x) {
      const double a = cost[0] + bond[k - 1] * spin(0) * spin(x);
      const double b = cost[1] + bond[k - 1] * spin(1) * spin(x);
      from[k][x] = b < a ? 1 : 0;
      nc[x] = std::min(a, b) + field[k] * spin(x);
    }
    cost = nc;
  }
  int state = cost[1] < cost[0] ? 1 : 0;
  std::vector<std::int8_t> s(n);
  for (std::size_t k = n; k-- > 0;) {
    s[k] = static_cast<std::int8_t>(spin(state));
    if (k > 0) state = from[k][state];
  }
  SolveResult r;
  r.best_config = SpinConfiguration(std::move(s));
  r.best_energy = energy(inst, r.best_config);
  r.exact = true;
  return r;
}

inline constexpr std::size_t kEliminationMaxWidth = 24;

namespace detail {

struct Factor {
  std::vector<Site> scope;    // sorted
  std::vector<double> table;  // bit b of the index <=> scope[b] is -1
};

// Greedy min-fill ordering over the primal graph of the instance.
inline std::vector<Site> min_fill_order(const Instance& inst) {
  const std::size_t n = inst.n_spins;
  std::vector<std::set<Site>> adj(n);
  for (const auto& t : inst.terms)
    for (auto a : t.site_list())
      for (auto b : t.site_list())
        if (a != b) adj[a].insert(b);
  std::vector<bool> done(n, false);
  std::vector<Site> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    Site best = 0;
    std::size_t best_fill = std::numeric_limits<std::size_t>::max(), best_deg = 0;
    for (Site v = 0; v < n; ++v) {
      if (done[v]) continue;
      std::size_t fill = 0;
      for (auto it = adj[v].begin(); it != adj[v].end() && fill < best_fill; ++it)
        for (auto jt = std::next(it); jt != adj[v].end(); ++jt)
          if (!adj[*it].contains(*jt)) ++fill;
      if (fill < best_fill || (fill == best_fill && adj[v].size() < best_deg)) {
        best = v;
        best_fill = fill;
        best_deg = adj[v].size();
      }
    }
    done[best] = true;
    order.push_back(best);
    for (auto a : adj[best])
      for (auto b : adj[best])
        if (a != b) adj[a].insert(b);
    for (auto a : adj[best]) adj[a].erase(best);
    adj[best].clear();
  }
  return order;
}

}  // namespace detail

// Exact ground state by bucket (variable) elimination in min-fill order.
// Cost is exponential only in the induced width, which is guarded.
inline SolveResult elimination_solve(const Instance& inst,
                                     std::size_t max_width = kEliminationMaxWidth) {
  using detail::Factor;
  const std::size_t n = inst.n_spins;
  const auto order = detail::min_fill_order(inst);
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;

  std::vector<std::vector<Factor>> bucket(n);
  auto place = [&](Factor&& f, double& constant) {
    if (f.scope.empty()) {
      constant += f.table[0];
      return;
    }
    Site first = f.scope[0];
    for (auto v : f.scope)
      if (position[v] < position[first]) first = v;
    bucket[position[first]].push_back(std::move(f));
  };

  double constant = 0.0;
  for (const auto& t : inst.terms) {
    Factor f;
    f.scope.assign(t.sites.begin(), t.sites.begin() + t.arity);
    f.table.resize(std::size_t{1} << t.arity);
    for (std::size_t idx = 0; idx < f.table.size(); ++idx)
      f.table[idx] = t.coupling * ((std::popcount(idx) & 1) ? -1.0 : 1.0);
    place(std::move(f), constant);
  }

  struct Step {
    std::vector<Site> scope;            // remaining variables the choice depends on
    std::vector<std::uint8_t> argmin;   // value (bit) of the eliminated variable
  };
  std::vector<Step> steps(n);
  std::size_t width = 0;

  for (std::size_t p = 0; p < n; ++p) {
    const Site v = order[p];
    std::vector<Site> scope;
    for (const auto& f : bucket[p])
      for (auto s : f.scope)
        if (s != v) scope.push_back(s);
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    width = std::max(width, scope.size());
    if (scope.size() > max_width)
      throw SolverGuardError("elimination_solve: induced width " + std::to_string(scope.size()) +
                             " exceeds " + std::to_string(max_width));

    // For every factor, the bit positions of its scope inside (scope, v),
    // where v occupies bit scope.size().
    const std::size_t k = scope.size();
    std::vector<std::vector<std::size_t>> pos(bucket[p].size());
    for (std::size_t fi = 0; fi < bucket[p].size(); ++fi)
      for (auto s : bucket[p][fi].scope)
        pos[fi].push_back(s == v ? k
                                 : static_cast<std::size_t>(
                                       std::lower_bound(scope.begin(), scope.end(), s) -
                                       scope.begin()));

    Factor out;
    out.scope = scope;
    out.table.assign(std::size_t{1} << k, 0.0);
    Step& st = steps[v];
    st.scope = scope;
    st.argmin.assign(out.table.size(), 0);
    for (std::size_t a = 0; a < out.table.size(); ++a) {
      double val[2] = {0.0, 0.0};
      for (std::size_t x = 0; x < 2; ++x) {
        const std::size_t full = a | (x << k);
        for (std::size_t fi = 0; fi < bucket[p].size(); ++fi) {
          std::size_t idx = 0;
          for (std::size_t b = 0; b < pos[fi].size(); ++b) idx |= ((full >> pos[fi][b]) & 1) << b;
          val[x] += bucket[p][fi].table[idx];
        }
      }
      const bool pick_down = val[1] < val[0];
      out.table[a] = pick_down ? val[1] : val[0];
      st.argmin[a] = pick_down ? 1 : 0;
    }
    bucket[p].clear();
    place(std::move(out), constant);
  }

  std::vector<std::int8_t> s(n, 1);
  for (std::size_t p = n; p-- > 0;) {
    const Site v = order[p];
    const Step& st = steps[v];
    std::size_t a = 0;
    for (std::size_t b = 0; b < st.scope.size(); ++b) a |= std::size_t{s[st.scope[b]] < 0} << b;
    s[v] = st.argmin[a] ? -1 : 1;
  }
  SolveResult r;
  r.best_config = SpinConfiguration(std::move(s));
  r.best_energy = energy(inst, r.best_config);
  r.exact = true;
  r.diagnostics["induced_width"] = static_cast<double>(width);
  r.diagnostics["bound"] = constant;
  return r;
}

}  // namespace isingchaos
