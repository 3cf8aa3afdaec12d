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
#include <cstdint>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "isingchaos/errors.hpp"
#include "isingchaos/model.hpp"
#include "isingchaos/random.hpp"
#include "isingchaos/solvers.hpp"

namespace isingchaos {

inline Instance gen_chain(std::size_t n, double J, bool antiferromagnetic) {
  if (n < 2) throw ValidationError("chain needs at least 2 spins");
  if (!(J > 0.0) || !std::isfinite(J)) throw ValidationError("chain coupling must be positive");
  Instance inst;
  inst.family = Family::Chain;
  inst.n_spins = n;
  const double c = antiferromagnetic ? J : -J;
  for (Site i = 0; i + 1 < n; ++i) inst.terms.push_back(InteractionTerm::pair(i, i + 1, c));
  inst.metadata["J"] = std::to_string(J);
  inst.metadata["antiferro"] = antiferromagnetic ? "1" : "0";

  std::vector<std::int8_t> s(n, 1);
  if (antiferromagnetic)
    for (std::size_t i = 1; i < n; i += 2) s[i] = -1;
  SpinConfiguration gs(std::move(s));
  inst.known_ground_states = {gs, gs.flipped()};
  return inst;
}

// Open-boundary L x L grid, site (r, c) -> r * L + c, couplings uniform on {-1, +1}.
inline Instance gen_square_grid(std::size_t L, std::uint64_t seed) {
  if (L < 2) throw ValidationError("grid side must be at least 2");
  Xoshiro256 rng(derive_key({salt::kInstance, seed}));
  Instance inst;
  inst.family = Family::SquareGrid;
  inst.n_spins = L * L;
  inst.metadata["L"] = std::to_string(L);
  auto draw = [&] { return (rng() >> 63) ? 1.0 : -1.0; };
  for (Site r = 0; r < L; ++r) {
    for (Site c = 0; c < L; ++c) {
      const Site k = r * static_cast<Site>(L) + c;
      if (c + 1 < L) inst.terms.push_back(InteractionTerm::pair(k, k + 1, draw()));
      if (r + 1 < L) inst.terms.push_back(InteractionTerm::pair(k, k + static_cast<Site>(L), draw()));
    }
  }
  return inst;
}

// Up to this size every ground state of a XORSAT instance is enumerated.
inline constexpr std::size_t kXorsatEnumerateMax = 24;

// 3-regular 3-uniform XORSAT: n antiferromagnetic 3-spin clauses, every spin
// in exactly three of them. Configuration-model pairing of 3n stubs with
// rejection of repeated variables and duplicate clauses. All-down satisfies
// every clause; other satisfying states are listed after it when n is small
// enough to enumerate.
inline Instance gen_xorsat(std::size_t n, std::uint64_t seed) {
  if (n < 6 || n % 2 != 0) throw ValidationError("xorsat size must be even and at least 6");
  Xoshiro256 rng(derive_key({salt::kInstance, seed, 3}));
  constexpr int kMaxPairings = 1000;

  std::vector<Site> stubs(3 * n);
  for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Site>(i / 3);

  for (int attempt = 0; attempt < kMaxPairings; ++attempt) {
    shuffle(rng, stubs);
    std::set<std::array<Site, 3>> clauses;
    bool ok = true;
    for (std::size_t c = 0; c < n && ok; ++c) {
      std::array<Site, 3> cl{stubs[3 * c], stubs[3 * c + 1], stubs[3 * c + 2]};
      std::sort(cl.begin(), cl.end());
      ok = cl[0] != cl[1] && cl[1] != cl[2] && clauses.insert(cl).second;
    }
    if (!ok) continue;

    Instance inst;
    inst.family = Family::Xorsat3;
    inst.n_spins = n;
    for (const auto& cl : clauses)
      inst.terms.push_back(InteractionTerm::triple(cl[0], cl[1], cl[2], 1.0));
    inst.metadata["pairings"] = std::to_string(attempt + 1);
    inst.known_ground_states = {SpinConfiguration::all_down(n)};
    if (n <= kXorsatEnumerateMax) {
      for (auto& g : exhaustive_solve(inst).ground_states)
        if (g != inst.known_ground_states.front()) inst.known_ground_states.push_back(std::move(g));
    }
    return inst;
  }
  throw GenerationError("xorsat: no simple 3-regular pairing after " +
                        std::to_string(kMaxPairings) + " attempts");
}

struct Edge {
  Site u = 0;
  Site v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Site a, Site b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// L x L grid of K_{4,4} unit cells. Node (row, col, side, k) has index
// 8 * (row * L + col) + 4 * side + k; side-0 nodes couple vertically to the
// cell below, side-1 nodes horizontally to the cell on the right.
class ChimeraGraph {
 public:
  explicit ChimeraGraph(std::size_t L) : L_(L), adj_(8 * L * L) {
    if (L < 1) throw ValidationError("chimera side must be positive");
    auto node = [L](std::size_t r, std::size_t c, std::size_t side, std::size_t k) {
      return static_cast<Site>(8 * (r * L + c) + 4 * side + k);
    };
    for (std::size_t r = 0; r < L; ++r)
      for (std::size_t c = 0; c < L; ++c)
        for (std::size_t k = 0; k < 4; ++k) {
          for (std::size_t k2 = 0; k2 < 4; ++k2) add(node(r, c, 0, k), node(r, c, 1, k2));
          if (r + 1 < L) add(node(r, c, 0, k), node(r + 1, c, 0, k));
          if (c + 1 < L) add(node(r, c, 1, k), node(r, c + 1, 1, k));
        }
  }

  std::size_t side() const { return L_; }
  std::size_t num_nodes() const { return adj_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Site>& neighbors(Site v) const { return adj_[v]; }
  static std::size_t cell_of(Site v) { return v / 8; }

  bool adjacent(Site a, Site b) const { return index_.contains(key(make_edge(a, b))); }

  std::size_t edge_index(Edge e) const {
    auto it = index_.find(key(e));
    if (it == index_.end()) throw ValidationError("not a chimera edge");
    return it->second;
  }

 private:
  std::uint64_t key(Edge e) const { return static_cast<std::uint64_t>(e.u) * adj_.size() + e.v; }
  void add(Site a, Site b) {
    const Edge e = make_edge(a, b);
    index_.emplace(key(e), edges_.size());
    edges_.push_back(e);
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  std::size_t L_;
  std::vector<std::vector<Site>> adj_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

using Cycle = std::array<Edge, 6>;

// Two 6-cycles sharing exactly one edge.
struct LoopPair {
  Cycle first{};
  Cycle second{};
  Edge shared{};

  // The 11 distinct edges; the shared edge comes first.
  std::vector<Edge> distinct_edges() const {
    std::vector<Edge> out{shared};
    for (const auto& e : first)
      if (e != shared) out.push_back(e);
    for (const auto& e : second)
      if (e != shared) out.push_back(e);
    return out;
  }
};

namespace detail {

// Self-avoiding walk of four steps from `to`, closed back onto `from`.
// Accepts only cycles that use at least one inter-cell edge.
template <class Rng>
std::optional<Cycle> try_cycle_through(const ChimeraGraph& g, Site from, Site to, Rng& rng) {
  std::array<Site, 6> path{from, to, 0, 0, 0, 0};
  for (std::size_t step = 2; step < 6; ++step) {
    std::array<Site, 8> options{};
    std::size_t count = 0;
    for (Site w : g.neighbors(path[step - 1]))
      if (std::find(path.begin(), path.begin() + step, w) == path.begin() + step)
        options[count++] = w;
    if (count == 0) return std::nullopt;
    path[step] = options[uniform_index(rng, count)];
  }
  if (!g.adjacent(path[5], from)) return std::nullopt;
  Cycle cyc;
  bool leaves_cell = false;
  for (std::size_t i = 0; i < 6; ++i) {
    const Site a = path[i], b = path[(i + 1) % 6];
    cyc[i] = make_edge(a, b);
    leaves_cell |= ChimeraGraph::cell_of(a) != ChimeraGraph::cell_of(b);
  }
  if (!leaves_cell) return std::nullopt;
  return cyc;
}

inline bool cycles_share_only(const Cycle& a, const Cycle& b, Edge shared) {
  std::size_t common = 0;
  for (const auto& e : a)
    if (std::find(b.begin(), b.end(), e) != b.end()) {
      if (e != shared) return false;
      ++common;
    }
  return common == 1;
}

}  // namespace detail

// Random-walk loop sampler: a uniformly random start edge, rejection until a
// closed length-6 walk leaves its unit cell; the second loop is sampled
// through a shared edge picked uniformly from the first.
template <class Rng>
LoopPair sample_loop_pair(const ChimeraGraph& g, Rng& rng) {
  constexpr int kFirstLoopAttempts = 1'000'000;
  constexpr int kSecondLoopAttempts = 10'000;
  constexpr int kSharedEdgeRetries = 100;

  auto orient = [&rng](Edge e) { return (rng() >> 63) ? std::pair{e.u, e.v} : std::pair{e.v, e.u}; };

  for (int outer = 0; outer < kSharedEdgeRetries; ++outer) {
    std::optional<Cycle> first;
    for (int a = 0; a < kFirstLoopAttempts && !first; ++a) {
      const Edge start = g.edges()[uniform_index(rng, g.edges().size())];
      const auto [x, y] = orient(start);
      first = detail::try_cycle_through(g, x, y, rng);
    }
    if (!first) break;

    for (int shared_try = 0; shared_try < 6; ++shared_try) {
      const Edge shared = (*first)[uniform_index(rng, 6)];
      for (int a = 0; a < kSecondLoopAttempts; ++a) {
        const auto [x, y] = orient(shared);
        auto second = detail::try_cycle_through(g, x, y, rng);
        if (second && detail::cycles_share_only(*first, *second, shared))
          return LoopPair{*first, *second, shared};
      }
    }
  }
  throw GenerationError("chimera: unable to sample a loop pair");
}

// Number of loop pairs for an L x L instance: ceil(0.13 * 8 L^2), evaluated
// in integers.
constexpr std::size_t chimera_loop_pair_count(std::size_t L) {
  return (104 * L * L + 99) / 100;
}

namespace detail {

inline bool connected(std::size_t n, const std::vector<Edge>& edges) {
  if (n == 0) return true;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& e : edges) {
    auto a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

}  // namespace detail

// Planted frustrated-loop instance on the L x L Chimera graph. Each loop pair
// adds +1 on its shared edge and -1 on its other ten edges; a pair is skipped
// if it would push any coupler beyond magnitude 3. Couplings are divided by 3
// so magnitudes lie in {1/3, 2/3, 1}. Only spins with a nonzero coupler are
// kept; metadata "labels" maps instance sites back to graph nodes.
inline Instance gen_planted_chimera(std::size_t L, std::uint64_t seed) {
  if (L < 2) throw ValidationError("chimera side must be at least 2");
  const ChimeraGraph g(L);
  const std::size_t pairs_needed = chimera_loop_pair_count(L);
  constexpr int kInstanceAttempts = 1000;

  for (int attempt = 0; attempt < kInstanceAttempts; ++attempt) {
    Xoshiro256 rng(derive_key({salt::kInstance, seed, 8, static_cast<std::uint64_t>(attempt)}));
    std::vector<int> acc(g.edges().size(), 0);
    std::size_t placed = 0, rejected = 0;
    const std::size_t max_rejections = 1000 * pairs_needed;
    while (placed < pairs_needed) {
      const LoopPair lp = sample_loop_pair(g, rng);
      const auto edges = lp.distinct_edges();
      bool fits = true;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const int next = acc[g.edge_index(edges[i])] + (i == 0 ? 1 : -1);
        fits &= std::abs(next) <= 3;
      }
      if (!fits) {
        if (++rejected > max_rejections)
          throw GenerationError("chimera: coupler cap rejected too many loop pairs");
        continue;
      }
      for (std::size_t i = 0; i < edges.size(); ++i) acc[g.edge_index(edges[i])] += i == 0 ? 1 : -1;
      ++placed;
    }

    std::vector<Site> relabel(g.num_nodes(), ~Site{0});
    std::vector<Site> labels;
    for (std::size_t e = 0; e < acc.size(); ++e) {
      if (acc[e] == 0) continue;
      for (Site v : {g.edges()[e].u, g.edges()[e].v})
        if (relabel[v] == ~Site{0}) relabel[v] = 1;
    }
    for (Site v = 0; v < g.num_nodes(); ++v)
      if (relabel[v] != ~Site{0}) {
        relabel[v] = static_cast<Site>(labels.size());
        labels.push_back(v);
      }

    Instance inst;
    inst.family = Family::Chimera;
    inst.n_spins = labels.size();
    std::vector<Edge> active;
    for (std::size_t e = 0; e < acc.size(); ++e) {
      if (acc[e] == 0) continue;
      const Site a = relabel[g.edges()[e].u], b = relabel[g.edges()[e].v];
      inst.terms.push_back(InteractionTerm::pair(a, b, acc[e] / 3.0));
      active.push_back(make_edge(a, b));
    }
    // A disconnected instance would have more than the two planted ground states.
    if (!detail::connected(inst.n_spins, active)) continue;

    std::sort(inst.terms.begin(), inst.terms.end(), [](const auto& x, const auto& y) {
      return x.sites < y.sites;
    });
    std::string label_text;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) label_text += ',';
      label_text += std::to_string(labels[i]);
    }
    inst.metadata["L"] = std::to_string(L);
    inst.metadata["loop_pairs"] = std::to_string(pairs_needed);
    inst.metadata["labels"] = label_text;
    inst.known_ground_states = {SpinConfiguration::all_up(inst.n_spins),
                                SpinConfiguration::all_down(inst.n_spins)};
    return inst;
  }
  throw GenerationError("chimera: no connected instance after " +
                        std::to_string(kInstanceAttempts) + " attempts");
}

}  // namespace isingchaos
