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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isingchaos/errors.hpp"

namespace isingchaos {

enum class Family { Chain, SquareGrid, Chimera, Xorsat3 };

inline std::string_view family_tag(Family f) {
  switch (f) {
    case Family::Chain: return "chain";
    case Family::SquareGrid: return "square_grid";
    case Family::Chimera: return "chimera";
    case Family::Xorsat3: return "xorsat3";
  }
  return "unknown";
}

inline Family parse_family(std::string_view tag) {
  if (tag == "chain") return Family::Chain;
  if (tag == "square_grid" || tag == "grid") return Family::SquareGrid;
  if (tag == "chimera") return Family::Chimera;
  if (tag == "xorsat3" || tag == "xorsat") return Family::Xorsat3;
  throw ValidationError("unknown family '" + std::string(tag) + "'");
}

using Site = std::uint32_t;

// A product of 1 to 3 spins with a real coupling. Sites are kept sorted so
// that two terms over the same site set compare equal.
struct InteractionTerm {
  std::array<Site, 3> sites{};
  std::uint8_t arity = 0;
  double coupling = 0.0;

  static InteractionTerm field(Site i, double h) { return {{i, 0, 0}, 1, h}; }
  static InteractionTerm pair(Site i, Site j, double J) {
    if (j < i) std::swap(i, j);
    return {{i, j, 0}, 2, J};
  }
  static InteractionTerm triple(Site i, Site j, Site k, double J) {
    std::array<Site, 3> s{i, j, k};
    std::sort(s.begin(), s.end());
    return {s, 3, J};
  }

  std::span<const Site> site_list() const { return {sites.data(), arity}; }

  bool same_sites(const InteractionTerm& o) const {
    return arity == o.arity && std::equal(sites.begin(), sites.begin() + arity, o.sites.begin());
  }

  friend bool operator==(const InteractionTerm&, const InteractionTerm&) = default;
};

// An assignment of +1/-1 to every site.
class SpinConfiguration {
 public:
  SpinConfiguration() = default;

  explicit SpinConfiguration(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    for (auto s : spins_)
      if (s != 1 && s != -1) throw ValidationError("spin values must be +1 or -1");
  }

  static SpinConfiguration uniform(std::size_t n, std::int8_t value) {
    return SpinConfiguration(std::vector<std::int8_t>(n, value));
  }
  static SpinConfiguration all_up(std::size_t n) { return uniform(n, 1); }
  static SpinConfiguration all_down(std::size_t n) { return uniform(n, -1); }

  // "+-+" notation, also used by the instance file format.
  static SpinConfiguration parse(std::string_view text) {
    std::vector<std::int8_t> s;
    s.reserve(text.size());
    for (char c : text) {
      if (c == '+') s.push_back(1);
      else if (c == '-') s.push_back(-1);
      else throw ValidationError("bad spin character in '" + std::string(text) + "'");
    }
    return SpinConfiguration(std::move(s));
  }

  std::string to_string() const {
    std::string out(spins_.size(), '+');
    for (std::size_t i = 0; i < spins_.size(); ++i)
      if (spins_[i] < 0) out[i] = '-';
    return out;
  }

  std::size_t size() const { return spins_.size(); }
  std::int8_t operator[](std::size_t i) const { return spins_[i]; }
  void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
  void set(std::size_t i, std::int8_t v) {
    if (v != 1 && v != -1) throw ValidationError("spin values must be +1 or -1");
    spins_[i] = v;
  }

  SpinConfiguration flipped() const {
    SpinConfiguration out = *this;
    for (auto& s : out.spins_) s = static_cast<std::int8_t>(-s);
    return out;
  }

  std::span<const std::int8_t> spins() const { return spins_; }

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;
  friend auto operator<=>(const SpinConfiguration&, const SpinConfiguration&) = default;

 private:
  std::vector<std::int8_t> spins_;
};

inline std::size_t hamming_distance(const SpinConfiguration& a, const SpinConfiguration& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

struct Instance {
  std::size_t n_spins = 0;
  std::vector<InteractionTerm> terms;
  Family family = Family::Chain;
  // Family-specific parameters (grid side L, loop count, chain J, site labels).
  std::map<std::string, std::string> metadata;
  std::vector<SpinConfiguration> known_ground_states;

  std::size_t num_interactions() const {
    return static_cast<std::size_t>(
        std::count_if(terms.begin(), terms.end(), [](const auto& t) { return t.arity >= 2; }));
  }

  bool has_arity(std::uint8_t a) const {
    return std::any_of(terms.begin(), terms.end(), [a](const auto& t) { return t.arity == a; });
  }

  std::optional<long long> meta_int(const std::string& key) const {
    auto it = metadata.find(key);
    if (it == metadata.end()) return std::nullopt;
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      throw ValidationError("metadata '" + key + "' is not an integer");
    }
  }

  // Throws ValidationError on the first broken structural invariant.
  void validate() const {
    std::set<std::array<Site, 4>> seen;
    for (const auto& t : terms) {
      if (t.arity < 1 || t.arity > 3) throw ValidationError("term arity must be 1, 2 or 3");
      if (!std::isfinite(t.coupling)) throw ValidationError("coupling is not finite");
      for (std::size_t k = 0; k < t.arity; ++k) {
        if (t.sites[k] >= n_spins) throw ValidationError("site index out of range");
        if (k > 0 && t.sites[k] <= t.sites[k - 1])
          throw ValidationError("term sites must be distinct and sorted");
      }
      std::array<Site, 4> key{t.arity, 0, 0, 0};
      std::copy(t.sites.begin(), t.sites.begin() + t.arity, key.begin() + 1);
      if (!seen.insert(key).second) throw ValidationError("duplicate term site set");
    }
    for (const auto& gs : known_ground_states)
      if (gs.size() != n_spins) throw ValidationError("ground state length mismatch");
  }
};

// Nominal problem size used for grouping results: 8L^2 for Chimera, L^2 for
// square grids, the spin count otherwise.
inline std::uint64_t nominal_size(const Instance& inst) {
  if (inst.family == Family::Chimera) {
    if (auto L = inst.meta_int("L")) return 8ULL * static_cast<std::uint64_t>(*L * *L);
  } else if (inst.family == Family::SquareGrid) {
    if (auto L = inst.meta_int("L")) return static_cast<std::uint64_t>(*L * *L);
  }
  return inst.n_spins;
}

// Site -> incident term indices, stored compressed.
class Incidence {
 public:
  explicit Incidence(const Instance& inst) : offsets_(inst.n_spins + 1, 0) {
    for (const auto& t : inst.terms)
      for (auto s : t.site_list()) ++offsets_[s + 1];
    for (std::size_t i = 0; i < inst.n_spins; ++i) offsets_[i + 1] += offsets_[i];
    index_.resize(offsets_.back());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t ti = 0; ti < inst.terms.size(); ++ti)
      for (auto s : inst.terms[ti].site_list()) index_[fill[s]++] = ti;
  }

  std::span<const std::uint32_t> terms_of(Site s) const {
    return {index_.data() + offsets_[s], offsets_[s + 1] - offsets_[s]};
  }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> index_;
};

namespace detail {

inline void check_size(const Instance& inst, const SpinConfiguration& c) {
  if (c.size() != inst.n_spins)
    throw ValidationError("configuration has " + std::to_string(c.size()) +
                          " spins, instance has " + std::to_string(inst.n_spins));
}

template <class Spins>
inline int spin_product(const InteractionTerm& t, const Spins& s) {
  int p = s[t.sites[0]];
  for (std::size_t k = 1; k < t.arity; ++k) p *= s[t.sites[k]];
  return p;
}

inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 128) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const auto half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline constexpr std::size_t kPairwiseThreshold = 10000;

}  // namespace detail

inline double term_value(const InteractionTerm& t, const SpinConfiguration& c) {
  return t.coupling * detail::spin_product(t, c);
}

inline double energy(const Instance& inst, const SpinConfiguration& config) {
  detail::check_size(inst, config);
  if (inst.terms.size() <= detail::kPairwiseThreshold) {
    double e = 0.0;
    for (const auto& t : inst.terms) e += term_value(t, config);
    return e;
  }
  std::vector<double> values;
  values.reserve(inst.terms.size());
  for (const auto& t : inst.terms) values.push_back(term_value(t, config));
  return detail::pairwise_sum(values);
}

// Energy change from flipping site i.
template <class Spins>
double flip_delta(const Instance& inst, const Incidence& inc, const Spins& spins, Site i) {
  double local = 0.0;
  for (auto ti : inc.terms_of(i)) {
    const auto& t = inst.terms[ti];
    local += t.coupling * detail::spin_product(t, spins);
  }
  return -2.0 * local;
}

inline double energy_gap(const Instance& inst, const SpinConfiguration& gs,
                         const SpinConfiguration& es) {
  return energy(inst, es) - energy(inst, gs);
}

// Overlap statistics between a reference ground state and an excited state.
struct OverlapStats {
  std::vector<std::int8_t> q;       // per spin
  std::vector<std::int8_t> q_link;  // per term of arity >= 2, in term order
  std::size_t D = 0;                // Hamming distance
  std::size_t W = 0;                // mass: link overlaps equal to -1
  double delta_e0 = 0.0;
  // Empty when sigma <= 0; +infinity when W + D = 0 (the pair cannot reorder).
  std::optional<double> z;
};

inline double z_parameter(double delta_e0, double sigma, std::size_t exposure) {
  if (exposure == 0) return std::numeric_limits<double>::infinity();
  return delta_e0 / (2.0 * sigma * std::sqrt(static_cast<double>(exposure)));
}

inline OverlapStats overlaps(const Instance& inst, const SpinConfiguration& gs,
                             const SpinConfiguration& es, double sigma) {
  detail::check_size(inst, gs);
  detail::check_size(inst, es);
  OverlapStats st;
  st.q.resize(inst.n_spins);
  for (std::size_t i = 0; i < inst.n_spins; ++i) {
    st.q[i] = static_cast<std::int8_t>(gs[i] * es[i]);
    st.D += st.q[i] < 0;
  }
  for (const auto& t : inst.terms) {
    if (t.arity < 2) continue;
    const auto ql = static_cast<std::int8_t>(detail::spin_product(t, st.q));
    st.q_link.push_back(ql);
    st.W += ql < 0;
  }
  st.delta_e0 = energy_gap(inst, gs, es);
  if (sigma > 0.0) st.z = z_parameter(st.delta_e0, sigma, st.W + st.D);
  return st;
}

struct GapDecomposition {
  double direct = 0.0;    // gap on the implemented Hamiltonian
  double expanded = 0.0;  // intended gap minus the overlap-weighted perturbations
};

// Evaluates the implemented gap two ways: directly, and as the intended gap
// corrected by sum_t dc_t * prod(s^G) * (1 - prod(q)) over all terms. Terms
// present only in the implemented instance (materialized fields) have
// intended coupling zero.
inline GapDecomposition gap_decomposition_check(const Instance& intended,
                                                const Instance& implemented,
                                                const SpinConfiguration& gs,
                                                const SpinConfiguration& es) {
  if (intended.n_spins != implemented.n_spins)
    throw ValidationError("intended and implemented instances differ in size");
  detail::check_size(intended, gs);
  detail::check_size(intended, es);

  std::map<std::array<Site, 4>, double> base;
  auto key_of = [](const InteractionTerm& t) {
    std::array<Site, 4> k{t.arity, 0, 0, 0};
    std::copy(t.sites.begin(), t.sites.begin() + t.arity, k.begin() + 1);
    return k;
  };
  for (const auto& t : intended.terms) base[key_of(t)] += t.coupling;

  std::vector<std::int8_t> q(intended.n_spins);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = static_cast<std::int8_t>(gs[i] * es[i]);

  std::size_t matched = 0;
  double correction = 0.0;
  for (const auto& t : implemented.terms) {
    double c0 = 0.0;
    if (auto it = base.find(key_of(t)); it != base.end()) {
      c0 = it->second;
      ++matched;
    }
    const double dc = t.coupling - c0;
    correction += dc * detail::spin_product(t, gs) * (1 - detail::spin_product(t, q));
  }
  if (matched != base.size())
    throw ValidationError("implemented instance is missing intended terms");

  return {energy_gap(implemented, gs, es), energy_gap(intended, gs, es) - correction};
}

}  // namespace isingchaos
