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
#include <cstdint>
#include <optional>

#include "isingchaos/errors.hpp"
#include "isingchaos/model.hpp"
#include "isingchaos/random.hpp"

namespace isingchaos {

// Labels that select an independent pseudorandom stream.
struct StreamLabels {
  std::uint64_t master_seed = 0;
  std::uint64_t instance_id = 0;
  std::uint64_t realization = 0;

  std::uint64_t key(std::uint64_t purpose) const {
    return derive_key({purpose, master_seed, instance_id, realization});
  }
};

enum class NoiseTargets { CouplingsOnly, CouplingsAndFields };

struct NoiseSpec {
  double sigma = 0.0;
  NoiseTargets targets = NoiseTargets::CouplingsAndFields;
  std::optional<double> clamp;  // off unless emulating hardware range limits
  StreamLabels stream;
};

// The standard-normal variate assigned to `term_index` of a realization.
inline double noise_variate(const StreamLabels& stream, std::uint64_t term_index) {
  return normal_at(stream.key(salt::kNoise), term_index);
}

// Implemented Hamiltonian: every targeted term gets coupling + sigma * eta,
// where eta is the standard normal with counter equal to the term index.
// In CouplingsAndFields mode an instance without field terms receives a
// field term on every spin, appended in site order.
inline Instance perturb(const Instance& intended, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
    throw ValidationError("noise sigma must be finite and non-negative");
  if (spec.clamp && !(*spec.clamp > 0.0)) throw ValidationError("clamp must be positive");

  Instance out = intended;
  bool changed = false;
  if (spec.sigma > 0.0) {
    changed = true;
    const std::uint64_t key = spec.stream.key(salt::kNoise);
    const bool fields = spec.targets == NoiseTargets::CouplingsAndFields;
    std::uint64_t counter = 0;
    for (auto& t : out.terms) {
      const std::uint64_t idx = counter++;
      if (t.arity == 1 && !fields) continue;
      t.coupling += spec.sigma * normal_at(key, idx);
    }
    if (fields && !intended.has_arity(1)) {
      for (Site i = 0; i < intended.n_spins; ++i)
        out.terms.push_back(InteractionTerm::field(i, spec.sigma * normal_at(key, counter++)));
    }
  }
  if (spec.clamp) {
    const double c = *spec.clamp;
    for (auto& t : out.terms)
      if (std::abs(t.coupling) > c) {
        t.coupling = std::copysign(c, t.coupling);
        changed = true;
      }
  }
  // Ground-state knowledge only carries over to an unchanged instance.
  if (changed) out.known_ground_states.clear();
  return out;
}

}  // namespace isingchaos
