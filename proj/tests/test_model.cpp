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

#include <cmath>
#include <limits>
#include <numeric>

#include "catch_amalgamated.hpp"
#include "isingchaos/model.hpp"
#include "isingchaos/noise.hpp"
#include "test_support.hpp"

using namespace isingchaos;
using Catch::Approx;

namespace {

Instance two_spin_antiferro() {
  Instance inst;
  inst.n_spins = 2;
  inst.terms = {InteractionTerm::pair(0, 1, 1.0)};
  return inst;
}

Instance three_chain_antiferro() {
  Instance inst;
  inst.n_spins = 3;
  inst.terms = {InteractionTerm::pair(0, 1, 1.0), InteractionTerm::pair(1, 2, 1.0)};
  return inst;
}

}  // namespace

TEST_CASE("energy of elementary terms", "[model]") {
  const auto inst = two_spin_antiferro();
  CHECK(energy(inst, SpinConfiguration::parse("++")) == 1.0);
  CHECK(energy(inst, SpinConfiguration::parse("+-")) == -1.0);

  Instance x;
  x.n_spins = 3;
  x.terms = {InteractionTerm::triple(0, 1, 2, 1.0)};
  CHECK(energy(x, SpinConfiguration::all_down(3)) == -1.0);
}

TEST_CASE("energy rejects mismatched configuration", "[model]") {
  CHECK_THROWS_AS(energy(two_spin_antiferro(), SpinConfiguration::parse("+++")), ValidationError);
}

TEST_CASE("spin configurations only hold +1 and -1", "[model]") {
  CHECK_THROWS_AS(SpinConfiguration(std::vector<std::int8_t>{1, 0}), ValidationError);
  CHECK_THROWS_AS(SpinConfiguration::parse("+x"), ValidationError);
  auto c = SpinConfiguration::parse("+-+");
  CHECK(c.to_string() == "+-+");
  CHECK(c.flipped().to_string() == "-+-");
  CHECK_THROWS_AS(c.set(0, 2), ValidationError);
}

TEST_CASE("energy matches direct evaluation on random instances", "[model]") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = testing::random_instance(12, seed, 0.5, 0.3, 8);
    const auto c = testing::random_config(12, seed);
    CHECK(energy(inst, c) == Approx(static_cast<double>(testing::naive_energy(inst, c))).margin(1e-12));
  }
}

TEST_CASE("energy is invariant under global flip without odd terms", "[model]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = testing::random_instance(10, seed, 0.0, 0.5);
    const auto c = testing::random_config(10, seed + 100);
    CHECK(energy(inst, c) == Approx(energy(inst, c.flipped())).margin(1e-12));
  }
}

TEST_CASE("energy is linear in the couplings", "[model]") {
  auto inst = testing::random_instance(9, 3, 0.5, 0.5, 5);
  const auto c = testing::random_config(9, 4);
  auto scaled = inst;
  for (auto& t : scaled.terms) t.coupling *= 2.5;
  CHECK(energy(scaled, c) == Approx(2.5 * energy(inst, c)).margin(1e-12));
}

TEST_CASE("energy stays accurate on long term lists", "[model]") {
  Instance inst;
  const std::size_t m = 200001;
  inst.n_spins = m + 1;
  long double exact = 0.0L;
  for (Site i = 0; i < m; ++i) {
    const double c = (i % 2 ? 1e-3 : 1.0) * (1.0 + 1e-7 * i);
    inst.terms.push_back(InteractionTerm::pair(i, i + 1, c));
    exact -= c;
  }
  auto alt = SpinConfiguration::all_up(m + 1);
  for (Site i = 0; i < m + 1; i += 2) alt.flip(i);
  CHECK(std::abs(energy(inst, alt) - static_cast<double>(exact)) < 1e-9);
}

TEST_CASE("flip_delta agrees with energy differences", "[model]") {
  const auto inst = testing::random_instance(11, 9, 0.6, 0.4, 10);
  const Incidence inc(inst);
  auto c = testing::random_config(11, 10);
  for (Site i = 0; i < 11; ++i) {
    const double before = energy(inst, c);
    const double d = flip_delta(inst, inc, c.spins(), i);
    c.flip(i);
    CHECK(energy(inst, c) - before == Approx(d).margin(1e-12));
  }
}

TEST_CASE("energy gap examples", "[model]") {
  const auto inst = two_spin_antiferro();
  const auto gs = SpinConfiguration::parse("+-");
  CHECK(energy_gap(inst, gs, gs) == 0.0);
  CHECK(energy_gap(inst, gs, SpinConfiguration::parse("++")) == 2.0);
}

TEST_CASE("energy gap equals brute-force energy difference", "[model]") {
  const auto inst = testing::random_instance(8, 21, 0.5, 0.5, 4);
  const auto bf = testing::brute_force(inst);
  const auto& gs = bf.minimizers.front();
  for (std::uint64_t b = 0; b < 256; ++b) {
    const auto es = testing::config_from_bits(8, b);
    const double ref = static_cast<double>(testing::naive_energy(inst, es)) - bf.min_energy;
    CHECK(energy_gap(inst, gs, es) == Approx(ref).margin(1e-12));
    CHECK(energy_gap(inst, gs, es) >= -1e-12);
  }
}

TEST_CASE("overlap statistics examples", "[model]") {
  const auto chain = three_chain_antiferro();
  const auto gs = SpinConfiguration::parse("+-+");

  auto same = overlaps(chain, gs, gs, 0.1);
  CHECK(same.D == 0);
  CHECK(same.W == 0);
  REQUIRE(same.z);
  CHECK(std::isinf(*same.z));

  auto global = overlaps(chain, gs, gs.flipped(), 0.1);
  CHECK(global.D == 3);
  CHECK(global.W == 0);

  auto one = overlaps(chain, gs, SpinConfiguration::parse("+--"), 0.1);
  CHECK(one.D == 1);
  CHECK(one.W == 1);
  CHECK(one.q_link == std::vector<std::int8_t>{1, -1});
  CHECK(one.delta_e0 == 2.0);

  CHECK(z_parameter(2.0, 0.1, 100) == Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(overlaps(chain, gs, gs, 0.0).z.has_value());
}

TEST_CASE("overlap counts agree with their definitions", "[model]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = testing::random_instance(10, seed, 0.3, 0.4, 6);
    const auto a = testing::random_config(10, 2 * seed);
    const auto b = testing::random_config(10, 2 * seed + 1);
    const auto st = overlaps(inst, a, b, 0.2);
    CHECK(st.D == hamming_distance(a, b));
    std::size_t w = 0;
    for (const auto& t : inst.terms) {
      if (t.arity < 2) continue;
      int pa = 1, pb = 1;
      for (std::size_t k = 0; k < t.arity; ++k) {
        pa *= a[t.sites[k]];
        pb *= b[t.sites[k]];
      }
      w += pa != pb;
    }
    CHECK(st.W == w);
    CHECK(st.D <= inst.n_spins);
    CHECK(st.W <= inst.num_interactions());

    // Global flip of the excited state keeps even link overlaps and maps D to n - D.
    const auto fl = overlaps(inst, a, b.flipped(), 0.2);
    CHECK(fl.D == inst.n_spins - st.D);
    std::size_t k = 0;
    for (const auto& t : inst.terms) {
      if (t.arity < 2) continue;
      if (t.arity == 2) CHECK(fl.q_link[k] == st.q_link[k]);
      else CHECK(fl.q_link[k] == -st.q_link[k]);
      ++k;
    }
  }
}

TEST_CASE("gap decomposition examples", "[model]") {
  const auto intended = testing::random_instance(10, 5, 0.5, 0.4, 5);
  const auto gs = testing::random_config(10, 1);
  const auto es = testing::random_config(10, 2);

  const auto zero = gap_decomposition_check(intended, intended, gs, es);
  CHECK(zero.direct == Approx(energy_gap(intended, gs, es)).margin(1e-12));
  CHECK(zero.expanded == Approx(zero.direct).margin(1e-12));

  NoiseSpec spec;
  spec.sigma = 0.3;
  spec.stream = {1, 2, 3};
  const auto implemented = perturb(intended, spec);
  const auto same = gap_decomposition_check(intended, implemented, gs, gs);
  CHECK(same.direct == 0.0);
  CHECK(same.expanded == Approx(0.0).margin(1e-12));
}

TEST_CASE("gap decomposition holds on random perturbed instances", "[model]") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto intended = testing::random_instance(10, 1000 + seed, 0.4, 0.4, 4);
    Instance implemented = intended;
    for (std::size_t t = 0; t < implemented.terms.size(); ++t)
      implemented.terms[t].coupling += 0.2 * normal_at(derive_key({seed, 77}), t);
    const auto gs = testing::random_config(10, 3 * seed);
    const auto es = testing::random_config(10, 3 * seed + 1);
    const auto r = gap_decomposition_check(intended, implemented, gs, es);
    const double independent =
        static_cast<double>(testing::naive_energy(implemented, es) - testing::naive_energy(implemented, gs));
    CHECK(r.direct == Approx(independent).margin(1e-12));
    CHECK(std::abs(r.direct - r.expanded) <= 1e-9);
  }
}

TEST_CASE("gap decomposition accounts for materialized fields", "[model]") {
  const auto intended = testing::random_instance(9, 8, 0.0, 0.5);
  NoiseSpec spec;
  spec.sigma = 0.2;
  spec.targets = NoiseTargets::CouplingsAndFields;
  spec.stream = {4, 5, 6};
  const auto implemented = perturb(intended, spec);
  REQUIRE(implemented.terms.size() == intended.terms.size() + 9);
  const auto r = gap_decomposition_check(intended, implemented, testing::random_config(9, 1),
                                         testing::random_config(9, 2));
  CHECK(std::abs(r.direct - r.expanded) <= 1e-9);

  CHECK_THROWS_AS(gap_decomposition_check(implemented, intended, testing::random_config(9, 1),
                                          testing::random_config(9, 2)),
                  ValidationError);
}

TEST_CASE("instance validation", "[model]") {
  Instance inst;
  inst.n_spins = 3;
  inst.terms = {InteractionTerm::pair(0, 1, 1.0), InteractionTerm::pair(1, 0, 2.0)};
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst.terms = {InteractionTerm::pair(0, 5, 1.0)};
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst.terms = {InteractionTerm::pair(0, 1, std::numeric_limits<double>::infinity())};
  CHECK_THROWS_AS(inst.validate(), ValidationError);

  inst.terms = {InteractionTerm::triple(2, 0, 1, 1.0), InteractionTerm::field(2, 0.5)};
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.terms[0].sites == std::array<Site, 3>{0, 1, 2});
  CHECK(inst.num_interactions() == 1);
}

TEST_CASE("family tags round-trip", "[model]") {
  for (auto f : {Family::Chain, Family::SquareGrid, Family::Chimera, Family::Xorsat3})
    CHECK(parse_family(family_tag(f)) == f);
  CHECK_THROWS_AS(parse_family("torus"), ValidationError);
}
