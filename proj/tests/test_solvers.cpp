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

#include <algorithm>
#include <set>

#include "catch_amalgamated.hpp"
#include "isingchaos/generators.hpp"
#include "isingchaos/noise.hpp"
#include "isingchaos/solvers.hpp"
#include "test_support.hpp"

using namespace isingchaos;
using Catch::Approx;

namespace {

Instance ferro_grid_2x2() {
  Instance g;
  g.family = Family::SquareGrid;
  g.n_spins = 4;
  g.metadata["L"] = "2";
  g.terms = {InteractionTerm::pair(0, 1, -1.0), InteractionTerm::pair(0, 2, -1.0),
             InteractionTerm::pair(1, 3, -1.0), InteractionTerm::pair(2, 3, -1.0)};
  return g;
}

Instance perturbed(const Instance& inst, double sigma, std::uint64_t r,
                   NoiseTargets targets = NoiseTargets::CouplingsOnly) {
  NoiseSpec spec;
  spec.sigma = sigma;
  spec.targets = targets;
  spec.stream = {31, 7, r};
  return perturb(inst, spec);
}

}  // namespace

TEST_CASE("steepest descent leaves stable states alone", "[solvers]") {
  const auto inst = gen_chain(6, 1.0, true);
  const auto gs = inst.known_ground_states.front();
  CHECK(steepest_descent(inst, gs, 100) == gs);

  // A state with an interior domain wall is 1-flip stable but not a ground state.
  const auto kink = SpinConfiguration::parse("+-++-+");
  CHECK(is_one_flip_stable(inst, kink));
  CHECK(steepest_descent(inst, kink, 100) == kink);
}

TEST_CASE("steepest descent returns planted state from a one-flip excitation", "[solvers]") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = gen_planted_chimera(3, seed);
    const auto gs = SpinConfiguration::all_up(inst.n_spins);
    for (Site i = 0; i < inst.n_spins; ++i) {
      auto start = gs;
      start.flip(i);
      // Basin check by direct evaluation: flipping i back is the only
      // single flip that lowers the energy.
      const double e0 = energy(inst, start);
      bool only_i = true;
      for (Site j = 0; j < inst.n_spins; ++j) {
        auto t = start;
        t.flip(j);
        const bool lower = energy(inst, t) < e0 - 1e-12;
        if (j == i) REQUIRE(lower);
        else if (lower) only_i = false;
      }
      if (!only_i) continue;
      ++checked;
      CHECK(steepest_descent(inst, start, 100) == gs);
      CHECK(steepest_descent(inst, start.flipped(), 100) == gs.flipped());
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("steepest descent never raises the energy", "[solvers]") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = testing::random_instance(14, seed, 0.4, 0.3, 6);
    const auto start = testing::random_config(14, seed);
    const auto out = steepest_descent(inst, start, 100);
    CHECK(energy(inst, out) <= energy(inst, start) + 1e-12);
    CHECK(is_one_flip_stable(inst, out));
    CHECK(steepest_descent(inst, start, 0) == start);
  }
}

TEST_CASE("exhaustive solver examples", "[solvers]") {
  const auto chain = gen_chain(3, 1.0, true);
  const auto ex = exhaustive_solve(chain);
  CHECK(ex.result.best_energy == -2.0);
  CHECK(ex.result.exact);
  REQUIRE(ex.ground_states.size() == 2);
  CHECK(ex.ground_states[0].to_string() == "+-+");
  CHECK(ex.ground_states[1].to_string() == "-+-");

  const auto grid = exhaustive_solve(ferro_grid_2x2());
  CHECK(grid.result.best_energy == -4.0);
  CHECK(grid.ground_states.size() == 2);

  const auto planted = gen_planted_chimera(2, 8);
  const auto pe = exhaustive_solve(planted);
  REQUIRE(pe.ground_states.size() == 2);
  CHECK(pe.ground_states[0] == SpinConfiguration::all_up(planted.n_spins));
  CHECK(pe.ground_states[1] == SpinConfiguration::all_down(planted.n_spins));
}

TEST_CASE("exhaustive solver matches plain enumeration", "[solvers]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = testing::random_instance(11, 500 + seed, 0.5, 0.35, 5);
    const auto ex = exhaustive_solve(inst);
    const auto bf = testing::brute_force(inst);
    CHECK(ex.result.best_energy == Approx(bf.min_energy).margin(1e-9));
    CHECK(ex.result.best_energy == energy(inst, ex.result.best_config));
    std::set<SpinConfiguration> a(ex.ground_states.begin(), ex.ground_states.end());
    std::set<SpinConfiguration> b(bf.minimizers.begin(), bf.minimizers.end());
    CHECK(a == b);
  }
}

TEST_CASE("exhaustive solver size guard", "[solvers]") {
  Instance big;
  big.n_spins = kExhaustiveMaxSpins + 1;
  CHECK_THROWS_AS(exhaustive_solve(big), SolverGuardError);
}

TEST_CASE("grid DP examples", "[solvers]") {
  const auto r = grid_dp_solve(ferro_grid_2x2());
  CHECK(r.best_energy == -4.0);
  CHECK(r.exact);

  const auto g4 = gen_square_grid(4, 2024);
  CHECK(grid_dp_solve(g4).best_energy == Approx(testing::brute_force(g4).min_energy).margin(1e-12));

  const auto g5 = perturbed(gen_square_grid(5, 77), 0.4, 0);
  const auto d5 = grid_dp_solve(g5);
  CHECK(d5.best_energy == Approx(exhaustive_solve(g5).result.best_energy).margin(1e-9));
  CHECK(d5.best_energy == energy(g5, d5.best_config));
}

TEST_CASE("grid DP with fields matches exhaustive", "[solvers]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = perturbed(gen_square_grid(4, seed), 0.3, seed, NoiseTargets::CouplingsAndFields);
    CHECK(grid_dp_solve(g).best_energy == Approx(exhaustive_solve(g).result.best_energy).margin(1e-9));
  }
}

TEST_CASE("grid DP contract", "[solvers]") {
  CHECK_THROWS_AS(grid_dp_solve(gen_chain(4, 1.0, true)), ValidationError);
  auto g = gen_square_grid(3, 0);
  g.terms.push_back(InteractionTerm::pair(0, 8, 1.0));
  CHECK_THROWS_AS(grid_dp_solve(g), ValidationError);
  CHECK_THROWS_AS(grid_dp_solve(gen_square_grid(kGridDpMaxWidth + 1, 0)), SolverGuardError);
}

TEST_CASE("chain DP matches exhaustive", "[solvers]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = perturbed(gen_chain(12, 1.0, seed % 2), 0.7, seed, NoiseTargets::CouplingsAndFields);
    const auto d = chain_dp_solve(c);
    CHECK(d.exact);
    CHECK(d.best_energy == Approx(exhaustive_solve(c).result.best_energy).margin(1e-9));
  }
  const auto c = gen_chain(32, 1.0, true);
  CHECK(chain_dp_solve(c).best_energy == -31.0);
  CHECK_THROWS_AS(chain_dp_solve(gen_square_grid(3, 0)), ValidationError);
}

TEST_CASE("elimination matches exhaustive", "[solvers]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = testing::random_instance(14, 900 + seed, 0.5, 0.2, 6);
    const auto e = elimination_solve(inst);
    CHECK(e.exact);
    CHECK(e.best_energy == energy(inst, e.best_config));
    CHECK(e.best_energy == Approx(exhaustive_solve(inst).result.best_energy).margin(1e-9));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = perturbed(gen_xorsat(16, seed), 0.2, seed, NoiseTargets::CouplingsAndFields);
    CHECK(elimination_solve(x).best_energy ==
          Approx(exhaustive_solve(x).result.best_energy).margin(1e-9));
  }
  std::size_t chimeras = 0;
  for (std::uint64_t seed = 0; chimeras < 5; ++seed) {
    const auto base = gen_planted_chimera(2, seed);
    if (base.n_spins > 22) continue;
    ++chimeras;
    const auto p = perturbed(base, 0.15, seed, NoiseTargets::CouplingsAndFields);
    CHECK(elimination_solve(p).best_energy ==
          Approx(exhaustive_solve(p).result.best_energy).margin(1e-9));
  }
}

TEST_CASE("elimination agrees with grid DP on larger grids", "[solvers]") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = perturbed(gen_square_grid(9, seed), 0.2, seed);
    CHECK(elimination_solve(g).best_energy == Approx(grid_dp_solve(g).best_energy).margin(1e-9));
  }
}

TEST_CASE("elimination width guard", "[solvers]") {
  const auto dense = testing::random_instance(16, 1, 0.0, 1.0);
  CHECK_THROWS_AS(elimination_solve(dense, 4), SolverGuardError);
  CHECK_NOTHROW(elimination_solve(dense, 16));
}
