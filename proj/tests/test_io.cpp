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
#include <sstream>

#include "catch_amalgamated.hpp"
#include "isingchaos/io.hpp"
#include "isingchaos/manifest.hpp"
#include "isingchaos/noise.hpp"
#include "test_support.hpp"

using namespace isingchaos;

namespace {

bool same_instance(const Instance& a, const Instance& b) {
  return a.n_spins == b.n_spins && a.terms == b.terms && a.family == b.family &&
         a.metadata == b.metadata && a.known_ground_states == b.known_ground_states;
}

Instance round_trip(const Instance& inst) {
  std::istringstream in(io::to_string(inst));
  return io::read_instance(in);
}

ResultTable sample_table() {
  ChaosRunConfig cfg;
  cfg.family.family = Family::Chimera;
  cfg.sizes = {2};
  cfg.sigmas = {0.2, 0.35};
  cfg.n_instances = 3;
  cfg.n_realizations = 20;
  cfg.master_seed = 5;
  auto t = run_sweep(cfg);
  t.manifest_hash = manifest_hash(cfg);
  return t;
}

}  // namespace

TEST_CASE("doubles round-trip through their shortest form", "[io]") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, -2.0 / 3.0, 0.1, 1e-300, 5e-324, 1.7976931348623157e308, 123456.789})
    CHECK(std::bit_cast<std::uint64_t>(io::parse_double(io::format_double(v))) ==
          std::bit_cast<std::uint64_t>(v));
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(std::isinf(io::parse_double(io::format_double(-std::numeric_limits<double>::infinity()))));
  CHECK(std::isnan(io::parse_double("nan")));
  CHECK_THROWS_AS(io::parse_double("1.0x"), ValidationError);
  CHECK_THROWS_AS(io::parse_uint("-3"), ValidationError);
}

TEST_CASE("instance text format", "[io]") {
  const auto chain = gen_chain(3, 1.0, true);
  const auto text = io::to_string(chain);
  CHECK(text.starts_with("# family=chain n=3 m=2 J="));
  CHECK(text.find("\n2 0 1 1\n2 1 2 1\n# gs +-+\n# gs -+-\n") != std::string::npos);
}

TEST_CASE("instances round-trip exactly", "[io]") {
  CHECK(same_instance(round_trip(gen_chain(9, 0.7, false)), gen_chain(9, 0.7, false)));
  CHECK(same_instance(round_trip(gen_square_grid(5, 3)), gen_square_grid(5, 3)));
  CHECK(same_instance(round_trip(gen_xorsat(30, 3)), gen_xorsat(30, 3)));
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    CHECK(same_instance(round_trip(gen_planted_chimera(4, seed)), gen_planted_chimera(4, seed)));

  // Arbitrary binary couplings, including perturbed ones.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = testing::random_instance(10, seed, 0.5, 0.3, 5);
    NoiseSpec spec;
    spec.sigma = 0.137;
    spec.stream = {seed, 1, 2};
    inst = perturb(inst, spec);
    inst.metadata["note"] = "x" + std::to_string(seed);
    inst.known_ground_states = {testing::random_config(10, seed)};
    CHECK(same_instance(round_trip(inst), inst));
  }
}

TEST_CASE("malformed instance text is rejected", "[io]") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return io::read_instance(in);
  };
  CHECK_THROWS_AS(parse(""), ValidationError);
  CHECK_THROWS_AS(parse("family=chain n=2 m=1\n2 0 1 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("# family=chain n=2 m=2\n2 0 1 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("# family=chain n=2 m=1\n2 0 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("# family=chain n=2 m=1\n4 0 1 1 1 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("# family=chain n=2 m=1\n2 0 7 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("# family=chain n=2 m=1\n2 0 1 one\n"), ValidationError);
  CHECK_THROWS_AS(parse("# family=mobius n=2 m=1\n2 0 1 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("# family=chain n=2 m=1\n2 0 1 1\n# gs +-+\n"), ValidationError);
  CHECK_NOTHROW(parse("# family=chain n=2 m=1\n\n2 0 1 1\n# a comment\n"));
}

TEST_CASE("unserializable metadata is rejected", "[io]") {
  auto inst = gen_chain(3, 1.0, true);
  inst.metadata["bad key"] = "1";
  CHECK_THROWS_AS(io::to_string(inst), ValidationError);
}

TEST_CASE("instance files", "[io]") {
  CHECK_THROWS_AS(io::read_instance_file("/nonexistent/dir/x.txt"), IoError);
  CHECK_THROWS_AS(io::write_instance_file("/nonexistent/dir/x.txt", gen_chain(3, 1, true)), IoError);
}

TEST_CASE("results CSV round-trips", "[io]") {
  const auto t = sample_table();
  const auto text = io::results_csv(t);
  CHECK(text.starts_with(std::string(io::kResultsHeader) + "\n"));
  std::istringstream in(text);
  const auto back = io::read_results_csv(in);
  CHECK(back.manifest_hash == t.manifest_hash);
  CHECK(io::results_csv(back) == text);
  bool any_event = false;
  for (const auto& r : back.records) any_event |= r.outcome == Outcome::ChaosEvent;
  CHECK(any_event);
}

TEST_CASE("mixed manifests are refused unless forced", "[io]") {
  auto a = sample_table();
  auto b = a;
  b.manifest_hash = "0000000000000001";
  const auto body_b = io::results_csv(b);
  const auto text = io::results_csv(a) + body_b.substr(body_b.find('\n') + 1);
  std::istringstream in(text);
  CHECK_THROWS_AS(io::read_results_csv(in), ValidationError);
  std::istringstream again(text);
  CHECK(io::read_results_csv(again, true).manifest_hash == "mixed");
}

TEST_CASE("malformed results are rejected", "[io]") {
  std::istringstream bad_header("family,n\n");
  CHECK_THROWS_AS(io::read_results_csv(bad_header), ValidationError);
  std::istringstream short_row(std::string(io::kResultsHeader) + "\nchimera,32,0.1\n");
  CHECK_THROWS_AS(io::read_results_csv(short_row), ValidationError);
  std::istringstream bad_outcome(std::string(io::kResultsHeader) + "\nchimera,32,0.1,0,0,lost,,,,,,abc\n");
  CHECK_THROWS_AS(io::read_results_csv(bad_outcome), ValidationError);
}

TEST_CASE("manifest JSON", "[io]") {
  RunManifest m;
  m.config.family.family = Family::Xorsat3;
  m.config.sizes = {12, 16};
  m.config.sigmas = {0.1, 0.2};
  m.config.n_instances = 4;
  m.config.n_realizations = 10;
  m.config.master_seed = 99;
  m.config.solver.kind = SolverProfile::Kind::ParallelTempering;
  m.config.solver.pt.sweeps = 1000;
  m.config.clamp = 1.0;
  m.timestamp = "2026-01-01T00:00:00Z";

  const auto j = to_json(m);
  const auto back = manifest_from_json(j);
  CHECK(manifest_hash(back.config) == manifest_hash(m.config));
  CHECK(back.config.solver.pt.sweeps == 1000);
  CHECK(back.config.clamp == 1.0);
  CHECK(back.timestamp == m.timestamp);
  CHECK(j["state"]["manifest_hash"] == manifest_hash(m.config));

  // Bookkeeping fields do not enter the hash; configuration fields do.
  auto m2 = m;
  m2.timestamp = "later";
  m2.complete = true;
  CHECK(manifest_hash(m2.config) == manifest_hash(m.config));
  m2.config.master_seed = 100;
  CHECK(manifest_hash(m2.config) != manifest_hash(m.config));
  CHECK(manifest_hash(m.config).size() == 16);
}

TEST_CASE("bad manifests raise schema errors", "[io]") {
  using nlohmann::json;
  CHECK_THROWS_AS(manifest_from_json(json::object()), ValidationError);
  CHECK_THROWS_AS(manifest_from_json(json{{"family", "chimera"}, {"sizes", "two"}}), ValidationError);
  CHECK_THROWS_AS(manifest_from_json(json{{"family", "chimera"},
                                          {"sizes", {2}},
                                          {"sigmas", {-0.1}},
                                          {"instances", 1},
                                          {"realizations", 1},
                                          {"master_seed", 0}}),
                  ValidationError);
  CHECK_THROWS_AS(manifest_from_json(json{{"family", "chimera"},
                                          {"sizes", {2}},
                                          {"sigmas", {0.1}},
                                          {"instances", 1},
                                          {"realizations", 1},
                                          {"master_seed", 0},
                                          {"solver", {{"kind", "annealer"}}}}),
                  ValidationError);
}

TEST_CASE("results JSON mirror", "[io]") {
  const auto t = sample_table();
  const auto j = results_json(t);
  CHECK(j["records"].size() == t.records.size());
  CHECK(j["manifest_hash"] == t.manifest_hash);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    CHECK(j["records"][i]["outcome"] == std::string(outcome_tag(t.records[i].outcome)));
    if (t.records[i].outcome != Outcome::ChaosEvent) CHECK(j["records"][i]["D"].is_null());
    else CHECK(j["records"][i]["D"] == t.records[i].D);
  }
}

TEST_CASE("checksums", "[io]") {
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::hex64(0xabcULL) == "0000000000000abc");
}
