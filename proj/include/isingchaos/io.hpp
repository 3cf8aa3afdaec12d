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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "isingchaos/chaos.hpp"
#include "isingchaos/errors.hpp"
#include "isingchaos/model.hpp"

namespace isingchaos::io {

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ValidationError("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ValidationError("not an unsigned integer: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Instance text format:
//   # family=<tag> n=<n> m=<terms> [k=v ...]
//   <arity> <s1> [<s2> [<s3>]] <coupling>     (m lines)
//   # gs <+/- string>                         (optional, per known ground state)
inline void write_instance(std::ostream& os, const Instance& inst) {
  os << "# family=" << family_tag(inst.family) << " n=" << inst.n_spins << " m=" << inst.terms.size();
  for (const auto& [k, v] : inst.metadata) {
    if (k.empty() || k.find_first_of(" \t\n=") != std::string::npos ||
        v.find_first_of(" \t\n") != std::string::npos || k == "family" || k == "n" || k == "m")
      throw ValidationError("metadata entry '" + k + "' cannot be serialized");
    os << ' ' << k << '=' << v;
  }
  os << '\n';
  for (const auto& t : inst.terms) {
    os << static_cast<int>(t.arity);
    for (auto s : t.site_list()) os << ' ' << s;
    os << ' ' << format_double(t.coupling) << '\n';
  }
  for (const auto& gs : inst.known_ground_states) os << "# gs " << gs.to_string() << '\n';
}

inline std::string to_string(const Instance& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return os.str();
}

inline Instance read_instance(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("instance file is empty");
  const auto head = tokens(line);
  if (head.size() < 4 || head[0] != "#" || !head[1].starts_with("family="))
    throw ValidationError("instance header must start with '# family='");

  Instance inst;
  std::size_t m = 0;
  bool have_n = false, have_m = false;
  for (std::size_t i = 1; i < head.size(); ++i) {
    const auto eq = head[i].find('=');
    if (eq == std::string_view::npos) throw ValidationError("bad header field '" + std::string(head[i]) + "'");
    const auto k = head[i].substr(0, eq), v = head[i].substr(eq + 1);
    if (k == "family") inst.family = parse_family(v);
    else if (k == "n") { inst.n_spins = parse_uint(v); have_n = true; }
    else if (k == "m") { m = parse_uint(v); have_m = true; }
    else inst.metadata.emplace(std::string(k), std::string(v));
  }
  if (!have_n || !have_m) throw ValidationError("instance header lacks n or m");

  inst.terms.reserve(m);
  while (std::getline(is, line)) {
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    if (tok[0] == "#") {
      if (tok.size() == 3 && tok[1] == "gs") inst.known_ground_states.push_back(SpinConfiguration::parse(tok[2]));
      continue;
    }
    const auto arity = parse_uint(tok[0]);
    if (arity < 1 || arity > 3 || tok.size() != arity + 2)
      throw ValidationError("malformed term line '" + line + "'");
    InteractionTerm t;
    t.arity = static_cast<std::uint8_t>(arity);
    for (std::size_t k = 0; k < arity; ++k) {
      const auto s = parse_uint(tok[1 + k]);
      if (s > std::numeric_limits<Site>::max()) throw ValidationError("site index too large");
      t.sites[k] = static_cast<Site>(s);
    }
    t.coupling = parse_double(tok[arity + 1]);
    inst.terms.push_back(t);
  }
  if (inst.terms.size() != m)
    throw ValidationError("instance declares " + std::to_string(m) + " terms, found " +
                          std::to_string(inst.terms.size()));
  inst.validate();
  return inst;
}

inline Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_instance(in);
}

inline void write_instance_file(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_instance(out, inst);
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline constexpr std::string_view kResultsHeader =
    "family,n,sigma,instance_id,realization_id,outcome,delta_e0,D,W,z,e_intended,manifest_hash";

inline void write_results_csv(std::ostream& os, const ResultTable& table) {
  os << kResultsHeader << '\n';
  for (const auto& r : table.records) {
    os << family_tag(r.family) << ',' << r.n << ',' << format_double(r.sigma) << ',' << r.instance_id
       << ',' << r.realization_id << ',' << outcome_tag(r.outcome) << ',';
    if (r.outcome == Outcome::ChaosEvent)
      os << format_double(r.delta_e0) << ',' << r.D << ',' << r.W << ',' << format_double(r.z) << ','
         << format_double(r.e_intended);
    else
      os << ",,,,";
    os << ',' << table.manifest_hash << '\n';
  }
}

inline std::string results_csv(const ResultTable& table) {
  std::ostringstream os;
  write_results_csv(os, table);
  return os.str();
}

// Parses a results CSV. Rows from different manifests are rejected unless
// `allow_mixed` is set.
inline ResultTable read_results_csv(std::istream& is, bool allow_mixed = false) {
  std::string line;
  if (!std::getline(is, line) || line != kResultsHeader)
    throw ValidationError("results file has an unexpected header");
  ResultTable table;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12) throw ValidationError("results row has " + std::to_string(f.size()) + " fields");
    ChaosRecord r;
    r.family = parse_family(f[0]);
    r.n = parse_uint(f[1]);
    r.sigma = parse_double(f[2]);
    r.instance_id = parse_uint(f[3]);
    r.realization_id = parse_uint(f[4]);
    r.outcome = parse_outcome(f[5]);
    if (r.outcome == Outcome::ChaosEvent) {
      r.delta_e0 = parse_double(f[6]);
      r.D = parse_uint(f[7]);
      r.W = parse_uint(f[8]);
      r.z = parse_double(f[9]);
      r.e_intended = parse_double(f[10]);
    }
    const std::string hash(f[11]);
    if (first) {
      table.manifest_hash = hash;
      first = false;
    } else if (hash != table.manifest_hash) {
      if (!allow_mixed) throw ValidationError("results rows come from different manifests");
      table.manifest_hash = "mixed";
    }
    table.records.push_back(r);
  }
  table.sort();
  return table;
}

// 64-bit FNV-1a, used for manifest hashes and result checksums.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
  return s;
}

}  // namespace isingchaos::io
