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

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isingchaos/isingchaos.hpp"
#include "isingchaos/manifest.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace isingchaos;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kValidation = 2, kSolverGuard = 3, kIo = 4 };

fs::path data_dir() {
  if (const char* d = std::getenv("ISINGCHAOS_DATA_DIR"); d && *d) return d;
  return fs::current_path();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file so an interrupted write never leaves a
// truncated artifact behind.
void write_file_atomic(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + p.string() + "': " + ec.message());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Output sink: a file when a path is given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") std::cout << text;
  else write_file_atomic(out_path, text);
}

NoiseTargets parse_targets(const std::string& t) {
  if (t == "couplings") return NoiseTargets::CouplingsOnly;
  if (t == "couplings+fields") return NoiseTargets::CouplingsAndFields;
  throw ValidationError("unknown noise targets '" + t + "'");
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

// Rows are strings so CSV keeps the shortest round-trip form; JSON output
// converts numeric-looking cells back to numbers.
std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, const std::string& format) {
  if (format == "csv") return csv_table(header, rows);
  if (format != "json") throw ValidationError("unknown format '" + format + "'");
  json out = json::array();
  for (const auto& r : rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string& cell = r[i];
      if (cell.empty()) {
        obj[header[i]] = nullptr;
        continue;
      }
      try {
        const double v = io::parse_double(cell);
        obj[header[i]] = std::isfinite(v) ? json(v) : json(cell);
      } catch (const ValidationError&) {
        obj[header[i]] = cell;
      }
    }
    out.push_back(std::move(obj));
  }
  return out.dump(2) + "\n";
}

std::string num(double v) { return io::format_double(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string family;
  std::uint64_t size = 0;
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
  double J = 1.0;
  bool ferro = false;
  std::string out_dir;
};

int cmd_generate(const GenerateArgs& a) {
  FamilyParams fam;
  fam.family = parse_family(a.family);
  fam.chain_j = a.J;
  fam.antiferromagnetic = !a.ferro;
  const fs::path dir = a.out_dir.empty() ? data_dir() : fs::path(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  for (std::uint64_t i = 0; i < a.count; ++i) {
    const Instance inst = generate_instance(fam, a.size, derive_key({a.seed, i}));
    const fs::path p = dir / (a.family + "_" + std::to_string(a.size) + "_" + std::to_string(i) + ".txt");
    write_file_atomic(p, io::to_string(inst));
    std::cout << p.string() << '\n';
  }
  return kOk;
}

// ----------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string in, out;
  double sigma = 0.0;
  std::string targets = "couplings+fields";
  std::optional<double> clamp;
  std::uint64_t seed = 0, instance_id = 0, realization = 0;
};

int cmd_perturb(const PerturbArgs& a) {
  const Instance inst = io::read_instance_file(a.in);
  NoiseSpec spec;
  spec.sigma = a.sigma;
  spec.targets = parse_targets(a.targets);
  spec.clamp = a.clamp;
  spec.stream = {a.seed, a.instance_id, a.realization};
  emit(a.out, io::to_string(perturb(inst, spec)));
  return kOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string in, solver = "elimination", out;
  PtParams pt;
  std::uint64_t seed = 0;
  int descent = 0;
};

int cmd_solve(const SolveArgs& a) {
  const Instance inst = io::read_instance_file(a.in);
  SolverProfile profile;
  profile.kind = parse_solver(a.solver);
  profile.pt = a.pt;
  if (profile.kind == SolverProfile::Kind::ParallelTempering) profile.pt.validate();
  SolveResult r = make_solver(profile)(inst, StreamLabels{a.seed, 0, 0});
  if (a.descent > 0) {
    r.best_config = steepest_descent(inst, r.best_config, a.descent);
    r.best_energy = energy(inst, r.best_config);
  }
  json j = {{"solver", std::string(solver_tag(profile.kind))},
            {"energy", r.best_energy},
            {"exact", r.exact},
            {"config", r.best_config.to_string()},
            {"diagnostics", r.diagnostics}};
  emit(a.out, j.dump(2) + "\n");
  return kOk;
}

// --------------------------------------------------------------------- run

struct RunArgs {
  std::string manifest, out;
  unsigned jobs = 1;
  std::uint64_t limit = 0;
  bool json_mirror = false;
};

fs::path default_results_path(const fs::path& manifest, const std::string& hash) {
  const char* d = std::getenv("ISINGCHAOS_DATA_DIR");
  const fs::path dir = d && *d ? fs::path(d) : manifest.parent_path();
  return dir / (manifest.stem().string() + "-" + hash + ".csv");
}

int cmd_run(const RunArgs& a) {
  const fs::path mpath = a.manifest;
  json mj;
  try {
    mj = json::parse(read_file(mpath));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  RunManifest m = manifest_from_json(mj);
  const std::string hash = manifest_hash(m.config);
  const fs::path rpath = a.out.empty() ? default_results_path(mpath, hash) : fs::path(a.out);

  // Resume from an existing partial table after verifying it.
  std::optional<ResultTable> resume;
  if (fs::exists(rpath)) {
    const std::string text = read_file(rpath);
    if (!m.results_checksum.empty() && io::hex64(io::fnv1a(text)) != m.results_checksum)
      throw IoError("results file '" + rpath.string() + "' does not match the manifest checksum");
    std::istringstream in(text);
    try {
      resume = io::read_results_csv(in);
    } catch (const ValidationError& e) {
      throw IoError("results file '" + rpath.string() + "' is corrupt: " + e.what());
    }
    if (!resume->records.empty() && resume->manifest_hash != hash)
      throw IoError("results file '" + rpath.string() + "' belongs to a different manifest");
    if (!resume->keys_unique()) throw IoError("results file '" + rpath.string() + "' has duplicate cells");
  }

  RunOptions opts;
  opts.jobs = a.jobs;
  opts.max_new_cells = a.limit;
  ResultTable table = run_sweep(m.config, opts, resume ? &*resume : nullptr);
  table.manifest_hash = hash;

  const std::string csv = io::results_csv(table);
  write_file_atomic(rpath, csv);
  const fs::path fpath = rpath.string() + ".failures.json";
  if (!table.failures.empty()) {
    write_file_atomic(fpath, results_json(ResultTable{{}, hash, table.failures, table.notes})["failures"].dump(2) + "\n");
  } else {
    std::error_code ec;
    fs::remove(fpath, ec);
  }
  if (a.json_mirror) {
    fs::path jpath = rpath;
    jpath.replace_extension(".json");
    json j = results_json(table);
    j["notes"] = table.notes;
    write_file_atomic(jpath, j.dump(2) + "\n");
  }

  const auto& c = m.config;
  const std::uint64_t total = c.sizes.size() * c.n_instances * c.n_realizations * c.sigmas.size();
  m.results_checksum = io::hex64(io::fnv1a(csv));
  m.records = table.records.size();
  m.complete = table.records.size() == total;
  m.timestamp = utc_timestamp();
  m.artifact_version = kArtifactVersion;
  auto out = to_json(m);
  out["results"] = rpath.string();
  write_file_atomic(mpath, out.dump(2) + "\n");

  std::cerr << "records " << table.records.size() << "/" << total << ", failures "
            << table.failures.size() << ", results " << rpath.string() << '\n';
  return kOk;
}

// ----------------------------------------------------------------- theory

struct TheoryArgs {
  std::string kind = "chain";
  double J = 1.0;
  std::vector<std::uint64_t> sizes{2};
  std::vector<double> sigmas;
  std::vector<double> zs;
  double n_es = 1.0, n_gs = 1.0;
  std::vector<double> ps;
  std::string format = "csv", out;
};

int cmd_theory(const TheoryArgs& a) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  if (a.kind == "chain") {
    if (a.sigmas.empty()) throw ValidationError("theory chain needs --sigma values");
    header = {"n", "sigma", "J", "z", "p_z", "ps"};
    for (auto n : a.sizes)
      for (double s : a.sigmas)
        rows.push_back({num(n), num(s), num(a.J), num(a.J / s), num(p_of_z(a.J / s)), num(chain_ps(a.J, s, n))});
  } else if (a.kind == "pz") {
    if (a.zs.empty()) throw ValidationError("theory pz needs --z values");
    header = {"z", "p_z", "p_single_gs", "ps"};
    for (double z : a.zs) {
      const double p = p_of_z(z);
      rows.push_back({num(z), num(p), num(p_single_gs(p, a.n_es)), num(success_from_z(z, a.n_es, a.n_gs))});
    }
  } else if (a.kind == "required-z") {
    if (a.ps.empty()) throw ValidationError("theory required-z needs --ps values");
    header = {"ps", "n_es", "n_gs", "z_approx", "z_exact"};
    for (double p : a.ps)
      rows.push_back({num(p), num(a.n_es), num(a.n_gs), num(required_z(p, a.n_es, a.n_gs)),
                      num(required_z_exact(p, a.n_es, a.n_gs))});
  } else {
    throw ValidationError("unknown theory kind '" + a.kind + "' (chain, pz, required-z)");
  }
  emit(a.out, render(header, rows, a.format));
  return kOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::vector<std::string> results;
  std::string mode = "ps", family, format = "csv", out, by = "sigma";
  double exponent = 2.0, p = 0.5;
  std::optional<double> sigma;
  std::optional<std::uint64_t> n;
  std::size_t resamples = 1000;
  bool preserved_only = false, allow_mixed = false;
  TheoryArgs theory;
};

ResultTable load_results(const std::vector<std::string>& paths, bool allow_mixed) {
  if (paths.empty()) throw ValidationError("analyze needs --results");
  ResultTable all;
  for (const auto& p : paths) {
    std::istringstream in(read_file(p));
    ResultTable t = io::read_results_csv(in, allow_mixed);
    if (all.records.empty() && all.manifest_hash.empty()) all.manifest_hash = t.manifest_hash;
    else if (t.manifest_hash != all.manifest_hash) {
      if (!allow_mixed) throw ValidationError("results files come from different manifests (use --allow-mixed)");
      all.manifest_hash = "mixed";
    }
    all.records.insert(all.records.end(), t.records.begin(), t.records.end());
  }
  all.sort();
  if (!all.keys_unique()) throw ValidationError("results contain duplicate cells");
  return all;
}

Family pick_family(const ResultTable& t, const std::string& requested) {
  if (!requested.empty()) return parse_family(requested);
  if (t.records.empty()) throw InsufficientDataError("results are empty");
  const Family f = t.records.front().family;
  for (const auto& r : t.records)
    if (r.family != f) throw ValidationError("results mix families; pass --family");
  return f;
}

// sigma_p per size; sizes whose curve does not bracket p get an empty value
// and a reason.
std::vector<std::tuple<std::uint64_t, std::optional<double>, std::string>> sigma_p_by_size(
    const ResultTable& t, Family f, double p) {
  std::set<std::uint64_t> sizes;
  for (const auto& g : groups_of(t, f)) sizes.insert(g.n);
  std::vector<std::tuple<std::uint64_t, std::optional<double>, std::string>> out;
  for (auto n : sizes) {
    try {
      out.emplace_back(n, extract_sigma_p(t, p, f, n), "");
    } catch (const OutOfRangeError& e) {
      out.emplace_back(n, std::nullopt, "not bracketed");
    } catch (const InsufficientDataError& e) {
      out.emplace_back(n, std::nullopt, "too few sigmas");
    }
  }
  return out;
}

int cmd_analyze(const AnalyzeArgs& a) {
  if (a.mode == "theory") return cmd_theory(a.theory);
  const ResultTable t = load_results(a.results, a.allow_mixed);
  const Family f = pick_family(t, a.family);
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  if (a.mode == "ps") {
    header = {"family", "n", "sigma", "instances", "median_ps", "lo", "hi", "bootstrap_sd"};
    for (const auto& g : groups_of(t, f)) {
      const auto e = estimate_ps(t, g, a.resamples, 0, a.preserved_only);
      rows.push_back({std::string(family_tag(f)), num(g.n), num(g.sigma), num(std::uint64_t{e.instances}),
                      num(e.median), num(e.lo), num(e.hi), num(e.bootstrap_sd)});
    }
  } else if (a.mode == "collapse") {
    header = {"n", "sigma", "x", "median_ps", "lo", "hi"};
    for (const auto& c : collapse_table(t, f, a.exponent, a.resamples))
      rows.push_back({num(c.n), num(c.sigma), num(c.x), num(c.ps.median), num(c.ps.lo), num(c.ps.hi)});
  } else if (a.mode == "sigma-p") {
    header = {"n", "p", "sigma_p", "note"};
    for (const auto& [n, s, note] : sigma_p_by_size(t, f, a.p))
      rows.push_back({num(n), num(a.p), s ? num(*s) : "", note});
  } else if (a.mode == "fit") {
    std::vector<SizePoint> pts;
    for (const auto& [n, s, note] : sigma_p_by_size(t, f, a.p))
      if (s) pts.push_back({static_cast<double>(n), *s});
    if (pts.size() < 3)
      throw ValidationError("fit needs sigma_p at three or more sizes, have " + std::to_string(pts.size()));
    const auto fit = fit_power_law(pts);
    header = {"p", "sizes", "exponent", "std_error", "prefactor"};
    rows.push_back({num(a.p), num(std::uint64_t{pts.size()}), num(fit.exponent),
                    fit.std_error ? num(*fit.std_error) : "", num(std::exp(fit.intercept))});
  } else if (a.mode == "energy-dist") {
    EnergyDistFit fit;
    if (a.by == "sigma") {
      if (!a.n) throw ValidationError("energy-dist by sigma needs --n");
      fit = energy_dist_vs_sigma(t, f, *a.n);
    } else if (a.by == "size") {
      if (!a.sigma) throw ValidationError("energy-dist by size needs --sigma");
      fit = energy_dist_vs_size(t, f, *a.sigma);
    } else {
      throw ValidationError("--by must be sigma or size");
    }
    header = {"x", "events", "mean", "std", "fit_mean", "fit_std"};
    for (const auto& [x, d] : fit.points)
      rows.push_back({num(x), num(std::uint64_t{d.events}), num(d.mean), num(d.std),
                      num(fit.mean_fit.intercept + fit.mean_fit.slope * x),
                      num(fit.std_fit.intercept + fit.std_fit.slope * std::sqrt(x))});
    std::cerr << "mean = " << fit.mean_fit.intercept << " + " << fit.mean_fit.slope << " x; std = "
              << fit.std_fit.intercept << " + " << fit.std_fit.slope << " sqrt(x)\n";
  } else {
    throw ValidationError("unknown analyze mode '" + a.mode + "'");
  }
  emit(a.out, render(header, rows, a.format));
  return kOk;
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> results;
  std::string family, out;
  bool allow_mixed = false;
  double sigma = 0.1;
};

int cmd_report(const ReportArgs& a) {
  const ResultTable t = load_results(a.results, a.allow_mixed);
  const Family f = pick_family(t, a.family);
  std::ostringstream os;
  os << "manifest " << t.manifest_hash << ", family " << family_tag(f) << ", " << t.records.size()
     << " records\n\n";
  os << "     n    sigma  preserved    trivial      chaos  median_ps  [lo, hi]\n";
  for (const auto& g : groups_of(t, f)) {
    std::map<Outcome, std::uint64_t> c;
    for (const auto& r : t.records)
      if (r.family == f && r.n == g.n && r.sigma == g.sigma) ++c[r.outcome];
    os << std::setw(6) << g.n << ' ' << std::setw(8) << g.sigma << ' ' << std::setw(10)
       << c[Outcome::Preserved] << ' ' << std::setw(10) << c[Outcome::TrivialExcitation] << ' '
       << std::setw(10) << c[Outcome::ChaosEvent] << ' ';
    try {
      const auto e = estimate_ps(t, g);
      os << std::setw(10) << e.median << "  [" << e.lo << ", " << e.hi << "]\n";
    } catch (const InsufficientDataError&) {
      os << std::setw(10) << "-" << "  (fewer than two instances)\n";
    }
  }
  for (auto which : {EventStat::W, EventStat::D}) {
    try {
      const auto s = event_stat_scaling(t, f, a.sigma, which, 1000);
      os << "\nmedian " << (which == EventStat::W ? "W" : "D") << " at sigma " << a.sigma << ": slope "
         << s.slope << " +- " << s.slope_sd << " (bootstrap SD), intercept " << s.intercept << '\n';
    } catch (const InsufficientDataError&) {
    }
  }
  emit(a.out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isingchaos: analog-noise robustness of Ising ground states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write random instances");
  g->add_option("--family", gen.family, "chain | square_grid | chimera | xorsat3")->required();
  g->add_option("--size,-L,-n", gen.size, "spins (chain, xorsat3) or side length (square_grid, chimera)")
      ->required();
  g->add_option("--count", gen.count, "number of instances");
  g->add_option("--seed", gen.seed, "base seed");
  g->add_option("--J", gen.J, "chain coupling magnitude");
  g->add_flag("--ferro", gen.ferro, "ferromagnetic chain");
  g->add_option("--out-dir,-o", gen.out_dir, "output directory (default: $ISINGCHAOS_DATA_DIR or .)");

  PerturbArgs pa;
  auto* p = app.add_subcommand("perturb", "apply Gaussian analog noise to an instance");
  p->add_option("--in,-i", pa.in, "instance file")->required();
  p->add_option("--sigma", pa.sigma, "noise standard deviation")->required();
  p->add_option("--targets", pa.targets, "couplings | couplings+fields");
  p->add_option("--clamp", pa.clamp, "clip magnitudes to this value");
  p->add_option("--seed", pa.seed, "master seed");
  p->add_option("--instance-id", pa.instance_id, "instance label of the noise stream");
  p->add_option("--realization", pa.realization, "realization label of the noise stream");
  p->add_option("--out,-o", pa.out, "output file (default: stdout)");

  SolveArgs sa;
  auto* s = app.add_subcommand("solve", "find a ground state");
  s->add_option("--in,-i", sa.in, "instance file")->required();
  s->add_option("--solver", sa.solver, "exact | grid-dp | chain-dp | elimination | pt");
  s->add_option("--sweeps", sa.pt.sweeps, "parallel tempering sweeps");
  s->add_option("--replicas", sa.pt.n_replicas, "parallel tempering temperatures");
  s->add_option("--beta-min", sa.pt.beta_min, "hottest inverse temperature");
  s->add_option("--beta-max", sa.pt.beta_max, "coldest inverse temperature");
  s->add_option("--seed", sa.seed, "solver seed");
  s->add_option("--descent", sa.descent, "steepest-descent sweeps applied to the answer");
  s->add_option("--out,-o", sa.out, "output file (default: stdout)");

  RunArgs ra;
  auto* r = app.add_subcommand("run", "execute or resume a sweep described by a manifest");
  r->add_option("manifest", ra.manifest, "manifest JSON file")->required();
  r->add_option("--out,-o", ra.out, "results CSV (default: <data dir>/<manifest>-<hash>.csv)");
  r->add_option("--jobs,-j", ra.jobs, "worker threads")->check(CLI::PositiveNumber);
  r->add_option("--limit", ra.limit, "stop after this many new cells");
  r->add_flag("--json", ra.json_mirror, "also write a JSON mirror of the results");

  AnalyzeArgs aa;
  auto* an = app.add_subcommand("analyze", "statistics over result tables");
  an->add_option("--results,-r", aa.results, "results CSV files");
  an->add_option("--mode,-m", aa.mode, "ps | collapse | sigma-p | fit | energy-dist | theory");
  an->add_option("--family", aa.family, "family to analyze (default: the only one present)");
  an->add_option("--exponent", aa.exponent, "collapse exponent a in x = sigma^a n");
  an->add_option("--p", aa.p, "target success probability for sigma-p and fit");
  an->add_option("--by", aa.by, "energy-dist abscissa: sigma | size");
  an->add_option("--sigma", aa.sigma, "fixed sigma for energy-dist by size");
  an->add_option("--n", aa.n, "fixed nominal size for energy-dist by sigma");
  an->add_option("--resamples", aa.resamples, "bootstrap resamples");
  an->add_flag("--preserved-only", aa.preserved_only, "count trivial excitations as failures");
  an->add_flag("--allow-mixed", aa.allow_mixed, "accept rows from different manifests");
  an->add_option("--format", aa.format, "csv | json");
  an->add_option("--out,-o", aa.out, "output file (default: stdout)");
  an->add_option("--kind", aa.theory.kind, "theory table: chain | pz | required-z");
  an->add_option("--J", aa.theory.J, "theory: chain coupling");
  an->add_option("--sizes", aa.theory.sizes, "theory: chain lengths");
  an->add_option("--sigmas", aa.theory.sigmas, "theory: sigma grid");
  an->add_option("--z", aa.theory.zs, "theory: z grid");
  an->add_option("--n-es", aa.theory.n_es, "theory: effective excited-state count");
  an->add_option("--n-gs", aa.theory.n_gs, "theory: effective ground-state count");
  an->add_option("--ps", aa.theory.ps, "theory: success probabilities");

  TheoryArgs ta;
  auto* th = app.add_subcommand("theory", "analytic curves for overlay plots");
  th->add_option("kind", ta.kind, "chain | pz | required-z");
  th->add_option("--J", ta.J, "chain coupling");
  th->add_option("--sizes,-n", ta.sizes, "chain lengths");
  th->add_option("--sigmas", ta.sigmas, "sigma grid");
  th->add_option("--z", ta.zs, "z grid");
  th->add_option("--n-es", ta.n_es, "effective excited-state count");
  th->add_option("--n-gs", ta.n_gs, "effective ground-state count");
  th->add_option("--ps", ta.ps, "success probabilities");
  th->add_option("--format", ta.format, "csv | json");
  th->add_option("--out,-o", ta.out, "output file (default: stdout)");

  ReportArgs rep;
  auto* rp = app.add_subcommand("report", "plain-text summary of result tables");
  rp->add_option("--results,-r", rep.results, "results CSV files")->required();
  rp->add_option("--family", rep.family, "family to summarize");
  rp->add_option("--sigma", rep.sigma, "sigma for the W/D scaling lines");
  rp->add_flag("--allow-mixed", rep.allow_mixed, "accept rows from different manifests");
  rp->add_option("--out,-o", rep.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  aa.theory.format = aa.format;
  aa.theory.out = aa.out;
  try {
    if (*g) return cmd_generate(gen);
    if (*p) return cmd_perturb(pa);
    if (*s) return cmd_solve(sa);
    if (*r) return cmd_run(ra);
    if (*an) return cmd_analyze(aa);
    if (*th) return cmd_theory(ta);
    if (*rp) return cmd_report(rep);
  } catch (const SolverGuardError& e) {
    std::cerr << "solver guard: " << e.what() << '\n';
    return kSolverGuard;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kValidation;
  } catch (const OutOfRangeError& e) {
    std::cerr << "out of range: " << e.what() << '\n';
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
  return kOther;
}
