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
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "isingchaos/chaos.hpp"
#include "isingchaos/errors.hpp"
#include "isingchaos/stats.hpp"

namespace isingchaos {

// Probability that a standard normal variate lies below -z. Delegates to the
// C library erfc, which is accurate to a few ulp over the whole real line.
inline double p_of_z(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Probability that one ground state stays below all n_es independent
// excited states.
inline double p_single_gs(double p, double n_es) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p_single_gs: p outside [0, 1]");
  if (!(n_es >= 0.0)) throw ValidationError("p_single_gs: n_es must be non-negative");
  if (n_es == 0.0) return 1.0;
  return std::exp(n_es * std::log1p(-p));
}

// Probability that at least one of n_gs ground states survives.
inline double p_success(double p1, double n_gs) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ValidationError("p_success: p1 outside [0, 1]");
  if (!(n_gs >= 1.0)) throw ValidationError("p_success: n_gs must be at least 1");
  if (p1 == 1.0) return 1.0;
  return -std::expm1(n_gs * std::log1p(-p1));
}

// Success probability predicted for a common z.
inline double success_from_z(double z, double n_es, double n_gs) {
  return p_success(p_single_gs(p_of_z(z), n_es), n_gs);
}

// Small-failure approximation z^2 = 2 (ln N_ES - ln(1 - p_s) / N_GS).
inline double required_z(double p_s, double n_es, double n_gs) {
  if (!(p_s > 0.0 && p_s < 1.0)) throw ValidationError("required_z: p_s must lie in (0, 1)");
  if (!(n_es >= 1.0)) throw ValidationError("required_z: n_es must be at least 1");
  if (!(n_gs >= 1.0)) throw ValidationError("required_z: n_gs must be at least 1");
  return std::sqrt(2.0 * (std::log(n_es) - std::log1p(-p_s) / n_gs));
}

// Exact inversion of success_from_z by bisection; success_from_z increases
// monotonically in z.
inline double required_z_exact(double p_s, double n_es, double n_gs) {
  if (!(p_s > 0.0 && p_s < 1.0)) throw ValidationError("required_z_exact: p_s must lie in (0, 1)");
  double lo = -40.0, hi = 40.0;
  if (success_from_z(hi, n_es, n_gs) < p_s || success_from_z(lo, n_es, n_gs) > p_s)
    throw OutOfRangeError("required_z_exact: target not attainable");
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (success_from_z(mid, n_es, n_gs) < p_s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Effective excited-state count implied by an observed single-ground-state
// survival probability. Diagnostic only.
inline double n_es_from_survival(double p1_observed, double z) {
  if (!(p1_observed > 0.0 && p1_observed <= 1.0))
    throw ValidationError("n_es_from_survival: probability outside (0, 1]");
  return std::log(p1_observed) / std::log1p(-p_of_z(z));
}

// Noise level needed for a fixed success probability, up to a constant:
// 1 / sqrt((W + D) n^k).
inline double sigma_required(double w, double d, double n, double k) {
  if (!(w + d > 0.0)) throw ValidationError("sigma_required: w + d must be positive");
  if (!(n >= 1.0)) throw ValidationError("sigma_required: n must be at least 1");
  return 1.0 / std::sqrt((w + d) * std::pow(n, k));
}

// W, D proportional to n and k = 1.
inline double sigma_required_worst_case(double n) { return sigma_required(n, 0.0, n, 1.0); }

// Uniform chain: the ground state survives iff no bond changes sign.
inline double chain_ps(double j, double sigma, std::uint64_t n) {
  if (!(j > 0.0)) throw ValidationError("chain_ps: J must be positive");
  if (!(sigma > 0.0)) throw ValidationError("chain_ps: sigma must be positive");
  if (n < 2) throw ValidationError("chain_ps: n must be at least 2");
  return std::exp(static_cast<double>(n - 1) * std::log1p(-p_of_z(j / sigma)));
}

struct CurvePoint {
  double sigma = 0.0;
  double ps = 0.0;
};

// sigma at which a success curve crosses p. The curve is projected onto
// non-increasing values first, then interpolated linearly in log sigma.
inline double extract_sigma_p(std::vector<CurvePoint> curve, double p) {
  std::erase_if(curve, [](const CurvePoint& c) { return !(c.sigma > 0.0); });
  if (curve.size() < 2) throw InsufficientDataError("extract_sigma_p: need two positive sigmas");
  std::sort(curve.begin(), curve.end(), [](auto& a, auto& b) { return a.sigma < b.sigma; });
  std::vector<double> ys;
  for (const auto& c : curve) ys.push_back(c.ps);
  const auto mono = stats::isotonic_decreasing(ys);

  for (std::size_t i = 0; i < mono.size(); ++i)
    if (mono[i] == p) return curve[i].sigma;
  for (std::size_t i = 0; i + 1 < mono.size(); ++i) {
    if (mono[i] > p && p > mono[i + 1]) {
      const double t = (mono[i] - p) / (mono[i] - mono[i + 1]);
      const double ls = std::log(curve[i].sigma) +
                        t * (std::log(curve[i + 1].sigma) - std::log(curve[i].sigma));
      return std::exp(ls);
    }
  }
  throw OutOfRangeError("extract_sigma_p: the sigma grid does not bracket p");
}

// Median success curve of one size taken from a result table.
inline std::vector<CurvePoint> success_curve(const ResultTable& table, Family family,
                                             std::uint64_t n) {
  std::vector<CurvePoint> curve;
  for (const auto& g : groups_of(table, family)) {
    if (g.n != n) continue;
    curve.push_back({g.sigma, stats::median(per_instance_success(table, g))});
  }
  return curve;
}

inline double extract_sigma_p(const ResultTable& table, double p, Family family, std::uint64_t n) {
  return extract_sigma_p(success_curve(table, family, n), p);
}

struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;        // log prefactor
  std::optional<double> std_error;  // empty with only two points
  std::vector<double> residuals;
};

struct SizePoint {
  double n = 0.0;
  double value = 0.0;
};

// Least-squares power law value = exp(intercept) * n^exponent in log-log space.
inline FitResult fit_power_law(const std::vector<SizePoint>& points) {
  if (points.size() < 2) throw InsufficientDataError("fit_power_law: need at least two points");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.n > 0.0) || !(p.value > 0.0))
      throw ValidationError("fit_power_law: points must be positive");
    x.push_back(std::log(p.n));
    y.push_back(std::log(p.value));
  }
  const auto lf = stats::linear_fit(x, y);
  return {lf.slope, lf.intercept, lf.slope_se, lf.residuals};
}

struct EnergyDist {
  double mean = 0.0;
  double std = 0.0;
  std::size_t events = 0;
};

inline constexpr std::size_t kMinEnergyEvents = 30;

// Intended-Hamiltonian energies of the chaos-event states of one group.
inline EnergyDist energy_dist_stats(const ResultTable& table, const GroupKey& g) {
  std::vector<double> e;
  for (const auto& r : table.records)
    if (r.family == g.family && r.n == g.n && r.sigma == g.sigma &&
        r.outcome == Outcome::ChaosEvent)
      e.push_back(r.e_intended);
  if (e.size() < kMinEnergyEvents)
    throw InsufficientDataError("energy_dist_stats: " + std::to_string(e.size()) +
                                " chaos events, need " + std::to_string(kMinEnergyEvents));
  return {stats::mean(e), stats::stddev(e), e.size()};
}

// mean = a + b x and std = c + d sqrt(x) across groups, x being sigma (fixed
// n) or n (fixed sigma).
struct EnergyDistFit {
  std::vector<std::pair<double, EnergyDist>> points;
  stats::LinearFit mean_fit;  // intercept a, slope b
  stats::LinearFit std_fit;   // intercept c, slope d (against sqrt(x))
};

inline EnergyDistFit fit_energy_dist(const std::vector<std::pair<double, EnergyDist>>& points) {
  if (points.size() < 2)
    throw InsufficientDataError("energy distribution fit needs two groups with enough events");
  EnergyDistFit f;
  f.points = points;
  std::vector<double> x, sx, mu, sd;
  for (const auto& [xv, d] : points) {
    x.push_back(xv);
    sx.push_back(std::sqrt(xv));
    mu.push_back(d.mean);
    sd.push_back(d.std);
  }
  f.mean_fit = stats::linear_fit(x, mu);
  f.std_fit = stats::linear_fit(sx, sd);
  return f;
}

inline EnergyDistFit energy_dist_vs_sigma(const ResultTable& table, Family family, std::uint64_t n) {
  std::vector<std::pair<double, EnergyDist>> pts;
  for (const auto& g : groups_of(table, family)) {
    if (g.n != n) continue;
    try {
      pts.emplace_back(g.sigma, energy_dist_stats(table, g));
    } catch (const InsufficientDataError&) {
    }
  }
  return fit_energy_dist(pts);
}

inline EnergyDistFit energy_dist_vs_size(const ResultTable& table, Family family, double sigma) {
  std::vector<std::pair<double, EnergyDist>> pts;
  for (const auto& g : groups_of(table, family)) {
    if (g.sigma != sigma) continue;
    try {
      pts.emplace_back(static_cast<double>(g.n), energy_dist_stats(table, g));
    } catch (const InsufficientDataError&) {
    }
  }
  return fit_energy_dist(pts);
}

struct CollapsePoint {
  std::uint64_t n = 0;
  double sigma = 0.0;
  double x = 0.0;  // sigma^exponent * n
  PsEstimate ps;
};

inline std::vector<CollapsePoint> collapse_table(const ResultTable& table, Family family,
                                                 double exponent, std::size_t resamples = 1000) {
  if (!(exponent > 0.0)) throw ValidationError("collapse exponent must be positive");
  std::vector<CollapsePoint> out;
  for (const auto& g : groups_of(table, family)) {
    CollapsePoint c;
    c.n = g.n;
    c.sigma = g.sigma;
    c.x = std::pow(g.sigma, exponent) * static_cast<double>(g.n);
    c.ps = estimate_ps(table, g, resamples);
    out.push_back(c);
  }
  return out;
}

struct XY {
  double x = 0.0;
  double y = 0.0;
};

// Mean squared residual of points about the best non-increasing curve in x.
// Points with equal x share one fitted value.
inline double monotone_residual_variance(std::vector<XY> pts) {
  if (pts.empty()) throw InsufficientDataError("monotone_residual_variance: no points");
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x < b.x; });
  std::vector<double> ys, ws;
  std::vector<std::size_t> group_of;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == 0 || pts[i].x != pts[i - 1].x) {
      ys.push_back(0.0);
      ws.push_back(0.0);
    }
    ys.back() += pts[i].y;
    ws.back() += 1.0;
    group_of.push_back(ys.size() - 1);
  }
  for (std::size_t k = 0; k < ys.size(); ++k) ys[k] /= ws[k];
  const auto fit = stats::isotonic_decreasing(ys, ws);
  double ss = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = pts[i].y - fit[group_of[i]];
    ss += r * r;
  }
  return ss / static_cast<double>(pts.size());
}

enum class EventStat { W, D, DeltaE0, Z };

struct StatScaling {
  std::vector<SizePoint> medians;  // (n, median statistic)
  double slope = 0.0;
  double intercept = 0.0;
  double slope_sd = 0.0;  // bootstrap over instances
};

// Median of a chaos-event statistic per size at fixed sigma, its linear trend
// in n, and a bootstrap spread of the slope obtained by resampling instances
// within every size.
inline StatScaling event_stat_scaling(const ResultTable& table, Family family, double sigma,
                                      EventStat which, std::size_t resamples = 1000,
                                      std::uint64_t seed = 0) {
  auto value = [which](const ChaosRecord& r) {
    switch (which) {
      case EventStat::W: return static_cast<double>(r.W);
      case EventStat::D: return static_cast<double>(r.D);
      case EventStat::DeltaE0: return r.delta_e0;
      case EventStat::Z: return r.z;
    }
    return 0.0;
  };
  // size -> instance -> event values
  std::map<std::uint64_t, std::map<std::uint64_t, std::vector<double>>> by_size;
  for (const auto& r : table.records)
    if (r.family == family && r.sigma == sigma && r.outcome == Outcome::ChaosEvent)
      by_size[r.n][r.instance_id].push_back(value(r));
  if (by_size.size() < 2) throw InsufficientDataError("event_stat_scaling: need two sizes with events");

  StatScaling out;
  std::vector<double> xs, ys;
  for (const auto& [n, inst] : by_size) {
    std::vector<double> all;
    for (const auto& [id, v] : inst) all.insert(all.end(), v.begin(), v.end());
    out.medians.push_back({static_cast<double>(n), stats::median(all)});
    xs.push_back(static_cast<double>(n));
    ys.push_back(out.medians.back().value);
  }
  const auto lf = stats::linear_fit(xs, ys);
  out.slope = lf.slope;
  out.intercept = lf.intercept;

  Xoshiro256 rng(derive_key({salt::kBootstrap, seed, 7}));
  std::vector<double> slopes;
  for (std::size_t b = 0; b < resamples; ++b) {
    std::vector<double> by;
    for (const auto& [n, inst] : by_size) {
      std::vector<const std::vector<double>*> groups;
      for (const auto& [id, v] : inst) groups.push_back(&v);
      std::vector<double> all;
      for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto* g = groups[uniform_index(rng, groups.size())];
        all.insert(all.end(), g->begin(), g->end());
      }
      by.push_back(stats::median(all));
    }
    slopes.push_back(stats::linear_fit(xs, by).slope);
  }
  out.slope_sd = stats::stddev(slopes);
  return out;
}

}  // namespace isingchaos
