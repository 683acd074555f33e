#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdvlab/errors.hpp"
#include "kdvlab/grid.hpp"

namespace kdvlab {

using Json = nlohmann::ordered_json;

struct ScenarioConfig {
  std::string name;
  std::string out_dir = "out";
};

struct GridConfig {
  double base_length_over_2pi = 64.0;  // L = 2 pi * this; base experiment domain 128 pi
  std::size_t base_points = 8192;
  bool auto_scale = true;  // enlarge per band to meet wrap-around and alias headroom
  std::size_t padding = 2;
};

struct PhysicsConfig {
  double epsilon = 0.5;
  std::vector<double> band_list = {8.0, 16.0, 32.0, 64.0};
  std::vector<double> kato_band_list = {8.0, 16.0, 32.0};
  std::vector<double> sobolev_exponents = {-1.25, -1.5};
  std::vector<double> observation_times = {0.02, 0.05};
  double window_radius = 2.0;
  double kato_horizon = 0.05;
  double theta_amplitude = 0.3;
  double soliton_kappa = 1.0;
  double conservation_horizon = 0.1;
  double smooth_horizon = 0.5;
  double mass_balance_horizon = 0.02;
  std::map<long, double> dt_table = {{8, 2.5e-5}, {16, 6.25e-6}, {32, 6.25e-6}, {64, 2.5e-6}};
  double dt_smooth = 0.05;
  double dt_smooth_kdv = 5e-4;
  double dt_soliton = 2.5e-4;
  double dt_rough_kdv = 1e-5;
  double dt_mass_balance = 1e-4;
  double dt_mass_balance_band = 2.5e-5;
  double snapshot_stride = 2.5e-3;
  std::map<long, double> kato_stride_table = {{8, 1e-3}, {16, 1e-3}, {32, 2.5e-4}, {64, 1.25e-4}};
  double mass_balance_stride = 1e-3;
  double mass_balance_stride_band = 5e-4;
  std::vector<double> increment_deltas = {2e-3, 4e-3, 8e-3};
  double drift_guard = 1e-8;
  int max_retries = 4;
  bool rough_kdv_cross_check = true;

  /// Step size for an mKdV band run; the tabulated values were calibrated so
  /// that the relative L2 drift stays below 1e-8 over [0, 0.1], the drift
  /// guard catches anything the table misses.
  double dt_for_band(double N) const {
    const long key = std::lround(N);
    auto it = dt_table.find(key);
    if (it != dt_table.end() && std::abs(N - static_cast<double>(key)) < 1e-9) return it->second;
    return 5e-5 * std::pow(8.0 / N, 1.5);
  }

  double kato_stride_for_band(double N) const {
    const long key = std::lround(N);
    auto it = kato_stride_table.find(key);
    if (it != kato_stride_table.end() && std::abs(N - static_cast<double>(key)) < 1e-9)
      return it->second;
    // resolve the window transit time with ~12 samples
    const double transit = (2.0 * window_radius + 2.0 * std::numbers::pi) /
                           (3.0 * (N + 0.5) * (N + 0.5));
    return transit / 12.0;
  }
};

struct ToleranceConfig {
  double decomposition_residual = 1e-10;
  double c_theta_spread = 1e-10;
  double slope_band = 0.15;
  double oracle_point_agreement = 0.05;  // per-point measured/oracle distance mismatch
  double miura_correspondence = 1e-6;
  double miura_halving_gain = 8.0;
  double conservation_l2 = 1e-8;
  double conservation_mean = 1e-12;
  double soliton_linf = 1e-6;
  double soliton_energy_drift = 1e-7;
  double soliton_residual = 1e-8;
  double ratio_band = 2.0;       // max/min across the kato sweep
  double oracle_agreement = 0.3; // nonlinear vs linear closed-form window functional
  double kato_quadrature = 0.01; // K invariance under snapshot-density doubling
  double mass_balance = 1e-3;
  double mass_balance_smooth = 1e-4;
  double mass_balance_shrink = 3.0;  // stride halving must shrink the residual at least this much
  double persistence = 0.5;          // O_v(t*) >= persistence * O_v(0)
  double escape = 0.2;               // |O_Phi(t*)| <= escape * O_v(0) at the largest band
  double initial_match = 0.1;        // |O_Phi(0) - O_v(0)| <= initial_match * O_v(0)
  double trend_slack = 0.05;         // allowed adjacent-pair violation in trend checks
  double rough_kdv_agreement = 1e-2;
};

struct OutputConfig {
  bool dump_trajectories = false;
  int workers = 1;
};

struct Config {
  ScenarioConfig scenario;
  GridConfig grid;
  PhysicsConfig physics;
  ToleranceConfig tolerances;
  OutputConfig output;
};

namespace detail {

inline void overlay(const Json& j, const char* key, double& v) {
  if (j.contains(key)) v = j.at(key).get<double>();
}
inline void overlay(const Json& j, const char* key, std::size_t& v) {
  if (j.contains(key)) v = j.at(key).get<std::size_t>();
}
inline void overlay(const Json& j, const char* key, int& v) {
  if (j.contains(key)) v = j.at(key).get<int>();
}
inline void overlay(const Json& j, const char* key, bool& v) {
  if (j.contains(key)) v = j.at(key).get<bool>();
}
inline void overlay(const Json& j, const char* key, std::string& v) {
  if (j.contains(key)) v = j.at(key).get<std::string>();
}
inline void overlay(const Json& j, const char* key, std::vector<double>& v) {
  if (j.contains(key)) v = j.at(key).get<std::vector<double>>();
}
inline void overlay(const Json& j, const char* key, std::map<long, double>& v) {
  if (!j.contains(key)) return;
  v.clear();
  for (const auto& [k, val] : j.at(key).items()) v[std::stol(k)] = val.get<double>();
}

}  // namespace detail

/// Overlay a JSON document (four sections: scenario, grid, physics,
/// tolerances, plus output) onto the built-in defaults. Unknown keys are
/// rejected so typos fail loudly.
inline Config config_from_json(const Json& j) {
  Config c;
  static const std::map<std::string, std::vector<std::string>> known = {
      {"scenario", {"name", "out_dir"}},
      {"grid", {"base_length_over_2pi", "base_points", "auto_scale", "padding"}},
      {"physics",
       {"epsilon", "band_list", "kato_band_list", "sobolev_exponents", "observation_times",
        "window_radius", "kato_horizon", "theta_amplitude", "soliton_kappa",
        "conservation_horizon", "smooth_horizon", "mass_balance_horizon", "dt_table", "dt_smooth",
        "dt_smooth_kdv", "dt_soliton", "dt_rough_kdv", "dt_mass_balance", "dt_mass_balance_band",
        "snapshot_stride", "kato_stride_table", "mass_balance_stride", "mass_balance_stride_band",
        "increment_deltas",
        "drift_guard", "max_retries", "rough_kdv_cross_check"}},
      {"tolerances",
       {"decomposition_residual", "c_theta_spread", "slope_band", "oracle_point_agreement",
        "miura_correspondence", "miura_halving_gain", "conservation_l2", "conservation_mean",
        "soliton_linf", "soliton_energy_drift", "soliton_residual", "ratio_band",
        "oracle_agreement", "kato_quadrature", "mass_balance", "mass_balance_smooth",
        "mass_balance_shrink", "persistence", "escape", "initial_match", "trend_slack",
        "rough_kdv_agreement"}},
      {"output", {"dump_trajectories", "workers"}},
  };
  for (const auto& [section, body] : j.items()) {
    auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section '" + section + "'");
    for (const auto& [key, val] : body.items()) {
      (void)val;
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }
  }
  if (j.contains("scenario")) {
    detail::overlay(j["scenario"], "name", c.scenario.name);
    detail::overlay(j["scenario"], "out_dir", c.scenario.out_dir);
  }
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    detail::overlay(g, "base_length_over_2pi", c.grid.base_length_over_2pi);
    detail::overlay(g, "base_points", c.grid.base_points);
    detail::overlay(g, "auto_scale", c.grid.auto_scale);
    detail::overlay(g, "padding", c.grid.padding);
  }
  if (j.contains("physics")) {
    const Json& p = j["physics"];
    detail::overlay(p, "epsilon", c.physics.epsilon);
    detail::overlay(p, "band_list", c.physics.band_list);
    detail::overlay(p, "kato_band_list", c.physics.kato_band_list);
    detail::overlay(p, "sobolev_exponents", c.physics.sobolev_exponents);
    detail::overlay(p, "observation_times", c.physics.observation_times);
    detail::overlay(p, "window_radius", c.physics.window_radius);
    detail::overlay(p, "kato_horizon", c.physics.kato_horizon);
    detail::overlay(p, "theta_amplitude", c.physics.theta_amplitude);
    detail::overlay(p, "soliton_kappa", c.physics.soliton_kappa);
    detail::overlay(p, "conservation_horizon", c.physics.conservation_horizon);
    detail::overlay(p, "smooth_horizon", c.physics.smooth_horizon);
    detail::overlay(p, "mass_balance_horizon", c.physics.mass_balance_horizon);
    detail::overlay(p, "dt_table", c.physics.dt_table);
    detail::overlay(p, "dt_smooth", c.physics.dt_smooth);
    detail::overlay(p, "dt_smooth_kdv", c.physics.dt_smooth_kdv);
    detail::overlay(p, "dt_soliton", c.physics.dt_soliton);
    detail::overlay(p, "dt_rough_kdv", c.physics.dt_rough_kdv);
    detail::overlay(p, "dt_mass_balance", c.physics.dt_mass_balance);
    detail::overlay(p, "dt_mass_balance_band", c.physics.dt_mass_balance_band);
    detail::overlay(p, "snapshot_stride", c.physics.snapshot_stride);
    detail::overlay(p, "kato_stride_table", c.physics.kato_stride_table);
    detail::overlay(p, "mass_balance_stride", c.physics.mass_balance_stride);
    detail::overlay(p, "mass_balance_stride_band", c.physics.mass_balance_stride_band);
    detail::overlay(p, "increment_deltas", c.physics.increment_deltas);
    detail::overlay(p, "drift_guard", c.physics.drift_guard);
    detail::overlay(p, "max_retries", c.physics.max_retries);
    detail::overlay(p, "rough_kdv_cross_check", c.physics.rough_kdv_cross_check);
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    ToleranceConfig& o = c.tolerances;
    detail::overlay(t, "decomposition_residual", o.decomposition_residual);
    detail::overlay(t, "c_theta_spread", o.c_theta_spread);
    detail::overlay(t, "slope_band", o.slope_band);
    detail::overlay(t, "oracle_point_agreement", o.oracle_point_agreement);
    detail::overlay(t, "miura_correspondence", o.miura_correspondence);
    detail::overlay(t, "miura_halving_gain", o.miura_halving_gain);
    detail::overlay(t, "conservation_l2", o.conservation_l2);
    detail::overlay(t, "conservation_mean", o.conservation_mean);
    detail::overlay(t, "soliton_linf", o.soliton_linf);
    detail::overlay(t, "soliton_energy_drift", o.soliton_energy_drift);
    detail::overlay(t, "soliton_residual", o.soliton_residual);
    detail::overlay(t, "ratio_band", o.ratio_band);
    detail::overlay(t, "oracle_agreement", o.oracle_agreement);
    detail::overlay(t, "kato_quadrature", o.kato_quadrature);
    detail::overlay(t, "mass_balance", o.mass_balance);
    detail::overlay(t, "mass_balance_smooth", o.mass_balance_smooth);
    detail::overlay(t, "mass_balance_shrink", o.mass_balance_shrink);
    detail::overlay(t, "persistence", o.persistence);
    detail::overlay(t, "escape", o.escape);
    detail::overlay(t, "initial_match", o.initial_match);
    detail::overlay(t, "trend_slack", o.trend_slack);
    detail::overlay(t, "rough_kdv_agreement", o.rough_kdv_agreement);
  }
  if (j.contains("output")) {
    detail::overlay(j["output"], "dump_trajectories", c.output.dump_trajectories);
    detail::overlay(j["output"], "workers", c.output.workers);
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config: parse failure in '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

/// Echo of the effective configuration, written into every manifest.
inline Json config_to_json(const Config& c) {
  Json j;
  j["scenario"] = {{"name", c.scenario.name}, {"out_dir", c.scenario.out_dir}};
  j["grid"] = {{"base_length_over_2pi", c.grid.base_length_over_2pi},
               {"base_points", c.grid.base_points},
               {"auto_scale", c.grid.auto_scale},
               {"padding", c.grid.padding}};
  Json dt_table = Json::object();
  for (const auto& [k, v] : c.physics.dt_table) dt_table[std::to_string(k)] = v;
  Json stride_table = Json::object();
  for (const auto& [k, v] : c.physics.kato_stride_table) stride_table[std::to_string(k)] = v;
  j["physics"] = {{"epsilon", c.physics.epsilon},
                  {"band_list", c.physics.band_list},
                  {"kato_band_list", c.physics.kato_band_list},
                  {"sobolev_exponents", c.physics.sobolev_exponents},
                  {"observation_times", c.physics.observation_times},
                  {"window_radius", c.physics.window_radius},
                  {"kato_horizon", c.physics.kato_horizon},
                  {"theta_amplitude", c.physics.theta_amplitude},
                  {"soliton_kappa", c.physics.soliton_kappa},
                  {"conservation_horizon", c.physics.conservation_horizon},
                  {"smooth_horizon", c.physics.smooth_horizon},
                  {"mass_balance_horizon", c.physics.mass_balance_horizon},
                  {"dt_table", dt_table},
                  {"dt_smooth", c.physics.dt_smooth},
                  {"dt_smooth_kdv", c.physics.dt_smooth_kdv},
                  {"dt_soliton", c.physics.dt_soliton},
                  {"dt_rough_kdv", c.physics.dt_rough_kdv},
                  {"dt_mass_balance", c.physics.dt_mass_balance},
                  {"dt_mass_balance_band", c.physics.dt_mass_balance_band},
                  {"snapshot_stride", c.physics.snapshot_stride},
                  {"kato_stride_table", stride_table},
                  {"mass_balance_stride", c.physics.mass_balance_stride},
                  {"mass_balance_stride_band", c.physics.mass_balance_stride_band},
                  {"increment_deltas", c.physics.increment_deltas},
                  {"drift_guard", c.physics.drift_guard},
                  {"max_retries", c.physics.max_retries},
                  {"rough_kdv_cross_check", c.physics.rough_kdv_cross_check}};
  const ToleranceConfig& o = c.tolerances;
  j["tolerances"] = {{"decomposition_residual", o.decomposition_residual},
                     {"c_theta_spread", o.c_theta_spread},
                     {"slope_band", o.slope_band},
                     {"oracle_point_agreement", o.oracle_point_agreement},
                     {"miura_correspondence", o.miura_correspondence},
                     {"miura_halving_gain", o.miura_halving_gain},
                     {"conservation_l2", o.conservation_l2},
                     {"conservation_mean", o.conservation_mean},
                     {"soliton_linf", o.soliton_linf},
                     {"soliton_energy_drift", o.soliton_energy_drift},
                     {"soliton_residual", o.soliton_residual},
                     {"ratio_band", o.ratio_band},
                     {"oracle_agreement", o.oracle_agreement},
                     {"kato_quadrature", o.kato_quadrature},
                     {"mass_balance", o.mass_balance},
                     {"mass_balance_smooth", o.mass_balance_smooth},
                     {"mass_balance_shrink", o.mass_balance_shrink},
                     {"persistence", o.persistence},
                     {"escape", o.escape},
                     {"initial_match", o.initial_match},
                     {"trend_slack", o.trend_slack},
                     {"rough_kdv_agreement", o.rough_kdv_agreement}};
  j["output"] = {{"dump_trajectories", c.output.dump_trajectories},
                 {"workers", c.output.workers}};
  return j;
}

// ---------------------------------------------------------------------------
// Grid planning
// ---------------------------------------------------------------------------

inline std::size_t next_pow2(std::size_t v) {
  std::size_t p = 16;
  while (p < v) p *= 2;
  return p;
}

/// Grid for an evolution run from a band-[N, N+1) datum. The length keeps the
/// fastest packet (group speed 3(N+1/2)^2, observed through a window of
/// radius 2R) clear of wrap-around over [-max_time, max_time]; the point
/// count gives the quadratic image and the dealiased cubic full headroom:
/// nyquist >= 2(2N+2). Lengths stay integer multiples of 2 pi so that unit
/// frequency bands align with the lattice.
inline Grid plan_band_grid(const GridConfig& cfg, double N, double window_radius,
                           double max_time) {
  double over_2pi = cfg.base_length_over_2pi;
  if (cfg.auto_scale && max_time > 0.0) {
    const double min_half =
        (3.0 * (N + 0.5) * (N + 0.5) * max_time + 2.0 * window_radius + 8.0) * 1.05;
    over_2pi = std::max(over_2pi, std::ceil(min_half / std::numbers::pi));
  }
  const double length = 2.0 * std::numbers::pi * over_2pi;
  std::size_t points = cfg.base_points;
  if (cfg.auto_scale) {
    const double alias_need = 2.0 * length * (2.0 * N + 2.0) / std::numbers::pi;
    points = next_pow2(std::max<std::size_t>(cfg.base_points,
                                             static_cast<std::size_t>(std::ceil(alias_need))));
  }
  return Grid(length, points);
}

/// Grid for transform-only scans (no time stepping): base length, points
/// scaled for the quadratic image of the largest band.
inline Grid plan_scan_grid(const GridConfig& cfg, double max_band) {
  return plan_band_grid(cfg, max_band, 0.0, 0.0);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {
inline bool is_multiple(double value, double unit, double tol = 1e-9) {
  if (unit <= 0.0) return false;
  const double q = value / unit;
  return std::abs(q - std::round(q)) <= tol * std::max(1.0, std::abs(q));
}
}  // namespace detail

/// Total up-front validation: collects every violated constraint and throws
/// one ConfigError listing all of them, before any integration starts.
inline void validate_config(const Config& c) {
  std::vector<std::string> bad;
  auto require = [&bad](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };

  require(!(c.physics.epsilon <= 0.0 || c.physics.epsilon >= 1.0), "epsilon must lie in (0, 1)");
  require(c.grid.base_length_over_2pi >= 16.0, "base domain must span at least 32 pi");
  require(c.grid.base_points >= 16 && c.grid.base_points % 2 == 0,
          "base_points must be even and >= 16");
  require(c.grid.padding >= 2, "padding factor must be >= 2");
  require(c.output.workers >= 1, "workers must be >= 1");
  require(!c.physics.band_list.empty(), "band_list must not be empty");
  require(c.physics.window_radius > 0.0, "window radius must be positive");
  require(c.physics.kato_horizon > 0.0, "kato horizon must be positive");
  for (double N : c.physics.band_list)
    require(N > 2.0, "band start must exceed 2 (got " + std::to_string(N) + ")");
  for (double s : c.physics.sobolev_exponents)
    require(s < -1.0, "sobolev exponents must be below -1 (got " + std::to_string(s) + ")");
  for (double t : c.physics.observation_times)
    require(t > 0.0, "observation times must be positive");

  const double t_max = c.physics.observation_times.empty()
                           ? 0.0
                           : *std::max_element(c.physics.observation_times.begin(),
                                               c.physics.observation_times.end());

  for (double N : c.physics.band_list) {
    const Grid g = plan_band_grid(c.grid, N, c.physics.window_radius, t_max);
    const double L = g.length();
    const double n = static_cast<double>(g.size());
    require(n >= 4.0 * L * (2.0 * N + 2.0) / (2.0 * std::numbers::pi),
            "alias headroom violated for band " + std::to_string(N));
    require(3.0 * (N + 0.5) * (N + 0.5) * t_max < 0.5 * L - 2.0 * c.physics.window_radius,
            "wrap-around constraint violated for band " + std::to_string(N));
    require(2.0 * c.physics.window_radius < 0.5 * L, "window exceeds half domain");
    require(1.0 / g.dxi() >= 16.0, "frequency band under-resolved for band " + std::to_string(N));
    const double dt = c.physics.dt_for_band(N);
    require(dt > 0.0, "dt must be positive for band " + std::to_string(N));
    require(detail::is_multiple(c.physics.snapshot_stride, dt),
            "snapshot stride must be a multiple of dt for band " + std::to_string(N));
    for (double t : c.physics.observation_times)
      require(detail::is_multiple(t, c.physics.snapshot_stride),
              "observation time " + std::to_string(t) + " must sit on the snapshot lattice");
  }
  for (double N : c.physics.kato_band_list) {
    const double dt = c.physics.dt_for_band(N);
    const double stride = c.physics.kato_stride_for_band(N);
    require(detail::is_multiple(stride, dt),
            "kato stride must be a multiple of dt for band " + std::to_string(N));
    require(detail::is_multiple(c.physics.kato_horizon, stride),
            "kato horizon must sit on the snapshot lattice for band " + std::to_string(N));
    for (double d : c.physics.increment_deltas)
      require(detail::is_multiple(d, stride) && d >= stride - 1e-12,
              "increment delta " + std::to_string(d) + " must be a multiple of the stride");
  }
  require(detail::is_multiple(c.physics.smooth_horizon, c.physics.dt_smooth),
          "smooth horizon must be a multiple of dt_smooth");
  require(detail::is_multiple(c.physics.mass_balance_stride, c.physics.dt_mass_balance) &&
              detail::is_multiple(c.physics.mass_balance_horizon, c.physics.mass_balance_stride),
          "mass balance stride/horizon must sit on the dt lattice");
  require(detail::is_multiple(c.physics.mass_balance_stride_band, c.physics.dt_mass_balance_band) &&
              detail::is_multiple(c.physics.mass_balance_horizon,
                                  c.physics.mass_balance_stride_band),
          "band mass balance stride/horizon must sit on the dt lattice");
  require(c.physics.drift_guard > 0.0, "drift guard must be positive");
  require(c.physics.max_retries >= 0, "max_retries must be non-negative");

  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "config validation failed (" << bad.size() << " problem"
        << (bad.size() == 1 ? "" : "s") << "):";
    for (const std::string& b : bad) msg << "\n  - " << b;
    throw ConfigError(msg.str());
  }
}

}  // namespace kdvlab
