#pragma once

#include <cstdint>
#include <cstring>
#include <string>

#include <json.hpp>

#include "kdvlab/evolution.hpp"

namespace kdvlab {

/// Binary trajectory dump, little-endian throughout:
///
///   bytes 0..7   magic "KDVTRJ01"
///   u32          equation (0 = kdv, 1 = mkdv)
///   u32          scheme order
///   u64          n (points / coefficients per snapshot)
///   f64          domain length L
///   f64          dt used by the accepted run
///   u64          snapshot count
///   per snapshot f64 time, then n coefficient pairs (f64 re, f64 im) in FFT
///                storage order k = 0..n/2-1, -n/2..-1, under the convention
///                f(x) = sum_k c_k e^{i xi_k x}
inline std::string serialize_trajectory(const Trajectory& traj) {
  std::string out;
  const std::uint64_t n = traj.grid.size();
  const std::uint64_t count = traj.size();
  out.reserve(8 + 4 + 4 + 8 + 8 + 8 + 8 + count * (8 + n * 16));
  auto put = [&out](const void* p, std::size_t len) {
    out.append(static_cast<const char*>(p), len);
  };
  out.append("KDVTRJ01", 8);
  const std::uint32_t eq = traj.equation == Equation::kKdV ? 0u : 1u;
  const std::uint32_t order = static_cast<std::uint32_t>(traj.stats.scheme_order);
  put(&eq, 4);
  put(&order, 4);
  put(&n, 8);
  const double L = traj.grid.length();
  put(&L, 8);
  put(&traj.stats.dt_used, 8);
  put(&count, 8);
  for (std::uint64_t i = 0; i < count; ++i) {
    put(&traj.times[i], 8);
    put(traj.snapshots[i].data(), n * 16);
  }
  return out;
}

/// JSON sidecar carrying the conservation diagnostics of a dumped run.
inline nlohmann::ordered_json conservation_sidecar(const Trajectory& traj) {
  const ConservationReport rep = conservation_report(traj);
  nlohmann::ordered_json j;
  j["equation"] = equation_name(traj.equation);
  j["points"] = traj.grid.size();
  j["length"] = traj.grid.length();
  j["dt"] = traj.stats.dt_used;
  j["steps"] = traj.stats.steps_taken;
  j["retries"] = traj.stats.retries;
  j["times"] = rep.times;
  j["mean"] = rep.mean;
  j["l2"] = rep.l2;
  j["energy"] = rep.energy;
  j["max_rel_drift_mean"] = rep.max_rel_drift_mean;
  j["max_rel_drift_l2"] = rep.max_rel_drift_l2;
  j["max_rel_drift_energy"] = rep.max_rel_drift_energy;
  return j;
}

}  // namespace kdvlab
