#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kdvlab/errors.hpp"
#include "kdvlab/experiments/config.hpp"
#include "kdvlab/version.hpp"

namespace kdvlab {

struct RunRecord {
  std::string name;
  bool pass = true;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;  // paths relative to the output directory
  Json notes = Json::object();
};

/// Everything a scenario produced: data files as (relative path, content)
/// pairs, per-run records, and a deterministic summary document. Files are
/// assembled in memory first so a scenario either computes fully or not at
/// all, and writing stays a separate, restartable step.
struct ScenarioResult {
  std::string scenario;
  bool pass = true;
  std::vector<RunRecord> runs;
  Json summary = Json::object();
  std::vector<std::pair<std::string, std::string>> files;

  void add_file(std::string relpath, std::string content) {
    files.emplace_back(std::move(relpath), std::move(content));
  }
  void add_run(RunRecord rec) {
    pass = pass && rec.pass;
    runs.push_back(std::move(rec));
  }
};

inline Json manifest_json(const ScenarioResult& result, const Config& config) {
  Json m;
  m["code_version"] = kVersion;
  m["scenario"] = result.scenario;
  m["pass"] = result.pass;
  m["config"] = config_to_json(config);
  m["runs"] = Json::array();
  for (const RunRecord& r : result.runs) {
    Json jr;
    jr["name"] = r.name;
    jr["pass"] = r.pass;
    jr["wall_seconds"] = r.wall_seconds;
    jr["outputs"] = r.outputs;
    jr["notes"] = r.notes;
    m["runs"].push_back(jr);
  }
  return m;
}

/// Write all data files, then the summary, then the manifest (atomically via
/// rename). On I/O failure a partial manifest is attempted and its path is
/// reported in the error.
inline void emit_outputs(const ScenarioResult& result, const Config& config,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw ConfigError("emit_outputs: cannot create '" + out_dir + "': " + ec.message());

  auto write_file = [&](const fs::path& rel, const std::string& content) {
    const fs::path full = root / rel;
    if (full.has_parent_path()) fs::create_directories(full.parent_path(), ec);
    std::ofstream out(full, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + full.string());
  };

  const Json manifest = manifest_json(result, config);
  try {
    for (const auto& [rel, content] : result.files) write_file(rel, content);
    write_file(result.scenario + "_summary.json", result.summary.dump(2) + "\n");
    const fs::path tmp = root / "manifest.json.tmp";
    write_file("manifest.json.tmp", manifest.dump(2) + "\n");
    fs::rename(tmp, root / "manifest.json", ec);
    if (ec) throw std::runtime_error("rename failed: " + ec.message());
  } catch (const std::exception& e) {
    const fs::path partial = root / "manifest.partial.json";
    std::ofstream out(partial, std::ios::binary);
    if (out) out << manifest.dump(2) << "\n";
    throw ConfigError(std::string("emit_outputs: ") + e.what() + " (partial manifest at " +
                      partial.string() + ")");
  }
}

/// Run the tasks on up to `workers` threads. Task order in the result vector
/// is the submission order, independent of scheduling; the first exception is
/// rethrown after all workers finish.
inline void run_tasks(std::vector<std::function<void()>>& tasks, int workers) {
  if (workers <= 1 || tasks.size() <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto body = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(tasks.size()));
  pool.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kdvlab
