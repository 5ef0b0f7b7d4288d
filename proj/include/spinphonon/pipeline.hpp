#pragma once

// Orchestration: resolves the physics chain from a configuration and writes
// the data files for each subcommand.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "spinphonon/bandstructure.hpp"
#include "spinphonon/boundstate.hpp"
#include "spinphonon/config.hpp"
#include "spinphonon/siv.hpp"

namespace spinphonon {

/// Everything downstream of the band edge and the drive, in rad/s.
struct PhysicsChain {
  double g = 0.0;
  double g_eff = 0.0;
  BandEdgeModel band;
  double g_alpha = 0.0;
  std::optional<BandEdge> fitted_edge;      // set for transfer-matrix bands
  std::optional<CouplingChain> raman;       // set for Raman drives
  double siv_splitting = 0.0;
};

/// Runs the band, coupling and drive stages. Module errors are rethrown with
/// the stage name prefixed.
PhysicsChain resolve_chain(const ExperimentConfig& cfg);

/// Bare g in both zero-point normalizations; empty when the geometry has no
/// material to take rho and v from.
struct BareCouplingPair {
  double two_pi = 0.0;
  double pi = 0.0;
};
std::optional<BareCouplingPair> bare_coupling_pair(const ExperimentConfig& cfg, double omega_be);

struct HeadlineNumbers {
  PhysicsChain chain;
  BoundState bound_state;
  double lambda_eff = 0.0;
  double tau_epr = 0.0;  // pi / (4 J12) at zero separation
  std::optional<BareCouplingPair> bare;
};

HeadlineNumbers compute_headline(const ExperimentConfig& cfg);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);
std::string to_csv(const Table& t);
nlohmann::ordered_json to_json(const Table& t);

enum class Command { bands, boundstate, spinspin, dynamics, headline };

std::optional<Command> parse_command(std::string_view name);
const char* command_name(Command c);

struct RunOptions {
  std::filesystem::path out_dir;  // empty: configuration output.directory
  std::optional<OutputFormat> format;
  int jobs = 1;
  bool oracle = false;
  std::optional<double> separation_over_lc;
  std::optional<double> gamma_s_over_lambda;
};

struct EmittedFile {
  std::string name;
  std::string fnv1a;  // hex digest of the file bytes
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601; kept out of the data files
  std::vector<EmittedFile> files;

  nlohmann::ordered_json to_json() const;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
const char* tool_version();

/// Executes `command` and writes its data files plus manifest.json.
RunManifest run_pipeline(const ExperimentConfig& cfg, Command command, const RunOptions& options);

/// Evaluates fn(0..n-1) on up to `jobs` threads; results keep index order and
/// the lowest-index exception is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::mutex m;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(m);
        if (next >= n) return;
        i = next++;
      }
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace spinphonon
