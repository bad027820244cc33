#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cntnode/scan/config.hpp"
#include "cntnode/tripod_dynamics.hpp"
#include "json.hpp"

namespace cntnode::scan {

struct RunOptions {
  Tolerances tolerances;
  std::size_t jobs = 1;
  /// Recorded in the manifest.
  std::string command;
};

/// One CSV file and its manifest, not yet written to disk.
struct Artifact {
  std::string name;  // file stem
  std::string csv;
  nlohmann::json manifest;
  bool invariants_ok = true;
};

/// 12 significant digits, '.' decimal separator, locale independent.
std::string format_number(double value);

/// Header row of the trace CSV written by the dynamics command.
std::string_view trace_csv_header();
std::string trace_csv(const SimulationTrace& trace);

Artifact run_spectrum(const Config& config, const RunOptions& options);
Artifact run_coupling(const Config& config, const RunOptions& options);
Artifact run_dynamics(const Config& config, const RunOptions& options,
                      std::string name = "dynamics");
Artifact run_fidelity(const Config& config, const RunOptions& options);

/// Sweeps `spec.parameter` over its grid on top of `base`. Points run in
/// parallel (options.jobs) and rows are written in grid order. The first
/// failing point, in grid order, aborts the scan with its parameter value.
Artifact run_scan(const ScanSpec& spec, const RawConfig& base, const RunOptions& options,
                  std::string name = "scan");

std::span<const std::string_view> figure_ids();

/// Regenerates one figure panel from `base` (normally the shipped defaults).
/// Unknown ids raise ValidationError listing the available ones.
std::vector<Artifact> reproduce(std::string_view figure_id, const RawConfig& base,
                                const RunOptions& options);

/// Writes <name>.csv and <name>.manifest.json into `out_dir`, adding the
/// single timestamp line to the manifest. Returns the written paths.
std::vector<std::filesystem::path> write_artifact(const Artifact& artifact,
                                                  const std::filesystem::path& out_dir);

}  // namespace cntnode::scan
