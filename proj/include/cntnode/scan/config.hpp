#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cntnode/cavity_spectrum.hpp"
#include "cntnode/chiral_interface.hpp"
#include "cntnode/tripod_dynamics.hpp"

namespace cntnode::scan {

/// Raw "section.key" -> value pairs, exactly as written in the file.
using RawConfig = std::map<std::string, std::string>;

enum class ScanTarget { spectrum, coupling_g, coupling_kappa, dynamics, fidelity };
enum class GridKind { linear, logarithmic };

std::string_view target_name(ScanTarget target);
ScanTarget parse_target(std::string_view name);

struct ScanSpec {
  ScanTarget target = ScanTarget::spectrum;
  std::string parameter;  // "section.key" path into the configuration
  GridKind grid = GridKind::linear;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  /// Applied to the base configuration before sweeping.
  std::vector<std::pair<std::string, std::string>> overrides;

  /// count >= 2, min < max, min > 0 for logarithmic grids, known parameter.
  void validate() const;
  std::vector<double> points() const;
};

/// Fully validated configuration in internal units (SI, rad/s).
struct Config {
  RingParameters ring;
  ChargeState charge;
  long mode_index = 1;
  Branch branch = Branch::up;
  FluxConfig flux;
  CouplingGeometry coupling;
  FiberCoupler fiber;
  RateSet rates;
  PulseShape pulse;
  double adiabaticity_target = 0.1;
  std::size_t samples = 2;
  std::optional<ScanSpec> scan;

  RawConfig raw;
};

/// The shipped parameter set (configs/default.ini).
std::string_view default_config_text();

/// Parses INI text. Throws ValidationError on syntax errors or unknown keys.
RawConfig parse_config_text(std::istream& in);
RawConfig parse_config_text(std::string_view text);

/// Sets one "section.key" value. Unknown keys are rejected with their path.
/// Setting any flux source replaces the others, since exactly one may be given.
void set_value(RawConfig& raw, const std::string& key, const std::string& value);

/// Applies a "section.key=value" assignment.
void apply_override(RawConfig& raw, std::string_view assignment);

/// True for keys holding a number that a scan may sweep.
bool is_numeric_key(std::string_view key);

/// Validates every section and converts to internal units. Errors name the
/// offending key path.
Config build_config(const RawConfig& raw);

/// Reads `path` (or the shipped defaults when empty), applies the overrides in
/// order and validates the result.
Config load_config(const std::filesystem::path& path,
                   std::span<const std::string> overrides = {});

}  // namespace cntnode::scan
