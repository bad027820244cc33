#include "cntnode/scan/config.hpp"

#include <algorithm>
#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cntnode/constants.hpp"
#include "cntnode/default_config.hpp"
#include "cntnode/errors.hpp"

namespace cntnode::scan {

namespace {

enum class KeyKind { real, integer, text, real_or_auto };

struct KeySpec {
  std::string_view path;
  KeyKind kind;
  bool required;
};

// Sections listed in validation order; "scan" is optional as a whole.
constexpr std::array<std::string_view, 7> kRequiredSections{
    "ring", "charge", "flux", "coupling", "fiber", "rates", "pulse"};

constexpr std::array kSchema{
    KeySpec{"ring.R_um", KeyKind::real, true},
    KeySpec{"ring.K_c", KeyKind::real, true},
    KeySpec{"ring.v_F", KeyKind::real, true},
    KeySpec{"charge.N_c", KeyKind::integer, true},
    KeySpec{"charge.J_c", KeyKind::integer, true},
    KeySpec{"charge.m", KeyKind::integer, true},
    KeySpec{"charge.branch", KeyKind::integer, true},
    KeySpec{"flux.flux_wb", KeyKind::real, false},
    KeySpec{"flux.flux_phi0", KeyKind::real, false},
    KeySpec{"flux.field_t", KeyKind::real, false},
    KeySpec{"coupling.dipole_debye", KeyKind::real, true},
    KeySpec{"coupling.f_c_thz", KeyKind::real, true},
    KeySpec{"coupling.eps_r", KeyKind::real, true},
    KeySpec{"coupling.v_mode_m3", KeyKind::real, true},
    KeySpec{"coupling.x_nm", KeyKind::real, true},
    KeySpec{"coupling.L_d_nm", KeyKind::real, true},
    KeySpec{"fiber.xi", KeyKind::real, true},
    KeySpec{"fiber.a_cnt_m2", KeyKind::real, true},
    KeySpec{"fiber.a_fiber_m2", KeyKind::real, true},
    KeySpec{"fiber.L_int_um", KeyKind::real, true},
    KeySpec{"fiber.lambda_c_nm", KeyKind::real, true},
    KeySpec{"rates.g", KeyKind::real, true},
    KeySpec{"rates.Delta", KeyKind::real, true},
    KeySpec{"rates.delta", KeyKind::real, true},
    KeySpec{"rates.kappa_ex", KeyKind::real, true},
    KeySpec{"rates.kappa_0", KeyKind::real, true},
    KeySpec{"rates.gamma", KeyKind::real, true},
    KeySpec{"rates.gamma_phi", KeyKind::real, true},
    KeySpec{"rates.f_L", KeyKind::real, false},
    KeySpec{"rates.f_zfs", KeyKind::real, false},
    KeySpec{"rates.recycle_to_ground", KeyKind::real, false},
    KeySpec{"pulse.kind", KeyKind::text, true},
    KeySpec{"pulse.omega_max", KeyKind::real_or_auto, false},
    KeySpec{"pulse.t_on_ns", KeyKind::real, false},
    KeySpec{"pulse.t_rise_ns", KeyKind::real_or_auto, false},
    KeySpec{"pulse.adiabaticity_target", KeyKind::real, false},
    KeySpec{"pulse.t_total_ns", KeyKind::real, true},
    KeySpec{"pulse.samples", KeyKind::integer, false},
    KeySpec{"scan.target", KeyKind::text, true},
    KeySpec{"scan.parameter", KeyKind::text, true},
    KeySpec{"scan.grid", KeyKind::text, true},
    KeySpec{"scan.min", KeyKind::real, true},
    KeySpec{"scan.max", KeyKind::real, true},
    KeySpec{"scan.count", KeyKind::integer, true},
};

constexpr std::array<std::string_view, 3> kFluxKeys{"flux.flux_wb", "flux.flux_phi0",
                                                    "flux.field_t"};

const KeySpec* find_key(std::string_view path) {
  const auto it = std::find_if(kSchema.begin(), kSchema.end(),
                               [&](const KeySpec& spec) { return spec.path == path; });
  return it == kSchema.end() ? nullptr : &*it;
}

std::string_view section_of(std::string_view path) { return path.substr(0, path.find('.')); }

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  bool has(std::string_view key) const { return raw_.count(std::string(key)) != 0; }

  const std::string& text(std::string_view key) const {
    const auto it = raw_.find(std::string(key));
    if (it == raw_.end()) throw ValidationError("missing required key: " + std::string(key));
    return it->second;
  }

  double real(std::string_view key) const {
    const std::string& value = text(key);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
      throw ValidationError(std::string(key) + ": expected a number, got '" + value + "'");
    }
    return out;
  }

  double real(std::string_view key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  std::optional<double> real_or_auto(std::string_view key) const {
    if (!has(key) || text(key) == "auto") return std::nullopt;
    return real(key);
  }

  long integer(std::string_view key) const {
    const double value = real(key);
    if (value != std::floor(value) || std::abs(value) > 1e15) {
      throw ValidationError(std::string(key) + ": expected an integer, got '" + text(key) + "'");
    }
    return static_cast<long>(value);
  }

  long integer(std::string_view key, long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

 private:
  const RawConfig& raw_;
};

// Re-throws a module-level validation failure with the key path in front.
template <class F>
void check(std::string_view key, F&& validate) {
  try {
    validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(key) + ": " + e.what());
  }
}

void require(bool condition, std::string_view key, std::string_view message) {
  if (!condition) throw ValidationError(std::string(key) + ": " + std::string(message));
}

}  // namespace

std::string_view target_name(ScanTarget target) {
  switch (target) {
    case ScanTarget::spectrum: return "spectrum";
    case ScanTarget::coupling_g: return "coupling-g";
    case ScanTarget::coupling_kappa: return "coupling-kappa";
    case ScanTarget::dynamics: return "dynamics";
    case ScanTarget::fidelity: return "fidelity";
  }
  return "?";
}

ScanTarget parse_target(std::string_view name) {
  for (auto target : {ScanTarget::spectrum, ScanTarget::coupling_g, ScanTarget::coupling_kappa,
                      ScanTarget::dynamics, ScanTarget::fidelity}) {
    if (target_name(target) == name) return target;
  }
  throw ValidationError("scan.target: unknown target '" + std::string(name) +
                        "' (expected spectrum, coupling-g, coupling-kappa, dynamics or fidelity)");
}

void ScanSpec::validate() const {
  require(count >= 2, "scan.count", "a scan needs at least 2 points");
  require(std::isfinite(min) && std::isfinite(max) && min < max, "scan.min",
          "grid bounds must satisfy min < max");
  require(grid == GridKind::linear || min > 0.0, "scan.min",
          "logarithmic grids require min > 0");
  require(is_numeric_key(parameter), "scan.parameter",
          "'" + parameter + "' is not a numeric configuration key");
  require(section_of(parameter) != "scan", "scan.parameter", "cannot sweep the scan section");
}

std::vector<double> ScanSpec::points() const {
  validate();
  std::vector<double> out(count);
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = static_cast<double>(i) / last;
    out[i] = grid == GridKind::linear
                 ? min + (max - min) * u
                 : std::exp(std::log(min) + (std::log(max) - std::log(min)) * u);
  }
  out.front() = min;
  out.back() = max;
  return out;
}

std::string_view default_config_text() { return kDefaultConfigText; }

RawConfig parse_config_text(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("config syntax error at line " + std::to_string(e.line()) + ": " +
                          e.message());
  }

  RawConfig raw;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ValidationError("unknown key: " + section + " (keys must live inside a section)");
    }
    for (const auto& [key, node] : body) {
      const std::string path = section + "." + key;
      if (find_key(path) == nullptr) throw ValidationError("unknown key: " + path);
      raw[path] = trim(node.data());
    }
  }
  return raw;
}

RawConfig parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config_text(in);
}

void set_value(RawConfig& raw, const std::string& key, const std::string& value) {
  if (find_key(key) == nullptr) throw ValidationError("unknown key: " + key);
  if (section_of(key) == "flux") {
    for (auto other : kFluxKeys) raw.erase(std::string(other));
  }
  raw[key] = trim(value);
}

void apply_override(RawConfig& raw, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ValidationError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  set_value(raw, trim(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

bool is_numeric_key(std::string_view key) {
  const KeySpec* spec = find_key(key);
  return spec != nullptr && spec->kind != KeyKind::text;
}

Config build_config(const RawConfig& raw) {
  for (auto section : kRequiredSections) {
    const bool present = std::any_of(raw.begin(), raw.end(), [&](const auto& entry) {
      return section_of(entry.first) == section;
    });
    if (!present) throw ValidationError("missing section: " + std::string(section));
  }
  for (const auto& [key, value] : raw) {
    if (find_key(key) == nullptr) throw ValidationError("unknown key: " + key);
  }
  const bool has_scan = std::any_of(raw.begin(), raw.end(), [](const auto& entry) {
    return section_of(entry.first) == "scan";
  });
  for (const auto& spec : kSchema) {
    if (!spec.required) continue;
    if (section_of(spec.path) == "scan" && !has_scan) continue;
    if (raw.count(std::string(spec.path)) == 0) {
      throw ValidationError("missing required key: " + std::string(spec.path));
    }
  }

  const Reader in(raw);
  Config config;
  config.raw = raw;

  config.ring.radius_m = in.real("ring.R_um") * 1e-6;
  config.ring.fermi_velocity = in.real("ring.v_F");
  config.ring.luttinger_kc = in.real("ring.K_c");
  require(config.ring.radius_m > 0.0, "ring.R_um", "ring radius must be positive");
  require(config.ring.fermi_velocity > 0.0, "ring.v_F", "Fermi velocity must be positive");
  require(config.ring.luttinger_kc > 0.0 && config.ring.luttinger_kc <= 1.0, "ring.K_c",
          "Luttinger parameter must satisfy 0 < K_c <= 1");

  config.charge.n_c = in.integer("charge.N_c");
  config.charge.j_c = in.integer("charge.J_c");
  config.mode_index = in.integer("charge.m");
  require(config.mode_index != 0, "charge.m",
          "zero-mode index is handled by zero_mode_energy, not the oscillator branch");
  const long branch = in.integer("charge.branch");
  require(branch == 1 || branch == -1, "charge.branch", "branch must be +1 or -1");
  config.branch = branch == 1 ? Branch::up : Branch::down;

  const auto flux_sources = std::count_if(kFluxKeys.begin(), kFluxKeys.end(),
                                          [&](std::string_view key) { return in.has(key); });
  require(flux_sources == 1, "flux",
          "exactly one of flux_wb, flux_phi0 or field_t must be given");
  if (in.has("flux.flux_wb")) {
    config.flux = FluxConfig::from_flux(in.real("flux.flux_wb"));
  } else if (in.has("flux.flux_phi0")) {
    config.flux = FluxConfig::from_flux_quanta(in.real("flux.flux_phi0"));
  } else {
    config.flux = FluxConfig::from_field(in.real("flux.field_t"), config.ring.radius_m);
  }

  config.coupling.dipole_debye = in.real("coupling.dipole_debye");
  config.coupling.omega_c = units::hz_to_rad_per_s(in.real("coupling.f_c_thz") * 1e12);
  config.coupling.eps_r = in.real("coupling.eps_r");
  config.coupling.mode_volume_m3 = in.real("coupling.v_mode_m3");
  config.coupling.separation_m = in.real("coupling.x_nm") * 1e-9;
  config.coupling.decay_length_m = in.real("coupling.L_d_nm") * 1e-9;
  check("coupling", [&] { config.coupling.validate(); });

  config.fiber.xi = in.real("fiber.xi");
  config.fiber.cnt_area_m2 = in.real("fiber.a_cnt_m2");
  config.fiber.fiber_area_m2 = in.real("fiber.a_fiber_m2");
  config.fiber.interaction_length_m = in.real("fiber.L_int_um") * 1e-6;
  config.fiber.radius_m = config.ring.radius_m;
  const double lambda_c = in.real("fiber.lambda_c_nm") * 1e-9;
  require(lambda_c > 0.0, "fiber.lambda_c_nm", "wavelength must be positive");
  config.fiber.omega_c = constants::two_pi * constants::speed_of_light / lambda_c;
  check("fiber", [&] { config.fiber.validate(); });

  auto rate = [&](std::string_view key, double fallback = 0.0) {
    return units::ghz_to_rad_per_s(in.real(key, fallback));
  };
  config.rates.g = rate("rates.g");
  config.rates.pump_detuning = rate("rates.Delta");
  config.rates.cavity_detuning = rate("rates.delta");
  config.rates.kappa_ex = rate("rates.kappa_ex");
  config.rates.kappa_0 = rate("rates.kappa_0");
  config.rates.gamma = rate("rates.gamma");
  config.rates.gamma_phi = rate("rates.gamma_phi");
  config.rates.omega_laser = rate("rates.f_L");
  config.rates.omega_zfs = rate("rates.f_zfs");
  config.rates.recycle_to_ground = in.real("rates.recycle_to_ground", 0.0);
  for (auto key : {"rates.g", "rates.kappa_ex", "rates.kappa_0", "rates.gamma",
                   "rates.gamma_phi"}) {
    require(in.real(key) >= 0.0, key, "rates must be non-negative");
  }
  check("rates", [&] { config.rates.validate(); });

  check("pulse.kind", [&] { config.pulse.kind = parse_pulse_kind(in.text("pulse.kind")); });
  config.adiabaticity_target = in.real("pulse.adiabaticity_target", 0.1);
  require(config.adiabaticity_target > 0.0, "pulse.adiabaticity_target",
          "adiabaticity target must be positive");
  const auto omega_max = in.real_or_auto("pulse.omega_max");
  config.pulse.omega_max =
      omega_max ? units::ghz_to_rad_per_s(*omega_max) : 8.0 * config.rates.g;
  require(config.pulse.omega_max >= 0.0, "pulse.omega_max", "pump amplitude must be >= 0");
  config.pulse.t_on = in.real("pulse.t_on_ns", 0.0) * 1e-9;
  require(config.pulse.t_on >= 0.0, "pulse.t_on_ns", "pulse start must be >= 0");
  config.pulse.t_total = in.real("pulse.t_total_ns") * 1e-9;
  require(config.pulse.t_total > 0.0, "pulse.t_total_ns", "run duration must be positive");
  if (const auto rise = in.real_or_auto("pulse.t_rise_ns")) {
    config.pulse.t_rise = *rise * 1e-9;
  } else if (config.pulse.kind == PulseKind::constant) {
    config.pulse.t_rise = 0.0;
  } else {
    require(config.rates.g > 0.0, "pulse.t_rise_ns", "auto ramp time needs g > 0");
    config.pulse.t_rise = rise_time_for_adiabaticity(config.pulse.kind, config.pulse.omega_max,
                                                     config.rates.g, config.adiabaticity_target);
  }
  check("pulse", [&] { config.pulse.validate(); });
  const long samples = in.integer("pulse.samples", 201);
  require(samples >= 2, "pulse.samples", "need at least 2 output samples");
  config.samples = static_cast<std::size_t>(samples);

  if (has_scan) {
    ScanSpec spec;
    check("scan.target", [&] { spec.target = parse_target(in.text("scan.target")); });
    spec.parameter = in.text("scan.parameter");
    const std::string& grid = in.text("scan.grid");
    require(grid == "linear" || grid == "logarithmic", "scan.grid",
            "grid must be linear or logarithmic");
    spec.grid = grid == "linear" ? GridKind::linear : GridKind::logarithmic;
    spec.min = in.real("scan.min");
    spec.max = in.real("scan.max");
    const long count = in.integer("scan.count");
    require(count >= 2, "scan.count", "a scan needs at least 2 points");
    spec.count = static_cast<std::size_t>(count);
    spec.validate();
    config.scan = spec;
  }
  return config;
}

Config load_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  RawConfig raw;
  if (path.empty()) {
    raw = parse_config_text(default_config_text());
  } else {
    std::ifstream file(path);
    if (!file) throw ValidationError("cannot open config file: " + path.string());
    raw = parse_config_text(file);
  }
  for (const auto& assignment : overrides) apply_override(raw, assignment);
  return build_config(raw);
}

}  // namespace cntnode::scan
