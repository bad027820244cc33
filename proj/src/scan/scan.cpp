#include "cntnode/scan/scan.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <thread>

#include "cntnode/cavity_spectrum.hpp"
#include "cntnode/chiral_interface.hpp"
#include "cntnode/constants.hpp"
#include "cntnode/errors.hpp"
#include "cntnode/fidelity_analysis.hpp"

namespace cntnode::scan {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 7> kFigureIds{
    "fig3-a", "fig3-b", "fig-couple-a", "fig-couple-b", "fig-couple-c", "fig-couple-d",
    "spectrum-flux"};

// Integration health of one point, kept for the manifest.
struct PointCheck {
  std::size_t index = 0;
  double value = 0.0;
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double max_adiabaticity = 0.0;
  double max_excited_population = 0.0;
  bool ok = true;
};

struct PointResult {
  std::string row;
  std::optional<PointCheck> check;
  bool bound_exceeded = false;
};

struct Table {
  std::string header;
  std::vector<PointResult> rows;
};

std::string join(std::initializer_list<std::string> fields) {
  std::string out;
  for (const auto& field : fields) {
    if (!out.empty()) out += ',';
    out += field;
  }
  return out;
}

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

std::string column_for(const std::string& parameter) {
  return lower(parameter.substr(parameter.find('.') + 1));
}

json config_snapshot(const RawConfig& raw) {
  json snapshot = json::object();
  for (const auto& [key, value] : raw) {
    const auto dot = key.find('.');
    snapshot[key.substr(0, dot)][key.substr(dot + 1)] = value;
  }
  return snapshot;
}

json check_to_json(const PointCheck& check) {
  return json{{"index", check.index},
              {"value", check.value},
              {"trace_drift", check.trace_drift},
              {"min_eigenvalue", check.min_eigenvalue},
              {"max_adiabaticity", check.max_adiabaticity},
              {"max_excited_population", check.max_excited_population},
              {"ok", check.ok}};
}

Artifact make_artifact(std::string name, const Table& table, const RawConfig& raw,
                       const RunOptions& options, json extra = json::object()) {
  Artifact artifact;
  artifact.name = std::move(name);
  artifact.csv = table.header + '\n';
  json checks = json::array();
  std::size_t bound_exceeded = 0;
  for (const auto& result : table.rows) {
    artifact.csv += result.row + '\n';
    if (result.check) {
      checks.push_back(check_to_json(*result.check));
      artifact.invariants_ok = artifact.invariants_ok && result.check->ok;
    }
    if (result.bound_exceeded) ++bound_exceeded;
  }

  json manifest;
  manifest["software"] = {{"name", "cntnode"}, {"version", CNTNODE_VERSION}};
  manifest["command"] = options.command;
  manifest["config"] = config_snapshot(raw);
  manifest["tolerances"] = {{"abs", options.tolerances.abs}, {"rel", options.tolerances.rel},
                            {"max_steps", options.tolerances.max_steps}};
  manifest["rows"] = table.rows.size();
  manifest["checks"] = checks;
  manifest["invariants_ok"] = artifact.invariants_ok;
  manifest["kappa_bound_exceeded_rows"] = bound_exceeded;
  manifest["outputs"] = json::array({artifact.name + ".csv"});
  for (auto& [key, value] : extra.items()) manifest[key] = value;
  artifact.manifest = std::move(manifest);
  return artifact;
}

SimulationTrace simulate(const Config& config, const RunOptions& options) {
  const auto grid = uniform_grid(config.pulse.t_total, config.samples);
  return integrate(DensityState::ground(), config.pulse, config.rates, grid, options.tolerances);
}

PointCheck summarize(const SimulationTrace& trace, std::size_t index, double value) {
  const InvariantReport report = check_invariants(trace);
  PointCheck check;
  check.index = index;
  check.value = value;
  check.trace_drift = report.max_trace_drift;
  check.min_eigenvalue = report.min_eigenvalue;
  check.max_adiabaticity = trace.max_adiabaticity;
  check.max_excited_population = trace.max_excited_population;
  check.ok = report.ok();
  return check;
}

std::string spectrum_header() {
  return "m,branch,flux_wb,flux_over_phi0,omega_c_rad_s,f_c_ghz,e_zero_joule";
}

std::string spectrum_row(const Config& config) {
  const SpectrumPoint point =
      cavity_resonance(config.ring, config.charge, config.flux, config.mode_index, config.branch);
  return join({std::to_string(point.m), std::to_string(static_cast<int>(point.branch)),
               format_number(point.flux_wb),
               format_number(point.flux_wb / constants::flux_quantum),
               format_number(point.omega_c), format_number(units::rad_per_s_to_ghz(point.omega_c)),
               format_number(point.zero_mode_energy)});
}

std::string fidelity_header() {
  return "kappa_0_ghz,gamma_ghz,eta_ext,eta_int,f_analytic,f_numeric,abs_gap";
}

PointResult fidelity_point(const Config& config, const RunOptions& options, std::size_t index,
                           double value) {
  const SimulationTrace trace = simulate(config, options);
  const FidelityReport report = compare_analytic_numeric(trace, config.rates);
  PointResult result;
  result.row = join({format_number(units::rad_per_s_to_ghz(config.rates.kappa_0)),
                     format_number(units::rad_per_s_to_ghz(config.rates.gamma)),
                     format_number(report.eta_ext), format_number(report.eta_int),
                     format_number(report.f_total_analytic), format_number(*report.f_numeric),
                     format_number(*report.abs_gap)});
  result.check = summarize(trace, index, value);
  return result;
}

std::string dynamics_summary_columns() {
  return "p_fiber_plus,p_fiber_minus,p_int_plus,p_int_minus,p_sink,max_pop_a2,"
         "max_adiabaticity,trace_drift,min_eigenvalue";
}

PointResult evaluate_point(ScanTarget target, const Config& config, const RunOptions& options,
                           std::size_t index, double value) {
  PointResult result;
  const std::string swept = format_number(value);
  switch (target) {
    case ScanTarget::spectrum:
      result.row = spectrum_row(config);
      break;
    case ScanTarget::coupling_g:
      result.row = join({swept, format_number(units::rad_per_s_to_ghz(
                                    vacuum_coupling(config.coupling)))});
      break;
    case ScanTarget::coupling_kappa: {
      const Outcoupling out = max_outcoupling(config.fiber);
      result.row = join({swept, format_number(units::rad_per_s_to_ghz(out.kappa_r))});
      result.bound_exceeded = out.bound_exceeded;
      break;
    }
    case ScanTarget::dynamics: {
      const SimulationTrace trace = simulate(config, options);
      const TraceSample& last = trace.final();
      const PointCheck check = summarize(trace, index, value);
      result.row = join({swept, format_number(last.p_fiber_plus), format_number(last.p_fiber_minus),
                         format_number(last.p_int_plus), format_number(last.p_int_minus),
                         format_number(last.population(Level::sink)),
                         format_number(trace.max_excited_population),
                         format_number(trace.max_adiabaticity), format_number(check.trace_drift),
                         format_number(check.min_eigenvalue)});
      result.check = check;
      break;
    }
    case ScanTarget::fidelity:
      result = fidelity_point(config, options, index, value);
      break;
  }
  return result;
}

std::string scan_header(const ScanSpec& spec) {
  const std::string column = column_for(spec.parameter);
  switch (spec.target) {
    case ScanTarget::spectrum: return spectrum_header();
    case ScanTarget::coupling_g: return column + ",g_ghz";
    case ScanTarget::coupling_kappa: return column + ",kappa_r_ghz";
    case ScanTarget::dynamics: return column + "," + dynamics_summary_columns();
    case ScanTarget::fidelity: return fidelity_header();
  }
  return {};
}

[[noreturn]] void rethrow_with_context(std::exception_ptr error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const IntegrationError& e) {
    throw IntegrationError(context + e.what(), e.time());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(context + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(context + e.what());
  }
}

Table compute_scan(const ScanSpec& spec, const RawConfig& base, const RunOptions& options) {
  spec.validate();
  RawConfig fixed = base;
  for (const auto& [key, value] : spec.overrides) set_value(fixed, key, value);
  // Reject a broken base before spawning work.
  build_config(fixed);

  const std::vector<double> points = spec.points();
  Table table;
  table.header = scan_header(spec);
  table.rows.resize(points.size());
  std::vector<std::exception_ptr> errors(points.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        RawConfig raw = fixed;
        set_value(raw, spec.parameter, fmt::format("{:.17g}", points[i]));
        table.rows[i] = evaluate_point(spec.target, build_config(raw), options, i, points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, points.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (errors[i]) {
      rethrow_with_context(errors[i], fmt::format("scan point {} ({} = {}): ", i, spec.parameter,
                                                  format_number(points[i])));
    }
  }
  return table;
}

ScanSpec figure_scan(ScanTarget target, std::string parameter, GridKind grid, double min,
                     double max, std::size_t count) {
  ScanSpec spec;
  spec.target = target;
  spec.parameter = std::move(parameter);
  spec.grid = grid;
  spec.min = min;
  spec.max = max;
  spec.count = count;
  return spec;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", value);
}

std::string_view trace_csv_header() {
  return "t_ns,pop_0vac,pop_A2vac,pop_m1_ph,pop_p1_ph,pop_m1_vac,pop_p1_vac,pop_sink,n_plus,"
         "n_minus,p_fiber_plus,p_fiber_minus,p_int_plus,p_int_minus,trace_err,adiabaticity";
}

std::string trace_csv(const SimulationTrace& trace) {
  std::string out(trace_csv_header());
  out += '\n';
  for (const auto& s : trace.samples) {
    out += format_number(s.t * 1e9);
    for (double p : s.populations) out += ',' + format_number(p);
    for (double v : {s.n_plus, s.n_minus, s.p_fiber_plus, s.p_fiber_minus, s.p_int_plus,
                     s.p_int_minus, s.trace_error, s.adiabaticity}) {
      out += ',' + format_number(v);
    }
    out += '\n';
  }
  return out;
}

Artifact run_spectrum(const Config& config, const RunOptions& options) {
  Table table{spectrum_header(), {PointResult{spectrum_row(config), std::nullopt, false}}};
  const double spacing = mode_spacing(config.ring);
  return make_artifact("spectrum", table, config.raw, options,
                       {{"mode_spacing_ghz", spacing * 1e-9},
                        {"charge_velocity_m_s", charge_velocity(config.ring)}});
}

Artifact run_coupling(const Config& config, const RunOptions& options) {
  const double g = vacuum_coupling(config.coupling);
  const Outcoupling out = max_outcoupling(config.fiber);
  Table table{"g_rad_s,g_ghz,kappa_r_rad_s,kappa_r_ghz,kappa_r_bound_exceeded",
              {PointResult{join({format_number(g), format_number(units::rad_per_s_to_ghz(g)),
                                 format_number(out.kappa_r),
                                 format_number(units::rad_per_s_to_ghz(out.kappa_r)),
                                 out.bound_exceeded ? "1" : "0"}),
                           std::nullopt, out.bound_exceeded}}};
  return make_artifact("coupling", table, config.raw, options);
}

Artifact run_dynamics(const Config& config, const RunOptions& options, std::string name) {
  const SimulationTrace trace = simulate(config, options);
  const PointCheck check = summarize(trace, 0, 0.0);
  const TraceSample& last = trace.final();

  Artifact artifact = make_artifact(
      name, Table{}, config.raw, options,
      {{"t_rise_ns", config.pulse.t_rise * 1e9},
       {"omega_max_ghz", units::rad_per_s_to_ghz(config.pulse.omega_max)},
       {"emitted_frequency_ghz", units::rad_per_s_to_ghz(emitted_frequency(config.rates))},
       {"p_fiber_plus", last.p_fiber_plus},
       {"p_fiber_minus", last.p_fiber_minus},
       {"accepted_steps", trace.accepted_steps},
       {"rejected_steps", trace.rejected_steps}});
  artifact.csv = trace_csv(trace);
  artifact.manifest["rows"] = trace.samples.size();
  artifact.manifest["checks"] = json::array({check_to_json(check)});
  artifact.invariants_ok = check.ok;
  artifact.manifest["invariants_ok"] = check.ok;
  return artifact;
}

Artifact run_fidelity(const Config& config, const RunOptions& options) {
  Table table{fidelity_header(), {fidelity_point(config, options, 0, 0.0)}};
  const FidelityReport report = total_fidelity(config.rates);
  return make_artifact("fidelity", table, config.raw, options,
                       {{"f_total_expansion", report.f_total_expansion},
                        {"cooperativity", report.cooperativity.infinite
                                              ? json("inf")
                                              : json(report.cooperativity.value)},
                        {"dephasing_bound", report.dephasing_bound}});
}

Artifact run_scan(const ScanSpec& spec, const RawConfig& base, const RunOptions& options,
                  std::string name) {
  const Table table = compute_scan(spec, base, options);
  RawConfig snapshot = base;
  for (const auto& [key, value] : spec.overrides) set_value(snapshot, key, value);
  return make_artifact(std::move(name), table, snapshot, options,
                       {{"scan",
                         {{"target", target_name(spec.target)},
                          {"parameter", spec.parameter},
                          {"grid", spec.grid == GridKind::linear ? "linear" : "logarithmic"},
                          {"min", spec.min},
                          {"max", spec.max},
                          {"count", spec.count}}}});
}

std::span<const std::string_view> figure_ids() { return kFigureIds; }

std::vector<Artifact> reproduce(std::string_view figure_id, const RawConfig& base,
                                const RunOptions& options) {
  const std::string name(figure_id);
  if (figure_id == "fig3-a") {
    return {run_dynamics(build_config(base), options, name)};
  }
  if (figure_id == "fig3-b") {
    Table combined;
    for (const char* gamma : {"0.01", "0.05", "0.5"}) {
      ScanSpec spec = figure_scan(ScanTarget::fidelity, "rates.kappa_0", GridKind::logarithmic,
                                  0.01, 3.0, 20);
      spec.overrides = {{"rates.gamma", gamma}};
      Table part = compute_scan(spec, base, options);
      combined.header = part.header;
      for (auto& row : part.rows) combined.rows.push_back(std::move(row));
    }
    return {make_artifact(name, combined, base, options,
                          {{"scan",
                            {{"target", "fidelity"},
                             {"parameter", "rates.kappa_0"},
                             {"grid", "logarithmic"},
                             {"min", 0.01},
                             {"max", 3.0},
                             {"count", 20},
                             {"gamma_ghz", {0.01, 0.05, 0.5}}}}})};
  }
  if (figure_id == "fig-couple-a") {
    return {run_scan(figure_scan(ScanTarget::coupling_g, "coupling.x_nm", GridKind::linear, 0.0,
                                 30.0, 31),
                     base, options, name)};
  }
  if (figure_id == "fig-couple-b") {
    return {run_scan(figure_scan(ScanTarget::coupling_g, "coupling.v_mode_m3",
                                 GridKind::logarithmic, 1e-23, 1e-21, 41),
                     base, options, name)};
  }
  if (figure_id == "fig-couple-c") {
    return {run_scan(figure_scan(ScanTarget::coupling_kappa, "ring.R_um", GridKind::linear, 0.5,
                                 10.0, 20),
                     base, options, name)};
  }
  if (figure_id == "fig-couple-d") {
    return {run_scan(figure_scan(ScanTarget::coupling_kappa, "fiber.a_fiber_m2",
                                 GridKind::logarithmic, 1e-15, 1e-12, 31),
                     base, options, name)};
  }
  if (figure_id == "spectrum-flux") {
    return {run_scan(figure_scan(ScanTarget::spectrum, "flux.flux_phi0", GridKind::linear, 0.0,
                                 2.0, 41),
                     base, options, name)};
  }
  std::string available;
  for (auto id : kFigureIds) available += (available.empty() ? "" : ", ") + std::string(id);
  throw ValidationError("unknown figure id '" + name + "'; available: " + available);
}

std::vector<std::filesystem::path> write_artifact(const Artifact& artifact,
                                                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + out_dir.string());

  nlohmann::json manifest = artifact.manifest;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  manifest["generated_at"] = stamp;

  const auto csv_path = out_dir / (artifact.name + ".csv");
  const auto manifest_path = out_dir / (artifact.name + ".manifest.json");
  std::ofstream csv(csv_path, std::ios::binary);
  csv << artifact.csv;
  std::ofstream meta(manifest_path, std::ios::binary);
  meta << manifest.dump(2) << '\n';
  if (!csv || !meta) throw ValidationError("failed writing outputs to " + out_dir.string());
  return {csv_path, manifest_path};
}

}  // namespace cntnode::scan
