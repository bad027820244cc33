// cntnode: batch front end for the ring-cavity / tripod-emitter simulator.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 invariant violation.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cntnode/constants.hpp"
#include "cntnode/errors.hpp"
#include "cntnode/scan/config.hpp"
#include "cntnode/scan/scan.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kNumerical = 2, kInvariant = 3 };

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) out += ' ';
    out += argv[i];
  }
  return out;
}

int emit(const std::vector<cntnode::scan::Artifact>& artifacts, const std::string& out_dir) {
  bool ok = true;
  for (const auto& artifact : artifacts) {
    for (const auto& path : cntnode::scan::write_artifact(artifact, out_dir)) {
      std::cout << "wrote " << path.string() << '\n';
    }
    if (!artifact.invariants_ok) {
      std::cerr << "invariant check failed for " << artifact.name
                << " (see manifest checks)\n";
      ok = false;
    }
  }
  return ok ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Luttinger ring cavity and chiral tripod emitter simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  cntnode::scan::RunOptions options;
  app.add_option("--config", config_path, "INI configuration (defaults to the shipped set)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--set", overrides, "Override a value, e.g. --set rates.kappa_0=0.5")
      ->take_all();
  app.add_option("--tol-abs", options.tolerances.abs, "Absolute integrator tolerance");
  app.add_option("--tol-rel", options.tolerances.rel, "Relative integrator tolerance");
  app.add_option("--max-steps", options.tolerances.max_steps, "Integrator step budget per run")
      ->check(CLI::PositiveNumber);
  app.add_option("--jobs", options.jobs, "Parallel scan workers")->check(CLI::PositiveNumber);

  auto* spectrum = app.add_subcommand("spectrum", "Cavity resonance for the configured mode");
  auto* coupling = app.add_subcommand("coupling", "Vacuum coupling g and outcoupling ceiling");
  auto* dynamics = app.add_subcommand("dynamics", "Integrate the tripod master equation");
  auto* fidelity = app.add_subcommand("fidelity", "Analytic vs numerical emission fidelity");
  auto* scan = app.add_subcommand("scan", "Sweep one parameter using the [scan] section");
  auto* reproduce = app.add_subcommand("reproduce", "Regenerate a figure panel as CSV");
  std::string figure_id;
  reproduce->add_option("figure_id", figure_id, "Figure id")->required();
  reproduce->footer([] {
    std::string ids = "Figure ids:";
    for (auto id : cntnode::scan::figure_ids()) ids += " " + std::string(id);
    return ids;
  }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }
  options.command = command_line(argc, argv);

  try {
    const auto config = cntnode::scan::load_config(config_path, overrides);
    using namespace cntnode;

    if (spectrum->parsed()) {
      const auto artifact = scan::run_spectrum(config, options);
      std::cout << "mode spacing " << scan::format_number(mode_spacing(config.ring) * 1e-9)
                << " GHz\n";
      return emit({artifact}, out_dir);
    }
    if (coupling->parsed()) return emit({scan::run_coupling(config, options)}, out_dir);
    if (dynamics->parsed()) {
      const auto artifact = scan::run_dynamics(config, options);
      std::cout << "P_fiber = " << artifact.manifest["p_fiber_plus"].get<double>() << " + "
                << artifact.manifest["p_fiber_minus"].get<double>() << '\n';
      return emit({artifact}, out_dir);
    }
    if (fidelity->parsed()) return emit({scan::run_fidelity(config, options)}, out_dir);
    if (scan->parsed()) {
      if (!config.scan) throw ValidationError("missing section: scan");
      return emit({scan::run_scan(*config.scan, config.raw, options)}, out_dir);
    }
    if (reproduce->parsed()) {
      return emit(scan::reproduce(figure_id, config.raw, options), out_dir);
    }
  } catch (const cntnode::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const cntnode::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const cntnode::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}
