#include "cntnode/fidelity_analysis.hpp"

#include <cmath>
#include <limits>

#include "cntnode/errors.hpp"

namespace cntnode {

namespace {

void require_detuned(double detuning) {
  if (detuning == 0.0) {
    throw ValidationError(
        "large-detuning rate formulas are undefined at Delta = 0; use the master equation");
  }
}

}  // namespace

double extraction_efficiency(double kappa_ex, double kappa_0) {
  if (kappa_ex < 0.0 || kappa_0 < 0.0) throw ValidationError("cavity rates must be non-negative");
  if (!(kappa_ex + kappa_0 > 0.0)) {
    throw ValidationError("extraction efficiency needs kappa_ex + kappa_0 > 0");
  }
  return kappa_ex / (kappa_ex + kappa_0);
}

Cooperativity cooperativity(double g, double kappa_tot, double gamma) {
  if (!(kappa_tot > 0.0)) throw ValidationError("cooperativity needs kappa_tot > 0");
  if (gamma < 0.0) throw ValidationError("gamma must be non-negative");
  if (g == 0.0) return {0.0, false};
  if (gamma == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {2.0 * g * g / (kappa_tot * gamma), false};
}

double internal_efficiency(double c) {
  if (c < 0.0) throw ValidationError("cooperativity must be non-negative");
  if (std::isinf(c)) return 1.0;
  return c / (c + 1.0);
}

double internal_efficiency(const Cooperativity& c) {
  return c.infinite ? 1.0 : internal_efficiency(c.value);
}

double effective_raman(double rabi, double g, double detuning) {
  require_detuned(detuning);
  return rabi * g / (2.0 * detuning);
}

double transfer_rate(double rabi, double g, double detuning, double kappa_tot) {
  if (!(kappa_tot > 0.0)) throw ValidationError("transfer rate needs kappa_tot > 0");
  const double raman = effective_raman(rabi, g, detuning);
  return 2.0 * raman * raman / kappa_tot;
}

double loss_rate(double rabi, double detuning, double gamma) {
  require_detuned(detuning);
  const double admixture = rabi / (2.0 * detuning);
  return admixture * admixture * gamma;
}

FidelityReport total_fidelity(const RateSet& rates) {
  rates.validate();
  FidelityReport report;
  report.eta_ext = extraction_efficiency(rates.kappa_ex, rates.kappa_0);
  report.cooperativity = cooperativity(rates.g, rates.kappa_tot(), rates.gamma);
  report.eta_int = internal_efficiency(report.cooperativity);
  report.f_total_analytic = report.eta_ext * report.eta_int;

  // First-order overcoupled expansion; diverges for kappa_ex = 0 or g = 0 where
  // it is no longer meaningful.
  const double extraction_term =
      rates.kappa_ex > 0.0 ? 1.0 - rates.kappa_0 / rates.kappa_ex
                           : -std::numeric_limits<double>::infinity();
  double internal_term = 1.0;
  if (rates.gamma > 0.0) {
    internal_term = rates.g > 0.0
                        ? 1.0 - rates.kappa_tot() * rates.gamma / (2.0 * rates.g * rates.g)
                        : -std::numeric_limits<double>::infinity();
  }
  report.f_total_expansion = extraction_term * internal_term;
  return report;
}

FidelityReport compare_analytic_numeric(const SimulationTrace& trace, const RateSet& rates) {
  if (!(trace.rates == rates)) {
    throw ValidationError("trace was produced with a different rate set");
  }
  if (trace.samples.empty()) throw ValidationError("trace has no samples");
  FidelityReport report = total_fidelity(rates);
  report.f_numeric = trace.final().p_fiber();
  report.abs_gap = std::abs(*report.f_numeric - report.f_total_analytic);
  report.gap_flagged = *report.abs_gap > kAnalyticGapThreshold;
  return report;
}

}  // namespace cntnode
