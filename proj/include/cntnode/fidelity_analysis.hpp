#pragma once

#include <optional>
#include <string>

#include "cntnode/tripod_dynamics.hpp"

namespace cntnode {

/// C = 2 g^2 / (kappa_tot gamma). A vanishing gamma with g > 0 is reported as
/// infinite instead of returning a number.
struct Cooperativity {
  double value = 0.0;
  bool infinite = false;
};

/// eta_ext = kappa_ex / (kappa_ex + kappa_0).
double extraction_efficiency(double kappa_ex, double kappa_0);

Cooperativity cooperativity(double g, double kappa_tot, double gamma);

/// eta_int = C / (C + 1); 1 for infinite cooperativity.
double internal_efficiency(double c);
double internal_efficiency(const Cooperativity& c);

// Large-detuning rate model. All three reject Delta == 0, where the excited
// state cannot be eliminated and only the master equation applies.
double effective_raman(double rabi, double g, double detuning);
double transfer_rate(double rabi, double g, double detuning, double kappa_tot);
double loss_rate(double rabi, double detuning, double gamma);

struct FidelityReport {
  double eta_ext = 0.0;
  Cooperativity cooperativity;
  double eta_int = 0.0;
  double f_total_analytic = 0.0;   // eta_ext * eta_int
  double f_total_expansion = 0.0;  // (1 - kappa_0/kappa_ex)(1 - kappa_tot gamma / 2g^2)
  /// The dephasing correction is known only to order of magnitude.
  std::string dephasing_bound = "O(gamma_phi * Omega_eff^2 / Delta^2)";

  std::optional<double> f_numeric;
  std::optional<double> abs_gap;
  bool gap_flagged = false;
};

inline constexpr double kAnalyticGapThreshold = 0.02;

FidelityReport total_fidelity(const RateSet& rates);

/// Adds the numerical success probability (total fiber emission at the end of
/// the run) and its distance to the analytic product.
FidelityReport compare_analytic_numeric(const SimulationTrace& trace, const RateSet& rates);

}  // namespace cntnode
