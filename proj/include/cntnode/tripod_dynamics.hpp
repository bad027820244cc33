#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cntnode {

inline constexpr int kLevelCount = 7;

using Matrix7 = Eigen::Matrix<std::complex<double>, kLevelCount, kLevelCount>;
using Vector7 = Eigen::Matrix<std::complex<double>, kLevelCount, 1>;

/// Truncated single-excitation basis. `vac` is the two-mode cavity vacuum;
/// a_+ is the CW mode fed by |A2> -> |-1>, a_- the CCW mode fed by |A2> -> |+1>.
enum class Level : int {
  ground_vac = 0,    // |0, vac>
  excited_vac = 1,   // |A2, vac>
  minus_photon = 2,  // |-1, 1+, 0->
  plus_photon = 3,   // |+1, 0+, 1->
  minus_vac = 4,     // |-1, vac>  (after a CW photon left the cavity)
  plus_vac = 5,      // |+1, vac>  (after a CCW photon left the cavity)
  sink = 6,          // non-interacting destination of off-tripod decay
};

constexpr int index(Level level) { return static_cast<int>(level); }

std::string_view level_name(Level level);

/// Coherent and dissipative rates, all angular frequencies in rad/s.
struct RateSet {
  double g = 0.0;
  double pump_detuning = 0.0;    // Delta = omega_A2 - omega_L
  double cavity_detuning = 0.0;  // delta = (omega_A2 - omega_ZFS) - omega_c
  double kappa_ex = 0.0;
  double kappa_0 = 0.0;
  double gamma = 0.0;
  double gamma_phi = 0.0;
  double omega_laser = 0.0;
  double omega_zfs = 0.0;
  /// Fraction of |A2> off-tripod decay returned to |0> instead of the sink.
  double recycle_to_ground = 0.0;

  double kappa_tot() const { return kappa_ex + kappa_0; }
  void validate() const;

  bool operator==(const RateSet&) const = default;
};

enum class PulseKind { sin2, tanh_ramp, constant };

std::string_view pulse_kind_name(PulseKind kind);
PulseKind parse_pulse_kind(std::string_view name);

/// Pump Rabi envelope Omega_p(t).
///
///   sin2:      Omega_max sin^2(pi (t - t_on) / (2 t_rise)) during the ramp, then Omega_max
///   tanh_ramp: Omega_max tanh((t - t_on) / t_rise) after t_on
///   constant:  Omega_max at all times
///
/// Ramp kinds are zero before t_on.
struct PulseShape {
  PulseKind kind = PulseKind::sin2;
  double omega_max = 0.0;  // rad/s
  double t_on = 0.0;       // s
  double t_rise = 0.0;     // s
  double t_total = 0.0;    // s

  void validate() const;
  double rabi(double t) const;
  double rabi_rate(double t) const;

  bool operator==(const PulseShape&) const = default;
};

struct DensityState {
  Matrix7 rho = Matrix7::Zero();

  static DensityState pure(Level level);
  static DensityState ground() { return pure(Level::ground_vac); }

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;

  /// Hermitian within 1e-10, unit trace within 1e-8, min eigenvalue >= -1e-8.
  void validate() const;
};

/// Tripod block (hbar = 1) embedded in the 7-level basis. The
/// three auxiliary states carry no Hamiltonian terms.
Matrix7 build_hamiltonian(const RateSet& rates, double rabi);

struct MixingAngle {
  double theta = 0.0;
  /// Set when g = 0 with a nonzero pump; theta is then the pi/2 limit.
  bool degenerate = false;
};

/// tan(theta) = Omega_p / (2 sqrt(2) g).
MixingAngle mixing_angle(double rabi, double g);

/// cos(theta)|0,vac> - sin(theta)(|-1,1+,0-> + |+1,0+,1->)/sqrt(2).
Vector7 dark_state(double theta);

/// Collapse channel sqrt(rate) |to><from|. A channel with to == from is the
/// pure-dephasing projector.
struct CollapseOperator {
  Level from;
  Level to;
  double rate;
  std::string_view label;
};

/// L1..L4 photon loss (fiber and intrinsic for each mode), L5 off-tripod decay
/// (split between sink and ground by `recycle_to_ground`), L6 excited dephasing.
/// Zero-rate channels are omitted.
std::vector<CollapseOperator> collapse_operators(const RateSet& rates);

/// -i[H, rho] + sum_m D[L_m] rho.
Matrix7 lindblad_rhs(const Matrix7& rho, const Matrix7& hamiltonian, const RateSet& rates);

struct Tolerances {
  double abs = 1e-10;
  double rel = 1e-8;
  /// Smallest step, as a fraction of the integration span, before giving up.
  double min_step_fraction = 1e-14;
  std::size_t max_steps = 5'000'000;
};

struct TraceSample {
  double t = 0.0;
  std::array<double, kLevelCount> populations{};
  double n_plus = 0.0;
  double n_minus = 0.0;
  double p_fiber_plus = 0.0;
  double p_fiber_minus = 0.0;
  double p_int_plus = 0.0;
  double p_int_minus = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double adiabaticity = 0.0;
  /// <D(theta(t))| rho |D(theta(t))> for the instantaneous dark state.
  double dark_overlap = 0.0;

  double population(Level level) const { return populations[index(level)]; }
  double p_fiber() const { return p_fiber_plus + p_fiber_minus; }
  double p_intrinsic() const { return p_int_plus + p_int_minus; }
};

struct SimulationTrace {
  RateSet rates;
  PulseShape pulse;
  Tolerances tolerances;
  std::vector<TraceSample> samples;
  Matrix7 final_rho = Matrix7::Zero();

  double max_excited_population = 0.0;  // over accepted steps
  double max_adiabaticity = 0.0;        // over stored samples
  double max_trace_drift = 0.0;         // over accepted steps
  double min_eigenvalue = 0.0;          // over stored samples
  double max_hermiticity_error = 0.0;   // before per-step symmetrization
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const TraceSample& final() const { return samples.back(); }
};

struct InvariantReport {
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  /// max |sum of non-emitted populations + emitted totals - 1|
  double max_bookkeeping_error = 0.0;
  /// max |P_fiber,s + P_int,s - pop(s, vac)| over both channels
  double max_split_error = 0.0;
  /// Emitted totals never drop by more than the integrator's absolute tolerance.
  bool emission_monotone = true;

  bool ok() const;
};

InvariantReport check_invariants(const SimulationTrace& trace);

/// `samples` points evenly spaced on [0, t_total], both ends included.
std::vector<double> uniform_grid(double t_total, std::size_t samples);

/// Integrates the master equation from t_grid.front() (where `initial` is
/// given) and stores a sample at every grid time. Throws IntegrationError with
/// the failure time if the step size underflows.
SimulationTrace integrate(const DensityState& initial, const PulseShape& pulse,
                          const RateSet& rates, std::span<const double> t_grid,
                          const Tolerances& tolerances = {});

/// omega_out = omega_L - omega_ZFS.
double emitted_frequency(const RateSet& rates);

/// True when Delta == delta. In that case omega_out must coincide with
/// omega_c; a mismatch beyond 1e-12 relative throws InvariantViolation.
bool is_two_photon_resonant(const RateSet& rates, double omega_c);

/// |d theta/dt| / Omega_gap with Omega_gap = sqrt(Omega_p^2 + 8 g^2) / 2.
double adiabaticity(const PulseShape& pulse, const RateSet& rates, double t);

/// Shortest ramp time for which max_t adiabaticity stays at `target`. Uses the
/// exact 1/t_rise scaling of the diagnostic for a fixed pulse profile.
double rise_time_for_adiabaticity(PulseKind kind, double omega_max, double g, double target);

}  // namespace cntnode
