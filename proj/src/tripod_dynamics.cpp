#include "cntnode/tripod_dynamics.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "cntnode/errors.hpp"

namespace cntnode {

namespace {

namespace odeint = boost::numeric::odeint;

using Complex = std::complex<double>;

constexpr double kHermiticityTolerance = 1e-10;
constexpr double kTraceTolerance = 1e-8;
constexpr double kPositivityTolerance = 1e-8;
// Tighter requests cannot be met in double precision; DOPRI5 then creeps along
// with steps whose error estimate rounds to zero.
constexpr double kMinRelativeTolerance = 1e-14;

std::string seconds(double t) {
  char text[48];
  std::snprintf(text, sizeof text, "t = %.6g s", t);
  return text;
}

void require_non_negative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(name) + " must be a finite non-negative rate, got " +
                          std::to_string(value));
  }
}

// Real ODE state: the 7x7 complex density matrix (column-major, re/im
// interleaved) followed by the four cumulative emission integrals.
constexpr std::size_t kRhoReals = 2 * kLevelCount * kLevelCount;
constexpr std::size_t kFiberPlus = kRhoReals;
constexpr std::size_t kFiberMinus = kRhoReals + 1;
constexpr std::size_t kIntPlus = kRhoReals + 2;
constexpr std::size_t kIntMinus = kRhoReals + 3;
constexpr std::size_t kStateSize = kRhoReals + 4;

using State = std::array<double, kStateSize>;

Eigen::Map<Matrix7> rho_view(State& x) {
  return Eigen::Map<Matrix7>(reinterpret_cast<Complex*>(x.data()));
}

Eigen::Map<const Matrix7> rho_view(const State& x) {
  return Eigen::Map<const Matrix7>(reinterpret_cast<const Complex*>(x.data()));
}

class MasterEquation {
 public:
  MasterEquation(const PulseShape& pulse, const RateSet& rates) : pulse_(pulse), rates_(rates) {}

  void operator()(const State& x, State& dxdt, double t) const {
    const Matrix7 hamiltonian = build_hamiltonian(rates_, pulse_.rabi(t));
    rho_view(dxdt) = lindblad_rhs(rho_view(x), hamiltonian, rates_);

    const auto rho = rho_view(x);
    const double n_plus = rho(index(Level::minus_photon), index(Level::minus_photon)).real();
    const double n_minus = rho(index(Level::plus_photon), index(Level::plus_photon)).real();
    dxdt[kFiberPlus] = rates_.kappa_ex * n_plus;
    dxdt[kFiberMinus] = rates_.kappa_ex * n_minus;
    dxdt[kIntPlus] = rates_.kappa_0 * n_plus;
    dxdt[kIntMinus] = rates_.kappa_0 * n_minus;
  }

 private:
  const PulseShape& pulse_;
  const RateSet& rates_;
};

double max_abs_element(const Matrix7& m) { return m.cwiseAbs().maxCoeff(); }

double min_eigenvalue_of(const Matrix7& rho) {
  // Hermitian part only; the anti-Hermitian residue is tracked separately.
  const Matrix7 hermitian = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix7> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double mixing_angle_rate(const PulseShape& pulse, double g, double t) {
  const double rabi = pulse.rabi(t);
  const double scale = 2.0 * std::numbers::sqrt2 * g;
  return pulse.rabi_rate(t) * scale / (scale * scale + rabi * rabi);
}

TraceSample make_sample(const State& x, double t, const PulseShape& pulse, const RateSet& rates) {
  const auto rho = rho_view(x);
  TraceSample sample;
  sample.t = t;
  for (int i = 0; i < kLevelCount; ++i) sample.populations[i] = rho(i, i).real();
  sample.n_plus = sample.population(Level::minus_photon);
  sample.n_minus = sample.population(Level::plus_photon);
  sample.p_fiber_plus = x[kFiberPlus];
  sample.p_fiber_minus = x[kFiberMinus];
  sample.p_int_plus = x[kIntPlus];
  sample.p_int_minus = x[kIntMinus];
  sample.trace_error = rho.trace().real() - 1.0;
  sample.min_eigenvalue = min_eigenvalue_of(rho);
  sample.adiabaticity = rates.g > 0.0 ? adiabaticity(pulse, rates, t) : 0.0;
  const Vector7 dark = dark_state(mixing_angle(pulse.rabi(t), rates.g).theta);
  sample.dark_overlap = (dark.adjoint() * rho * dark)(0, 0).real();
  return sample;
}

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::ground_vac: return "0vac";
    case Level::excited_vac: return "A2vac";
    case Level::minus_photon: return "m1_ph";
    case Level::plus_photon: return "p1_ph";
    case Level::minus_vac: return "m1_vac";
    case Level::plus_vac: return "p1_vac";
    case Level::sink: return "sink";
  }
  return "?";
}

void RateSet::validate() const {
  require_non_negative(g, "g");
  require_non_negative(kappa_ex, "kappa_ex");
  require_non_negative(kappa_0, "kappa_0");
  require_non_negative(gamma, "gamma");
  require_non_negative(gamma_phi, "gamma_phi");
  if (!std::isfinite(pump_detuning) || !std::isfinite(cavity_detuning)) {
    throw ValidationError("detunings must be finite");
  }
  if (!(recycle_to_ground >= 0.0 && recycle_to_ground <= 1.0)) {
    throw ValidationError("recycle_to_ground must lie in [0, 1]");
  }
}

std::string_view pulse_kind_name(PulseKind kind) {
  switch (kind) {
    case PulseKind::sin2: return "sin2";
    case PulseKind::tanh_ramp: return "tanh";
    case PulseKind::constant: return "constant";
  }
  return "?";
}

PulseKind parse_pulse_kind(std::string_view name) {
  if (name == "sin2") return PulseKind::sin2;
  if (name == "tanh") return PulseKind::tanh_ramp;
  if (name == "constant") return PulseKind::constant;
  throw ValidationError("unknown pulse kind '" + std::string(name) +
                        "' (expected sin2, tanh or constant)");
}

void PulseShape::validate() const {
  require_non_negative(omega_max, "pulse omega_max");
  require_non_negative(t_on, "pulse t_on");
  if (!(t_total > 0.0)) throw ValidationError("pulse t_total must be positive");
  if (kind != PulseKind::constant && !(t_rise > 0.0)) {
    throw ValidationError("ramped pulses need t_rise > 0");
  }
}

double PulseShape::rabi(double t) const {
  if (kind == PulseKind::constant) return omega_max;
  if (t <= t_on) return 0.0;
  const double s = (t - t_on) / t_rise;
  if (kind == PulseKind::tanh_ramp) return omega_max * std::tanh(s);
  if (s >= 1.0) return omega_max;
  const double phase = 0.5 * std::numbers::pi * s;
  return omega_max * std::sin(phase) * std::sin(phase);
}

double PulseShape::rabi_rate(double t) const {
  if (kind == PulseKind::constant || t <= t_on) return 0.0;
  const double s = (t - t_on) / t_rise;
  if (kind == PulseKind::tanh_ramp) {
    const double sech = 1.0 / std::cosh(s);
    return omega_max * sech * sech / t_rise;
  }
  if (s >= 1.0) return 0.0;
  const double phase = 0.5 * std::numbers::pi * s;
  return omega_max * std::sin(2.0 * phase) * 0.5 * std::numbers::pi / t_rise;
}

DensityState DensityState::pure(Level level) {
  DensityState state;
  state.rho(index(level), index(level)) = 1.0;
  return state;
}

double DensityState::trace_error() const { return std::abs(rho.trace().real() - 1.0); }

double DensityState::hermiticity_error() const { return max_abs_element(rho - rho.adjoint()); }

double DensityState::min_eigenvalue() const { return min_eigenvalue_of(rho); }

void DensityState::validate() const {
  if (!rho.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if (hermiticity_error() > kHermiticityTolerance) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (trace_error() > kTraceTolerance) throw ValidationError("density matrix trace is not 1");
  if (min_eigenvalue() < -kPositivityTolerance) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
}

Matrix7 build_hamiltonian(const RateSet& rates, double rabi) {
  const int ground = index(Level::ground_vac);
  const int excited = index(Level::excited_vac);
  const int minus_photon = index(Level::minus_photon);
  const int plus_photon = index(Level::plus_photon);

  Matrix7 h = Matrix7::Zero();
  h(excited, excited) = rates.pump_detuning;
  h(minus_photon, minus_photon) = rates.pump_detuning - rates.cavity_detuning;
  h(plus_photon, plus_photon) = rates.pump_detuning - rates.cavity_detuning;
  h(ground, excited) = h(excited, ground) = 0.5 * rabi;
  h(excited, minus_photon) = h(minus_photon, excited) = rates.g;
  h(excited, plus_photon) = h(plus_photon, excited) = rates.g;
  return h;
}

MixingAngle mixing_angle(double rabi, double g) {
  if (g == 0.0) {
    if (rabi > 0.0) return {std::numbers::pi / 2.0, true};
    return {0.0, true};
  }
  return {std::atan(rabi / (2.0 * std::numbers::sqrt2 * g)), false};
}

Vector7 dark_state(double theta) {
  Vector7 state = Vector7::Zero();
  const double photon = -std::sin(theta) / std::numbers::sqrt2;
  state(index(Level::ground_vac)) = std::cos(theta);
  state(index(Level::minus_photon)) = photon;
  state(index(Level::plus_photon)) = photon;
  return state;
}

std::vector<CollapseOperator> collapse_operators(const RateSet& rates) {
  const double to_sink = rates.gamma * (1.0 - rates.recycle_to_ground);
  const double to_ground = rates.gamma * rates.recycle_to_ground;
  const std::array<CollapseOperator, 7> all{{
      {Level::minus_photon, Level::minus_vac, rates.kappa_ex, "L1 fiber a+"},
      {Level::plus_photon, Level::plus_vac, rates.kappa_ex, "L2 fiber a-"},
      {Level::minus_photon, Level::minus_vac, rates.kappa_0, "L3 intrinsic a+"},
      {Level::plus_photon, Level::plus_vac, rates.kappa_0, "L4 intrinsic a-"},
      {Level::excited_vac, Level::sink, to_sink, "L5 decay to sink"},
      {Level::excited_vac, Level::ground_vac, to_ground, "L5 decay to ground"},
      {Level::excited_vac, Level::excited_vac, rates.gamma_phi, "L6 dephasing"},
  }};
  std::vector<CollapseOperator> active;
  for (const auto& op : all) {
    if (op.rate > 0.0) active.push_back(op);
  }
  return active;
}

Matrix7 lindblad_rhs(const Matrix7& rho, const Matrix7& hamiltonian, const RateSet& rates) {
  const Complex minus_i(0.0, -1.0);
  Matrix7 drho = minus_i * (hamiltonian * rho - rho * hamiltonian);

  // Every channel is sqrt(r)|a><b|, so D[L]rho = r rho_bb |a><a| - r/2 {|b><b|, rho}.
  for (const auto& op : collapse_operators(rates)) {
    const int from = index(op.from);
    const int to = index(op.to);
    const Complex feed = op.rate * rho(from, from);
    drho.row(from) -= 0.5 * op.rate * rho.row(from);
    drho.col(from) -= 0.5 * op.rate * rho.col(from);
    drho(to, to) += feed;
  }
  return drho;
}

bool InvariantReport::ok() const {
  return max_trace_drift <= 1e-8 && min_eigenvalue >= -1e-8 && max_bookkeeping_error <= 1e-6 &&
         max_split_error <= 1e-6 && emission_monotone;
}

InvariantReport check_invariants(const SimulationTrace& trace) {
  InvariantReport report;
  report.max_trace_drift = trace.max_trace_drift;
  report.min_eigenvalue = trace.min_eigenvalue;
  // Recycling feeds |0> from |A2>, which does not disturb the |+-1,vac> bookkeeping.
  const TraceSample* previous = nullptr;
  for (const auto& s : trace.samples) {
    double remaining = 0.0;
    for (Level level : {Level::ground_vac, Level::excited_vac, Level::minus_photon,
                        Level::plus_photon, Level::sink}) {
      remaining += s.population(level);
    }
    const double emitted = s.p_fiber() + s.p_intrinsic();
    const double initial_vac = trace.samples.front().population(Level::minus_vac) +
                               trace.samples.front().population(Level::plus_vac);
    report.max_bookkeeping_error =
        std::max(report.max_bookkeeping_error, std::abs(remaining + emitted + initial_vac - 1.0));

    const auto& first = trace.samples.front();
    const double split_plus = s.p_fiber_plus + s.p_int_plus -
                              (s.population(Level::minus_vac) - first.population(Level::minus_vac));
    const double split_minus = s.p_fiber_minus + s.p_int_minus -
                               (s.population(Level::plus_vac) - first.population(Level::plus_vac));
    report.max_split_error =
        std::max({report.max_split_error, std::abs(split_plus), std::abs(split_minus)});

    if (previous != nullptr) {
      // Decreases below the absolute tolerance are integrator noise.
      const double slack = std::max(1e-12, trace.tolerances.abs);
      if (s.p_fiber_plus < previous->p_fiber_plus - slack ||
          s.p_fiber_minus < previous->p_fiber_minus - slack ||
          s.p_int_plus < previous->p_int_plus - slack ||
          s.p_int_minus < previous->p_int_minus - slack) {
        report.emission_monotone = false;
      }
    }
    previous = &s;
  }
  return report;
}

std::vector<double> uniform_grid(double t_total, std::size_t samples) {
  if (samples < 2) throw ValidationError("a time grid needs at least 2 samples");
  if (!(t_total > 0.0)) throw ValidationError("time grid span must be positive");
  std::vector<double> grid(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    grid[i] = t_total * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  return grid;
}

SimulationTrace integrate(const DensityState& initial, const PulseShape& pulse,
                          const RateSet& rates, std::span<const double> t_grid,
                          const Tolerances& tolerances) {
  rates.validate();
  pulse.validate();
  initial.validate();
  if (t_grid.empty()) throw ValidationError("time grid is empty");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw ValidationError("time grid must be non-decreasing");
  }
  if (!(tolerances.abs > 0.0) || !(tolerances.rel > 0.0)) {
    throw ValidationError("integration tolerances must be positive");
  }
  if (tolerances.rel < kMinRelativeTolerance) {
    throw ValidationError("relative tolerance below double precision (minimum 1e-14)");
  }

  SimulationTrace trace;
  trace.rates = rates;
  trace.pulse = pulse;
  trace.tolerances = tolerances;
  trace.samples.reserve(t_grid.size());

  State x{};
  rho_view(x) = initial.rho;

  const MasterEquation system(pulse, rates);
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tolerances.abs,
                                                                           tolerances.rel);

  // Pulse kinks: land exactly on the ramp start and end.
  std::vector<double> breakpoints;
  if (pulse.kind != PulseKind::constant) {
    breakpoints.push_back(pulse.t_on);
    if (pulse.kind == PulseKind::sin2) breakpoints.push_back(pulse.t_on + pulse.t_rise);
  }

  const double t_start = t_grid.front();
  const double span = std::max(t_grid.back() - t_start, 0.0);
  const double min_step = tolerances.min_step_fraction * std::max(span, 1e-300);
  const double fastest = std::max({rates.g, rates.kappa_tot(), rates.gamma, rates.gamma_phi,
                                   pulse.omega_max, std::abs(rates.pump_detuning),
                                   std::abs(rates.cavity_detuning), 1.0 / std::max(span, 1e-300)});
  double dt = 1e-3 / fastest;
  double t = t_start;

  State dxdt{};
  system(x, dxdt, t);

  auto record = [&](double time) {
    trace.samples.push_back(make_sample(x, time, pulse, rates));
    const TraceSample& s = trace.samples.back();
    trace.max_adiabaticity = std::max(trace.max_adiabaticity, s.adiabaticity);
    trace.min_eigenvalue = trace.samples.size() == 1 ? s.min_eigenvalue
                                                     : std::min(trace.min_eigenvalue, s.min_eigenvalue);
  };

  auto after_step = [&]() {
    auto rho = rho_view(x);
    trace.max_hermiticity_error =
        std::max(trace.max_hermiticity_error, max_abs_element(Matrix7(rho - rho.adjoint())));
    rho = (0.5 * (rho + rho.adjoint())).eval();
    trace.max_trace_drift = std::max(trace.max_trace_drift, std::abs(rho.trace().real() - 1.0));
    trace.max_excited_population = std::max(
        trace.max_excited_population, rho(index(Level::excited_vac), index(Level::excited_vac)).real());
    system(x, dxdt, t);
  };

  std::size_t steps = 0;
  for (double target : t_grid) {
    while (t < target) {
      double stop = target;
      for (double b : breakpoints) {
        if (b > t && b < stop) stop = b;
      }
      const bool final_step = dt >= stop - t;
      double trial = final_step ? stop - t : dt;
      const double saved_dt = dt;
      const auto result = stepper.try_step(system, x, dxdt, t, trial);
      if (result == odeint::success) {
        ++trace.accepted_steps;
        if (final_step) t = stop;  // absorb round-off so breakpoints are hit exactly
        after_step();
        // Clipped steps keep the controller's own proposal for the next step.
        dt = final_step ? std::max(trial, saved_dt) : trial;
      } else {
        ++trace.rejected_steps;
        dt = trial;
        if (dt < min_step) {
          throw IntegrationError("step size underflow at " + seconds(t), t);
        }
      }
      if (++steps > tolerances.max_steps) {
        throw IntegrationError("step budget exhausted at " + seconds(t), t);
      }
      if (!std::isfinite(x[0])) {
        throw IntegrationError("non-finite state at " + seconds(t), t);
      }
    }
    record(target);
  }

  trace.final_rho = rho_view(x);
  return trace;
}

double emitted_frequency(const RateSet& rates) { return rates.omega_laser - rates.omega_zfs; }

bool is_two_photon_resonant(const RateSet& rates, double omega_c) {
  if (rates.pump_detuning != rates.cavity_detuning) return false;
  const double out = emitted_frequency(rates);
  const double scale = std::max(std::abs(out), std::abs(omega_c));
  if (std::abs(out - omega_c) > 1e-12 * scale) {
    throw InvariantViolation("two-photon resonance requires omega_out == omega_c, got " +
                             std::to_string(out) + " vs " + std::to_string(omega_c) + " rad/s");
  }
  return true;
}

double adiabaticity(const PulseShape& pulse, const RateSet& rates, double t) {
  if (!(rates.g > 0.0)) throw ValidationError("adiabaticity needs g > 0");
  const double rabi = pulse.rabi(t);
  const double gap = 0.5 * std::sqrt(rabi * rabi + 8.0 * rates.g * rates.g);
  return std::abs(mixing_angle_rate(pulse, rates.g, t)) / gap;
}

double rise_time_for_adiabaticity(PulseKind kind, double omega_max, double g, double target) {
  if (!(target > 0.0)) throw ValidationError("adiabaticity target must be positive");
  if (!(g > 0.0)) throw ValidationError("adiabaticity needs g > 0");
  if (kind == PulseKind::constant || omega_max == 0.0) return 0.0;

  // A(t; t_rise) = a((t - t_on) / t_rise) / t_rise, so evaluate at t_rise = 1.
  PulseShape unit{kind, omega_max, 0.0, 1.0, 1.0};
  RateSet rates;
  rates.g = g;
  const double span = kind == PulseKind::sin2 ? 1.0 : 20.0;
  constexpr int kSamples = 200'000;
  double worst = 0.0;
  for (int i = 1; i < kSamples; ++i) {
    const double s = span * static_cast<double>(i) / kSamples;
    worst = std::max(worst, adiabaticity(unit, rates, s));
  }
  return worst / target;
}

}  // namespace cntnode
