#include "cntnode/tripod_dynamics.hpp"

#include <cmath>
#include <doctest.h>
#include <numbers>
#include <random>

#include "cntnode/constants.hpp"
#include "cntnode/errors.hpp"
#include "oracles.hpp"

using namespace cntnode;

namespace {

double ghz(double value) { return units::ghz_to_rad_per_s(value); }

RateSet reference_rates() {
  RateSet r;
  r.g = ghz(20);
  r.kappa_ex = ghz(30);
  r.kappa_0 = ghz(0.1);
  r.gamma = ghz(0.05);
  r.gamma_phi = ghz(10);
  return r;
}

PulseShape reference_pulse(const RateSet& rates, double t_total = 1.5e-9) {
  const double omega_max = 8.0 * rates.g;
  return {PulseKind::sin2, omega_max, 0.0,
          rise_time_for_adiabaticity(PulseKind::sin2, omega_max, rates.g, 0.1), t_total};
}

oracle::Cmat to_dynamic(const Matrix7& m) { return m; }

Matrix7 random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix7 a;
  for (int i = 0; i < kLevelCount; ++i) {
    for (int j = 0; j < kLevelCount; ++j) a(i, j) = {n(rng), n(rng)};
  }
  Matrix7 rho = a * a.adjoint();
  return rho / rho.trace().real();
}

double max_abs(const oracle::Cmat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("level names and pulse kinds") {
  CHECK(level_name(Level::ground_vac) == "0vac");
  CHECK(level_name(Level::sink) == "sink");
  for (PulseKind k : {PulseKind::sin2, PulseKind::tanh_ramp, PulseKind::constant}) {
    CHECK(parse_pulse_kind(pulse_kind_name(k)) == k);
  }
  CHECK_THROWS_AS(parse_pulse_kind("gauss"), ValidationError);
}

TEST_CASE("hamiltonian matches the hand-written block") {
  for (double delta : {0.0, ghz(3)}) {
    RateSet r = reference_rates();
    r.pump_detuning = ghz(5);
    r.cavity_detuning = delta;
    const double rabi = ghz(37);
    const Matrix7 h = build_hamiltonian(r, rabi);
    CHECK(max_abs(to_dynamic(h) - oracle::tripod_hamiltonian(rabi, r.g, r.pump_detuning, delta)) ==
          0.0);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(h.bottomRightCorner(3, 3).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("collapse operators") {
  const auto all = collapse_operators(reference_rates());
  CHECK(all.size() == 6);

  RateSet r;
  r.kappa_ex = 1.0;
  CHECK(collapse_operators(r).size() == 2);
  r.gamma = 1.0;
  r.recycle_to_ground = 0.25;
  const auto split = collapse_operators(r);
  REQUIRE(split.size() == 4);
  CHECK(split[2].to == Level::sink);
  CHECK(split[2].rate == doctest::Approx(0.75));
  CHECK(split[3].to == Level::ground_vac);
  CHECK(split[3].rate == doctest::Approx(0.25));
}

TEST_CASE("lindblad rhs agrees with the dense generator") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    RateSet r;
    r.g = ghz(50 * u(rng));
    r.pump_detuning = ghz(40 * (u(rng) - 0.5));
    r.cavity_detuning = ghz(40 * (u(rng) - 0.5));
    r.kappa_ex = ghz(60 * u(rng));
    r.kappa_0 = ghz(u(rng));
    r.gamma = ghz(u(rng));
    r.gamma_phi = ghz(20 * u(rng));
    const double rabi = ghz(200 * u(rng));
    const Matrix7 rho = random_density(rng);

    const Matrix7 drho = lindblad_rhs(rho, build_hamiltonian(r, rabi), r);
    const oracle::Cmat expected = oracle::dense_lindblad(
        rho, oracle::tripod_hamiltonian(rabi, r.g, r.pump_detuning, r.cavity_detuning),
        oracle::tripod_jumps(r.kappa_ex, r.kappa_0, r.gamma, r.gamma_phi));
    const double scale = std::max(max_abs(expected), 1.0);
    CHECK(max_abs(to_dynamic(drho) - expected) <= 1e-12 * scale);

    // Trace preservation and Hermiticity of the generator.
    CHECK(std::abs(drho.trace()) <= 1e-12 * scale);
    CHECK((drho - drho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }

  SUBCASE("recycling channel") {
    RateSet r;
    r.gamma = 2.0;
    r.recycle_to_ground = 0.3;
    const Matrix7 rho = random_density(rng);
    const Matrix7 drho = lindblad_rhs(rho, Matrix7::Zero(), r);
    const oracle::Cmat expected = oracle::dense_lindblad(
        rho, oracle::Cmat::Zero(7, 7), {oracle::jump(1, 6, 1.4), oracle::jump(1, 0, 0.6)});
    CHECK(max_abs(to_dynamic(drho) - expected) <= 1e-14);
  }
}

TEST_CASE("dark state") {
  RateSet r;
  r.g = 1.0;
  for (int k = 0; k <= 4; ++k) {
    const double theta = k * std::numbers::pi / 8.0;
    const Vector7 d = dark_state(theta);
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-15));

    double g = 1.0;
    double rabi = 2.0 * std::numbers::sqrt2 * g * std::tan(theta);
    if (k == 4) {
      g = 0.0;
      rabi = 1.0;
    }
    const auto angle = mixing_angle(rabi, g);
    CHECK(angle.theta == doctest::Approx(theta).epsilon(1e-14));
    CHECK(angle.degenerate == (k == 4));

    r.g = g;
    for (double detuning : {0.0, 0.7}) {
      r.pump_detuning = detuning;
      r.cavity_detuning = detuning;
      const Matrix7 h = build_hamiltonian(r, rabi);
      const double residual = (h * d).norm() / std::max(h.norm(), 1.0);
      CHECK(residual <= 1e-12);
    }
  }
  CHECK(mixing_angle(0.0, 0.0).theta == 0.0);
  CHECK(mixing_angle(0.0, 0.0).degenerate);
}

TEST_CASE("pulse envelopes") {
  const PulseShape sin2{PulseKind::sin2, 2.0, 1.0, 4.0, 10.0};
  CHECK(sin2.rabi(0.5) == 0.0);
  CHECK(sin2.rabi(1.0) == 0.0);
  CHECK(sin2.rabi(3.0) == doctest::Approx(1.0));
  CHECK(sin2.rabi(5.0) == 2.0);
  CHECK(sin2.rabi(9.0) == 2.0);

  const PulseShape tanh{PulseKind::tanh_ramp, 2.0, 0.0, 1.0, 10.0};
  CHECK(tanh.rabi(1.0) == doctest::Approx(2.0 * std::tanh(1.0)));
  const PulseShape flat{PulseKind::constant, 3.0, 0.0, 0.0, 1.0};
  CHECK(flat.rabi(0.0) == 3.0);
  CHECK(flat.rabi_rate(0.3) == 0.0);

  for (const PulseShape& p : {sin2, tanh}) {
    for (double t : {1.3, 2.0, 3.7, 4.6}) {
      const double h = 1e-6;
      const double fd = (p.rabi(t + h) - p.rabi(t - h)) / (2 * h);
      CHECK(p.rabi_rate(t) == doctest::Approx(fd).epsilon(1e-7));
    }
  }

  CHECK_THROWS_AS((PulseShape{PulseKind::sin2, 1.0, 0.0, 0.0, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((PulseShape{PulseKind::sin2, -1.0, 0.0, 1.0, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((PulseShape{PulseKind::constant, 1.0, 0.0, 0.0, 0.0}.validate()), ValidationError);
}

TEST_CASE("adiabaticity") {
  const RateSet r = reference_rates();
  PulseShape p = reference_pulse(r);

  SUBCASE("matches a finite-difference mixing angle") {
    for (double frac : {0.2, 0.5, 0.8}) {
      const double t = frac * p.t_rise;
      const double h = 1e-6 * p.t_rise;
      const double dtheta = (mixing_angle(p.rabi(t + h), r.g).theta -
                             mixing_angle(p.rabi(t - h), r.g).theta) / (2 * h);
      const double gap = 0.5 * std::sqrt(p.rabi(t) * p.rabi(t) + 8 * r.g * r.g);
      CHECK(adiabaticity(p, r, t) == doctest::Approx(std::abs(dtheta) / gap).epsilon(1e-6));
    }
  }

  SUBCASE("scales as 1/t_rise") {
    PulseShape slow = p;
    slow.t_rise *= 3.0;
    for (double frac : {0.1, 0.4, 0.9}) {
      CHECK(adiabaticity(slow, r, frac * slow.t_rise) ==
            doctest::Approx(adiabaticity(p, r, frac * p.t_rise) / 3.0).epsilon(1e-12));
    }
  }

  SUBCASE("automatic rise time reaches the target") {
    for (PulseKind kind : {PulseKind::sin2, PulseKind::tanh_ramp}) {
      PulseShape q{kind, 8.0 * r.g, 0.0, rise_time_for_adiabaticity(kind, 8.0 * r.g, r.g, 0.1),
                   1e-9};
      double worst = 0.0;
      for (int i = 1; i < 20000; ++i) {
        worst = std::max(worst, adiabaticity(q, r, q.t_rise * (kind == PulseKind::sin2 ? 1.0 : 20.0) *
                                                          i / 20000.0));
      }
      CHECK(worst <= 0.1 * (1 + 1e-9));
      CHECK(worst >= 0.1 * (1 - 1e-3));
    }
    CHECK(p.t_rise == doctest::Approx(0.1395e-9).epsilon(1e-3));
  }

  CHECK(rise_time_for_adiabaticity(PulseKind::constant, 1.0, 1.0, 0.1) == 0.0);
  CHECK_THROWS_AS(rise_time_for_adiabaticity(PulseKind::sin2, 1.0, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(rise_time_for_adiabaticity(PulseKind::sin2, 1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("density state validation") {
  CHECK_NOTHROW(DensityState::ground().validate());
  DensityState bad = DensityState::ground();
  bad.rho(0, 0) = 0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = DensityState::ground();
  bad.rho(0, 1) = 0.1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = DensityState::ground();
  bad.rho(0, 0) = 1.5;
  bad.rho(1, 1) = -0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("integrator agrees with fixed-step RK4 on the dense generator") {
  RateSet r = reference_rates();
  r.pump_detuning = ghz(2);
  r.cavity_detuning = ghz(1);
  PulseShape p = reference_pulse(r, 0.6e-9);
  p.t_on = 0.05e-9;
  const std::vector<double> grid{0.0, 0.2e-9, 0.6e-9};
  const auto trace = integrate(DensityState::ground(), p, r, grid);

  const auto h_of = [&](double t) {
    return oracle::tripod_hamiltonian(p.rabi(t), r.g, r.pump_detuning, r.cavity_detuning);
  };
  const auto jumps = oracle::tripod_jumps(r.kappa_ex, r.kappa_0, r.gamma, r.gamma_phi);
  const auto rhs = [&](double t, const oracle::Cmat& rho) {
    return oracle::dense_lindblad(rho, h_of(t), jumps);
  };
  // Split at the pulse kinks so every RK4 segment is smooth.
  oracle::Cmat rho = oracle::Cmat::Zero(7, 7);
  rho(0, 0) = 1.0;
  const double kinks[] = {0.0, p.t_on, p.t_on + p.t_rise, 0.2e-9, 0.6e-9};
  oracle::Cmat at_grid1;
  for (int seg = 0; seg + 1 < 5; ++seg) {
    const double span = kinks[seg + 1] - kinks[seg];
    rho = oracle::rk4_evolve(rho, kinks[seg], kinks[seg + 1],
                             std::max(1, static_cast<int>(span / 1e-14)), rhs);
    if (seg == 2) at_grid1 = rho;
  }
  CHECK(max_abs(to_dynamic(trace.final_rho) - rho) <= 1e-6);
  for (int i = 0; i < kLevelCount; ++i) {
    CHECK(std::abs(trace.samples[1].populations[i] - at_grid1(i, i).real()) <= 1e-6);
  }
}

TEST_CASE("damped Rabi oscillation against the closed form") {
  RateSet r;
  r.pump_detuning = ghz(3);
  r.gamma = ghz(2);
  r.kappa_ex = ghz(30);
  const PulseShape p{PulseKind::constant, ghz(25), 0.0, 0.0, 1e-9};
  const auto grid = uniform_grid(1e-9, 51);
  const auto trace = integrate(DensityState::ground(), p, r, grid);
  double worst = 0.0;
  for (const auto& s : trace.samples) {
    const auto exact = oracle::damped_rabi(p.omega_max, r.pump_detuning, r.gamma, s.t);
    worst = std::max({worst, std::abs(s.population(Level::ground_vac) - exact.ground),
                      std::abs(s.population(Level::excited_vac) - exact.excited),
                      std::abs(s.population(Level::sink) - exact.sink)});
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("reference run invariants") {
  const RateSet r = reference_rates();
  const PulseShape p = reference_pulse(r);
  const auto trace = integrate(DensityState::ground(), p, r, uniform_grid(p.t_total, 301));
  const auto report = check_invariants(trace);
  CHECK(report.ok());
  CHECK(trace.max_trace_drift <= 1e-8);
  CHECK(trace.min_eigenvalue >= -1e-8);
  CHECK(report.max_bookkeeping_error <= 1e-6);
  CHECK(report.emission_monotone);
  CHECK(trace.max_adiabaticity <= 0.1 + 1e-9);

  const auto& last = trace.final();
  CHECK(last.p_fiber() >= 0.99);
  CHECK(last.p_fiber() == doctest::Approx(0.995568).epsilon(1e-5));
  // The two circulations are mirror images.
  CHECK(std::abs(last.p_fiber_plus - last.p_fiber_minus) <= 1e-12);
  CHECK(trace.max_excited_population < 0.1);

  SUBCASE("the grid only changes where samples are stored") {
    const auto coarse = integrate(DensityState::ground(), p, r, uniform_grid(p.t_total, 7));
    CHECK(std::abs(coarse.final().p_fiber() - last.p_fiber()) <= 1e-7);
  }
}

TEST_CASE("dark-state following improves with slower ramps") {
  RateSet closed;
  closed.g = ghz(20);
  double previous = 1.0;
  for (double t_rise : {0.02e-9, 0.1e-9, 0.5e-9}) {
    const PulseShape p{PulseKind::sin2, 8.0 * closed.g, 0.0, t_rise, t_rise};
    const auto trace = integrate(DensityState::ground(), p, closed, uniform_grid(t_rise, 41));
    CHECK(std::abs(trace.final_rho.trace().real() - 1.0) <= 1e-9);
    const double leak = 1.0 - trace.final().dark_overlap;
    CHECK(leak < previous);
    previous = leak;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("channel bookkeeping") {
  SUBCASE("no fiber coupling means no fiber emission") {
    RateSet r = reference_rates();
    r.kappa_ex = 0.0;
    const PulseShape p = reference_pulse(r);
    const auto trace = integrate(DensityState::ground(), p, r, uniform_grid(p.t_total, 11));
    CHECK(trace.final().p_fiber() == 0.0);
    CHECK(check_invariants(trace).ok());
  }

  SUBCASE("fast off-tripod decay ends in the sink") {
    RateSet r = reference_rates();
    r.gamma = 1000.0 * r.g;
    PulseShape p = reference_pulse(r, 5e-9);
    const auto trace = integrate(DensityState::ground(), p, r, uniform_grid(p.t_total, 51));
    CHECK(trace.final().population(Level::sink) > 0.9);
    CHECK(trace.final().p_fiber() < 0.05);
    CHECK(check_invariants(trace).ok());
  }

  SUBCASE("full recycling leaves the sink empty") {
    RateSet r = reference_rates();
    r.gamma = ghz(5);
    r.recycle_to_ground = 1.0;
    const PulseShape p = reference_pulse(r);
    const auto trace = integrate(DensityState::ground(), p, r, uniform_grid(p.t_total, 11));
    CHECK(trace.final().population(Level::sink) == 0.0);
    CHECK(check_invariants(trace).ok());
  }
}

TEST_CASE("integration failures") {
  const RateSet r = reference_rates();
  const PulseShape p = reference_pulse(r);
  Tolerances tight;
  tight.max_steps = 10;
  try {
    integrate(DensityState::ground(), p, r, uniform_grid(p.t_total, 3), tight);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < p.t_total);
  }

  Tolerances impossible;
  impossible.rel = 1e-30;
  CHECK_THROWS_AS(integrate(DensityState::ground(), p, r, uniform_grid(p.t_total, 3), impossible),
                  ValidationError);

  const std::vector<double> backwards{1e-9, 0.0};
  CHECK_THROWS_AS(integrate(DensityState::ground(), p, r, backwards), ValidationError);
  RateSet negative = r;
  negative.kappa_0 = -1.0;
  CHECK_THROWS_AS(integrate(DensityState::ground(), p, negative, uniform_grid(1e-9, 3)),
                  ValidationError);
}

TEST_CASE("two-photon resonance") {
  RateSet r;
  r.omega_laser = ghz(193002.87);
  r.omega_zfs = ghz(2.87);
  CHECK(emitted_frequency(r) == doctest::Approx(ghz(193000)).epsilon(1e-14));
  CHECK(is_two_photon_resonant(r, ghz(193000)));
  CHECK_THROWS_AS(is_two_photon_resonant(r, ghz(193001)), InvariantViolation);
  r.pump_detuning = 1.0;
  CHECK_FALSE(is_two_photon_resonant(r, ghz(193001)));
}
