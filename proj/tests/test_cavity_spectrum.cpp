#include "cntnode/cavity_spectrum.hpp"

#include <cmath>
#include <doctest.h>

#include "cntnode/constants.hpp"
#include "cntnode/errors.hpp"
#include "oracles.hpp"

using namespace cntnode;

namespace {

RingParameters reference_ring() { return {2e-6, 0.2, 8e5}; }

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("flux quantum is h/e") {
  CHECK(rel_diff(constants::flux_quantum, 4.1357e-15) < 1e-4);
}

TEST_CASE("charge velocity") {
  CHECK(rel_diff(charge_velocity({2e-6, 0.2, 8e5}), 4e6) < 1e-12);
  CHECK(charge_velocity({2e-6, 1.0, 8e5}) == doctest::Approx(8e5));
  CHECK(rel_diff(charge_velocity({2e-6, 0.5, 8e5}), 1.6e6) < 1e-12);

  CHECK_THROWS_AS(charge_velocity({2e-6, 0.0, 8e5}), ValidationError);
  CHECK_THROWS_AS(charge_velocity({2e-6, -0.2, 8e5}), ValidationError);
  CHECK_THROWS_AS(charge_velocity({2e-6, 1.5, 8e5}), ValidationError);
  CHECK_THROWS_AS(charge_velocity({0.0, 0.2, 8e5}), ValidationError);
  CHECK_THROWS_AS(charge_velocity({2e-6, 0.2, -1.0}), ValidationError);
}

TEST_CASE("zero-mode energy") {
  const auto ring = reference_ring();
  CHECK(zero_mode_energy(ring, {0, 0}, FluxConfig::from_flux(0.0)) == 0.0);

  // Oracle value 2.6364295425e-22 J; the rounded reference is 2.637e-22 J.
  const double e = zero_mode_energy(ring, {1, 0}, FluxConfig::from_flux(0.0));
  CHECK(rel_diff(e, oracle::zero_mode_energy(2e-6, 0.2, 8e5, 1, 0, 0.0)) < 1e-12);
  CHECK(rel_diff(e, 2.637e-22) < 1e-3);

  SUBCASE("quarter flux quantum shifts J_c by one") {
    for (long n = -3; n <= 3; ++n) {
      for (long j = -3; j <= 3; ++j) {
        for (double phi : {-0.7, 0.0, 0.13, 1.9}) {
          const auto base = FluxConfig::from_flux_quanta(phi);
          const auto shifted = FluxConfig::from_flux_quanta(phi + 0.25);
          const double lhs = zero_mode_energy(ring, {n, j}, shifted);
          const double rhs = zero_mode_energy(ring, {n, j + 1}, base);
          CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1e-30));
        }
      }
    }
  }

  SUBCASE("non-negative and matches the spreadsheet oracle over a grid") {
    for (long n = -4; n <= 4; n += 2) {
      for (long j = -4; j <= 4; ++j) {
        for (double phi : {-2.3, -0.25, 0.0, 0.6, 3.1}) {
          const double value = zero_mode_energy(ring, {n, j}, FluxConfig::from_flux_quanta(phi));
          CHECK(value >= 0.0);
          CHECK(value == doctest::Approx(oracle::zero_mode_energy(2e-6, 0.2, 8e5, n, j, phi))
                             .epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("flux from a perpendicular field") {
  const double radius = 2e-6;
  const auto flux = FluxConfig::from_field(0.5, radius);
  CHECK(flux.source() == FluxConfig::Source::field);
  CHECK(rel_diff(flux.flux(), oracle::kPi * radius * radius * 0.5) < 1e-15);
  CHECK(flux.field(radius) == 0.5);
  // Phi may exceed Phi0 without wrapping.
  const auto big = FluxConfig::from_flux_quanta(7.3);
  CHECK(big.flux_quanta() == doctest::Approx(7.3));
  CHECK_THROWS_AS(FluxConfig::from_field(1.0, 0.0), ValidationError);
}

TEST_CASE("mode frequency and spacing") {
  const auto ring = reference_ring();
  const double f1 = mode_frequency(ring, 1) / constants::two_pi;
  CHECK(f1 == doctest::Approx(318.3098861837907e9).epsilon(1e-10));
  CHECK(std::abs(f1 - 320e9) / 320e9 < 0.01);
  CHECK(mode_spacing(ring) == doctest::Approx(f1).epsilon(1e-14));

  const double f603 = mode_frequency(ring, 603) / constants::two_pi;
  CHECK(f603 == doctest::Approx(191.94086136882578e12).epsilon(1e-10));

  for (long m : {1L, 2L, 17L, 603L, 1000L}) {
    CHECK(mode_frequency(ring, m) == mode_frequency(ring, -m));
    CHECK(mode_frequency(ring, m) == static_cast<double>(m) * mode_frequency(ring, 1));
  }

  try {
    mode_frequency(ring, 0);
    FAIL("m = 0 must be rejected");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("zero-mode index") != std::string::npos);
  }
}

TEST_CASE("telecom mode index") {
  const auto ring = reference_ring();
  CHECK(std::lround(193e12 / 320e9) == 603);
  CHECK(nearest_mode_index(ring, 193e12) == 606);
}

TEST_CASE("effective wavelength") {
  const auto ring = reference_ring();
  const auto w = effective_wavelength(ring, 193e12);
  CHECK(w.wavelength_m == doctest::Approx(20.7e-9).epsilon(2e-3));
  CHECK(w.compression_ratio == doctest::Approx(75.0).epsilon(1e-3));

  // v_c = c: no compression.
  const RingParameters light{1e-6, 1.0, constants::speed_of_light};
  const auto free = effective_wavelength(light, 193e12);
  CHECK(free.wavelength_m == doctest::Approx(constants::speed_of_light / 193e12));
  CHECK(free.compression_ratio == doctest::Approx(1.0));

  CHECK_THROWS_AS(effective_wavelength(ring, 0.0), ValidationError);
  CHECK_THROWS_AS(effective_wavelength(ring, -1.0), ValidationError);
}

TEST_CASE("cavity resonance") {
  const auto ring = reference_ring();
  const auto zero = FluxConfig::from_flux(0.0);
  const double omega_m = mode_frequency(ring, 603);

  SUBCASE("zero-mode offset on the up branch") {
    const auto p = cavity_resonance(ring, {0, 0}, zero, 603, Branch::up);
    CHECK((p.omega_c - omega_m) / constants::two_pi ==
          doctest::Approx(15.915494309189535e9).epsilon(1e-9));
  }

  SUBCASE("branch splitting") {
    // Degenerate at J_c + 4 Phi/Phi0 = 0, split by 4x the offset per unit winding.
    const auto up = cavity_resonance(ring, {0, 0}, zero, 603, Branch::up);
    const auto down = cavity_resonance(ring, {0, 0}, zero, 603, Branch::down);
    CHECK(up.omega_c == down.omega_c);
    const auto eighth = FluxConfig::from_flux_quanta(0.125);
    const auto up8 = cavity_resonance(ring, {0, 0}, eighth, 603, Branch::up);
    const auto down8 = cavity_resonance(ring, {0, 0}, eighth, 603, Branch::down);
    CHECK((up8.omega_c - down8.omega_c) / constants::two_pi ==
          doctest::Approx(31.83098861837907e9).epsilon(1e-9));
  }

  SUBCASE("matches the difference of zero-mode energies") {
    for (long j = -2; j <= 2; ++j) {
      for (double phi : {0.0, 0.3, -1.1}) {
        const auto flux = FluxConfig::from_flux_quanta(phi);
        for (Branch b : {Branch::up, Branch::down}) {
          const long step = static_cast<int>(b);
          const double de = zero_mode_energy(ring, {0, j + step}, flux) -
                            zero_mode_energy(ring, {0, j}, flux);
          const auto p = cavity_resonance(ring, {0, j}, flux, 5, b);
          CHECK(p.omega_c ==
                doctest::Approx(de / constants::hbar + mode_frequency(ring, 5)).epsilon(1e-12));
        }
      }
    }
  }

  SUBCASE("flux slope from finite differences") {
    const double dphi = 0.01;
    const auto a = cavity_resonance(ring, {0, 0}, FluxConfig::from_flux_quanta(0.2), 603, Branch::up);
    const auto b =
        cavity_resonance(ring, {0, 0}, FluxConfig::from_flux_quanta(0.2 + dphi), 603, Branch::up);
    const double slope_hz = (b.omega_c - a.omega_c) / dphi / constants::two_pi;
    const double expected = 2.0 * charge_velocity(ring) * ring.luttinger_kc / ring.circumference();
    CHECK(slope_hz == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(127.32395447351628e9).epsilon(1e-10));
  }

  SUBCASE("affine in flux") {
    for (double start : {-1.0, 0.0, 0.37, 2.5}) {
      const double h = 0.05;
      double w[3];
      for (int k = 0; k < 3; ++k) {
        w[k] = cavity_resonance(ring, {0, 1}, FluxConfig::from_flux_quanta(start + k * h), 603,
                                Branch::down)
                   .omega_c;
      }
      CHECK(std::abs(w[0] - 2 * w[1] + w[2]) <= 1e-9 * std::abs(w[1]));
    }
  }

  CHECK_THROWS_AS(cavity_resonance(ring, {0, 0}, zero, 0, Branch::up), ValidationError);
  CHECK_THROWS_AS(cavity_resonance(ring, {0, 0}, zero, 1, static_cast<Branch>(2)), ValidationError);
}
