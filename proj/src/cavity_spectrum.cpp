#include "cntnode/cavity_spectrum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cntnode/constants.hpp"
#include "cntnode/errors.hpp"

namespace cntnode {

namespace {

// pi hbar v_c / 2L expressed as an angular frequency (the hbar cancels).
double zero_mode_scale(const RingParameters& ring) {
  return std::numbers::pi * charge_velocity(ring) / (2.0 * ring.circumference());
}

double shifted_winding(long j_c, const FluxConfig& flux) {
  return static_cast<double>(j_c) + 4.0 * flux.flux_quanta();
}

}  // namespace

void RingParameters::validate() const {
  if (!(radius_m > 0.0) || !std::isfinite(radius_m)) {
    throw ValidationError("ring radius must be positive, got " + std::to_string(radius_m));
  }
  if (!(fermi_velocity > 0.0) || !std::isfinite(fermi_velocity)) {
    throw ValidationError("Fermi velocity must be positive, got " +
                          std::to_string(fermi_velocity));
  }
  if (!(luttinger_kc > 0.0 && luttinger_kc <= 1.0)) {
    throw ValidationError("invalid Luttinger parameter K_c = " + std::to_string(luttinger_kc) +
                          " (expected 0 < K_c <= 1)");
  }
}

double RingParameters::circumference() const { return constants::two_pi * radius_m; }

FluxConfig FluxConfig::from_flux(double flux_wb) {
  if (!std::isfinite(flux_wb)) throw ValidationError("flux must be finite");
  return FluxConfig(Source::flux, flux_wb, 0.0);
}

FluxConfig FluxConfig::from_flux_quanta(double flux_over_phi0) {
  return from_flux(flux_over_phi0 * constants::flux_quantum);
}

FluxConfig FluxConfig::from_field(double field_t, double radius_m) {
  if (!std::isfinite(field_t)) throw ValidationError("field must be finite");
  if (!(radius_m > 0.0)) throw ValidationError("field-defined flux needs a positive ring radius");
  return FluxConfig(Source::field, field_t, radius_m);
}

double FluxConfig::flux() const {
  if (source_ == Source::flux) return value_;
  return std::numbers::pi * radius_m_ * radius_m_ * value_;
}

double FluxConfig::flux_quanta() const { return flux() / constants::flux_quantum; }

double FluxConfig::field(double radius_m) const {
  if (source_ == Source::field && radius_m == radius_m_) return value_;
  return flux() / (std::numbers::pi * radius_m * radius_m);
}

double charge_velocity(const RingParameters& ring) {
  ring.validate();
  return ring.fermi_velocity / ring.luttinger_kc;
}

double zero_mode_energy(const RingParameters& ring, const ChargeState& charge,
                        const FluxConfig& flux) {
  const double kc = ring.luttinger_kc;
  const double n = static_cast<double>(charge.n_c);
  const double j = shifted_winding(charge.j_c, flux);
  return constants::hbar * zero_mode_scale(ring) * (n * n / kc + kc * j * j);
}

double mode_frequency(const RingParameters& ring, long m) {
  if (m == 0) {
    throw ValidationError(
        "zero-mode index is handled by zero_mode_energy, not the oscillator branch");
  }
  return charge_velocity(ring) / ring.radius_m * static_cast<double>(std::labs(m));
}

double mode_spacing(const RingParameters& ring) {
  return charge_velocity(ring) / ring.circumference();
}

long nearest_mode_index(const RingParameters& ring, double frequency_hz) {
  if (!(frequency_hz > 0.0)) throw ValidationError("frequency must be positive");
  return std::lround(frequency_hz / mode_spacing(ring));
}

EffectiveWavelength effective_wavelength(const RingParameters& ring, double frequency_hz) {
  if (!(frequency_hz > 0.0)) {
    throw ValidationError("frequency must be positive, got " + std::to_string(frequency_hz));
  }
  const double vc = charge_velocity(ring);
  return {vc / frequency_hz, constants::speed_of_light / vc};
}

SpectrumPoint cavity_resonance(const RingParameters& ring, const ChargeState& charge,
                               const FluxConfig& flux, long m, Branch branch) {
  const double omega_m = mode_frequency(ring, m);
  const double sign = static_cast<double>(static_cast<int>(branch));
  if (sign != 1.0 && sign != -1.0) throw ValidationError("branch must be +1 or -1");

  const double bracket = sign * 2.0 * shifted_winding(charge.j_c, flux) + 1.0;
  SpectrumPoint point;
  point.m = m;
  point.branch = branch;
  point.flux_wb = flux.flux();
  point.omega_c = zero_mode_scale(ring) * ring.luttinger_kc * bracket + omega_m;
  point.zero_mode_energy = zero_mode_energy(ring, charge, flux);
  return point;
}

}  // namespace cntnode
