#include "cntnode/chiral_interface.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cntnode/constants.hpp"
#include "cntnode/errors.hpp"

namespace cntnode {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(name) + " must be positive, got " + std::to_string(value));
  }
}

}  // namespace

Polarization DipoleMoment::unit_vector() const {
  const double h = static_cast<double>(static_cast<int>(helicity));
  const double s = 1.0 / std::numbers::sqrt2;
  return {std::complex<double>(s, 0.0), std::complex<double>(0.0, h * s)};
}

ChiralField field_polarization(Circulation direction, double confinement_ratio) {
  if (!(confinement_ratio >= 0.0) || !std::isfinite(confinement_ratio)) {
    throw ValidationError("confinement ratio must be non-negative, got " +
                          std::to_string(confinement_ratio));
  }
  const double norm = 1.0 / std::sqrt(1.0 + confinement_ratio * confinement_ratio);
  const double sign = direction == Circulation::cw ? 1.0 : -1.0;
  ChiralField field;
  field.direction = direction;
  field.confinement_ratio = confinement_ratio;
  field.polarization = {std::complex<double>(norm, 0.0),
                        std::complex<double>(0.0, sign * confinement_ratio * norm)};
  return field;
}

double transition_overlap(const DipoleMoment& dipole, const ChiralField& field) {
  const Polarization d = dipole.unit_vector();
  const std::complex<double> amplitude =
      d[0] * std::conj(field.polarization[0]) + d[1] * std::conj(field.polarization[1]);
  return std::norm(amplitude);
}

double directionality(double confinement_ratio) {
  if (!(confinement_ratio >= 0.0)) {
    throw ValidationError("confinement ratio must be non-negative");
  }
  return 2.0 * confinement_ratio / (1.0 + confinement_ratio * confinement_ratio);
}

void CouplingGeometry::validate() const {
  require_positive(dipole_debye, "dipole moment");
  require_positive(omega_c, "cavity frequency");
  require_positive(eps_r, "relative permittivity");
  require_positive(mode_volume_m3, "mode volume");
  require_positive(decay_length_m, "evanescent decay length");
  if (!(separation_m >= 0.0)) throw ValidationError("emitter separation must be >= 0");
}

double vacuum_coupling(const CouplingGeometry& geometry) {
  geometry.validate();
  using namespace constants;
  const double dipole = geometry.dipole_debye * debye;
  const double vacuum_field = std::sqrt(hbar * geometry.omega_c /
                                        (2.0 * vacuum_permittivity * geometry.eps_r *
                                         geometry.mode_volume_m3));
  return dipole / hbar * vacuum_field * std::exp(-geometry.separation_m / geometry.decay_length_m);
}

void FiberCoupler::validate() const {
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw ValidationError("overlap factor xi must lie in [0, 1], got " + std::to_string(xi));
  }
  require_positive(cnt_area_m2, "CNT mode area");
  require_positive(fiber_area_m2, "fiber mode area");
  require_positive(interaction_length_m, "interaction length");
  require_positive(radius_m, "ring radius");
  require_positive(omega_c, "cavity frequency");
}

Outcoupling max_outcoupling(const FiberCoupler& coupler) {
  coupler.validate();
  const double cnt_volume = constants::two_pi * coupler.radius_m * coupler.cnt_area_m2;
  const double fiber_volume = coupler.interaction_length_m * coupler.fiber_area_m2;
  const double kappa = coupler.xi * coupler.xi * coupler.omega_c * cnt_volume / fiber_volume;
  return {kappa, kappa > coupler.omega_c};
}

}  // namespace cntnode
