#pragma once

#include <array>
#include <complex>

namespace cntnode {

/// Complex polarization in the local (radial x, tangential z) basis.
using Polarization = std::array<std::complex<double>, 2>;

enum class Circulation { cw, ccw };

/// sigma+ / sigma- optical transition.
enum class Helicity : int { plus = +1, minus = -1 };

/// Evanescent cavity field with its spin-momentum locked polarization.
///
/// The confinement ratio r = kappa/k sets the longitudinal component. The CW
/// mode carries (1, +i r)/sqrt(1 + r^2) and the CCW mode (1, -i r)/sqrt(1 + r^2),
/// so at r = 1 they are the circular states x + iz and x - iz.
struct ChiralField {
  Circulation direction = Circulation::cw;
  double confinement_ratio = 0.0;
  Polarization polarization{};
};

struct DipoleMoment {
  Helicity helicity = Helicity::plus;
  double magnitude_cm = 1.0;  // d_0 in C m

  /// (1, i * helicity) / sqrt(2).
  Polarization unit_vector() const;
};

ChiralField field_polarization(Circulation direction, double confinement_ratio);

/// |u_d . conj(u_E)|^2 for unit vectors; 1 for a co-rotating pair at r = 1.
double transition_overlap(const DipoleMoment& dipole, const ChiralField& field);

/// (|M_{+,CW}|^2 - |M_{+,CCW}|^2) / (|M_{+,CW}|^2 + |M_{+,CCW}|^2) = 2r / (1 + r^2).
double directionality(double confinement_ratio);

struct CouplingGeometry {
  double dipole_debye = 0.0;
  double omega_c = 0.0;  // rad/s
  double eps_r = 1.0;
  double mode_volume_m3 = 0.0;
  double separation_m = 0.0;  // emitter-CNT distance x
  double decay_length_m = 0.0;  // evanescent decay length L_d

  void validate() const;
};

/// g = (|d|/hbar) sqrt(hbar omega_c / (2 eps0 eps_r V)) exp(-x / L_d), in rad/s.
double vacuum_coupling(const CouplingGeometry& geometry);

struct FiberCoupler {
  double xi = 0.0;  // overlap factor, includes any order-unity geometry prefactor
  double cnt_area_m2 = 0.0;
  double fiber_area_m2 = 0.0;
  double interaction_length_m = 0.0;
  double radius_m = 0.0;
  double omega_c = 0.0;  // rad/s

  void validate() const;
};

struct Outcoupling {
  double kappa_r;  // rad/s
  bool bound_exceeded;  // kappa_r > omega_c; the value is reported unclamped
};

/// Golden-rule ceiling on the fiber outcoupling rate:
///
///   kappa_R = xi^2 omega_c (2 pi R A_cnt) / (L_int A_fiber)
///
/// The ratio is V_cnt / V_fiber, the optimal-overlap value of the coupled-mode
/// matrix element squared. It is an upper-bound scaling law, so the result is
/// not clamped at omega_c; the flag records when it crosses that bound.
Outcoupling max_outcoupling(const FiberCoupler& coupler);

}  // namespace cntnode
