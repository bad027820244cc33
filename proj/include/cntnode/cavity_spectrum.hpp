#pragma once

// Luttinger-liquid ring cavity: zero-mode sector, plasmon whispering-gallery
// dispersion and the Aharonov-Bohm tunable resonance.

namespace cntnode {

struct RingParameters {
  double radius_m = 0.0;
  double luttinger_kc = 1.0;  // charge-sector Luttinger parameter, 0 < K_c <= 1
  double fermi_velocity = 0.0;  // m/s

  /// Throws ValidationError if R <= 0, v_F <= 0 or K_c outside (0, 1].
  void validate() const;

  double circumference() const;
};

/// Zero-mode quantum numbers: excess charge N_c and current winding J_c.
struct ChargeState {
  long n_c = 0;
  long j_c = 0;
};

/// Magnetic flux through the ring. Either the flux or the perpendicular field
/// is the source of truth; the other quantity is derived from it.
class FluxConfig {
 public:
  enum class Source { flux, field };

  FluxConfig() : FluxConfig(Source::flux, 0.0, 0.0) {}

  static FluxConfig from_flux(double flux_wb);
  static FluxConfig from_flux_quanta(double flux_over_phi0);
  /// Flux is pi R^2 B for a field B threading a ring of radius R.
  static FluxConfig from_field(double field_t, double radius_m);

  Source source() const { return source_; }
  double flux() const;
  double flux_quanta() const;
  /// Perpendicular field producing this flux through a ring of the given radius.
  double field(double radius_m) const;

 private:
  FluxConfig(Source source, double value, double radius_m)
      : source_(source), value_(value), radius_m_(radius_m) {}

  Source source_;
  double value_;
  double radius_m_;
};

/// Sign of the current-winding change Delta J_c accompanying the excitation.
enum class Branch : int { up = +1, down = -1 };

struct SpectrumPoint {
  long m = 0;
  Branch branch = Branch::up;
  double flux_wb = 0.0;
  double omega_c = 0.0;  // rad/s
  double zero_mode_energy = 0.0;  // J, evaluated at the initial (N_c, J_c)
};

/// v_c = v_F / K_c.
double charge_velocity(const RingParameters& ring);

/// E_zero = (pi hbar v_c / 2L) [N_c^2/K_c + K_c (J_c + 4 Phi/Phi0)^2], with the
/// oscillator zero-point sum dropped.
double zero_mode_energy(const RingParameters& ring, const ChargeState& charge,
                        const FluxConfig& flux);

/// omega_m = v_c |m| / R. The m = 0 sector is the zero mode and is rejected.
double mode_frequency(const RingParameters& ring, long m);

/// Fundamental spacing omega_1 / 2pi = v_c / L, in Hz.
double mode_spacing(const RingParameters& ring);

/// Nearest azimuthal index whose oscillator frequency matches `frequency_hz`.
long nearest_mode_index(const RingParameters& ring, double frequency_hz);

struct EffectiveWavelength {
  double wavelength_m;  // v_c / nu
  double compression_ratio;  // lambda_0 / lambda_eff = c / v_c
};

EffectiveWavelength effective_wavelength(const RingParameters& ring, double frequency_hz);

SpectrumPoint cavity_resonance(const RingParameters& ring, const ChargeState& charge,
                               const FluxConfig& flux, long m, Branch branch);

}  // namespace cntnode
