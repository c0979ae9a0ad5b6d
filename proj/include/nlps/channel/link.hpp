#pragma once

#include "nlps/common/error.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace nlps::channel {

// Internal units: km, ps, THz (1/ps), W.
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPlanck = 6.62607015e-34;     // J s

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct LinkConfig {
  int spans = 10;
  double span_length_km = 80.0;
  double attenuation_db_per_km = 0.2;
  double dispersion_ps_per_nm_km = 17.0;
  double gamma_per_w_km = 1.3;
  double noise_figure_db = 5.0;
  double wavelength_nm = 1550.0;
  int steps_per_span = 100;
  bool ase = true;

  void validate() const {
    if (spans < 1) throw ConfigError("link.spans must be at least 1");
    if (!(span_length_km > 0)) throw ConfigError("link.span_length_km must be positive");
    if (attenuation_db_per_km < 0 || gamma_per_w_km < 0) throw ConfigError("link attenuation and nonlinear coefficient must be nonnegative");
    if (!(wavelength_nm > 0)) throw ConfigError("link.wavelength_nm must be positive");
    if (steps_per_span < 1) throw ConfigError("link.steps_per_span must be at least 1");
  }

  /// Field attenuation constant alpha (1/km, power convention).
  double alpha() const { return attenuation_db_per_km * std::log(10.0) / 10.0; }

  /// beta2 in ps^2/km from D: beta2 = -D lambda^2 / (2 pi c).
  double beta2() const {
    const double lambda_km = wavelength_nm * 1e-12;
    const double c_km_per_ps = kSpeedOfLight * 1e-3 * 1e-12;
    const double d_ps_per_km2 = dispersion_ps_per_nm_km * 1e12;  // ps/(nm km) -> ps/(km km)
    return -d_ps_per_km2 * lambda_km * lambda_km / (2.0 * std::numbers::pi * c_km_per_ps);
  }

  double optical_frequency_hz() const { return kSpeedOfLight / (wavelength_nm * 1e-9); }

  /// EDFA power gain that restores one span's loss.
  double span_gain() const { return std::exp(alpha() * span_length_km); }

  /// ASE power spectral density per polarization (W/Hz), n_sp = NF/2.
  double ase_psd() const {
    const double g = span_gain();
    return (g - 1.0) * kPlanck * optical_frequency_hz() * db_to_linear(noise_figure_db) / 2.0;
  }

  /// (1 - exp(-alpha L)) / alpha, km.
  double effective_length(double length_km) const {
    const double a = alpha();
    return a == 0.0 ? length_km : -std::expm1(-a * length_km) / a;
  }

  double total_length_km() const { return spans * span_length_km; }

  friend bool operator==(const LinkConfig&, const LinkConfig&) = default;
};

struct WdmGrid {
  int channels = 1;
  double symbol_rate_gbd = 46.5;
  double spacing_ghz = 50.0;
  double rolloff = 0.05;
  double power_dbm = 1.0;  ///< per channel

  void validate() const {
    if (channels < 1) throw ConfigError("wdm.channels must be at least 1");
    if (!(symbol_rate_gbd > 0)) throw ConfigError("wdm.symbol_rate_gbd must be positive");
    if (rolloff < 0 || rolloff > 1) throw ConfigError("wdm.rolloff must lie in [0, 1]");
    if (channels > 1 && spacing_ghz < symbol_rate_gbd * (1.0 + rolloff) - 1e-9)
      throw ConfigError("wdm.spacing_ghz is smaller than the channel bandwidth R_s (1 + rolloff)");
  }

  int center() const { return channels / 2; }
  double symbol_rate_thz() const { return symbol_rate_gbd * 1e-3; }
  /// Offset of channel ch from the grid center, THz.
  double offset_thz(int ch) const { return (ch - center()) * spacing_ghz * 1e-3; }
  double occupied_bandwidth_ghz() const { return (channels - 1) * spacing_ghz + symbol_rate_gbd * (1.0 + rolloff); }

  /// Grid family with fixed aggregate rate: R_s = total / d, spacing = width / d, P = p0 - log2 d.
  static WdmGrid scaled(int d, double total_rate_gbd = 232.5, double total_width_ghz = 250.0, double p0_dbm = 3.32, double rolloff = 0.05) {
    return {d, total_rate_gbd / d, total_width_ghz / d, rolloff, p0_dbm - std::log2(static_cast<double>(d))};
  }

  friend bool operator==(const WdmGrid&, const WdmGrid&) = default;
};

/// Smallest integer samples-per-symbol whose sample rate covers the occupied
/// bandwidth times the oversampling factor (and at least 2).
inline int samples_per_symbol(const WdmGrid& grid, double oversampling = 1.25) {
  const double needed = oversampling * grid.occupied_bandwidth_ghz() / grid.symbol_rate_gbd;
  return std::max(2, static_cast<int>(std::ceil(needed - 1e-12)));
}

/// Per-polarization SNR after N spans of ASE in the matched-filter bandwidth R_s, linear.
inline double analytic_ase_snr(const LinkConfig& link, const WdmGrid& grid) {
  const double p_pol = dbm_to_watt(grid.power_dbm) / 2.0;
  return p_pol / (link.spans * link.ase_psd() * grid.symbol_rate_gbd * 1e9);
}

}  // namespace nlps::channel
