#pragma once

#include "nlps/channel/link.hpp"
#include "nlps/common/fft.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlps::channel {

/// Sampled optical field. An empty y marks a single-polarization waveform.
struct FieldWaveform {
  std::vector<Complex> x, y;
  double sample_rate_thz = 0.0;

  bool dual_polarization() const { return !y.empty(); }
  std::size_t size() const { return x.size(); }
  double dt() const { return 1.0 / sample_rate_thz; }
  double energy() const {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    for (const auto& v : y) e += std::norm(v);
    return e;
  }
  double mean_power() const { return energy() / static_cast<double>(size()); }
};

/// Root-raised-cosine amplitude response at frequency f for symbol rate rs (same units).
inline double rrc_response(double f, double rs, double rolloff) {
  const double af = std::abs(f);
  const double f1 = (1.0 - rolloff) * rs / 2.0, f2 = (1.0 + rolloff) * rs / 2.0;
  if (af <= f1) return 1.0;
  if (af > f2) return 0.0;
  return std::sqrt(0.5 * (1.0 + std::cos(std::numbers::pi / (rolloff * rs) * (af - f1))));
}

inline double bin_frequency(std::size_t k, std::size_t n, double fs) {
  const auto signed_k = k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
  return signed_k * fs / static_cast<double>(n);
}

/// Frequency-domain RRC pulse shaping of one symbol stream: the symbol
/// spectrum is tiled sps times (zero-stuffing) and weighted by the RRC
/// response. Circular, so the stream is treated as periodic.
inline std::vector<Complex> shape_spectrum(std::span<const Complex> symbols, int sps, double rolloff) {
  const std::size_t l = symbols.size();
  std::vector<Complex> spec(symbols.begin(), symbols.end());
  fft_forward(spec);
  const std::size_t n = l * static_cast<std::size_t>(sps);
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = spec[k % l] * rrc_response(bin_frequency(k, n, static_cast<double>(sps)), 1.0, rolloff);
  return out;
}

/// Bin shift closest to a frequency offset (THz) for n bins at sample rate fs.
inline long offset_bins(double offset_thz, std::size_t n, double fs_thz) {
  return std::lround(offset_thz * static_cast<double>(n) / fs_thz);
}

struct ChannelSymbols {
  std::vector<Complex> x, y;  ///< y empty for single polarization
};

/// WDM modulator. Each channel is shaped, scaled to the per-channel launch
/// power (split evenly between polarizations) and moved to its grid slot by an
/// integer bin shift. With reference_energy == 0 the scaling makes each
/// channel's empirical mean power exact; otherwise a fixed scale maps a stream
/// of mean 2D symbol energy reference_energy to the launch power, so
/// individual sequences keep their own relative power.
inline FieldWaveform wdm_modulate(const std::vector<ChannelSymbols>& channels, const WdmGrid& grid, int sps,
                                  double reference_energy = 0.0) {
  grid.validate();
  if (static_cast<int>(channels.size()) != grid.channels) throw ConfigError("wdm_modulate: channel count differs from the grid");
  const std::size_t l = channels.front().x.size();
  const bool dual = !channels.front().y.empty();
  for (const auto& ch : channels)
    if (ch.x.size() != l || ch.y.size() != (dual ? l : 0)) throw std::invalid_argument("wdm_modulate: channels must have equal lengths");
  const std::size_t n = l * static_cast<std::size_t>(sps);
  const double fs = grid.symbol_rate_thz() * sps;
  const double half_span = grid.occupied_bandwidth_ghz() * 1e-3 / 2.0;
  if (half_span > fs / 2.0) throw ConfigError("WDM grid exceeds the simulation bandwidth (aliasing)");

  FieldWaveform field;
  field.sample_rate_thz = fs;
  field.x.assign(n, Complex{});
  if (dual) field.y.assign(n, Complex{});
  const double pol_power = dbm_to_watt(grid.power_dbm) / (dual ? 2.0 : 1.0);
  for (int c = 0; c < grid.channels; ++c) {
    const long shift = offset_bins(grid.offset_thz(c), n, fs);
    const auto place = [&](std::span<const Complex> symbols, std::vector<Complex>& target) {
      auto spec = shape_spectrum(symbols, sps, grid.rolloff);
      double energy = 0.0;
      if (reference_energy > 0.0) {
        // Expected power of i.i.d. symbols of that energy: l E sum |H_k|^2 / n^2.
        for (std::size_t k = 0; k < n; ++k) energy += std::pow(rrc_response(bin_frequency(k, n, static_cast<double>(sps)), 1.0, grid.rolloff), 2);
        energy *= static_cast<double>(l) * reference_energy;
      } else {
        for (const auto& v : spec) energy += std::norm(v);
      }
      // Parseval: time-domain mean power = sum |X_k|^2 / n^2.
      const double mean_power = energy / (static_cast<double>(n) * static_cast<double>(n));
      if (mean_power <= 0.0) throw std::invalid_argument("wdm_modulate: zero-power channel");
      const double scale = std::sqrt(pol_power / mean_power);
      for (std::size_t k = 0; k < n; ++k) {
        const auto dst = static_cast<std::size_t>((static_cast<long>(k) + shift % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n));
        target[dst] += scale * spec[k];
      }
    };
    place(channels[static_cast<std::size_t>(c)].x, field.x);
    if (dual) place(channels[static_cast<std::size_t>(c)].y, field.y);
  }
  fft_inverse(field.x);
  if (dual) fft_inverse(field.y);
  return field;
}

}  // namespace nlps::channel
