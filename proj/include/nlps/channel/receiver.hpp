#pragma once

#include "nlps/channel/ssfm.hpp"

namespace nlps::channel {

/// Least-squares complex gain h minimizing sum |y - h x|^2.
inline Complex ls_gain(std::span<const Complex> y, std::span<const Complex> x) {
  if (y.size() != x.size()) throw std::invalid_argument("ls_gain: length mismatch");
  Complex num{};
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += y[i] * std::conj(x[i]);
    den += std::norm(x[i]);
  }
  if (den == 0.0) throw std::invalid_argument("ls_gain: zero reference");
  return num / den;
}

/// Coherent front end for one channel: ideal frequency-domain dispersion
/// compensation, down-shift, RRC matched filter, and symbol-time sampling
/// (spectral folding, equivalent to decimating by sps).
class Receiver {
 public:
  Receiver(const LinkConfig& link, const WdmGrid& grid, int sps, std::size_t symbols)
      : grid_(grid), sps_(sps), l_(symbols), n_(symbols * static_cast<std::size_t>(sps)), fs_(grid.symbol_rate_thz() * sps) {
    cdc_ = linear_operator(link, n_, fs_, link.total_length_km(), false);
    for (auto& v : cdc_) v = std::conj(v);
    mf_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) mf_[k] = rrc_response(bin_frequency(k, n_, static_cast<double>(sps)), 1.0, grid.rolloff);
  }

  std::vector<Complex> demodulate(std::span<const Complex> pol, int channel) const {
    if (pol.size() != n_) throw std::invalid_argument("Receiver: waveform length mismatch");
    std::vector<Complex> spec(pol.begin(), pol.end());
    fft_forward(spec);
    const long shift = offset_bins(grid_.offset_thz(channel), n_, fs_);
    const auto ln = static_cast<long>(n_);
    std::vector<Complex> folded(l_, Complex{});
    for (std::size_t k = 0; k < n_; ++k) {
      const auto src = static_cast<std::size_t>(((static_cast<long>(k) + shift) % ln + ln) % ln);
      if (mf_[k] == 0.0) continue;
      folded[k % l_] += spec[src] * cdc_[src] * mf_[k];
    }
    fft_inverse(folded);
    for (auto& v : folded) v /= static_cast<double>(sps_);
    return folded;
  }

 private:
  WdmGrid grid_;
  int sps_;
  std::size_t l_, n_;
  double fs_;
  std::vector<Complex> cdc_;
  std::vector<double> mf_;
};

struct RxSymbols {
  std::vector<Complex> x, y;
  Complex gain_x{1.0}, gain_y{1.0};
};

/// Demodulates a channel and removes a single complex gain per polarization
/// (mean phase rotation and amplitude) fitted to the known transmitted symbols.
inline RxSymbols rx_frontend(const FieldWaveform& field, const Receiver& rx, int channel, const ChannelSymbols& tx) {
  RxSymbols out;
  out.x = rx.demodulate(field.x, channel);
  if (out.x.size() != tx.x.size()) throw std::invalid_argument("rx_frontend: symbol count mismatch");
  out.gain_x = ls_gain(out.x, tx.x);
  for (auto& v : out.x) v /= out.gain_x;
  if (field.dual_polarization()) {
    out.y = rx.demodulate(field.y, channel);
    out.gain_y = ls_gain(out.y, tx.y);
    for (auto& v : out.y) v /= out.gain_y;
  }
  return out;
}

}  // namespace nlps::channel
