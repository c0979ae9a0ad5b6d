#pragma once

#include "nlps/channel/transmitter.hpp"
#include "nlps/common/random.hpp"

#include <random>

namespace nlps::channel {

/// Lumped amplifier: field scaled by sqrt(gain), plus circular white Gaussian
/// ASE with the given PSD (W/Hz) per polarization.
inline void edfa(FieldWaveform& field, double gain, double psd_w_per_hz, Rng& rng) {
  if (gain < 1.0) throw std::invalid_argument("edfa: gain below 0 dB");
  const double amp = std::sqrt(gain);
  const double variance = psd_w_per_hz * field.sample_rate_thz * 1e12;
  std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
  const auto apply = [&](std::vector<Complex>& pol) {
    for (auto& v : pol) {
      v *= amp;
      if (variance > 0.0) v += Complex(gauss(rng), gauss(rng));
    }
  };
  apply(field.x);
  apply(field.y);
}

inline void edfa(FieldWaveform& field, double gain_db, double noise_figure_db, double optical_frequency_hz, Rng& rng) {
  const double g = db_to_linear(gain_db);
  edfa(field, g, (g - 1.0) * kPlanck * optical_frequency_hz * db_to_linear(noise_figure_db) / 2.0, rng);
}

/// Dispersion (and loss) transfer function exp((i beta2 w^2 / 2 - alpha / 2) z) on the DFT grid.
inline std::vector<Complex> linear_operator(const LinkConfig& link, std::size_t n, double fs_thz, double z_km, bool with_loss = true) {
  std::vector<Complex> h(n);
  const double b2 = link.beta2(), a = with_loss ? link.alpha() : 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = bin_angular_frequency(k, n, 1.0 / fs_thz);
    h[k] = std::exp(Complex(-a / 2.0, b2 * w * w / 2.0) * z_km);
  }
  return h;
}

/// Symmetric split-step integration of the NLSE (single polarization) or the
/// Manakov equation (dual polarization, 8/9 factor) with a fixed number of
/// uniform steps per span. The nonlinear phase of each step is applied at its
/// midpoint with the exact lossy integral 2 sinh(alpha h / 2) / alpha, so a
/// dispersionless span reproduces gamma |A|^2 L_eff exactly.
class SsfmPropagator {
 public:
  SsfmPropagator(LinkConfig link, std::size_t n, double fs_thz) : link_(std::move(link)), n_(n), fs_(fs_thz) {
    link_.validate();
    const double h = link_.span_length_km / link_.steps_per_span;
    half_ = linear_operator(link_, n_, fs_, h / 2.0);
    full_ = linear_operator(link_, n_, fs_, h);
    span_ = linear_operator(link_, n_, fs_, link_.span_length_km);
    const double a = link_.alpha();
    nl_length_ = a == 0.0 ? h : 2.0 * std::sinh(a * h / 2.0) / a;
  }

  const LinkConfig& link() const { return link_; }

  /// Propagates over all spans; ASE (if enabled in the link and here) seeded per span.
  void propagate(FieldWaveform& field, bool with_ase, std::uint64_t seed) const {
    if (field.size() != n_ || std::abs(field.sample_rate_thz - fs_) > 1e-12 * fs_)
      throw std::invalid_argument("SsfmPropagator: waveform size or sample rate differs from the plan");
    const bool dual = field.dual_polarization();
    const double gamma = link_.gamma_per_w_km * (dual ? 8.0 / 9.0 : 1.0);
    for (int s = 0; s < link_.spans; ++s) {
      span(field, gamma);
      Rng rng(derive_seed(seed, "ase-span", static_cast<std::uint64_t>(s)));
      edfa(field, link_.span_gain(), with_ase && link_.ase ? link_.ase_psd() : 0.0, rng);
      for (const auto& v : field.x)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw RuntimeFailure("SSFM: non-finite field after span " + std::to_string(s + 1));
    }
  }

  /// One span of fiber, no amplifier.
  void span(FieldWaveform& field, double gamma) const {
    const bool dual = field.dual_polarization();
    fft_forward(field.x);
    if (dual) fft_forward(field.y);
    if (gamma == 0.0) {
      multiply(field, span_);
    } else {
      multiply(field, half_);
      const double phase_scale = gamma * nl_length_;
      for (int step = 0; step < link_.steps_per_span; ++step) {
        fft_inverse(field.x);
        if (dual) fft_inverse(field.y);
        for (std::size_t i = 0; i < n_; ++i) {
          const double p = std::norm(field.x[i]) + (dual ? std::norm(field.y[i]) : 0.0);
          const Complex rot = std::polar(1.0, phase_scale * p);
          field.x[i] *= rot;
          if (dual) field.y[i] *= rot;
        }
        fft_forward(field.x);
        if (dual) fft_forward(field.y);
        multiply(field, step + 1 < link_.steps_per_span ? full_ : half_);
      }
    }
    fft_inverse(field.x);
    if (dual) fft_inverse(field.y);
  }

 private:
  static void multiply(FieldWaveform& field, const std::vector<Complex>& h) {
    for (std::size_t k = 0; k < h.size(); ++k) field.x[k] *= h[k];
    if (field.dual_polarization())
      for (std::size_t k = 0; k < h.size(); ++k) field.y[k] *= h[k];
  }

  LinkConfig link_;
  std::size_t n_;
  double fs_;
  std::vector<Complex> half_, full_, span_;
  double nl_length_ = 0.0;
};

}  // namespace nlps::channel
