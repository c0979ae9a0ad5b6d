#pragma once

#include "nlps/common/error.hpp"
#include "nlps/shaping/constellation.hpp"
#include "nlps/shaping/maxwell_boltzmann.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlps::metrics {

/// Bit-metric decoder for one quadrature of a square QAM with a Gaussian
/// auxiliary channel. The prior on signed levels is the amplitude prior split
/// evenly over the two signs.
class QuadratureBmd {
 public:
  static constexpr std::size_t kMaxLevels = 64;

  QuadratureBmd(const Constellation& c, std::span<const double> amplitude_prior) : bits_(c.bits_per_quadrature()) {
    if (static_cast<std::size_t>(c.levels_per_quadrature()) > kMaxLevels) throw std::invalid_argument("constellation too large for the bit-metric decoder");
    const auto alphabet = c.amplitude_alphabet();
    if (amplitude_prior.size() != alphabet.size()) throw std::invalid_argument("amplitude prior size differs from the alphabet");
    const int levels = c.levels_per_quadrature();
    for (int i = 0; i < levels; ++i) {
      const int level = 2 * i - (levels - 1);
      const auto a = static_cast<std::size_t>((std::abs(level) - 1) / 2);
      levels_.push_back(level);
      log_prior_.push_back(amplitude_prior[a] > 0 ? std::log(amplitude_prior[a] / 2.0) : -std::numeric_limits<double>::infinity());
      labels_.push_back(c.quadrature_label(level));
    }
    std::vector<double> pmf;
    for (double lp : log_prior_) pmf.push_back(std::exp(lp));
    entropy_ = entropy_bits(pmf);
  }

  double entropy() const { return entropy_; }

  /// Information density of one received sample: H(X) minus the sum over bit
  /// positions of -log2 q(b_i | y), with q the bitwise posterior.
  double density(double y, int sent_level, double noise_variance) const {
    const std::size_t n = levels_.size();
    std::array<double, kMaxLevels> logs;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double d = y - levels_[j];
      logs[j] = log_prior_[j] - d * d / noise_variance;
      top = std::max(top, logs[j]);
    }
    double all = 0.0;
    for (std::size_t j = 0; j < n; ++j) all += std::exp(logs[j] - top);
    const unsigned sent = labels_[static_cast<std::size_t>((sent_level + static_cast<int>(n) - 1) / 2)];
    double loss = 0.0;
    for (int i = 0; i < bits_; ++i) {
      const unsigned mask = 1U << (bits_ - 1 - i);
      double match = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if ((labels_[j] & mask) == (sent & mask)) match += std::exp(logs[j] - top);
      loss += std::log2(all / match);
    }
    return entropy_ - loss;
  }

 private:
  int bits_;
  std::vector<int> levels_;
  std::vector<double> log_prior_;
  std::vector<unsigned> labels_;
  double entropy_ = 0.0;
};

/// Standard error of the mean of batch values (0 with fewer than two batches).
inline double batch_standard_error(std::span<const double> batches) {
  const std::size_t b = batches.size();
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (double v : batches) mean += v;
  mean /= static_cast<double>(b);
  double var = 0.0;
  for (double v : batches) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(b - 1) / static_cast<double>(b));
}

struct GmiEstimate {
  double value = 0.0;   ///< bits per 4D symbol
  double std_error = 0.0;  ///< batch-means standard error
  double noise_variance = 0.0;
  std::vector<double> batches;  ///< per-batch means, for paired comparisons
};

/// Complex noise variance E|y - x|^2 used by the auxiliary channel. An exact
/// zero (noiseless loopback) is floored to a tiny positive value; negative or
/// non-finite estimates are errors.
inline double auxiliary_variance(double estimate, double symbol_energy) {
  if (!(estimate >= 0.0) || !std::isfinite(estimate)) throw RuntimeFailure("GMI: invalid noise variance estimate");
  return std::max(estimate, 1e-12 * symbol_energy);
}

/// Monte-Carlo GMI under bit-metric decoding for dual-polarization QAM, in
/// bits/4D. tx holds transmitted grid points, rx the received samples already
/// rescaled to the grid. batch is the number of 4D symbols per batch.
inline GmiEstimate gmi_4d(std::span<const Complex> tx_x, std::span<const Complex> tx_y, std::span<const Complex> rx_x,
                          std::span<const Complex> rx_y, const Constellation& c, std::span<const double> amplitude_prior,
                          std::size_t batch) {
  const std::size_t n = tx_x.size();
  if (tx_y.size() != n || rx_x.size() != n || rx_y.size() != n) throw std::invalid_argument("gmi: length mismatch");
  if (n == 0 || batch == 0) throw std::invalid_argument("gmi: empty input");
  double err = 0.0, energy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    err += std::norm(rx_x[k] - tx_x[k]) + std::norm(rx_y[k] - tx_y[k]);
    energy += std::norm(tx_x[k]) + std::norm(tx_y[k]);
  }
  GmiEstimate out;
  out.noise_variance = auxiliary_variance(err / (2.0 * static_cast<double>(n)), energy / (2.0 * static_cast<double>(n)));
  const double real_variance_x2 = out.noise_variance;  // 2 sigma_real^2 = sigma_complex^2
  const QuadratureBmd bmd(c, amplitude_prior);

  std::vector<double> density(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto lv = [](double v) { return static_cast<int>(std::lround(v)); };
    density[k] = bmd.density(rx_x[k].real(), lv(tx_x[k].real()), real_variance_x2) +
                 bmd.density(rx_x[k].imag(), lv(tx_x[k].imag()), real_variance_x2) +
                 bmd.density(rx_y[k].real(), lv(tx_y[k].real()), real_variance_x2) +
                 bmd.density(rx_y[k].imag(), lv(tx_y[k].imag()), real_variance_x2);
    out.value += density[k];
  }
  out.value /= static_cast<double>(n);
  for (std::size_t start = 0; start + batch <= n; start += batch) {
    double s = 0.0;
    for (std::size_t k = start; k < start + batch; ++k) s += density[k];
    out.batches.push_back(s / static_cast<double>(batch));
  }
  out.std_error = batch_standard_error(out.batches);
  return out;
}

/// Standard error of mean(a) - mean(b) from batch-wise differences.
inline double paired_standard_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired standard error needs equal batch counts");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return batch_standard_error(d);
}

/// Selection loss (1/n) log2(N_p / N_a) in bits/4D. The ratio is reduced
/// exactly first, so power-of-two ratios give exact results.
inline double selection_penalty(int n, long long proposed, long long accepted) {
  if (n < 1) throw std::invalid_argument("selection penalty: n must be positive");
  if (accepted <= 0) throw std::invalid_argument("selection penalty: no accepted sequences");
  if (accepted > proposed) throw std::invalid_argument("selection penalty: more accepted than proposed");
  const boost::rational<long long> ratio(proposed, accepted);
  return (std::log2(static_cast<double>(ratio.numerator())) - std::log2(static_cast<double>(ratio.denominator()))) / n;
}

inline double air_with_selection(double air_u, int n, long long proposed, long long accepted) {
  return air_u - selection_penalty(n, proposed, accepted);
}

inline double se_from_air(double air, double symbol_rate_gbd, double spacing_ghz) {
  if (!(symbol_rate_gbd > 0 && spacing_ghz > 0)) throw std::invalid_argument("se_from_air: rates must be positive");
  return symbol_rate_gbd / spacing_ghz * air;
}

/// Effective SNR (dB) of received samples rescaled to the grid.
inline double effective_snr_db(std::span<const Complex> tx, std::span<const Complex> rx) {
  double s = 0.0, e = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    s += std::norm(tx[i]);
    e += std::norm(rx[i] - tx[i]);
  }
  return 10.0 * std::log10(s / e);
}

struct PerformanceReport {
  double power_dbm = 0.0;
  double snr_db = 0.0;
  double air_u = 0.0;    ///< bits/4D before selection loss
  double penalty = 0.0;  ///< bits/4D
  double air = 0.0;      ///< bits/4D
  double se = 0.0;       ///< bits/s/Hz
  double air_std_error = 0.0;
  std::vector<double> batches;      ///< per-batch AIR_u, for paired comparisons
  std::vector<double> snr_batches;  ///< per-batch effective SNR, dB
};

}  // namespace nlps::metrics
