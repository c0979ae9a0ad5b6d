#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner. Nothing here calls the code under test except for
// constellation labelling and point lookup.

#include "nlps/common/random.hpp"
#include "nlps/shaping/constellation.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace nlps::oracle {

using Seq = std::vector<int>;

// All sequences of length n over the alphabet, lexicographic order.
inline std::vector<Seq> all_sequences(const Seq& alphabet, int n) {
  std::vector<Seq> out{{}};
  for (int i = 0; i < n; ++i) {
    std::vector<Seq> next;
    for (const auto& s : out)
      for (int a : alphabet) {
        auto t = s;
        t.push_back(a);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

inline long long energy(const Seq& s) {
  long long e = 0;
  for (int a : s) e += static_cast<long long>(a) * a;
  return e;
}

// Gauss-Hermite nodes and weights for weight exp(-t^2), by Newton iteration on
// the orthonormal Hermite recurrence.
inline void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
    else if (i == 1) z -= 1.14 * std::pow(n, 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * x[0];
    else if (i == 3) z = 1.91 * z - 0.91 * x[1];
    else z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
}

// GMI per 2D of uniform square QAM over AWGN: two independent quadratures,
// each integrated over the Gaussian noise with Gauss-Hermite quadrature.
inline double gmi_oracle_2d(const Constellation& c, double snr_db) {
  const int levels = c.levels_per_quadrature(), q = c.bits_per_quadrature();
  const double sigma_r = std::sqrt(c.mean_uniform_energy() / std::pow(10.0, snr_db / 10) / 2.0);
  std::vector<double> t, w;
  gauss_hermite(120, t, w);
  double loss = 0.0;
  for (int i = 0; i < levels; ++i) {
    const int xi = 2 * i - (levels - 1);
    const unsigned li = c.quadrature_label(xi);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double y = xi + std::sqrt(2.0) * sigma_r * t[k];
      double term = 0.0;
      for (int b = 0; b < q; ++b) {
        const unsigned mask = 1U << b;
        double num = 0.0, den = 0.0;
        for (int j = 0; j < levels; ++j) {
          const int xj = 2 * j - (levels - 1);
          const double g = std::exp(-(y - xj) * (y - xj) / (2 * sigma_r * sigma_r) + (y - xi) * (y - xi) / (2 * sigma_r * sigma_r));
          den += g;
          if ((c.quadrature_label(xj) & mask) == (li & mask)) num += g;
        }
        term += std::log2(den / num);
      }
      loss += w[k] / std::sqrt(std::numbers::pi) * term / levels;
    }
  }
  return 2.0 * (q - loss);
}

inline std::vector<Complex> random_qam(std::size_t count, int order, Rng& rng) {
  const Constellation c(order);
  std::vector<Complex> out(count);
  for (auto& v : out) v = c.point(static_cast<unsigned>(rng() % static_cast<unsigned>(order)));
  return out;
}

inline double rel_l2(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace nlps::oracle
