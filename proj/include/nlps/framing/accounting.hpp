#pragma once

#include "nlps/common/error.hpp"

#include <boost/rational.hpp>

#include <string>

namespace nlps::framing {

using Rational = boost::rational<long long>;

inline int ceil_log2(long long v) {
  int r = 0;
  while ((1LL << r) < v) ++r;
  return r;
}

inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ConfigError("not a rational number: '" + text + "'");
  }
}

inline std::string to_string(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator()) : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Bit budget of one PAS selection block of n 4D symbols (4n amplitude slots,
/// 4n sign slots). All counts are exact integers or construction fails.
struct PasAccounting {
  int order = 0;               ///< M
  int bits_per_symbol = 0;     ///< log2 M
  Rational fec_rate{1};        ///< c
  int n = 0;                   ///< 4D symbols per block
  int dm_block_length = 0;     ///< N_DM
  int dm_input_bits = 0;       ///< k per DM
  int candidates = 1;          ///< N_t
  int dm_count = 0;            ///< 4n / N_DM
  int dm_bits = 0;             ///< dm_count * k
  int amplitude_label_bits = 0;  ///< 4n (log2 M / 2 - 1)
  int unshaped_bits = 0;       ///< n_u
  int fec_input_bits = 0;      ///< n_b~ = amplitude label bits + n_u
  int parity_bits = 0;         ///< n_b~ (1 - c) / c
  int pilot_bits = 0;          ///< n_p = ceil(log2 N_t)
  int info_bits = 0;           ///< n_inf = n_u + dm_bits - n_p
  Rational sign_parity_fraction{0};  ///< nu = parity / 4n

  int sign_slots() const { return 4 * n; }
  /// Payload entering the frame: pilot + information bits.
  int payload_bits() const { return info_bits + pilot_bits; }
  /// R_4D = 4 (R_DM + 1).
  double rate_4d() const { return 4.0 * (static_cast<double>(dm_input_bits) / dm_block_length + 1.0); }
};

inline PasAccounting account(int order, Rational fec_rate, int n, int dm_block_length, int dm_input_bits, int candidates = 1) {
  PasAccounting a;
  int m = 0;
  while ((1 << m) < order) ++m;
  if ((1 << m) != order || m % 2 != 0 || m < 2) throw ConfigError("modulation order must be a power of 4");
  if (fec_rate <= 0 || fec_rate > 1) throw ConfigError("FEC rate must lie in (0, 1]");
  if (n <= 0 || dm_block_length <= 0 || dm_input_bits < 0) throw ConfigError("block sizes must be positive");
  if (candidates < 1) throw ConfigError("number of candidates must be at least 1");
  a.order = order;
  a.bits_per_symbol = m;
  a.fec_rate = fec_rate;
  a.n = n;
  a.dm_block_length = dm_block_length;
  a.dm_input_bits = dm_input_bits;
  a.candidates = candidates;
  if ((4 * n) % dm_block_length != 0)
    throw ConfigError("4n = " + std::to_string(4 * n) + " is not a multiple of the DM block length " + std::to_string(dm_block_length));
  a.dm_count = 4 * n / dm_block_length;
  a.dm_bits = a.dm_count * dm_input_bits;
  a.amplitude_label_bits = 4 * n * (m / 2 - 1);

  const Rational unshaped = Rational(2 * n) * (Rational(2) - (Rational(1) - fec_rate) * m);
  const Rational fec_input = Rational(2 * n) * fec_rate * m;
  if (unshaped.denominator() != 1 || fec_input.denominator() != 1)
    throw ConfigError("FEC rate " + to_string(fec_rate) + " gives non-integer unshaped/FEC-input bit counts at n=" + std::to_string(n));
  if (unshaped < 0) throw ConfigError("parity exceeds the available sign slots (nu > 1) for FEC rate " + to_string(fec_rate));
  a.unshaped_bits = static_cast<int>(unshaped.numerator());
  a.fec_input_bits = static_cast<int>(fec_input.numerator());
  const Rational parity = fec_input * (Rational(1) - fec_rate) / fec_rate;
  if (parity.denominator() != 1) throw ConfigError("non-integer parity count for FEC rate " + to_string(fec_rate));
  a.parity_bits = static_cast<int>(parity.numerator());
  a.sign_parity_fraction = Rational(a.parity_bits, 4 * n);
  a.pilot_bits = ceil_log2(candidates);
  a.info_bits = a.unshaped_bits + a.dm_bits - a.pilot_bits;
  if (a.info_bits <= 0) throw ConfigError("no information bits left after pilots");
  return a;
}

/// nu = (1 - c) log2(M) / 2, the fraction of sign slots carrying parity.
inline Rational parity_sign_fraction(int order, Rational fec_rate) {
  int m = 0;
  while ((1 << m) < order) ++m;
  return (Rational(1) - fec_rate) * m / 2;
}

}  // namespace nlps::framing
