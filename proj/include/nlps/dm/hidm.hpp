#pragma once

#include "nlps/dm/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlps::dm {

struct HidmLayer {
  int output_length = 0;   ///< symbols produced per LUT lookup
  int input_bits = 0;      ///< information bits consumed per lookup
  int alphabet_order = 0;  ///< size of the output symbol alphabet

  friend bool operator==(const HidmLayer&, const HidmLayer&) = default;
};

/// Hierarchical LUT distribution matcher. Layers are listed bottom (amplitude
/// outputs) to top. A lookup in a non-top layer is addressed by the symbol the
/// layer above produced for it (its context) together with its own input bits;
/// the top layer is addressed by input bits only. The number of lookups in a
/// layer is the product of the output lengths of all layers above it.
///
/// LUT contents are built bottom-up by greedy minimum-energy assignment: all
/// output tuples are sorted by total energy (ties: lexicographic), the lowest
/// contexts * 2^bits of them fill the LUT, and context c owns the consecutive
/// run starting at c * 2^bits. A context's energy, used to sort the layer above,
/// is the mean energy of its run.
class Hidm final : public DistributionMatcher {
 public:
  Hidm(std::vector<int> amplitude_alphabet, std::vector<HidmLayer> layers)
      : alphabet_(std::move(amplitude_alphabet)), layers_(std::move(layers)) {
    detail::check_alphabet(alphabet_);
    validate();
    build();
  }

  static Hidm from_lists(std::vector<int> amplitude_alphabet, std::span<const int> output_lengths,
                         std::span<const int> input_bits, std::span<const int> alphabet_orders) {
    if (output_lengths.size() != input_bits.size() || input_bits.size() != alphabet_orders.size())
      throw std::invalid_argument("Hidm: layer parameter lists must have equal length");
    std::vector<HidmLayer> layers;
    for (std::size_t i = 0; i < output_lengths.size(); ++i) layers.push_back({output_lengths[i], input_bits[i], alphabet_orders[i]});
    return Hidm(std::move(amplitude_alphabet), std::move(layers));
  }

  int block_length() const override { return length_; }
  int input_bits() const override { return k_; }
  std::span<const int> alphabet() const override { return alphabet_; }
  std::span<const HidmLayer> layers() const { return layers_; }

  /// Lookups per layer (bottom to top).
  const std::vector<int>& instances() const { return instances_; }

  /// Total LUT storage: entries * output_length * ceil(log2 alphabet_order) summed over layers.
  long long memory_bits() const {
    long long total = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto bits_per_symbol = static_cast<long long>(std::ceil(std::log2(static_cast<double>(layers_[l].alphabet_order))));
      total += static_cast<long long>(luts_[l].size()) * layers_[l].output_length * bits_per_symbol;
    }
    return total;
  }

  std::vector<int> encode(std::span<const std::uint8_t> bits) const override {
    if (static_cast<int>(bits.size()) != k_) throw std::invalid_argument("Hidm::encode: expected " + std::to_string(k_) + " bits");
    std::size_t cursor = 0;
    const auto take = [&](int count) {
      std::size_t v = 0;
      for (int i = 0; i < count; ++i) v = (v << 1) | bits[cursor++];
      return v;
    };
    const std::size_t top = layers_.size() - 1;
    std::vector<int> symbols = luts_[top][take(layers_[top].input_bits)];
    for (std::size_t l = top; l-- > 0;) {
      std::vector<int> next;
      next.reserve(symbols.size() * static_cast<std::size_t>(layers_[l].output_length));
      for (int ctx : symbols) {
        const std::size_t entry = (static_cast<std::size_t>(ctx) << layers_[l].input_bits) | take(layers_[l].input_bits);
        const auto& tuple = luts_[l][entry];
        next.insert(next.end(), tuple.begin(), tuple.end());
      }
      symbols = std::move(next);
    }
    for (auto& s : symbols) s = alphabet_[static_cast<std::size_t>(s)];
    return symbols;
  }

  Bits decode(std::span<const int> amplitudes) const override {
    if (static_cast<int>(amplitudes.size()) != length_) throw std::invalid_argument("Hidm::decode: wrong block length");
    std::vector<int> symbols(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i) symbols[i] = detail::alphabet_index(alphabet_, amplitudes[i]);
    std::vector<std::vector<std::size_t>> layer_bits(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto len = static_cast<std::size_t>(layers_[l].output_length);
      const auto order = static_cast<std::size_t>(layers_[l].alphabet_order);
      std::vector<int> contexts;
      for (std::size_t i = 0; i < symbols.size(); i += len) {
        std::size_t code = 0;
        for (std::size_t j = 0; j < len; ++j) code = code * order + static_cast<std::size_t>(symbols[i + j]);
        const long entry = reverse_[l][code];
        if (entry < 0) throw std::invalid_argument("Hidm::decode: tuple not present in LUT layer " + std::to_string(l));
        const auto e = static_cast<std::size_t>(entry);
        layer_bits[l].push_back(e & ((std::size_t{1} << layers_[l].input_bits) - 1));
        contexts.push_back(static_cast<int>(e >> layers_[l].input_bits));
      }
      symbols = std::move(contexts);
    }
    Bits out;
    out.reserve(static_cast<std::size_t>(k_));
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const int width = layers_[l].input_bits;
      for (std::size_t v : layer_bits[l])
        for (int b = width - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((v >> b) & 1U));
    }
    return out;
  }

  std::vector<double> induced_distribution() const override {
    const std::size_t top = layers_.size() - 1;
    // per-position symbol distributions of the current layer's outputs
    std::vector<std::vector<double>> dists = position_distributions(top, {});
    for (std::size_t l = top; l-- > 0;) dists = position_distributions(l, dists);
    std::vector<double> p(alphabet_.size(), 0.0);
    for (const auto& d : dists)
      for (std::size_t s = 0; s < d.size(); ++s) p[s] += d[s] / static_cast<double>(dists.size());
    return p;
  }

  CodecDescriptor descriptor() const override {
    CodecDescriptor d;
    d.type = "hidm";
    d.block_length = length_;
    d.input_bits = k_;
    d.alphabet = alphabet_;
    for (const auto& l : layers_) {
      d.layer_output_lengths.push_back(l.output_length);
      d.layer_input_bits.push_back(l.input_bits);
      d.layer_alphabet_orders.push_back(l.alphabet_order);
    }
    return d;
  }

 private:
  void validate() {
    if (layers_.empty()) throw std::invalid_argument("Hidm: no layers");
    if (layers_[0].alphabet_order != static_cast<int>(alphabet_.size()))
      throw std::invalid_argument("Hidm: bottom layer alphabet order must equal the amplitude alphabet size");
    instances_.assign(layers_.size(), 1);
    for (std::size_t l = layers_.size() - 1; l-- > 0;) instances_[l] = instances_[l + 1] * layers_[l + 1].output_length;
    length_ = instances_[0] * layers_[0].output_length;
    k_ = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      if (layer.output_length <= 0 || layer.input_bits < 0 || layer.alphabet_order < 2)
        throw std::invalid_argument("Hidm: invalid parameters in layer " + std::to_string(l));
      const double contexts = l + 1 < layers_.size() ? layers_[l + 1].alphabet_order : 1.0;
      const double entries = contexts * std::ldexp(1.0, layer.input_bits);
      if (entries > std::pow(static_cast<double>(layer.alphabet_order), layer.output_length))
        throw std::invalid_argument("Hidm: layer " + std::to_string(l) + " needs more LUT entries than distinct output tuples");
      if (std::pow(static_cast<double>(layer.alphabet_order), layer.output_length) > 1 << 24)
        throw std::invalid_argument("Hidm: layer " + std::to_string(l) + " output space too large to enumerate");
      k_ += instances_[l] * layer.input_bits;
    }
  }

  void build() {
    std::vector<double> energies;
    for (int a : alphabet_) energies.push_back(static_cast<double>(a) * a);
    luts_.resize(layers_.size());
    reverse_.resize(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      const auto order = static_cast<std::size_t>(layer.alphabet_order);
      const auto len = static_cast<std::size_t>(layer.output_length);
      std::size_t space = 1;
      for (std::size_t j = 0; j < len; ++j) space *= order;
      std::vector<std::pair<double, std::size_t>> ranked(space);
      for (std::size_t code = 0; code < space; ++code) {
        double e = 0.0;
        for (std::size_t c = code, j = 0; j < len; ++j, c /= order) e += energies[c % order];
        ranked[code] = {e, code};
      }
      const std::size_t contexts = l + 1 < layers_.size() ? static_cast<std::size_t>(layers_[l + 1].alphabet_order) : 1;
      const std::size_t per_context = std::size_t{1} << layer.input_bits;
      const std::size_t entries = contexts * per_context;
      std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(entries), ranked.end());
      luts_[l].resize(entries);
      reverse_[l].assign(space, -1);
      std::vector<double> context_energy(contexts, 0.0);
      for (std::size_t e = 0; e < entries; ++e) {
        const std::size_t code = ranked[e].second;
        auto& tuple = luts_[l][e];
        tuple.resize(len);
        for (std::size_t c = code, j = len; j-- > 0; c /= order) tuple[j] = static_cast<int>(c % order);
        reverse_[l][code] = static_cast<long>(e);
        context_energy[e / per_context] += ranked[e].first / static_cast<double>(per_context);
      }
      energies = std::move(context_energy);
    }
  }

  std::vector<std::vector<double>> position_distributions(std::size_t l, const std::vector<std::vector<double>>& contexts) const {
    const auto& layer = layers_[l];
    const std::size_t per_context = std::size_t{1} << layer.input_bits;
    const auto order = static_cast<std::size_t>(layer.alphabet_order);
    const auto len = static_cast<std::size_t>(layer.output_length);
    std::vector<std::vector<double>> ctx_dists = contexts.empty() ? std::vector<std::vector<double>>{{1.0}} : contexts;
    std::vector<std::vector<double>> out;
    for (const auto& ctx : ctx_dists) {
      std::vector<std::vector<double>> pos(len, std::vector<double>(order, 0.0));
      for (std::size_t c = 0; c < ctx.size(); ++c) {
        if (ctx[c] == 0.0) continue;
        const double w = ctx[c] / static_cast<double>(per_context);
        for (std::size_t b = 0; b < per_context; ++b) {
          const auto& tuple = luts_[l][c * per_context + b];
          for (std::size_t j = 0; j < len; ++j) pos[j][static_cast<std::size_t>(tuple[j])] += w;
        }
      }
      for (auto& p : pos) out.push_back(std::move(p));
    }
    return out;
  }

  std::vector<int> alphabet_;
  std::vector<HidmLayer> layers_;
  std::vector<int> instances_;
  int length_ = 0;
  int k_ = 0;
  std::vector<std::vector<std::vector<int>>> luts_;  ///< luts_[layer][entry] = output tuple (symbol indices)
  std::vector<std::vector<long>> reverse_;           ///< reverse_[layer][tuple code] = entry or -1
};

}  // namespace nlps::dm
