#pragma once

#include "nlps/framing/pas_frame.hpp"
#include "nlps/metrics/metric.hpp"

#include <functional>
#include <set>

namespace nlps::framing {

/// One transmitted block. SI appends pilot 4D symbols at the end; MB-BS
/// terminates its chain with a flush block that carries no information.
struct TxBlock {
  SymbolSequence symbols;
  int pilot_symbols = 0;
  bool flush = false;
  int selected = 0;  ///< index of the transmitted candidate
};

/// Called with every candidate set before the argmin (tracing and tests).
using CandidateObserver = std::function<void(std::size_t block, const std::vector<SymbolSequence>& candidates)>;

inline void require_power_of_two(int candidates) {
  if (candidates < 1 || (candidates & (candidates - 1)) != 0)
    throw ConfigError("number of candidates must be a power of 2, got " + std::to_string(candidates));
}

/// N_t fixed masks; mask 0 is all-zero, the rest seeded and pairwise distinct.
class ScramblerBank {
 public:
  ScramblerBank(int candidates, int length, std::uint64_t seed) {
    std::set<Bits> seen;
    masks_.emplace_back(static_cast<std::size_t>(length), 0);
    seen.insert(masks_.front());
    for (std::uint64_t k = 1, attempt = 0; static_cast<int>(k) < candidates; ++attempt) {
      Rng rng(derive_seed(seed, "scrambler", k, attempt));
      auto mask = random_bits(static_cast<std::size_t>(length), rng);
      if (seen.insert(mask).second) {
        masks_.push_back(std::move(mask));
        ++k;
      } else if (attempt > 64 * static_cast<std::uint64_t>(candidates)) {
        throw ConfigError("cannot draw " + std::to_string(candidates) + " distinct scrambling masks of length " + std::to_string(length));
      }
    }
  }

  int size() const { return static_cast<int>(masks_.size()); }
  const Bits& mask(int k) const { return masks_.at(static_cast<std::size_t>(k)); }

  Bits apply(std::span<const std::uint8_t> bits, int k) const { return xor_bits(bits, mask(k)); }

 private:
  std::vector<Bits> masks_;
};

class SelectionScheme {
 public:
  virtual ~SelectionScheme() = default;
  virtual std::string name() const = 0;
  virtual int n() const = 0;
  virtual int candidates() const = 0;
  virtual int info_bits() const = 0;
  /// Rate spent on selection, bits/4D.
  virtual double penalty() const = 0;
  virtual std::vector<TxBlock> encode(const std::vector<Bits>& info, const metrics::SequenceMetric& metric, std::uint64_t seed) const = 0;
  virtual std::vector<Bits> decode(const std::vector<TxBlock>& blocks) const = 0;

  void set_observer(CandidateObserver observer) { observer_ = std::move(observer); }

 protected:
  std::size_t pick(std::size_t block, const std::vector<SymbolSequence>& candidates, const metrics::SequenceMetric& metric,
                   std::uint64_t seed) const {
    if (observer_) observer_(block, candidates);
    if (candidates.size() == 1) return 0;
    return metrics::argmin(metrics::evaluate_all(metric, candidates, derive_seed(seed, "block-metric", block)));
  }

  CandidateObserver observer_;
};

/// Bit scrambling and its variants. Candidate k frames pilot(k) || (t_k xor b).
///  - kBitScrambling: each candidate is a complete PAS frame.
///  - kSingleBlock: parity slots hold per-candidate filler during selection and
///    are overwritten by the selected candidate's parity.
///  - kMultiBlock: parity slots of block i+1 carry block i's parity, fixed for
///    all its candidates; the chain ends with a flush block.
///  - kListCcdm: no masks; the pilot bits act as flipping bits in front of the
///    payload of a single CCDM spanning the whole block.
class ScramblingScheme final : public SelectionScheme {
 public:
  enum class Variant { kBitScrambling, kSingleBlock, kMultiBlock, kListCcdm };

  ScramblingScheme(std::shared_ptr<const PasFramer> framer, Variant variant, std::uint64_t seed)
      : framer_(std::move(framer)),
        variant_(variant),
        bank_(variant == Variant::kListCcdm ? 1 : framer_->accounting().candidates, framer_->accounting().info_bits, derive_seed(seed, "masks")) {
    const auto& acc = framer_->accounting();
    require_power_of_two(acc.candidates);
    if (variant_ == Variant::kListCcdm) {
      if (framer_->codec().descriptor().type != "ccdm") throw ConfigError("list encoding needs a CCDM distribution matcher");
      if (acc.dm_count != 1)
        throw ConfigError("list encoding needs one CCDM per block (4n = N_DM), got 4n = " + std::to_string(4 * acc.n) +
                          ", N_DM = " + std::to_string(acc.dm_block_length));
    }
  }

  std::string name() const override {
    switch (variant_) {
      case Variant::kBitScrambling: return "bs";
      case Variant::kSingleBlock: return "sbbs";
      case Variant::kMultiBlock: return "mbbs";
      case Variant::kListCcdm: return "list-ccdm";
    }
    return "?";
  }
  int n() const override { return framer_->accounting().n; }
  int candidates() const override { return framer_->accounting().candidates; }
  int info_bits() const override { return framer_->accounting().info_bits; }
  double penalty() const override { return std::log2(static_cast<double>(candidates())) / n(); }
  const PasFramer& framer() const { return *framer_; }

  /// Payload of candidate k: pilot bits (k, MSB first) then the masked information bits.
  Bits candidate_payload(std::span<const std::uint8_t> info, int k) const {
    const auto& acc = framer_->accounting();
    Bits payload = uint_to_bits(static_cast<std::uint64_t>(k), static_cast<std::size_t>(acc.pilot_bits));
    const auto body = variant_ == Variant::kListCcdm ? Bits(info.begin(), info.end()) : bank_.apply(info, k);
    payload.insert(payload.end(), body.begin(), body.end());
    return payload;
  }

  std::vector<TxBlock> encode(const std::vector<Bits>& info, const metrics::SequenceMetric& metric, std::uint64_t seed) const override {
    const auto& acc = framer_->accounting();
    std::vector<TxBlock> out;
    out.reserve(info.size() + 1);
    Bits carried;  // parity of the previous block (multi-block chain)
    for (std::size_t i = 0; i < info.size(); ++i) {
      if (static_cast<int>(info[i].size()) != acc.info_bits) throw std::invalid_argument(name() + ": wrong information block size");
      std::vector<FrameParts> parts(static_cast<std::size_t>(acc.candidates));
      std::vector<SymbolSequence> cands(parts.size());
      for (std::size_t k = 0; k < parts.size(); ++k) {
        parts[k] = framer_->split(candidate_payload(info[i], static_cast<int>(k)));
        cands[k] = framer_->assemble(parts[k], selection_parity(parts[k], carried, seed, i, k));
      }
      const std::size_t best = pick(i, cands, metric, seed);
      TxBlock tx{std::move(cands[best]), 0, false, static_cast<int>(best)};
      if (variant_ == Variant::kSingleBlock) tx.symbols = framer_->assemble(parts[best], framer_->parity(parts[best]));
      if (variant_ == Variant::kMultiBlock) carried = framer_->parity(parts[best]);
      out.push_back(std::move(tx));
    }
    if (variant_ == Variant::kMultiBlock && !info.empty()) {
      const auto parts = framer_->split(Bits(static_cast<std::size_t>(acc.payload_bits()), 0));
      out.push_back({framer_->assemble(parts, carried), 0, true, 0});
    }
    return out;
  }

  std::vector<Bits> decode(const std::vector<TxBlock>& blocks) const override {
    std::size_t count = blocks.size();
    if (variant_ == Variant::kMultiBlock) {
      if (blocks.empty() || !blocks.back().flush) throw std::invalid_argument("mbbs: stream must end with a flush block");
      --count;
    }
    std::vector<Bits> info(count);
    // The multi-block chain is unwound from the end: block i's parity is read from block i+1.
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t i = count - 1 - r;
      const auto& seq = blocks[i].symbols;
      if (variant_ == Variant::kMultiBlock) {
        const auto expected = framer_->parity_signs(blocks[i + 1].symbols);
        if (framer_->parity(framer_->disassemble(seq)) != expected) throw std::runtime_error("mbbs: parity chain broken at block " + std::to_string(i));
      } else if (!framer_->parity_consistent(seq)) {
        throw std::runtime_error(name() + ": parity mismatch in block " + std::to_string(i));
      }
      info[i] = recover(framer_->deframe(seq));
    }
    return info;
  }

 private:
  Bits selection_parity(const FrameParts& parts, const Bits& carried, std::uint64_t seed, std::size_t block, std::size_t k) const {
    switch (variant_) {
      case Variant::kSingleBlock: {
        Rng rng(derive_seed(seed, "filler", block, k));
        return random_bits(static_cast<std::size_t>(framer_->accounting().parity_bits), rng);
      }
      case Variant::kMultiBlock:
        if (block > 0) return carried;
        [[fallthrough]];
      default:
        return framer_->parity(parts);
    }
  }

  Bits recover(const Bits& payload) const {
    const auto np = static_cast<std::size_t>(framer_->accounting().pilot_bits);
    const int k = static_cast<int>(bits_to_uint(std::span(payload).first(np)));
    if (k >= candidates()) throw std::runtime_error(name() + ": pilot index out of range");
    const auto body = std::span(payload).subspan(np);
    return variant_ == Variant::kListCcdm ? Bits(body.begin(), body.end()) : bank_.apply(body, k);
  }

  std::shared_ptr<const PasFramer> framer_;
  Variant variant_;
  ScramblerBank bank_;
};

/// Symbol interleaving: candidate k permutes the 4D symbols of one PAS frame
/// with interleaver k (0 = identity); pilot 4D symbols from {+-3 +-3i} on both
/// polarizations identify k, 4 bits each.
class InterleavingScheme final : public SelectionScheme {
 public:
  static constexpr int kMaxCandidates = 256;

  InterleavingScheme(std::shared_ptr<const PasFramer> framer, int candidates, bool per_dm_block, std::uint64_t seed)
      : framer_(std::move(framer)), candidates_(candidates) {
    require_power_of_two(candidates);
    if (candidates > kMaxCandidates) throw ConfigError("symbol interleaving addresses at most 256 candidates with two pilot 4D symbols");
    if (framer_->accounting().candidates != 1) throw ConfigError("symbol interleaving frames carry no pilot bits; build the framer with one candidate");
    const int n = framer_->accounting().n;
    const int chunk = per_dm_block ? framer_->accounting().dm_block_length / kSlotsPer4D : n;
    if (chunk <= 0 || n % chunk != 0) throw ConfigError("per-DM-block interleaving needs N_DM to be a multiple of 4");
    pilot_count_ = (ceil_log2(candidates) + 3) / 4;
    for (int k = 0; k < candidates; ++k) {
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      if (k > 0) {
        Rng rng(derive_seed(seed, "interleaver", static_cast<std::uint64_t>(k)));
        for (int start = 0; start < n; start += chunk) std::shuffle(perm.begin() + start, perm.begin() + start + chunk, rng);
      }
      perms_.push_back(std::move(perm));
    }
  }

  std::string name() const override { return "si"; }
  int n() const override { return framer_->accounting().n; }
  int candidates() const override { return candidates_; }
  int info_bits() const override { return framer_->accounting().payload_bits(); }
  int pilot_symbols() const { return pilot_count_; }
  /// 12 bits per pilot 4D symbol, per block.
  int overhead_bits() const { return 12 * pilot_count_; }
  double penalty() const override { return static_cast<double>(overhead_bits()) / n(); }

  SymbolSequence interleave(const SymbolSequence& x, int k) const {
    SymbolSequence y = x;
    const auto& perm = perms_.at(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (int s = 0; s < kSlotsPer4D; ++s) {
        const auto dst = kSlotsPer4D * i + static_cast<std::size_t>(s);
        const auto src = kSlotsPer4D * static_cast<std::size_t>(perm[i]) + static_cast<std::size_t>(s);
        y.amplitudes[dst] = x.amplitudes[src];
        y.signs[dst] = x.signs[src];
      }
    return y;
  }

  SymbolSequence deinterleave(const SymbolSequence& y, int k) const {
    SymbolSequence x = y;
    const auto& perm = perms_.at(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (int s = 0; s < kSlotsPer4D; ++s) {
        const auto src = kSlotsPer4D * i + static_cast<std::size_t>(s);
        const auto dst = kSlotsPer4D * static_cast<std::size_t>(perm[i]) + static_cast<std::size_t>(s);
        x.amplitudes[dst] = y.amplitudes[src];
        x.signs[dst] = y.signs[src];
      }
    return x;
  }

  std::vector<TxBlock> encode(const std::vector<Bits>& info, const metrics::SequenceMetric& metric, std::uint64_t seed) const override {
    std::vector<TxBlock> out;
    out.reserve(info.size());
    for (std::size_t i = 0; i < info.size(); ++i) {
      const auto base = framer_->frame(info[i]);
      std::vector<SymbolSequence> cands;
      cands.reserve(static_cast<std::size_t>(candidates_));
      for (int k = 0; k < candidates_; ++k) cands.push_back(interleave(base, k));
      const auto best = pick(i, cands, metric, seed);
      TxBlock tx{std::move(cands[best]), pilot_count_, false, static_cast<int>(best)};
      append_pilots(tx.symbols, static_cast<int>(best));
      out.push_back(std::move(tx));
    }
    return out;
  }

  std::vector<Bits> decode(const std::vector<TxBlock>& blocks) const override {
    std::vector<Bits> info;
    info.reserve(blocks.size());
    for (const auto& tx : blocks) {
      if (tx.pilot_symbols != pilot_count_) throw std::invalid_argument("si: unexpected pilot count");
      const auto slots = static_cast<std::size_t>(kSlotsPer4D * n());
      SymbolSequence body{{tx.symbols.amplitudes.begin(), tx.symbols.amplitudes.begin() + static_cast<long>(slots)},
                          {tx.symbols.signs.begin(), tx.symbols.signs.begin() + static_cast<long>(slots)}};
      std::uint64_t k = 0;
      for (std::size_t s = slots; s < tx.symbols.signs.size(); ++s) {
        if (tx.symbols.amplitudes[s] != 3) throw std::runtime_error("si: pilot symbol outside the pilot set");
        k = (k << 1) | bit_of_sign(tx.symbols.signs[s]);
      }
      k >>= 4 * pilot_count_ - ceil_log2(candidates_);
      if (k >= static_cast<std::uint64_t>(candidates_)) throw std::runtime_error("si: pilot index out of range");
      info.push_back(framer_->deframe(deinterleave(body, static_cast<int>(k))));
    }
    return info;
  }

 private:
  void append_pilots(SymbolSequence& x, int k) const {
    const int width = 4 * pilot_count_;
    const auto bits = uint_to_bits(static_cast<std::uint64_t>(k) << (width - ceil_log2(candidates_)), static_cast<std::size_t>(width));
    for (auto b : bits) {
      x.amplitudes.push_back(3);
      x.signs.push_back(sign_of_bit(b));
    }
  }

  std::shared_ptr<const PasFramer> framer_;
  int candidates_;
  int pilot_count_ = 0;
  std::vector<std::vector<int>> perms_;
};

}  // namespace nlps::framing
