#pragma once

#include "nlps/channel/bps.hpp"
#include "nlps/channel/receiver.hpp"
#include "nlps/framing/ideal_selection.hpp"
#include "nlps/framing/schemes.hpp"
#include "nlps/metrics/nli.hpp"
#include "nlps/metrics/performance.hpp"
#include "nlps/metrics/statistics.hpp"

#include <chrono>

namespace nlps::harness {

struct SourceConfig {
  std::string type = "spsh";  ///< uniform, mb, spsh, ccdm, hidm
  int order = 64;
  double rate = 1.3;          ///< bits/amplitude (DM rate or MB entropy)
  int dm_length = 0;          ///< 0: 256 for spsh, 1024 for ccdm
  std::vector<int> hidm_bits; ///< per-layer input bits; empty: the 6-layer default

  friend bool operator==(const SourceConfig&, const SourceConfig&) = default;
};

struct FrameConfig {
  framing::Rational fec_rate{5, 6};
  std::string parity_mode = "consecutive";
  bool si_per_dm_block = false;

  friend bool operator==(const FrameConfig&, const FrameConfig&) = default;
};

struct SelectionConfig {
  std::string scheme = "none";  ///< none, ideal, bs, si, sbbs, mbbs, list-ccdm
  int candidates = 1;           ///< N_t for practical schemes
  double eta = 1.0;             ///< target acceptance rate for ideal selection
  std::string sign_regime = "shaped";
  int calibration = framing::IdealSelector::kMinCalibrationBatch;

  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

struct MetricConfig {
  std::string id = "avg-nli";  ///< avg-nli, avg-nli-sign-averaged, avg-nli-cpr, edi, kurtosis
  int n_avg = 2;
  int n_s = 4;
  int window = 140;            ///< CPR half window for avg-nli-cpr, W for edi
  int sps = 2;
  int steps_per_span = 10;
  int reference_spans = 0;                 ///< 0: the transmission link's
  double reference_symbol_rate_gbd = 0.0;  ///< 0: the transmission grid's

  friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

struct ReceiverConfig {
  bool cpr = false;  ///< blind phase search after the constant-phase removal
  int bps_angles = 64;
  int bps_window = 140;

  friend bool operator==(const ReceiverConfig&, const ReceiverConfig&) = default;
};

/// One fully resolved operating point.
struct PointConfig {
  channel::LinkConfig link;
  channel::WdmGrid grid;
  SourceConfig source;
  FrameConfig frame;
  SelectionConfig selection;
  MetricConfig metric;
  ReceiverConfig receiver;
  int n = 512;
  int blocks = 200;
  std::uint64_t seed = 1;
  std::uint64_t ase_seed = 0;  ///< 0: derived from seed

  std::uint64_t data_seed() const { return derive_seed(seed, "data"); }
  std::uint64_t noise_seed() const { return ase_seed != 0 ? ase_seed : derive_seed(seed, "ase"); }

  friend bool operator==(const PointConfig&, const PointConfig&) = default;
};

inline bool is_practical_scheme(const std::string& s) { return s == "bs" || s == "si" || s == "sbbs" || s == "mbbs" || s == "list-ccdm"; }

inline dm::CodecDescriptor codec_descriptor(const SourceConfig& s) {
  const int amplitudes = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.order)))) / 2;
  if (s.type == "spsh" || s.type == "ccdm") {
    const int len = s.dm_length > 0 ? s.dm_length : (s.type == "spsh" ? 256 : 1024);
    return {.type = s.type == "spsh" ? "ess" : "ccdm", .block_length = len, .input_bits = dm::input_bits_for_rate(len, s.rate),
            .alphabet = dm::odd_alphabet(amplitudes)};
  }
  if (s.type == "hidm") {
    if (amplitudes != 4) throw ConfigError("source.type = hidm needs source.order = 64");
    return s.hidm_bits.empty() ? dm::reference::hierarchical() : dm::reference::hierarchical(s.hidm_bits);
  }
  throw ConfigError("source.type '" + s.type + "' has no distribution matcher");
}

/// Objects built from a point config before any simulation starts.
struct Setup {
  std::shared_ptr<const framing::PasFramer> framer;  ///< null for i.i.d. sources
  framing::SourcePtr source;
  metrics::MetricPtr metric;
  std::shared_ptr<const framing::SelectionScheme> scheme;  ///< practical schemes only
};

inline int framer_candidates(const SelectionConfig& s) {
  return s.scheme == "bs" || s.scheme == "sbbs" || s.scheme == "mbbs" || s.scheme == "list-ccdm" ? s.candidates : 1;
}

inline metrics::MetricPtr build_metric(const PointConfig& p, const framing::SourcePtr& source) {
  const auto& m = p.metric;
  if (m.id == "edi") return std::make_shared<metrics::EdiMetric>(m.window);
  if (m.id == "kurtosis") return std::make_shared<metrics::KurtosisMetric>();
  metrics::MetricContext ctx;
  ctx.link = p.link;
  ctx.link.steps_per_span = m.steps_per_span;
  if (m.reference_spans > 0) ctx.link.spans = m.reference_spans;
  ctx.grid = p.grid;
  ctx.grid.channels = 1;
  if (m.reference_symbol_rate_gbd > 0) ctx.grid.symbol_rate_gbd = m.reference_symbol_rate_gbd;
  ctx.sps = m.sps;
  ctx.n_avg = m.n_avg;
  ctx.n_s = m.n_s;
  ctx.half_window = m.window;
  ctx.reference_energy = source->nominal_energy_2d();
  metrics::NeighborSource neighbors = [source](Rng& rng) { return source->draw(rng); };
  if (m.id == "avg-nli") return std::make_shared<metrics::NliMetric>(ctx, neighbors);
  if (m.id == "avg-nli-cpr") return std::make_shared<metrics::NliMetric>(ctx, neighbors, metrics::NliMetric::Mode::kCprAware);
  if (m.id == "avg-nli-sign-averaged")
    return std::make_shared<metrics::SignAveragedMetric>(std::make_shared<metrics::NliMetric>(ctx, neighbors), m.n_s);
  throw ConfigError("unknown metric id '" + m.id + "'");
}

inline Setup build_setup(const PointConfig& p) {
  p.link.validate();
  p.grid.validate();
  if (p.n < 1) throw ConfigError("n must be positive");
  if (p.blocks < 2) throw ConfigError("blocks must be at least 2 (standard errors need two batches)");
  Setup s;
  const auto& src = p.source;
  if (src.type == "uniform") {
    s.source = std::make_shared<framing::IidSource>(framing::IidSource::uniform(src.order, p.n));
  } else if (src.type == "mb") {
    s.source = std::make_shared<framing::IidSource>(framing::IidSource::maxwell_boltzmann(src.order, p.n, src.rate));
  } else {
    s.framer = std::make_shared<framing::PasFramer>(dm::make_codec(codec_descriptor(src)), src.order, p.frame.fec_rate, p.n,
                                                    framer_candidates(p.selection), framing::parse_parity_layout(p.frame.parity_mode),
                                                    derive_seed(p.seed, "frame"));
    s.source = std::make_shared<framing::DmSource>(s.framer, src.type);
  }

  const auto& sel = p.selection;
  if (sel.scheme == "none" || (sel.scheme == "ideal" && sel.eta == 1.0)) {
    if (sel.scheme == "ideal") framing::parse_sign_regime(sel.sign_regime);
  } else {
    s.metric = build_metric(p, s.source);
  }
  if (sel.scheme == "ideal") {
    if (!(sel.eta > 0.0 && sel.eta <= 1.0)) throw ConfigError("selection.eta must lie in (0, 1]");
    if (sel.calibration < framing::IdealSelector::kMinCalibrationBatch)
      throw ConfigError("selection.calibration must be at least " + std::to_string(framing::IdealSelector::kMinCalibrationBatch));
  } else if (is_practical_scheme(sel.scheme)) {
    if (!s.framer) throw ConfigError("scheme '" + sel.scheme + "' needs a DM source (spsh, ccdm or hidm)");
    const auto scheme_seed = derive_seed(p.seed, "scheme");
    using V = framing::ScramblingScheme::Variant;
    if (sel.scheme == "si") {
      s.scheme = std::make_shared<framing::InterleavingScheme>(s.framer, sel.candidates, p.frame.si_per_dm_block, scheme_seed);
    } else {
      const V v = sel.scheme == "bs" ? V::kBitScrambling : sel.scheme == "sbbs" ? V::kSingleBlock : sel.scheme == "mbbs" ? V::kMultiBlock : V::kListCcdm;
      s.scheme = std::make_shared<framing::ScramblingScheme>(s.framer, v, scheme_seed);
    }
  } else if (sel.scheme != "none") {
    throw ConfigError("unknown selection scheme '" + sel.scheme + "'");
  }
  return s;
}

/// Centre-channel symbols plus which 4D symbols carry data (pilots and flush
/// blocks are transmitted but not counted).
struct TxStream {
  SymbolSequence symbols;
  std::vector<std::uint8_t> counted;
  long long proposed = 0, accepted = 0;
  double penalty = 0.0;  ///< bits/4D
  double threshold = std::numeric_limits<double>::infinity();
};

inline void append(TxStream& s, const SymbolSequence& x, std::size_t data_symbols) {
  s.symbols.amplitudes.insert(s.symbols.amplitudes.end(), x.amplitudes.begin(), x.amplitudes.end());
  s.symbols.signs.insert(s.symbols.signs.end(), x.signs.begin(), x.signs.end());
  for (std::size_t k = 0; k < x.size(); ++k) s.counted.push_back(k < data_symbols ? 1 : 0);
}

/// Block i of the unselected source; for DM sources its payload equals the
/// information block a practical scheme would receive.
inline Bits information_block(const PointConfig& p, int bits, std::size_t i) {
  Rng rng(derive_seed(p.data_seed(), "block", i));
  return random_bits(static_cast<std::size_t>(bits), rng);
}

inline TxStream generate_stream(const PointConfig& p, const Setup& s) {
  TxStream out;
  const auto blocks = static_cast<std::size_t>(p.blocks);
  const auto& sel = p.selection;
  const auto n = static_cast<std::size_t>(p.n);
  if (sel.scheme == "none") {
    for (std::size_t i = 0; i < blocks; ++i) {
      Rng rng(derive_seed(p.data_seed(), "block", i));
      append(out, s.source->draw(rng), n);
    }
    out.proposed = out.accepted = p.blocks;
  } else if (sel.scheme == "ideal") {
    framing::IdealSelector selector(s.source, s.metric ? s.metric : std::make_shared<metrics::KurtosisMetric>(),
                                    framing::parse_sign_regime(sel.sign_regime), p.data_seed());
    if (sel.eta < 1.0) selector.calibrate(sel.eta, sel.calibration);
    const auto r = selector.select(p.blocks);
    for (const auto& x : r.blocks) append(out, x, n);
    out.proposed = r.stats.proposed;
    out.accepted = r.stats.accepted;
    out.threshold = r.stats.threshold;
    out.penalty = metrics::selection_penalty(p.n, out.proposed, out.accepted);
  } else {
    std::vector<Bits> info(blocks);
    for (std::size_t i = 0; i < blocks; ++i) info[i] = information_block(p, s.scheme->info_bits(), i);
    const auto tx = s.scheme->encode(info, *s.metric, derive_seed(p.seed, "selection"));
    if (s.scheme->decode(tx) != info) throw RuntimeFailure(s.scheme->name() + ": noiseless decoding did not recover the information bits");
    for (const auto& b : tx) append(out, b.symbols, b.flush ? 0 : n);
    out.proposed = static_cast<long long>(s.scheme->candidates()) * p.blocks;
    out.accepted = p.blocks;
    out.penalty = s.scheme->penalty();
  }
  return out;
}

/// Unselected source blocks for a neighbouring WDM channel, cut to length.
inline SymbolSequence neighbor_stream(const PointConfig& p, const Setup& s, int channel, std::size_t symbols) {
  SymbolSequence out;
  for (std::size_t i = 0; out.size() < symbols; ++i) {
    Rng rng(derive_seed(p.seed, "wdm-channel", static_cast<std::uint64_t>(channel), i));
    const auto x = s.source->draw(rng);
    out.amplitudes.insert(out.amplitudes.end(), x.amplitudes.begin(), x.amplitudes.end());
    out.signs.insert(out.signs.end(), x.signs.begin(), x.signs.end());
  }
  out.amplitudes.resize(kSlotsPer4D * symbols);
  out.signs.resize(kSlotsPer4D * symbols);
  return out;
}

inline channel::ChannelSymbols to_channel(const SymbolSequence& x) { return {x.polarization(0), x.polarization(1)}; }

/// Propagates the WDM signal and returns the centre channel after gain
/// removal (and blind phase search when enabled), in grid units.
inline channel::RxSymbols transmit(const PointConfig& p, const Setup& s, const TxStream& stream) {
  const std::size_t symbols = stream.symbols.size();
  std::vector<channel::ChannelSymbols> channels(static_cast<std::size_t>(p.grid.channels));
  for (int c = 0; c < p.grid.channels; ++c)
    channels[static_cast<std::size_t>(c)] = c == p.grid.center() ? to_channel(stream.symbols) : to_channel(neighbor_stream(p, s, c, symbols));
  const int sps = channel::samples_per_symbol(p.grid);
  auto field = channel::wdm_modulate(channels, p.grid, sps);
  const channel::SsfmPropagator prop(p.link, field.x.size(), field.sample_rate_thz);
  prop.propagate(field, p.link.ase, p.noise_seed());
  const channel::Receiver rx(p.link, p.grid, sps, symbols);
  const auto& tx = channels[static_cast<std::size_t>(p.grid.center())];
  auto out = channel::rx_frontend(field, rx, p.grid.center(), tx);
  if (p.receiver.cpr) {
    const Constellation c(p.source.order);
    out.x = channel::bps_correct(out.x, c, p.receiver.bps_angles, p.receiver.bps_window);
    out.y = channel::bps_correct(out.y, c, p.receiver.bps_angles, p.receiver.bps_window);
  }
  return out;
}

struct PointResult {
  metrics::PerformanceReport report;
  long long proposed = 0, accepted = 0;
  double rate_loss = 0.0;  ///< bits/amplitude
  double threshold = std::numeric_limits<double>::infinity();
  double wall_seconds = 0.0;
  std::string status = "ok";

  double eta() const { return accepted > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
  double candidates() const { return accepted > 0 ? static_cast<double>(proposed) / static_cast<double>(accepted) : 0.0; }
};

inline metrics::PerformanceReport evaluate(const PointConfig& p, const Setup& s, const TxStream& stream, const channel::RxSymbols& rx) {
  std::vector<Complex> tx_x, tx_y, rx_x, rx_y;
  for (std::size_t k = 0; k < stream.counted.size(); ++k) {
    if (!stream.counted[k]) continue;
    tx_x.push_back(stream.symbols.point(k, 0));
    tx_y.push_back(stream.symbols.point(k, 1));
    rx_x.push_back(rx.x[k]);
    rx_y.push_back(rx.y[k]);
  }
  const auto prior = s.source->amplitude_prior();
  const auto gmi = metrics::gmi_4d(tx_x, tx_y, rx_x, rx_y, Constellation(p.source.order), prior, static_cast<std::size_t>(p.n));
  const double loss = 4.0 * s.source->rate_loss();
  metrics::PerformanceReport r;
  r.power_dbm = p.grid.power_dbm;
  std::vector<Complex> all_tx(tx_x), all_rx(rx_x);
  all_tx.insert(all_tx.end(), tx_y.begin(), tx_y.end());
  all_rx.insert(all_rx.end(), rx_y.begin(), rx_y.end());
  r.snr_db = metrics::effective_snr_db(all_tx, all_rx);
  r.air_u = gmi.value - loss;
  r.penalty = stream.penalty;
  r.air = r.air_u - r.penalty;
  r.se = metrics::se_from_air(r.air, p.grid.symbol_rate_gbd, p.grid.spacing_ghz);
  r.air_std_error = gmi.std_error;
  r.batches = gmi.batches;
  for (auto& b : r.batches) b -= loss;
  const auto block = static_cast<std::size_t>(p.n);
  for (std::size_t start = 0; start + block <= tx_x.size(); start += block) {
    std::vector<Complex> bt(tx_x.begin() + static_cast<long>(start), tx_x.begin() + static_cast<long>(start + block));
    std::vector<Complex> br(rx_x.begin() + static_cast<long>(start), rx_x.begin() + static_cast<long>(start + block));
    bt.insert(bt.end(), tx_y.begin() + static_cast<long>(start), tx_y.begin() + static_cast<long>(start + block));
    br.insert(br.end(), rx_y.begin() + static_cast<long>(start), rx_y.begin() + static_cast<long>(start + block));
    r.snr_batches.push_back(metrics::effective_snr_db(bt, br));
  }
  return r;
}

/// Generates, transmits and evaluates one operating point.
inline PointResult run_point(const PointConfig& p) {
  const auto start = std::chrono::steady_clock::now();
  const Setup s = build_setup(p);
  const TxStream stream = generate_stream(p, s);
  const auto rx = transmit(p, s, stream);
  PointResult out;
  out.report = evaluate(p, s, stream, rx);
  out.proposed = stream.proposed;
  out.accepted = stream.accepted;
  out.threshold = stream.threshold;
  out.rate_loss = s.source->rate_loss();
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Difference a - b in SE (bits/s/Hz) and SNR (dB) with paired batch-means
/// standard errors.
struct Gain {
  double se = 0.0;
  double std_error = 0.0;
  double snr_db = 0.0;
  double snr_std_error = 0.0;
};

inline Gain gain(const PointResult& a, const PointResult& b, const PointConfig& p) {
  const double scale = p.grid.symbol_rate_gbd / p.grid.spacing_ghz;
  Gain g;
  g.se = a.report.se - b.report.se;
  g.std_error = scale * metrics::paired_standard_error(a.report.batches, b.report.batches);
  g.snr_db = a.report.snr_db - b.report.snr_db;
  g.snr_std_error = metrics::paired_standard_error(a.report.snr_batches, b.report.snr_batches);
  return g;
}

}  // namespace nlps::harness
