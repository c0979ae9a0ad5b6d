#include "acceptance.hpp"

#include "nlps/harness/sweep.hpp"

#include <iostream>

namespace nlps::acceptance {

namespace {

using harness::ResultRow;
using harness::Variant;
using Rows = std::map<std::string, ResultRow>;

constexpr double kSigmas = 2.0;  // tolerance = 2 Monte-Carlo standard errors

/// The desk operating point: 10 x 80 km, one channel at 7 dBm, SpSh-256,
/// 200 blocks of n = 512.
harness::ScenarioConfig desk(const Context& ctx, const std::string& id) {
  auto cfg = harness::load_config(ctx.config_dir / "desk.cfg");
  cfg.id = id;
  cfg.output = (ctx.out_dir / (id + ".csv")).string();
  cfg.sweep = {};
  cfg.variants.clear();
  return cfg;
}

/// R_s / spacing, recovered from the row itself.
double se_scale(const ResultRow& row) { return row.se / row.air; }

Rows run(harness::ScenarioConfig cfg, std::vector<Variant> variants, Report& r) {
  cfg.variants = std::move(variants);
  const auto rows = harness::run_scenario(cfg);
  harness::write_csv(rows, cfg.output);
  Rows out;
  for (const auto& row : rows) {
    std::cout << "    " << row.variant << ": SNR " << fmt(row.snr_db, 3) << " dB, SE " << fmt(row.se, 4) << " +- " << fmt(row.air_stderr * se_scale(row), 4)
              << ", penalty " << fmt(row.penalty, 4);
    if (!std::isnan(row.gain_se)) std::cout << ", gain " << fmt(row.gain_se, 4) << " +- " << fmt(row.gain_se_stderr, 4) << " (SNR " << fmt(row.gain_snr_db, 3) << " dB)";
    std::cout << ", " << fmt(row.wall_time_s, 0) << " s" << (row.status == "ok" ? "" : ", " + row.status) << std::endl;
    r.check(row.variant + " ran", row.status == "ok", row.status);
    out[row.variant] = row;
  }
  return out;
}

/// Standard error of sum_j c_j x_j over block-paired batches; every term
/// shares the data and noise seeds, so the per-block combination is the
/// natural paired statistic.
double combination_stderr(const std::vector<std::pair<double, const std::vector<double>*>>& terms, double scale = 1.0) {
  std::vector<double> d(terms.front().second->size(), 0.0);
  for (const auto& [c, v] : terms) {
    if (v->size() != d.size()) throw std::runtime_error("batch counts differ");
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += c * (*v)[i];
  }
  const std::vector<double> zero(d.size(), 0.0);
  return scale * metrics::paired_standard_error(d, zero);
}

std::string pm(double v, double s) { return fmt(v, 4) + " +- " + fmt(s, 4); }

Variant variant(std::string name, std::string baseline, std::map<std::string, std::string> overrides) {
  return {std::move(name), std::move(baseline), std::move(overrides)};
}

/// a > b on point estimates; the paired standard error is reported.
void ordered(Report& r, const std::string& name, const ResultRow& a, const ResultRow& b) {
  const double s = combination_stderr({{1.0, &a.batches}, {-1.0, &b.batches}}, se_scale(a));
  r.check(name, a.se > b.se, a.variant + " - " + b.variant + " = " + pm(a.se - b.se, s) + " bits/s/Hz");
}

}  // namespace

void conventional_ordering(const Context& ctx, Report& r) {
  auto cfg = desk(ctx, "acceptance_conventional_ordering");
  const auto rows = run(cfg,
                        {variant("high-spsh", "", {{"wdm.power_dbm", "7"}}), variant("high-ccdm", "", {{"wdm.power_dbm", "7"}, {"source.type", "ccdm"}}),
                         variant("high-mb", "", {{"wdm.power_dbm", "7"}, {"source.type", "mb"}}),
                         variant("high-hidm", "", {{"wdm.power_dbm", "7"}, {"source.type", "hidm"}}),
                         variant("linear-spsh", "", {{"wdm.power_dbm", "-8"}}), variant("linear-ccdm", "", {{"wdm.power_dbm", "-8"}, {"source.type", "ccdm"}}),
                         variant("linear-hidm", "", {{"wdm.power_dbm", "-8"}, {"source.type", "hidm"}})},
                        r);
  if (!r.pass()) return;
  ordered(r, "high power: SpSh above CCDM", rows.at("high-spsh"), rows.at("high-ccdm"));
  ordered(r, "high power: CCDM above MB", rows.at("high-ccdm"), rows.at("high-mb"));
  const double spsh_loss = rows.at("linear-spsh").rate_loss, ccdm_loss = rows.at("linear-ccdm").rate_loss, hidm_loss = rows.at("linear-hidm").rate_loss;
  r.check("rate loss: HiDM above SpSh and CCDM", hidm_loss > spsh_loss && hidm_loss > ccdm_loss,
          "SpSh " + fmt(spsh_loss, 4) + ", CCDM " + fmt(ccdm_loss, 4) + ", HiDM " + fmt(hidm_loss, 4) + " bits/amplitude");
  ordered(r, "linear regime: SpSh above HiDM", rows.at("linear-spsh"), rows.at("linear-hidm"));
  ordered(r, "linear regime: CCDM above HiDM", rows.at("linear-ccdm"), rows.at("linear-hidm"));
}

void ideal_selection_regimes(const Context& ctx, Report& r) {
  auto cfg = desk(ctx, "acceptance_ideal_selection");
  const std::map<std::string, std::string> ideal{{"selection.scheme", "ideal"}, {"selection.eta", "0.0625"}};
  auto with = [&](std::map<std::string, std::string> extra) {
    extra.insert(ideal.begin(), ideal.end());
    return extra;
  };
  const auto rows = run(cfg,
                        {variant("none", "", {}), variant("shaped", "none", with({{"selection.sign_regime", "shaped"}})),
                         variant("unshaped-unknown", "none", with({{"selection.sign_regime", "unshaped-unknown"}, {"metric.id", "avg-nli-sign-averaged"}})),
                         variant("unshaped-known", "none", with({{"selection.sign_regime", "unshaped-known"}}))},
                        r);
  if (!r.pass()) return;
  const auto &shaped = rows.at("shaped"), &unknown = rows.at("unshaped-unknown"), &known = rows.at("unshaped-known");
  r.check("shaped signs: gain above 2 sigma", shaped.gain_se > kSigmas * shaped.gain_se_stderr, pm(shaped.gain_se, shaped.gain_se_stderr) + " bits/s/Hz");
  r.check("unshaped unknown signs: gain within 2 sigma of zero", std::abs(unknown.gain_se) <= kSigmas * unknown.gain_se_stderr,
          pm(unknown.gain_se, unknown.gain_se_stderr) + " bits/s/Hz");
  const double s = combination_stderr({{1.0, &known.batches}, {-1.0, &shaped.batches}}, se_scale(known));
  r.check("unshaped known signs: gain within 2 sigma of shaped", std::abs(known.gain_se - shaped.gain_se) <= kSigmas * s,
          "known " + fmt(known.gain_se, 4) + " vs shaped " + fmt(shaped.gain_se, 4) + ", difference " + pm(known.gain_se - shaped.gain_se, s));
}

void practical_versus_ideal(const Context& ctx, Report& r) {
  auto cfg = desk(ctx, "acceptance_practical_schemes");
  const std::string nt = "16";
  auto scheme = [&](const std::string& s, std::map<std::string, std::string> extra = {}) {
    extra["selection.scheme"] = s;
    extra["selection.candidates"] = nt;
    return extra;
  };
  const std::map<std::string, std::string> nu1{{"frame.fec_rate", "2/3"}};
  auto at_nu1 = [&](std::map<std::string, std::string> m) {
    m.insert(nu1.begin(), nu1.end());
    return m;
  };
  const auto rows = run(cfg,
                        {variant("none", "", {}), variant("ideal", "none", {{"selection.scheme", "ideal"}, {"selection.eta", "0.0625"}}),
                         variant("bs", "none", scheme("bs")), variant("mbbs", "none", scheme("mbbs")),
                         variant("sbbs-consecutive", "none", scheme("sbbs")),
                         variant("sbbs-random", "none", scheme("sbbs", {{"frame.parity_mode", "random"}})), variant("none-nu1", "", nu1),
                         variant("bs-nu1", "none-nu1", at_nu1(scheme("bs"))), variant("mbbs-nu1", "none-nu1", at_nu1(scheme("mbbs"))),
                         variant("sbbs-nu1", "none-nu1", at_nu1(scheme("sbbs")))},
                        r);
  if (!r.pass()) return;
  const auto &bs = rows.at("bs"), &ideal = rows.at("ideal");
  r.check("BS gain positive (above 2 sigma)", bs.gain_se > kSigmas * bs.gain_se_stderr, pm(bs.gain_se, bs.gain_se_stderr) + " bits/s/Hz");
  const double s_ideal = combination_stderr({{1.0, &ideal.batches}, {-1.0, &bs.batches}}, se_scale(bs));
  r.check("BS gain below ideal-threshold gain at N_t = 16", bs.gain_se < ideal.gain_se,
          "ideal " + fmt(ideal.gain_se, 4) + ", BS " + fmt(bs.gain_se, 4) + ", difference " + pm(ideal.gain_se - bs.gain_se, s_ideal));
  for (const std::string suffix : {"", "-nu1"}) {
    const auto &m = rows.at("mbbs" + suffix), &b = rows.at("bs" + suffix);
    const double s = combination_stderr({{1.0, &m.batches}, {-1.0, &b.batches}}, se_scale(m));
    r.check(std::string("MB-BS gain equals BS gain within 2 sigma, nu = ") + (suffix.empty() ? "0.5" : "1"), std::abs(m.gain_se - b.gain_se) <= kSigmas * s,
            "MB-BS " + fmt(m.gain_se, 4) + ", BS " + fmt(b.gain_se, 4) + ", difference " + pm(m.gain_se - b.gain_se, s));
  }
  const auto &consecutive = rows.at("sbbs-consecutive"), &random = rows.at("sbbs-random");
  const double s_sb = combination_stderr({{1.0, &consecutive.batches}, {-1.0, &random.batches}}, se_scale(random));
  r.check("SB-BS consecutive parity not below random (2 sigma)", consecutive.gain_se >= random.gain_se - kSigmas * s_sb,
          "consecutive " + fmt(consecutive.gain_se, 4) + ", random " + fmt(random.gain_se, 4) + ", difference " + pm(consecutive.gain_se - random.gain_se, s_sb));
  const auto& sb1 = rows.at("sbbs-nu1");
  r.check("SB-BS gain vanishes at nu = 1 (within 2 sigma of zero)", std::abs(sb1.gain_se) <= kSigmas * sb1.gain_se_stderr,
          pm(sb1.gain_se, sb1.gain_se_stderr) + " bits/s/Hz (nu = 0.5: " + fmt(consecutive.gain_se, 4) + ")");
}

void phase_recovery_interaction(const Context& ctx, Report& r) {
  auto cfg = desk(ctx, "acceptance_cpr_interaction");
  const std::map<std::string, std::string> bs{{"selection.scheme", "bs"}, {"selection.candidates", "16"}};
  auto cpr = [](std::map<std::string, std::string> m) {
    m["receiver.cpr"] = "true";
    return m;
  };
  auto bs_cpr = cpr(bs);
  bs_cpr["metric.id"] = "avg-nli-cpr";
  const auto rows = run(cfg,
                        {variant("spsh", "", {}), variant("mb", "", {{"source.type", "mb"}}), variant("spsh-cpr", "", cpr({})),
                         variant("mb-cpr", "", cpr({{"source.type", "mb"}})), variant("spsh-bs", "spsh", bs), variant("spsh-bs-cpr", "spsh-cpr", bs_cpr)},
                        r);
  if (!r.pass()) return;
  const auto &a = rows.at("spsh-bs"), &a0 = rows.at("spsh"), &b = rows.at("spsh-bs-cpr"), &b0 = rows.at("spsh-cpr");
  const double s = combination_stderr({{1.0, &b.batches}, {-1.0, &b0.batches}, {-1.0, &a.batches}, {1.0, &a0.batches}}, se_scale(a));
  r.check("BS gain unchanged by BPS within 2 sigma", std::abs(b.gain_se - a.gain_se) <= kSigmas * s,
          "with BPS " + fmt(b.gain_se, 4) + ", without " + fmt(a.gain_se, 4) + ", difference " + pm(b.gain_se - a.gain_se, s));
  const auto &m0 = rows.at("mb"), &m1 = rows.at("mb-cpr");
  const double gap0 = a0.se - m0.se, gap1 = b0.se - m1.se;
  const double s_gap = combination_stderr({{1.0, &a0.batches}, {-1.0, &m0.batches}, {-1.0, &b0.batches}, {1.0, &m1.batches}}, se_scale(a0));
  r.check("BPS shrinks the SpSh-over-MB gap without selection", gap1 < gap0,
          "gap without BPS " + fmt(gap0, 4) + ", with BPS " + fmt(gap1, 4) + ", shrinkage " + pm(gap0 - gap1, s_gap) + " bits/s/Hz");
}

void span_robustness(const Context& ctx, Report& r) {
  // Selection at eta = 1/16 for 10 spans, then transmitted over 7 and 13 spans
  // with the metric frozen at the 10-span link, against selection redone for
  // each span count.
  auto cfg = desk(ctx, "acceptance_span_robustness");
  cfg.sweep.axis = "nspan";
  cfg.sweep.values = {7, 10, 13};
  cfg.sweep.reoptimize = true;
  const std::map<std::string, std::string> ideal{{"selection.scheme", "ideal"}, {"selection.eta", "0.0625"}};
  auto frozen = ideal;
  frozen["metric.reference_spans"] = "10";
  cfg.variants = {variant("none", "", {}), variant("reselected", "none", ideal)};
  // The frozen selection at 10 spans is the reselected one, so only 7 and 13
  // spans need a frozen run.
  auto frozen_cfg = cfg;
  frozen_cfg.id += "_frozen";
  frozen_cfg.output = (ctx.out_dir / (frozen_cfg.id + ".csv")).string();
  frozen_cfg.sweep.values = {7, 13};
  const auto main_rows = harness::run_scenario(cfg);
  harness::write_csv(main_rows, cfg.output);
  frozen_cfg.variants = {variant("none", "", {}), variant("frozen", "none", frozen)};
  const auto frozen_rows = harness::run_scenario(frozen_cfg);
  harness::write_csv(frozen_rows, frozen_cfg.output);

  std::map<std::pair<std::string, int>, ResultRow> at;
  for (const auto* rows : {&main_rows, &frozen_rows})
    for (const auto& row : *rows) {
      std::cout << "    " << row.variant << " @ " << row.spans << " spans: SNR " << fmt(row.snr_db, 3) << " dB";
      if (!std::isnan(row.gain_snr_db)) std::cout << ", SNR gain " << pm(row.gain_snr_db, row.gain_snr_stderr) << " dB, SE gain " << pm(row.gain_se, row.gain_se_stderr);
      std::cout << ", " << fmt(row.wall_time_s, 0) << " s" << std::endl;
      r.check(row.variant + " @ " + std::to_string(row.spans) + " ran", row.status == "ok", row.status);
      if (row.variant != "none" || rows == &main_rows) at[{row.variant, row.spans}] = row;
    }
  if (!r.pass()) return;
  for (int spans : {7, 13}) {
    const auto &f = at.at({"frozen", spans}), &s = at.at({"reselected", spans}), &base = at.at({"none", spans});
    // frozen - 0.5 reselected, per block, against the shared baseline.
    const double sd = combination_stderr({{1.0, &f.snr_batches}, {-0.5, &s.snr_batches}, {-0.5, &base.snr_batches}});
    const double retained = f.gain_snr_db - 0.5 * s.gain_snr_db;
    r.check("fixed selection keeps half its SNR gain at " + std::to_string(spans) + " spans", retained >= -kSigmas * sd,
            "fixed " + fmt(f.gain_snr_db, 3) + " dB vs reselected " + fmt(s.gain_snr_db, 3) + " dB (" + fmt(100.0 * f.gain_snr_db / s.gain_snr_db, 0) +
                "%), margin " + pm(retained, sd) + " dB");
  }
  const auto& g10 = at.at({"reselected", 10});
  const auto& b10 = at.at({"none", 10});
  for (int spans : {7, 13}) {
    const auto &g = at.at({"reselected", spans}), &b = at.at({"none", spans});
    const double sd = combination_stderr({{1.0, &g.snr_batches}, {-1.0, &b.snr_batches}, {-1.0, &g10.snr_batches}, {1.0, &b10.snr_batches}});
    r.check("reselected SNR gain at " + std::to_string(spans) + " spans within 2 sigma of 10 spans", std::abs(g.gain_snr_db - g10.gain_snr_db) <= kSigmas * sd,
            fmt(g.gain_snr_db, 3) + " vs " + fmt(g10.gain_snr_db, 3) + " dB, difference " + pm(g.gain_snr_db - g10.gain_snr_db, sd) + " dB");
  }
}

}  // namespace nlps::acceptance
