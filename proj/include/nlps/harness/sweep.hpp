#pragma once

#include "nlps/harness/scenario.hpp"

#include <cstdio>

namespace nlps::harness {

inline constexpr const char* kCsvSchema = "nlps-results/1";

struct ResultRow {
  std::string scenario;
  std::string variant;
  std::string axis;
  double sweep_value = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string source;
  std::string scheme;
  std::string metric;
  int n = 0;
  double n_t = 1.0;
  double eta = 1.0;
  double power_dbm = 0.0;
  int spans = 0;
  double symbol_rate_gbd = 0.0;
  int channels = 0;
  bool cpr = false;
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  double air_u = std::numeric_limits<double>::quiet_NaN();
  double penalty = std::numeric_limits<double>::quiet_NaN();
  double air = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double air_stderr = std::numeric_limits<double>::quiet_NaN();
  double rate_loss = std::numeric_limits<double>::quiet_NaN();
  double gain_se = std::numeric_limits<double>::quiet_NaN();
  double gain_se_stderr = std::numeric_limits<double>::quiet_NaN();
  double gain_snr_db = std::numeric_limits<double>::quiet_NaN();
  double gain_snr_stderr = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
  double wall_time_s = 0.0;
  std::vector<double> batches;      ///< per-block AIR_u, kept for paired gains (not written)
  std::vector<double> snr_batches;  ///< per-block SNR, dB (not written)
};

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "scenario", "variant", "axis",   "sweep_value", "seed",       "source",   "scheme",  "metric",         "n",
      "n_t",      "eta",     "power_dbm", "spans",    "symbol_rate_gbd", "channels", "cpr", "snr_db",  "air_u",
      "penalty",  "air",     "se",     "air_stderr",  "rate_loss",  "gain_se",  "gain_se_stderr", "gain_snr_db", "gain_snr_stderr", "status",
      "wall_time_s"};
  return cols;
}

inline ResultRow describe(const ScenarioConfig& cfg, const std::string& variant, const PointConfig& p, double sweep_value) {
  ResultRow r;
  r.scenario = cfg.id;
  r.variant = variant;
  r.axis = cfg.sweep.axis;
  r.sweep_value = sweep_value;
  r.seed = p.seed;
  r.source = p.source.type;
  r.scheme = p.selection.scheme;
  r.metric = p.selection.scheme == "none" ? "" : p.metric.id;
  r.n = p.n;
  r.power_dbm = p.grid.power_dbm;
  r.spans = p.link.spans;
  r.symbol_rate_gbd = p.grid.symbol_rate_gbd;
  r.channels = p.grid.channels;
  r.cpr = p.receiver.cpr;
  return r;
}

/// Rate loss of the configured source alone (no channel).
inline double source_rate_loss(const PointConfig& p) {
  if (p.source.type == "uniform" || p.source.type == "mb") return 0.0;
  return dm::rate_loss(*dm::make_codec(codec_descriptor(p.source)));
}

struct Job {
  std::size_t point;
  const Variant* variant;
  std::uint64_t seed;
  PointConfig config;
};

/// Every (sweep point, variant, seed) job in emission order, each resolved
/// and built once so that config errors surface before any simulation.
inline std::vector<Job> plan_jobs(const ScenarioConfig& cfg) {
  std::vector<Job> jobs;
  const auto points = sweep_points(cfg);
  std::vector<const Variant*> variants;
  for (const auto& v : cfg.variants) variants.push_back(&v);
  if (variants.empty()) variants.push_back(nullptr);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (const auto* v : variants)
      for (auto seed : cfg.seeds) {
        auto p = resolve_point(cfg, v, points[i], seed);
        try {
          if (cfg.mode == "rate-loss")
            source_rate_loss(p);
          else
            build_setup(p);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(cfg.id + ", variant " + (v ? v->name : std::string("base")) +
                            (std::isnan(points[i]) ? "" : ", " + cfg.sweep.axis + " = " + value::format(points[i])) + ": " + e.what());
        }
        jobs.push_back({i, v, seed, std::move(p)});
      }
  return jobs;
}

inline ResultRow run_job(const ScenarioConfig& cfg, const Job& job, double sweep_value) {
  auto row = describe(cfg, job.variant ? job.variant->name : "base", job.config, sweep_value);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (cfg.mode == "rate-loss") {
      row.rate_loss = source_rate_loss(job.config);
    } else {
      const auto r = run_point(job.config);
      row.n_t = r.candidates();
      row.eta = r.eta();
      row.snr_db = r.report.snr_db;
      row.air_u = r.report.air_u;
      row.penalty = r.report.penalty;
      row.air = r.report.air;
      row.se = r.report.se;
      row.air_stderr = r.report.air_std_error;
      row.rate_loss = r.rate_loss;
      row.batches = r.report.batches;
      row.snr_batches = r.report.snr_batches;
    }
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

/// Fills gain columns of rows whose variant names a baseline, pairing with
/// the baseline row of the same sweep point and seed.
inline void attach_gains(const std::vector<Job>& jobs, std::vector<ResultRow>& rows) {
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!jobs[i].variant || jobs[i].variant->baseline.empty()) continue;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].point != jobs[i].point || jobs[j].seed != jobs[i].seed || !jobs[j].variant || jobs[j].variant->name != jobs[i].variant->baseline)
        continue;
      auto& a = rows[i];
      const auto& b = rows[j];
      if (a.status != "ok" || b.status != "ok" || a.batches.size() != b.batches.size()) break;
      const double scale = jobs[i].config.grid.symbol_rate_gbd / jobs[i].config.grid.spacing_ghz;
      a.gain_se = a.se - b.se;
      a.gain_snr_db = a.snr_db - b.snr_db;
      a.gain_se_stderr = scale * metrics::paired_standard_error(a.batches, b.batches);
      a.gain_snr_stderr = metrics::paired_standard_error(a.snr_batches, b.snr_batches);
      break;
    }
  }
}

/// Runs every job of the scenario on the work queue; a failing job yields a
/// row with an error status and the sweep continues. Rows come back in
/// (sweep point, variant, seed) order regardless of scheduling.
inline std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg) {
  const auto jobs = plan_jobs(cfg);
  const auto points = sweep_points(cfg);
  std::vector<ResultRow> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { rows[i] = run_job(cfg, jobs[i], points[jobs[i].point]); });
  attach_gains(jobs, rows);
  return rows;
}

/// Sweep operations named after the quantity they vary.
inline std::vector<ResultRow> run_sweep(ScenarioConfig cfg, const std::string& axis, std::vector<double> values) {
  cfg.sweep.axis = axis;
  cfg.sweep.values = std::move(values);
  if (integer_axis(axis))
    for (double x : cfg.sweep.values)
      if (x != std::round(x)) throw ConfigError("sweep values for axis '" + axis + "' must be integers");
  return run_scenario(cfg);
}

inline std::vector<ResultRow> run_power_sweep(const ScenarioConfig& cfg, std::vector<double> powers) { return run_sweep(cfg, "power", std::move(powers)); }
inline std::vector<ResultRow> run_eta_sweep(const ScenarioConfig& cfg, std::vector<double> etas) { return run_sweep(cfg, "eta", std::move(etas)); }
inline std::vector<ResultRow> run_nt_sweep(const ScenarioConfig& cfg, std::vector<double> nts) { return run_sweep(cfg, "nt", std::move(nts)); }
inline std::vector<ResultRow> run_n_sweep(const ScenarioConfig& cfg, std::vector<double> ns) { return run_sweep(cfg, "n", std::move(ns)); }
inline std::vector<ResultRow> run_nspan_sweep(ScenarioConfig cfg, std::vector<double> spans, bool reoptimize) {
  cfg.sweep.reoptimize = reoptimize;
  return run_sweep(std::move(cfg), "nspan", std::move(spans));
}
inline std::vector<ResultRow> run_baud_sweep(ScenarioConfig cfg, std::vector<double> ds, bool reoptimize = true) {
  cfg.sweep.reoptimize = reoptimize;
  return run_sweep(std::move(cfg), "baud", std::move(ds));
}

namespace csv {

inline std::string number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string line(const ResultRow& r) {
  const std::vector<std::string> f{quote(r.scenario), quote(r.variant), r.axis, number(r.sweep_value), std::to_string(r.seed), r.source,
                                   r.scheme, r.metric, std::to_string(r.n), number(r.n_t), number(r.eta), number(r.power_dbm),
                                   std::to_string(r.spans), number(r.symbol_rate_gbd), std::to_string(r.channels), r.cpr ? "true" : "false",
                                   number(r.snr_db), number(r.air_u), number(r.penalty), number(r.air), number(r.se), number(r.air_stderr),
                                   number(r.rate_loss), number(r.gain_se), number(r.gain_se_stderr), number(r.gain_snr_db), number(r.gain_snr_stderr), quote(r.status),
                                   number(r.wall_time_s)};
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
  return out;
}

}  // namespace csv

/// First line `# schema: nlps-results/1`, then the header, then one row per job.
inline std::string emit_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string("# schema: ") + kCsvSchema + "\n";
  out += value::join(csv_columns(), [](const std::string& s) { return s; }) + "\n";
  for (const auto& r : rows) out += csv::line(r) + "\n";
  return out;
}

inline void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write '" + path.string() + "'");
  out << emit_csv(rows);
}

/// Parsed result table: header names and string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ConfigError("result table has no column '" + name + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

/// Reads a result CSV, rejecting files of another schema version.
inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open result file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("# schema: ", 0) != 0) throw ConfigError(path.string() + ": missing '# schema:' line");
  const auto schema = line.substr(10);
  if (schema != kCsvSchema) throw ConfigError(path.string() + ": schema '" + schema + "' does not match '" + kCsvSchema + "'");
  CsvTable t;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": missing header");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) throw ConfigError(path.string() + ": row with " + std::to_string(cells.size()) + " cells");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace nlps::harness
