#pragma once

#include "nlps/harness/config.hpp"
#include "nlps/harness/experiment.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace nlps::harness {

inline constexpr int kConfigVersion = 1;

/// Binding between a dotted config key and one field of a point config.
struct KeyBinding {
  std::string key;
  std::function<void(PointConfig&, const std::string&, const ConfigEntry&)> set;
  std::function<std::string(const PointConfig&)> get;
};

namespace detail {

template <typename Field>
KeyBinding number(std::string key, Field field) {
  return {key, [field](PointConfig& p, const std::string& k, const ConfigEntry& e) { field(p) = value::to_double(k, e); },
          [field](const PointConfig& p) {
            PointConfig q = p;
            return value::format(field(q));
          }};
}

template <typename Field>
KeyBinding integer(std::string key, Field field) {
  return {key, [field](PointConfig& p, const std::string& k, const ConfigEntry& e) { field(p) = value::to_int(k, e); },
          [field](const PointConfig& p) {
            PointConfig q = p;
            return std::to_string(field(q));
          }};
}

template <typename Field>
KeyBinding boolean(std::string key, Field field) {
  return {key, [field](PointConfig& p, const std::string& k, const ConfigEntry& e) { field(p) = value::to_bool(k, e); },
          [field](const PointConfig& p) {
            PointConfig q = p;
            return std::string(field(q) ? "true" : "false");
          }};
}

template <typename Field>
KeyBinding choice(std::string key, std::vector<std::string> allowed, Field field) {
  return {key,
          [field, allowed](PointConfig& p, const std::string& k, const ConfigEntry& e) {
            if (std::find(allowed.begin(), allowed.end(), e.value) == allowed.end())
              throw value::bad(k, e, "expected one of " + value::join(allowed, [](const std::string& s) { return s; }));
            field(p) = e.value;
          },
          [field](const PointConfig& p) {
            PointConfig q = p;
            return field(q);
          }};
}

}  // namespace detail

inline const std::vector<KeyBinding>& point_keys() {
  using namespace detail;
  static const std::vector<KeyBinding> keys = [] {
    std::vector<KeyBinding> k;
    k.push_back(integer("n", [](PointConfig& p) -> int& { return p.n; }));
    k.push_back(integer("blocks", [](PointConfig& p) -> int& { return p.blocks; }));
    k.push_back({"ase_seed", [](PointConfig& p, const std::string& key, const ConfigEntry& e) { p.ase_seed = value::to_seed(key, e); },
                 [](const PointConfig& p) { return std::to_string(p.ase_seed); }});

    k.push_back(integer("link.spans", [](PointConfig& p) -> int& { return p.link.spans; }));
    k.push_back(number("link.span_length_km", [](PointConfig& p) -> double& { return p.link.span_length_km; }));
    k.push_back(number("link.attenuation_db_per_km", [](PointConfig& p) -> double& { return p.link.attenuation_db_per_km; }));
    k.push_back(number("link.dispersion_ps_per_nm_km", [](PointConfig& p) -> double& { return p.link.dispersion_ps_per_nm_km; }));
    k.push_back(number("link.gamma_per_w_km", [](PointConfig& p) -> double& { return p.link.gamma_per_w_km; }));
    k.push_back(number("link.noise_figure_db", [](PointConfig& p) -> double& { return p.link.noise_figure_db; }));
    k.push_back(number("link.wavelength_nm", [](PointConfig& p) -> double& { return p.link.wavelength_nm; }));
    k.push_back(integer("link.steps_per_span", [](PointConfig& p) -> int& { return p.link.steps_per_span; }));
    k.push_back(boolean("link.ase", [](PointConfig& p) -> bool& { return p.link.ase; }));

    k.push_back(integer("wdm.channels", [](PointConfig& p) -> int& { return p.grid.channels; }));
    k.push_back(number("wdm.symbol_rate_gbd", [](PointConfig& p) -> double& { return p.grid.symbol_rate_gbd; }));
    k.push_back(number("wdm.spacing_ghz", [](PointConfig& p) -> double& { return p.grid.spacing_ghz; }));
    k.push_back(number("wdm.rolloff", [](PointConfig& p) -> double& { return p.grid.rolloff; }));
    k.push_back(number("wdm.power_dbm", [](PointConfig& p) -> double& { return p.grid.power_dbm; }));

    k.push_back(choice("source.type", {"uniform", "mb", "spsh", "ccdm", "hidm"}, [](PointConfig& p) -> std::string& { return p.source.type; }));
    k.push_back(integer("source.order", [](PointConfig& p) -> int& { return p.source.order; }));
    k.push_back(number("source.rate", [](PointConfig& p) -> double& { return p.source.rate; }));
    k.push_back(integer("source.dm_length", [](PointConfig& p) -> int& { return p.source.dm_length; }));
    k.push_back({"source.hidm_bits",
                 [](PointConfig& p, const std::string& key, const ConfigEntry& e) { p.source.hidm_bits = value::to_list<int>(key, e, value::to_int); },
                 [](const PointConfig& p) { return value::join(p.source.hidm_bits, [](int v) { return std::to_string(v); }); }});

    k.push_back({"frame.fec_rate",
                 [](PointConfig& p, const std::string& key, const ConfigEntry& e) {
                   try {
                     p.frame.fec_rate = framing::parse_rational(e.value);
                   } catch (const std::exception&) {
                     throw value::bad(key, e, "expected a rational such as 5/6");
                   }
                 },
                 [](const PointConfig& p) { return framing::to_string(p.frame.fec_rate); }});
    k.push_back(choice("frame.parity_mode", {"consecutive", "random"}, [](PointConfig& p) -> std::string& { return p.frame.parity_mode; }));
    k.push_back(boolean("frame.si_per_dm_block", [](PointConfig& p) -> bool& { return p.frame.si_per_dm_block; }));

    k.push_back(choice("selection.scheme", {"none", "ideal", "bs", "si", "sbbs", "mbbs", "list-ccdm"},
                       [](PointConfig& p) -> std::string& { return p.selection.scheme; }));
    k.push_back(integer("selection.candidates", [](PointConfig& p) -> int& { return p.selection.candidates; }));
    k.push_back(number("selection.eta", [](PointConfig& p) -> double& { return p.selection.eta; }));
    k.push_back(choice("selection.sign_regime", {"shaped", "unshaped-unknown", "unshaped-known"},
                       [](PointConfig& p) -> std::string& { return p.selection.sign_regime; }));
    k.push_back(integer("selection.calibration", [](PointConfig& p) -> int& { return p.selection.calibration; }));

    k.push_back(choice("metric.id", {"avg-nli", "avg-nli-sign-averaged", "avg-nli-cpr", "edi", "kurtosis"},
                       [](PointConfig& p) -> std::string& { return p.metric.id; }));
    k.push_back(integer("metric.n_avg", [](PointConfig& p) -> int& { return p.metric.n_avg; }));
    k.push_back(integer("metric.n_s", [](PointConfig& p) -> int& { return p.metric.n_s; }));
    k.push_back(integer("metric.window", [](PointConfig& p) -> int& { return p.metric.window; }));
    k.push_back(integer("metric.sps", [](PointConfig& p) -> int& { return p.metric.sps; }));
    k.push_back(integer("metric.steps_per_span", [](PointConfig& p) -> int& { return p.metric.steps_per_span; }));
    k.push_back(integer("metric.reference_spans", [](PointConfig& p) -> int& { return p.metric.reference_spans; }));
    k.push_back(number("metric.reference_symbol_rate_gbd", [](PointConfig& p) -> double& { return p.metric.reference_symbol_rate_gbd; }));

    k.push_back(boolean("receiver.cpr", [](PointConfig& p) -> bool& { return p.receiver.cpr; }));
    k.push_back(integer("receiver.bps_angles", [](PointConfig& p) -> int& { return p.receiver.bps_angles; }));
    k.push_back(integer("receiver.bps_window", [](PointConfig& p) -> int& { return p.receiver.bps_window; }));
    return k;
  }();
  return keys;
}

inline const KeyBinding* find_point_key(const std::string& key) {
  for (const auto& b : point_keys())
    if (b.key == key) return &b;
  return nullptr;
}

/// Sweep axes and how a sweep value enters the point config.
inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"none", "power", "eta", "nt", "n", "nspan", "baud", "dm_length"};
  return axes;
}

struct SweepSpec {
  std::string axis = "none";
  std::vector<double> values;
  /// nspan/baud: false keeps the selection metric at the base link/grid.
  bool reoptimize = true;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// A named series: key overrides on top of the base point. With a baseline,
/// rows carry the paired gain over that variant at the same point and seed.
struct Variant {
  std::string name;
  std::string baseline;
  std::map<std::string, std::string> overrides;

  friend bool operator==(const Variant&, const Variant&) = default;
};

struct ScenarioConfig {
  std::string id = "scenario";
  std::string description;
  std::string output = "results.csv";
  std::string mode = "transmission";  ///< transmission or rate-loss
  bool expensive = false;             ///< full-scale settings, hours per point
  std::vector<std::uint64_t> seeds{1};
  SweepSpec sweep;
  PointConfig base;
  std::vector<Variant> variants;  ///< sorted by name; empty means the base alone

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline bool integer_axis(const std::string& axis) { return axis == "nt" || axis == "n" || axis == "nspan" || axis == "baud" || axis == "dm_length"; }

/// Applies a sweep value to a point. Without reoptimization the nspan and baud
/// axes keep the selection metric at the point's unswept link or grid.
inline void apply_sweep(PointConfig& p, const std::string& axis, double v, bool reoptimize) {
  const int iv = static_cast<int>(std::lround(v));
  if (axis == "power") {
    p.grid.power_dbm = v;
  } else if (axis == "eta") {
    p.selection.eta = v;
  } else if (axis == "nt") {
    p.selection.candidates = iv;
    if (p.selection.scheme == "ideal") p.selection.eta = 1.0 / iv;  // matched N_p / N_a
  } else if (axis == "n") {
    p.n = iv;
  } else if (axis == "nspan") {
    if (!reoptimize && p.metric.reference_spans == 0) p.metric.reference_spans = p.link.spans;
    p.link.spans = iv;
  } else if (axis == "baud") {
    if (iv < 1) throw ConfigError("baud sweep values are channel counts d >= 1");
    if (!reoptimize && p.metric.reference_symbol_rate_gbd == 0) p.metric.reference_symbol_rate_gbd = p.grid.symbol_rate_gbd;
    const double rolloff = p.grid.rolloff;
    p.grid = channel::WdmGrid::scaled(iv);
    p.grid.rolloff = rolloff;
  } else if (axis == "dm_length") {
    p.source.dm_length = iv;
  } else if (axis != "none") {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
}

inline ScenarioConfig scenario_from_tree(const ConfigTree& tree) {
  ScenarioConfig cfg;
  const auto& entries = tree.entries();
  const auto version = entries.find("version");
  if (version == entries.end()) throw ConfigError("config has no 'version' key (expected version = " + std::to_string(kConfigVersion) + ")");
  if (value::to_int("version", version->second) != kConfigVersion)
    throw ConfigError(version->second.where() + ": config version " + version->second.value + " is not supported (expected " +
                      std::to_string(kConfigVersion) + ")");

  std::map<std::string, Variant> variants;
  for (const auto& [key, e] : entries) {
    if (key == "version") continue;
    if (key == "id") {
      cfg.id = e.value;
    } else if (key == "description") {
      cfg.description = e.value;
    } else if (key == "output") {
      cfg.output = e.value;
    } else if (key == "mode") {
      if (e.value != "transmission" && e.value != "rate-loss") throw value::bad(key, e, "expected transmission or rate-loss");
      cfg.mode = e.value;
    } else if (key == "expensive") {
      cfg.expensive = value::to_bool(key, e);
    } else if (key == "seeds") {
      cfg.seeds = value::to_list<std::uint64_t>(key, e, value::to_seed);
      if (cfg.seeds.empty()) throw value::bad(key, e, "expected at least one seed");
    } else if (key == "sweep.axis") {
      if (std::find(sweep_axes().begin(), sweep_axes().end(), e.value) == sweep_axes().end())
        throw value::bad(key, e, "expected one of " + value::join(sweep_axes(), [](const std::string& s) { return s; }));
      cfg.sweep.axis = e.value;
    } else if (key == "sweep.values") {
      cfg.sweep.values = value::to_list<double>(key, e, value::to_double);
    } else if (key == "sweep.reoptimize") {
      cfg.sweep.reoptimize = value::to_bool(key, e);
    } else if (key.rfind("variant.", 0) == 0) {
      const auto rest = key.substr(8);
      const auto dot = rest.find('.');
      if (dot == std::string::npos || dot == 0) throw ConfigError(e.where() + ": malformed variant key '" + key + "' (expected variant.<name>.<key>)");
      auto& v = variants[rest.substr(0, dot)];
      v.name = rest.substr(0, dot);
      const auto field = rest.substr(dot + 1);
      if (field == "baseline") {
        v.baseline = e.value;
      } else {
        const auto* binding = find_point_key(field);
        if (!binding) throw ConfigError(e.where() + ": unknown key '" + key + "'");
        PointConfig probe;
        binding->set(probe, key, e);
        v.overrides[field] = e.value;
      }
    } else if (const auto* binding = find_point_key(key)) {
      binding->set(cfg.base, key, e);
    } else {
      throw ConfigError(e.where() + ": unknown key '" + key + "'");
    }
  }
  for (auto& [name, v] : variants) {
    if (!v.baseline.empty() && !variants.count(v.baseline))
      throw ConfigError("variant '" + name + "': baseline '" + v.baseline + "' is not a variant of this scenario");
    if (v.baseline == name) throw ConfigError("variant '" + name + "' cannot be its own baseline");
    cfg.variants.push_back(v);
  }
  if (integer_axis(cfg.sweep.axis))
    for (double x : cfg.sweep.values)
      if (x != std::round(x)) throw ConfigError("sweep.values for axis '" + cfg.sweep.axis + "' must be integers");
  return cfg;
}

inline ConfigTree scenario_to_tree(const ScenarioConfig& cfg) {
  ConfigTree t;
  t.set("version", std::to_string(kConfigVersion));
  t.set("id", cfg.id);
  if (!cfg.description.empty()) t.set("description", cfg.description);
  t.set("output", cfg.output);
  t.set("mode", cfg.mode);
  t.set("expensive", cfg.expensive ? "true" : "false");
  t.set("seeds", value::join(cfg.seeds, [](std::uint64_t s) { return std::to_string(s); }));
  t.set("sweep.axis", cfg.sweep.axis);
  t.set("sweep.values", value::join(cfg.sweep.values, [](double v) { return value::format(v); }));
  t.set("sweep.reoptimize", cfg.sweep.reoptimize ? "true" : "false");
  for (const auto& b : point_keys()) t.set(b.key, b.get(cfg.base));
  for (const auto& v : cfg.variants) {
    if (!v.baseline.empty()) t.set("variant." + v.name + ".baseline", v.baseline);
    for (const auto& [k, val] : v.overrides) t.set("variant." + v.name + "." + k, val);
  }
  return t;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) { return scenario_from_tree(ConfigTree::load(path)); }

inline std::string emit_config(const ScenarioConfig& cfg) { return scenario_to_tree(cfg).emit(); }

/// Base point with a variant's overrides applied.
inline PointConfig variant_point(const ScenarioConfig& cfg, const Variant* v) {
  PointConfig p = cfg.base;
  if (v)
    for (const auto& [k, val] : v->overrides) find_point_key(k)->set(p, "variant." + v->name + "." + k, {val, "<variant>", 0});
  return p;
}

/// Sweep values to run; a single NaN stands for the unswept base point.
inline std::vector<double> sweep_points(const ScenarioConfig& cfg) {
  if (cfg.sweep.axis == "none") return {std::numeric_limits<double>::quiet_NaN()};
  if (cfg.sweep.values.empty()) throw ConfigError("sweep.axis = " + cfg.sweep.axis + " needs sweep.values");
  return cfg.sweep.values;
}

inline PointConfig resolve_point(const ScenarioConfig& cfg, const Variant* v, double sweep_value, std::uint64_t seed) {
  PointConfig p = variant_point(cfg, v);
  if (!std::isnan(sweep_value)) apply_sweep(p, cfg.sweep.axis, sweep_value, cfg.sweep.reoptimize);
  p.seed = seed;
  return p;
}

}  // namespace nlps::harness
