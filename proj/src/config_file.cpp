#include "pdsage/config_file.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pdsage/errors.hpp"

namespace pdsage::io {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment",
       {"preset", "scenario", "name", "seed", "trials", "l_paths", "d_tr", "pd_min_deg",
        "pd_max_deg", "dist_min", "dist_max", "noise_dbm", "noiseless", "on_grid", "power_dbm"}},
      {"sweep", {"f_start", "delta_f", "n_points"}},
      {"array", {"n_tx", "n_rx", "spacing_wavelengths"}},
      {"sage",
       {"n_paths_hat", "max_iters", "stop_epsilon", "coarse_grid", "refine_grid",
        "refine_half_width_bins", "pd_grid_size", "pd_min_deg", "pd_max_deg", "rx_dict", "tx_dict",
        "weak_threshold_db"}},
      {"system",
       {"tx_gain_dbi", "rx_gain_dbi", "noise_floor_dbm", "test_power_mw", "d_tr", "literal_eq19",
        "kf_aggregation_bins"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Inline comments start at a ';' or '#' preceded by whitespace.
std::string strip_comment(const std::string& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if ((s[i] == ';' || s[i] == '#') && (s[i - 1] == ' ' || s[i - 1] == '\t')) return s.substr(0, i);
  return s;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    auto v = tree_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(strip_comment(*v));
  }

  template <typename T>
  void read(const std::string& key, T& target) const {
    const auto text = raw(key);
    if (!text) return;
    target = convert<T>(key, *text);
  }

  template <typename T>
  T convert(const std::string& key, const std::string& text) const {
    std::istringstream ss(text);
    T value{};
    if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes") return true;
      if (text == "false" || text == "0" || text == "no") return false;
      fail(key, text);
    } else if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!text.empty() && text.front() == '-') fail(key, text);
      ss >> value;
    } else {
      ss >> value;
    }
    if (!ss || !(ss >> std::ws).eof()) fail(key, text);
    return value;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& text) const {
    throw ConfigError("invalid value '" + text + "' for " + name_ + "." + key);
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

ScenarioKind parse_scenario(const std::string& s) {
  if (s == "synth_sweep") return ScenarioKind::kSynthSweep;
  if (s == "single_run") return ScenarioKind::kSingleRun;
  if (s == "stats_only") return ScenarioKind::kStatsOnly;
  throw ConfigError("unknown scenario '" + s + "' (synth_sweep, single_run or stats_only)");
}

std::vector<double> parse_list(const Section& sec, const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(sec.convert<double>(key, trim(item)));
  return out;
}

void apply(const pt::ptree& tree, ExperimentConfig& cfg, SystemParams& sys) {
  auto section = [&](const std::string& name) {
    return Section(tree.get_child_optional(name) ? &tree.get_child(name) : nullptr, name);
  };
  const Section exp = section("experiment");
  const Section sweep = section("sweep");
  const Section array = section("array");
  const Section est = section("sage");
  const Section system = section("system");

  if (auto s = exp.raw("scenario")) cfg.scenario = parse_scenario(*s);
  exp.read("name", cfg.name);
  exp.read("seed", cfg.seed);
  exp.read("trials", cfg.trials);
  exp.read("l_paths", cfg.l_paths);
  exp.read("d_tr", cfg.d_tr);
  if (auto v = exp.raw("pd_min_deg")) cfg.pd_range.first = deg_to_rad(exp.convert<double>("pd_min_deg", *v));
  if (auto v = exp.raw("pd_max_deg")) cfg.pd_range.second = deg_to_rad(exp.convert<double>("pd_max_deg", *v));
  exp.read("dist_min", cfg.distance_range.first);
  exp.read("dist_max", cfg.distance_range.second);
  if (auto v = exp.raw("noise_dbm")) cfg.noise_power_mw = dbm_to_mw(exp.convert<double>("noise_dbm", *v));
  exp.read("noiseless", cfg.noiseless);
  exp.read("on_grid", cfg.on_grid);
  if (auto v = exp.raw("power_dbm")) cfg.power_sweep_dbm = parse_list(exp, "power_dbm", *v);

  sweep.read("f_start", cfg.sweep.f_start);
  sweep.read("delta_f", cfg.sweep.delta_f);
  sweep.read("n_points", cfg.sweep.n_points);

  array.read("n_tx", cfg.array.n_tx);
  array.read("n_rx", cfg.array.n_rx);
  double spacing = cfg.array.carrier_wavelength > 0.0
                       ? cfg.array.tx_spacing / cfg.array.carrier_wavelength
                       : 0.5;
  array.read("spacing_wavelengths", spacing);
  try {
    cfg.sweep.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(spacing > 0.0)) throw ConfigError("array.spacing_wavelengths must be positive");
  if (cfg.array.n_tx < 1 || cfg.array.n_rx < 1) throw ConfigError("arrays need at least one element");
  const double lambda = cfg.sweep.center_wavelength();
  cfg.array.carrier_wavelength = lambda;
  cfg.array.tx_spacing = cfg.array.rx_spacing = spacing * lambda;

  // Geometry-dependent estimator defaults follow the final sweep and array.
  std::size_t n_paths_hat = cfg.l_paths;
  est.read("n_paths_hat", n_paths_hat);
  auto s = sage::SageConfig::defaults(cfg.array, cfg.sweep, n_paths_hat);
  s.max_iters = cfg.sage.max_iters;
  s.stop_epsilon = cfg.sage.stop_epsilon;
  s.pd_grid = cfg.sage.pd_grid;
  s.weak_path_threshold_db = cfg.sage.weak_path_threshold_db;
  est.read("max_iters", s.max_iters);
  est.read("stop_epsilon", s.stop_epsilon);
  est.read("coarse_grid", s.coarse_delay_grid_size);
  double half_bins = s.refine_half_width / cfg.sweep.delay_bin();
  est.read("refine_half_width_bins", half_bins);
  s.refine_half_width = half_bins * cfg.sweep.delay_bin();
  est.read("refine_grid", s.refine_grid_size);
  est.read("pd_grid_size", s.pd_grid.size);
  if (auto v = est.raw("pd_min_deg")) s.pd_grid.min = deg_to_rad(est.convert<double>("pd_min_deg", *v));
  if (auto v = est.raw("pd_max_deg")) s.pd_grid.max = deg_to_rad(est.convert<double>("pd_max_deg", *v));
  est.read("rx_dict", s.rx_dict_size);
  est.read("tx_dict", s.tx_dict_size);
  est.read("weak_threshold_db", s.weak_path_threshold_db);
  cfg.sage = s;

  system.read("tx_gain_dbi", sys.tx_gain_dbi);
  system.read("rx_gain_dbi", sys.rx_gain_dbi);
  system.read("noise_floor_dbm", sys.noise_floor_dbm);
  system.read("test_power_mw", sys.test_power_mw);
  system.read("d_tr", sys.d_tr);
  system.read("literal_eq19", sys.literal_eq19);
  system.read("kf_aggregation_bins", sys.kf_aggregation_bins);
  if (sys.kf_aggregation_bins < 1) throw ConfigError("system.kf_aggregation_bins must be >= 1");

  cfg.validate();
}

}  // namespace

AppConfig default_config() {
  AppConfig app;
  ExperimentConfig cfg;
  cfg.scenario = ScenarioKind::kSynthSweep;
  cfg.sweep.f_start = system_defaults::kStartFrequency;
  cfg.sweep.delta_f = system_defaults::kSweepInterval;
  cfg.sweep.n_points = system_defaults::kSweepPoints;
  cfg.array = ArrayConfig::half_wavelength(128, 4, cfg.sweep.center_wavelength());
  cfg.sage = sage::SageConfig::defaults(cfg.array, cfg.sweep, 1);
  cfg.power_sweep_dbm = {linear_to_db(system_defaults::kTestPowerMw)};
  cfg.noise_power_mw = dbm_to_mw(system_defaults::kNoiseFloorDbm);
  app.experiments.push_back(cfg);
  return app;
}

AppConfig preset_config(const std::string& name) {
  AppConfig app;
  app.experiments = preset(name);
  app.preset = name;
  return app;
}

AppConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.message() + " at line " +
                      std::to_string(e.line()));
  }
  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown config section [" + section + "]");
    if (!body.data().empty() && body.empty())
      throw ConfigError("key '" + section + "' must live inside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
  }

  AppConfig app;
  const auto preset_name = tree.get_optional<std::string>("experiment.preset");
  app = preset_name ? preset_config(trim(strip_comment(*preset_name))) : default_config();
  for (auto& cfg : app.experiments) apply(tree, cfg, app.system);
  return app;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace pdsage::io
