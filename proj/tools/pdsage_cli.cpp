// Command-line front end: synth, estimate, stats, experiment, inspect.

#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pdsage/cfr_file.hpp"
#include "pdsage/channel_stats.hpp"
#include "pdsage/channel_synth.hpp"
#include "pdsage/config_file.hpp"
#include "pdsage/distribution_fit.hpp"
#include "pdsage/errors.hpp"
#include "pdsage/experiment.hpp"
#include "pdsage/pd_sage.hpp"
#include "pdsage/report.hpp"
#include "pdsage/rng.hpp"

namespace {

using namespace pdsage;

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kFormat = 3, kDegenerate = 4 };

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string format = "csv";
  std::string out;
  std::string pd_aware = "true";
};

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("--pd-aware expects true or false, got '" + s + "'");
}

io::AppConfig resolve_config(const Common& c) {
  io::AppConfig app;
  if (!c.config.empty()) {
    app = io::load_config(c.config);
    if (!c.preset.empty() && app.preset != c.preset)
      throw ConfigError("--preset conflicts with the preset named in the config file");
  } else if (!c.preset.empty()) {
    app = io::preset_config(c.preset);
  } else {
    app = io::default_config();
  }
  if (c.seed)
    for (auto& e : app.experiments) e.seed = *c.seed;
  return app;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Output goes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_paths(std::ostream& os, const sage::EstimationResult& r, io::ReportFormat fmt) {
  if (fmt == io::ReportFormat::kCsv) {
    os << "path,gain_re,gain_im,power_db,delay_s,aoa_deg,aod_deg,pd_deg,weak\n";
    for (std::size_t l = 0; l < r.paths.size(); ++l) {
      const auto& p = r.paths[l];
      os << l << ',' << num(p.gain.real()) << ',' << num(p.gain.imag()) << ','
         << num(linear_to_db(std::norm(p.gain))) << ',' << num(p.delay) << ','
         << num(rad_to_deg(p.aoa)) << ',' << num(rad_to_deg(p.aod)) << ','
         << num(rad_to_deg(r.path_pd[l])) << ',' << (r.weak[l] ? 1 : 0) << '\n';
    }
    return;
  }
  os << "{\n  \"pd_hat_deg\": " << num(rad_to_deg(r.pd_hat.slope)) << ",\n  \"nmse_trace\": [";
  for (std::size_t i = 0; i < r.nmse_trace.size(); ++i) os << (i ? ", " : "") << num(r.nmse_trace[i]);
  os << "],\n  \"paths\": [";
  for (std::size_t l = 0; l < r.paths.size(); ++l) {
    const auto& p = r.paths[l];
    os << (l ? ",\n" : "\n") << "    {\"gain_re\": " << num(p.gain.real())
       << ", \"gain_im\": " << num(p.gain.imag()) << ", \"delay_s\": " << num(p.delay)
       << ", \"aoa_deg\": " << num(rad_to_deg(p.aoa)) << ", \"aod_deg\": " << num(rad_to_deg(p.aod))
       << ", \"pd_deg\": " << num(rad_to_deg(r.path_pd[l]))
       << ", \"weak\": " << (r.weak[l] ? "true" : "false") << '}';
  }
  os << (r.paths.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

sage::SageConfig estimator_for(const CfrTensor& cfr, const io::AppConfig& app, std::size_t paths) {
  auto cfg = sage::SageConfig::defaults(cfr.array(), cfr.sweep(), paths);
  const auto& base = app.experiments.front().sage;
  cfg.max_iters = base.max_iters;
  cfg.stop_epsilon = base.stop_epsilon;
  cfg.pd_grid = base.pd_grid;
  cfg.weak_path_threshold_db = base.weak_path_threshold_db;
  return cfg;
}

int cmd_synth(const Common& c) {
  const auto app = resolve_config(c);
  const auto& cfg = app.experiments.front();
  if (c.out.empty()) throw ConfigError("synth needs --out <file.cfr>");
  synth::ScenarioSpec spec;
  spec.l_paths = cfg.l_paths;
  spec.d_tr = cfg.d_tr;
  spec.distance_range = cfg.distance_range;
  spec.pd_range = cfg.pd_range;
  const auto scene = synth::random_scenario(spec, cfg.array, derive_seed(cfg.seed, 0, 0));
  auto h = synth::apply_phase_drift(synth::synthesize_cfr(scene.paths, cfg.array, cfg.sweep),
                                    scene.drift);
  const double p_dbm = cfg.power_sweep_dbm.empty() ? 0.0 : cfg.power_sweep_dbm.front();
  h = synth::add_awgn(h, cfg.noiseless ? 0.0 : cfg.noise_power_mw, derive_seed(cfg.seed, 0, 1),
                      dbm_to_mw(p_dbm));
  io::store_cfr(c.out, h);
  std::cout << "phi_deg," << num(rad_to_deg(scene.drift.slope)) << "\n";
  std::cout << "path,gain_re,gain_im,delay_s,aoa_deg,aod_deg\n";
  for (std::size_t l = 0; l < scene.paths.size(); ++l) {
    const auto& p = scene.paths[l];
    std::cout << l << ',' << num(p.gain.real()) << ',' << num(p.gain.imag()) << ',' << num(p.delay)
              << ',' << num(rad_to_deg(p.aoa)) << ',' << num(rad_to_deg(p.aod)) << '\n';
  }
  return kOk;
}

int cmd_estimate(const Common& c, const std::string& input, std::size_t paths) {
  const auto app = resolve_config(c);
  const auto fmt = io::parse_format(c.format);
  const bool aware = parse_bool(c.pd_aware);
  const auto cfr = io::load_cfr(input);
  const auto result = sage::run_pd_sage(cfr, estimator_for(cfr, app, paths), aware);
  Sink sink(c.out);
  write_paths(sink.os(), result, fmt);
  return kOk;
}

int cmd_stats(const Common& c, const std::string& input, std::size_t paths, double d_tr) {
  const auto app = resolve_config(c);
  const auto fmt = io::parse_format(c.format);
  const bool aware = parse_bool(c.pd_aware);
  const auto cfr = io::load_cfr(input);
  const auto est = estimator_for(cfr, app, paths);

  const auto pooled_fit = sage::run_pd_sage(cfr, est, aware);
  const auto slices = sage::run_per_rx_slices(cfr, est, aware);
  const auto cir = sage::cir_from_cfr(cfr);
  const auto kf = stats::kf_samples(cir.cir, app.system.kf_aggregation_bins);

  auto strong = [](const std::vector<PathComponent>& p, const std::vector<bool>& weak) {
    std::vector<PathComponent> out;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!weak[i]) out.push_back(p[i]);
    return out;
  };
  const auto joint = strong(pooled_fit.paths, pooled_fit.weak);
  const auto pooled = strong(slices.pooled, slices.pooled_weak);
  double ds_slice = 0.0;
  double as_slice = 0.0;
  for (const auto& s : slices.slices) {
    const auto sp = strong(s.paths, s.weak);
    ds_slice += stats::rms_delay_spread(sp);
    as_slice += stats::rms_angular_spread(sp, stats::AngleSide::kAod);
  }
  ds_slice /= static_cast<double>(slices.slices.size());
  as_slice /= static_cast<double>(slices.slices.size());

  const double link_d = d_tr > 0.0 ? d_tr : app.system.d_tr;
  std::optional<double> pl;
  if (link_d > 0.0)
    pl = stats::path_loss(cir.apdp, app.system.tx_gain_dbi, app.system.rx_gain_dbi,
                          cfr.sweep().center_frequency(), link_d, app.system.literal_eq19);

  std::vector<double> kf_finite;
  for (double k : kf)
    if (std::isfinite(k) && k > 0.0) kf_finite.push_back(k);

  Sink sink(c.out);
  auto& os = sink.os();
  std::vector<std::pair<std::string, double>> rows{
      {"ds_joint_s", stats::rms_delay_spread(joint)},
      {"as_aod_joint_deg", rad_to_deg(stats::rms_angular_spread(joint, stats::AngleSide::kAod))},
      {"ds_pooled_s", stats::rms_delay_spread(pooled)},
      {"as_aod_pooled_deg", rad_to_deg(stats::rms_angular_spread(pooled, stats::AngleSide::kAod))},
      {"ds_slice_mean_s", ds_slice},
      {"as_aod_slice_mean_deg", rad_to_deg(as_slice)},
      {"pd_hat_deg", rad_to_deg(pooled_fit.pd_hat.slope)},
      {"kf_samples", static_cast<double>(kf.size())},
      {"kf_finite_samples", static_cast<double>(kf_finite.size())},
  };
  if (pl) rows.emplace_back("pl_db", *pl);
  if (kf_finite.size() >= 8) {
    std::vector<double> log_kf;
    const auto ranking = stats::rank_distributions(kf_finite);
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      const std::string fam(stats::family_name(ranking[i].family));
      rows.emplace_back("kf_fit" + std::to_string(i) + "_" + fam + "_ks", ranking[i].ks_distance);
      rows.emplace_back("kf_fit" + std::to_string(i) + "_" + fam + "_p0", ranking[i].params[0]);
      rows.emplace_back("kf_fit" + std::to_string(i) + "_" + fam + "_p1", ranking[i].params[1]);
    }
  }
  if (fmt == io::ReportFormat::kCsv) {
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << k << ',' << num(v) << '\n';
  } else {
    os << "{";
    for (std::size_t i = 0; i < rows.size(); ++i)
      os << (i ? ",\n  " : "\n  ") << '"' << rows[i].first << "\": "
         << (std::isfinite(rows[i].second) ? num(rows[i].second) : "null");
    os << "\n}\n";
  }
  return kOk;
}

int cmd_experiment(const Common& c, std::size_t threads, const std::string& summary_path) {
  auto app = resolve_config(c);
  const auto fmt = io::parse_format(c.format);
  std::signal(SIGINT, on_sigint);

  std::vector<io::TrialRecord> all;
  io::RunControl ctl;
  ctl.threads = threads;
  ctl.cancel = &g_cancel;
  for (const auto& cfg : app.experiments) {
    if (g_cancel.load()) break;
    const bool single = cfg.scenario == io::ScenarioKind::kSingleRun;
    std::cerr << "running " << cfg.name << " (" << (single ? 1 : cfg.power_sweep_dbm.size())
              << " powers x " << (single ? 1 : cfg.trials) << " trials)\n";
    auto recs = io::run_experiment(cfg, ctl);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  if (all.empty()) throw std::runtime_error("interrupted before any trial finished");
  if (g_cancel.load()) std::cerr << "interrupted: writing " << all.size() << " finished trials\n";
  io::emit_report(all, fmt, c.out);

  const auto summary = io::summarize(all);
  if (!summary_path.empty()) {
    std::ofstream s(summary_path, std::ios::trunc);
    if (!s) throw std::runtime_error("cannot open " + summary_path + " for writing");
    io::write_summary_csv(s, summary);
  } else {
    io::write_summary_csv(std::cerr, summary);
  }
  return g_cancel.load() ? 130 : kOk;
}

int cmd_inspect(const std::string& input) {
  const auto h = io::read_cfr_header(std::filesystem::path(input));
  const auto cfr = io::load_cfr(input);
  const auto cir = sage::cir_from_cfr(cfr);
  std::size_t peak = 0;
  for (std::size_t b = 1; b < cir.apdp.size(); ++b)
    if (cir.apdp[b] > cir.apdp[peak]) peak = b;
  std::cout << "version " << h.version << "\n"
            << "sweep_points " << h.n_freq << "\n"
            << "n_rx " << h.n_rx << "\n"
            << "n_tx " << h.n_tx << "\n"
            << "f_start_hz " << num(h.f_start) << "\n"
            << "delta_f_hz " << num(h.delta_f) << "\n"
            << "payload_bytes " << h.payload_bytes() << "\n"
            << "total_power " << num(cfr.frobenius_norm_squared()) << "\n"
            << "apdp_peak_delay_s " << num(static_cast<double>(peak) * cfr.sweep().delay_bin())
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PD-aware SAGE channel estimation and statistics"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "INI configuration file");
    sub->add_option("--seed", common.seed, "base RNG seed");
    sub->add_option("--preset", common.preset, "fig3a-desk or fig3a-paper");
    sub->add_option("--format", common.format, "csv or json");
    sub->add_option("--out", common.out, "output path (stdout if omitted)");
    sub->add_option("--pd-aware", common.pd_aware, "true or false");
  };

  std::string input;
  std::size_t paths = 1;
  std::size_t threads = 0;
  double d_tr = 0.0;
  std::string summary_path;

  auto* synth_cmd = app.add_subcommand("synth", "draw a random scene and store its CFR");
  add_common(synth_cmd);
  auto* est_cmd = app.add_subcommand("estimate", "run SAGE on a CFR file");
  add_common(est_cmd);
  est_cmd->add_option("input", input, "CFR file")->required();
  est_cmd->add_option("--paths", paths, "number of paths to estimate");
  auto* stats_cmd = app.add_subcommand("stats", "link statistics of a CFR file");
  add_common(stats_cmd);
  stats_cmd->add_option("input", input, "CFR file")->required();
  stats_cmd->add_option("--paths", paths, "number of paths to estimate");
  stats_cmd->add_option("--distance", d_tr, "Tx-Rx distance in meters for path loss");
  auto* exp_cmd = app.add_subcommand("experiment", "NMSE-vs-power sweep");
  add_common(exp_cmd);
  exp_cmd->add_option("--threads", threads, "worker threads (0: all cores)");
  exp_cmd->add_option("--summary", summary_path, "mean NMSE per power as CSV");
  auto* inspect_cmd = app.add_subcommand("inspect", "print a CFR file header and summary");
  inspect_cmd->add_option("input", input, "CFR file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*synth_cmd) return cmd_synth(common);
    if (*est_cmd) return cmd_estimate(common, input, paths);
    if (*stats_cmd) return cmd_stats(common, input, paths, d_tr);
    if (*exp_cmd) return cmd_experiment(common, threads, summary_path);
    if (*inspect_cmd) return cmd_inspect(input);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}
