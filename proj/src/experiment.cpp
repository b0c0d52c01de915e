#include "pdsage/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "pdsage/channel_synth.hpp"
#include "pdsage/errors.hpp"
#include "pdsage/rng.hpp"

namespace pdsage::io {

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (scenario == ScenarioKind::kSynthSweep && power_sweep_dbm.empty())
    throw ConfigError("a power sweep needs at least one power level");
  if (l_paths < 1) throw ConfigError("l_paths must be >= 1");
  if (!(d_tr > 0.0)) throw ConfigError("d_tr must be positive");
  if (!(pd_range.first <= pd_range.second)) throw ConfigError("pd range is inverted");
  if (!(distance_range.first > 0.0) || !(distance_range.first <= distance_range.second))
    throw ConfigError("distance range must be positive and ordered");
  if (!(noise_power_mw >= 0.0)) throw ConfigError("noise power must be >= 0");
  try {
    array.validate();
    sweep.validate();
    sage.validate(array);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> preset_names() { return {"fig3a-desk", "fig3a-paper"}; }

std::vector<ExperimentConfig> preset(const std::string& name) {
  std::size_t n_elems = 0;
  std::size_t k = 0;
  if (name == "fig3a-desk") {
    n_elems = 32;
    k = 501;
  } else if (name == "fig3a-paper") {
    n_elems = 64;
    k = 5001;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }

  std::vector<ExperimentConfig> out;
  for (std::size_t l : {std::size_t{2}, std::size_t{5}}) {
    for (double phi_deg : {1.0, 4.0}) {
      ExperimentConfig cfg;
      cfg.name = "L" + std::to_string(l) + "_phi" + std::to_string(static_cast<int>(phi_deg));
      cfg.sweep.n_points = k;
      cfg.array = ArrayConfig::half_wavelength(n_elems, n_elems, cfg.sweep.center_wavelength());
      cfg.sage = sage::SageConfig::defaults(cfg.array, cfg.sweep, l);
      cfg.sage.max_iters = 5;
      cfg.sage.stop_epsilon = 1.0e-6;
      cfg.power_sweep_dbm = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
      cfg.trials = 20;
      cfg.l_paths = l;
      cfg.d_tr = 50.0;
      cfg.pd_range = {deg_to_rad(phi_deg), deg_to_rad(phi_deg)};
      cfg.noise_power_mw = dbm_to_mw(-80.0);
      out.push_back(cfg);
    }
  }
  return out;
}

namespace {

// |<a, b>| / (|a| |b|) of two rank-one components, evaluated factor by factor.
double component_similarity(const PathComponent& a, double pd_a, const PathComponent& b,
                            double pd_b, const ArrayConfig& array, const SweepConfig& sweep) {
  const double nu_a = sweep.delta_f * a.delay - pd_a / (2.0 * kPi);
  const double nu_b = sweep.delta_f * b.delay - pd_b / (2.0 * kPi);
  const double dnu = nu_b - nu_a;
  double delay_part = 1.0;
  const double frac = dnu - std::nearbyint(dnu);
  if (std::abs(frac) > 1e-15) {
    const double kk = static_cast<double>(sweep.n_points);
    delay_part = std::abs(std::sin(kPi * kk * frac) / (kk * std::sin(kPi * frac)));
  }
  auto steer = [&](std::size_t n, double spacing, double angle) {
    return synth::steering_vector(n, spacing, array.carrier_wavelength, angle);
  };
  const double rx_part =
      std::abs(steer(array.n_rx, array.rx_spacing, a.aoa).dot(steer(array.n_rx, array.rx_spacing, b.aoa)));
  const double tx_part =
      std::abs(steer(array.n_tx, array.tx_spacing, a.aod).dot(steer(array.n_tx, array.tx_spacing, b.aod)));
  return delay_part * rx_part * tx_part;
}

}  // namespace

ParameterErrors match_errors(std::span<const PathComponent> truth, double true_pd,
                             const sage::EstimationResult& est) {
  struct Candidate {
    double score;
    std::size_t t;
    std::size_t e;
  };
  std::vector<Candidate> cands;
  for (std::size_t t = 0; t < truth.size(); ++t)
    for (std::size_t e = 0; e < est.paths.size(); ++e)
      cands.push_back({component_similarity(truth[t], true_pd, est.paths[e], est.path_pd[e],
                                            est.array, est.sweep),
                       t, e});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  std::vector<bool> used_t(truth.size(), false);
  std::vector<bool> used_e(est.paths.size(), false);
  double sd = 0.0;
  double sa = 0.0;
  double so = 0.0;
  std::size_t n = 0;
  for (const auto& c : cands) {
    if (used_t[c.t] || used_e[c.e]) continue;
    used_t[c.t] = used_e[c.e] = true;
    const auto& tp = truth[c.t];
    const auto& ep = est.paths[c.e];
    sd += (ep.delay - tp.delay) * (ep.delay - tp.delay);
    sa += (ep.aoa - tp.aoa) * (ep.aoa - tp.aoa);
    so += (ep.aod - tp.aod) * (ep.aod - tp.aod);
    ++n;
  }
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  return {std::sqrt(sd / nn), std::sqrt(sa / nn), std::sqrt(so / nn)};
}

namespace {

synth::Scenario draw_scene(const ExperimentConfig& cfg, std::size_t trial) {
  synth::ScenarioSpec spec;
  spec.l_paths = cfg.l_paths;
  spec.d_tr = cfg.d_tr;
  spec.distance_range = cfg.distance_range;
  spec.pd_range = cfg.pd_range;
  const std::uint64_t seed = derive_seed(cfg.seed, trial, 0);
  auto scene = synth::random_scenario(spec, cfg.array, seed);
  if (cfg.on_grid) {
    // Snap delays to distinct IFFT bins; colliding paths are moved to the next free bin.
    const double bin = cfg.sweep.delay_bin();
    std::set<long long> taken;
    for (auto& p : scene.paths) {
      auto b = static_cast<long long>(std::llround(p.delay / bin));
      while (taken.count(b)) ++b;
      taken.insert(b);
      p.delay = static_cast<double>(b) * bin;
    }
    scene.drift.slope = 0.0;
  }
  return scene;
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t p_index, std::size_t trial) {
  const auto scene = draw_scene(cfg, trial);
  const CfrTensor h = synth::synthesize_cfr(scene.paths, cfg.array, cfg.sweep);
  const CfrTensor h_pd = synth::apply_phase_drift(h, scene.drift);
  const double p_dbm = cfg.power_sweep_dbm[p_index];
  const double noise = cfg.noiseless ? 0.0 : cfg.noise_power_mw;
  const CfrTensor y =
      synth::add_awgn(h_pd, noise, derive_seed(cfg.seed, trial, p_index + 1), dbm_to_mw(p_dbm));

  const auto aware = sage::run_pd_sage(y, cfg.sage, true);
  const auto unaware = sage::run_pd_sage(y, cfg.sage, false);

  TrialRecord rec;
  rec.scenario = cfg.name;
  rec.p_dbm = p_dbm;
  rec.trial = trial;
  rec.nmse_aware = aware.nmse_trace.back();
  rec.nmse_unaware = unaware.nmse_trace.back();
  rec.phi_true = rad_to_deg(scene.drift.slope);
  rec.phi_hat = rad_to_deg(aware.pd_hat.slope);
  const auto ea = match_errors(scene.paths, scene.drift.slope, aware);
  const auto eu = match_errors(scene.paths, scene.drift.slope, unaware);
  rec.rmse_delay_aware = ea.delay;
  rec.rmse_aoa_aware = rad_to_deg(ea.aoa);
  rec.rmse_aod_aware = rad_to_deg(ea.aod);
  rec.rmse_delay_unaware = eu.delay;
  rec.rmse_aoa_unaware = rad_to_deg(eu.aoa);
  rec.rmse_aod_unaware = rad_to_deg(eu.aod);
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const RunControl& ctl) {
  cfg.validate();
  if (cfg.scenario == ScenarioKind::kStatsOnly)
    throw ConfigError("stats-only configurations have no synthetic trials to run");

  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  const std::size_t n_power =
      cfg.scenario == ScenarioKind::kSingleRun ? 1 : cfg.power_sweep_dbm.size();
  const std::size_t n_trials = cfg.scenario == ScenarioKind::kSingleRun ? 1 : cfg.trials;
  if (n_power == 0) throw ConfigError("a run needs at least one power level");
  for (std::size_t p = 0; p < n_power; ++p)
    for (std::size_t t = 0; t < n_trials; ++t) jobs.emplace_back(p, t);

  std::size_t threads = ctl.threads ? ctl.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, jobs.size());

  std::vector<TrialRecord> records;
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      std::size_t job = 0;
      {
        std::lock_guard lock(mutex);
        if (failure || next >= jobs.size()) return;
        if (ctl.cancel && ctl.cancel->load()) return;
        job = next++;
      }
      try {
        TrialRecord rec = run_trial(cfg, jobs[job].first, jobs[job].second);
        std::lock_guard lock(mutex);
        if (ctl.on_record) ctl.on_record(rec);
        records.push_back(std::move(rec));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.p_dbm != b.p_dbm) return a.p_dbm < b.p_dbm;
    return a.trial < b.trial;
  });
  return records;
}

std::vector<PowerSummary> summarize(std::span<const TrialRecord> records) {
  std::vector<std::string> order;
  std::map<std::pair<std::string, double>, PowerSummary> acc;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.scenario) == order.end()) order.push_back(r.scenario);
    auto& s = acc[{r.scenario, r.p_dbm}];
    s.scenario = r.scenario;
    s.p_dbm = r.p_dbm;
    s.trials += 1;
    s.mean_nmse_aware += r.nmse_aware;
    s.mean_nmse_unaware += r.nmse_unaware;
  }
  std::vector<PowerSummary> out;
  for (const auto& name : order)
    for (auto& [key, s] : acc)
      if (key.first == name) {
        s.mean_nmse_aware /= static_cast<double>(s.trials);
        s.mean_nmse_unaware /= static_cast<double>(s.trials);
        out.push_back(s);
      }
  return out;
}

}  // namespace pdsage::io
