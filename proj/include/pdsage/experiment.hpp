#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pdsage/pd_sage.hpp"
#include "pdsage/types.hpp"

namespace pdsage::io {

enum class ScenarioKind { kSynthSweep, kSingleRun, kStatsOnly };

struct ExperimentConfig {
  std::string name = "custom";
  ScenarioKind scenario = ScenarioKind::kSynthSweep;
  ArrayConfig array;
  SweepConfig sweep;
  sage::SageConfig sage;
  std::vector<double> power_sweep_dbm;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::size_t l_paths = 1;
  double d_tr = 50.0;                      // meters
  std::pair<double, double> pd_range{0.0, 0.0};  // radians per frequency index
  std::pair<double, double> distance_range{5.0, 15.0};
  double noise_power_mw = 1.0e-11;         // -80 dBm
  bool noiseless = false;
  // Integer-bin delays, dictionary angles, no drift; used for exactness checks.
  bool on_grid = false;

  void validate() const;
};

/// NMSE-vs-power sweeps, one config per (L, phi) curve.
/// "fig3a-desk": 32 x 32, K = 501. "fig3a-paper": 64 x 64, K = 5001.
std::vector<ExperimentConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

/// One (p, trial) outcome. Angles in degrees, delays in seconds.
struct TrialRecord {
  std::string scenario;
  double p_dbm = 0.0;
  std::size_t trial = 0;
  double nmse_aware = 0.0;
  double nmse_unaware = 0.0;
  double phi_true = 0.0;  // degrees per frequency index
  double phi_hat = 0.0;   // degrees per frequency index (aware estimator)
  double rmse_delay_aware = 0.0;
  double rmse_aoa_aware = 0.0;
  double rmse_aod_aware = 0.0;
  double rmse_delay_unaware = 0.0;
  double rmse_aoa_unaware = 0.0;
  double rmse_aod_unaware = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

struct ParameterErrors {
  double delay = 0.0;  // seconds
  double aoa = 0.0;    // radians
  double aod = 0.0;    // radians
};

/// RMS parameter errors after greedy one-to-one matching of estimated to true
/// paths by normalized component correlation (drift included on both sides).
ParameterErrors match_errors(std::span<const PathComponent> truth, double true_pd,
                             const sage::EstimationResult& est);

struct RunControl {
  std::size_t threads = 0;                    // 0: hardware concurrency
  const std::atomic<bool>* cancel = nullptr;  // stop dispatching new trials when set
  std::function<void(const TrialRecord&)> on_record;  // called serially as trials finish
};

/// Records sorted by (p, trial). Deterministic in cfg.seed regardless of the
/// thread count. Cancelled runs return the trials finished so far.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const RunControl& ctl = {});

struct PowerSummary {
  std::string scenario;
  double p_dbm = 0.0;
  std::size_t trials = 0;
  double mean_nmse_aware = 0.0;
  double mean_nmse_unaware = 0.0;
};

/// Mean NMSE per (scenario, p), in first-seen scenario order and ascending p.
std::vector<PowerSummary> summarize(std::span<const TrialRecord> records);

}  // namespace pdsage::io
