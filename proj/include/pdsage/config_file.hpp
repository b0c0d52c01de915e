#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdsage/experiment.hpp"

namespace pdsage::io {

/// Sounder parameters of the 330-360 GHz measurement system.
namespace system_defaults {
inline constexpr double kStartFrequency = 330.0e9;  // Hz
inline constexpr double kEndFrequency = 360.0e9;    // Hz
inline constexpr double kSweepInterval = 6.0e6;     // Hz
inline constexpr std::size_t kSweepPoints = 5001;
inline constexpr double kTxGainDbi = 25.0;
inline constexpr double kRxGainDbi = 25.0;
inline constexpr double kNoiseFloorDbm = -145.0;
inline constexpr double kTestPowerMw = 0.5;
inline constexpr double kIfBandwidth = 1.0e3;       // Hz
inline constexpr double kHpbwDeg = 10.0;            // both antennas
}  // namespace system_defaults

struct SystemParams {
  double tx_gain_dbi = system_defaults::kTxGainDbi;
  double rx_gain_dbi = system_defaults::kRxGainDbi;
  double noise_floor_dbm = system_defaults::kNoiseFloorDbm;
  double test_power_mw = system_defaults::kTestPowerMw;
  double d_tr = 0.0;            // meters, 0 when unknown
  bool literal_eq19 = true;     // path-loss convention, see channel_stats
  std::size_t kf_aggregation_bins = 3;
};

struct AppConfig {
  // One entry per curve of a named preset, else a single configuration.
  std::vector<ExperimentConfig> experiments;
  SystemParams system;
  std::optional<std::string> preset;
};

/// INI-style key/value configuration:
///
///   [experiment]  preset scenario name seed trials l_paths d_tr pd_min_deg
///                 pd_max_deg dist_min dist_max noise_dbm noiseless on_grid
///                 power_dbm (comma separated)
///   [sweep]       f_start delta_f n_points
///   [array]       n_tx n_rx spacing_wavelengths
///   [sage]        n_paths_hat max_iters stop_epsilon coarse_grid refine_grid
///                 refine_half_width_bins pd_grid_size pd_min_deg pd_max_deg
///                 rx_dict tx_dict weak_threshold_db
///   [system]      tx_gain_dbi rx_gain_dbi noise_floor_dbm test_power_mw d_tr
///                 literal_eq19 kf_aggregation_bins
///
/// Missing keys keep their defaults (the preset's when one is named, else the
/// system table with a single synthetic link). Keys given in the file apply
/// to every curve of a preset. Unknown sections or keys are errors.
AppConfig parse_config(std::istream& in);
AppConfig load_config(const std::filesystem::path& path);

/// Default configuration: full sweep of the sounder, 4 x 128 virtual array.
AppConfig default_config();

/// Layers a preset under the defaults, as if the file named it.
AppConfig preset_config(const std::string& name);

}  // namespace pdsage::io
