#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pdsage/types.hpp"

namespace pdsage::stats {

struct LinearPhaseFit {
  double slope = 0.0;      // radians per sweep index
  double intercept = 0.0;  // radians
  double r_squared = 1.0;
};

/// OLS fit of phase against the 0-based sweep index. Constant input fits
/// exactly and reports R^2 = 1.
LinearPhaseFit fit_linear_phase(std::span<const double> phases, bool unwrap = true);

/// Removes 2 pi jumps between consecutive samples.
std::vector<double> unwrap_phase(std::span<const double> phases);

/// 20 log10(4 pi d f / c).
double fspl(double f, double d);

/// Path loss from the total measured gain h = sum(apdp).
/// literal: -10 log10(G_t G_r (lambda / (4 pi d))^2 h); otherwise -10 log10(h).
double path_loss(std::span<const double> apdp, double tx_gain_db, double rx_gain_db, double f_c,
                 double d_tr, bool literal_eq19 = true);

enum class PathLossKind { kCloseIn, kFloatingIntercept };

struct PathLossModel {
  PathLossKind kind = PathLossKind::kCloseIn;
  double exponent_or_slope = 0.0;  // n (CI) or alpha (FI)
  double intercept = 0.0;          // FSPL(f_c, 1 m) for CI, beta for FI
  double sf_sigma = 0.0;           // RMS of the residuals (zero-mean Gaussian MLE)

  double predict(double d_tr) const;
};

struct PathLossSample {
  double d_tr = 0.0;  // meters
  double pl = 0.0;    // dB
};

struct PathLossFit {
  PathLossModel model;
  std::vector<double> residuals;  // shadow fading per sample, dB
};

PathLossFit fit_path_loss(std::span<const PathLossSample> samples, PathLossKind kind, double f_c);

/// sqrt(E_w[tau^2] - E_w[tau]^2) with weights |alpha|^2.
double rms_delay_spread(std::span<const PathComponent> paths);

enum class AngleSide { kAoa, kAod };

/// Same moment on raw (non-circular) angles, radians.
double rms_angular_spread(std::span<const PathComponent> paths, AngleSide side);

/// Greedy cluster aggregation: the strongest unassigned bin absorbs the
/// unassigned bins within +-(aggregation_bins / 2) of it, repeated until every
/// nonzero bin belongs to a cluster.
std::vector<double> aggregate_clusters(std::span<const double> apdp, std::size_t aggregation_bins);

/// max / (total - max) over aggregated clusters; +inf for a single cluster.
double rician_k(std::span<const double> apdp, std::size_t aggregation_bins = 3);

/// One K-factor per Rx-Tx pair PDP. cir is K x (N_R N_T) as from cir_from_cfr.
std::vector<double> kf_samples(const RowMatrixXcd& cir, std::size_t aggregation_bins = 3);

/// |(a - mean a)^H (b - mean b)| / (||a - mean a|| ||b - mean b||).
double cir_correlation(std::span<const cd> a, std::span<const cd> b);

/// rho between Tx element `reference` and every Tx element of Rx element r.
std::vector<double> correlation_profile(const RowMatrixXcd& cir, std::size_t n_tx, std::size_t r,
                                        std::size_t reference = 0);

struct PowerProfile {
  std::vector<double> profile_db;  // length N_R N_T, r outer, t inner
  double mean_db = 0.0;
  double std_db = 0.0;             // population standard deviation
};

/// Per-element power (1/K) sum_k |h_l^{(r,t)}[k]|^2 for each path component.
std::vector<PowerProfile> power_element_profile(std::span<const CfrTensor> components);

/// Maximal runs with profile >= noise_floor_db + threshold_db, as 1-based
/// inclusive (birth, death) index pairs.
std::vector<std::pair<std::size_t, std::size_t>> detect_birth_death(std::span<const double> profile,
                                                                    double threshold_db,
                                                                    double noise_floor_db);

enum class LosClass { kLos, kOlos };

struct LinkStats {
  double pl_db = 0.0;
  double sf_ci_db = 0.0;
  double sf_fi_db = 0.0;
  double ds = 0.0;  // seconds
  double as_ = 0.0; // radians
  std::vector<double> kf_samples;
  LosClass los_class = LosClass::kLos;
};

}  // namespace pdsage::stats
