#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pdsage/types.hpp"

namespace pdsage::sage {

/// Uniform phase-drift search grid, radians per frequency index.
struct PdGrid {
  double min = 0.0;
  double max = deg_to_rad(5.0);
  std::size_t size = 128;

  std::vector<double> values() const;
  double step() const;
  /// Single-point grid at zero, used by the drift-unaware pipeline.
  static PdGrid zero() { return {0.0, 0.0, 1}; }
};

struct SageConfig {
  std::size_t n_paths_hat = 1;
  std::size_t max_iters = 5;
  double stop_epsilon = 1.0e-6;
  std::size_t coarse_delay_grid_size = 33;
  std::size_t refine_grid_size = 64;
  double refine_half_width = 0.0;  // seconds
  PdGrid pd_grid;
  std::size_t rx_dict_size = 1;
  std::size_t tx_dict_size = 1;
  std::size_t delay_window_half_width = 16;  // IFFT bins
  double weak_path_threshold_db = 40.0;

  /// Defaults for a given geometry: D_R = N_R, D_T = N_T, one coarse grid
  /// point per bin over +-16 bins, refinement over +-2 coarse steps.
  static SageConfig defaults(const ArrayConfig& array, const SweepConfig& sweep,
                             std::size_t n_paths);

  void validate(const ArrayConfig& array) const;
  double coarse_step(const SweepConfig& sweep) const;
  double refine_step() const;
};

/// Delay observation matrix of one path: K x (N_R N_T), row n = vec of the
/// hidden-data snapshot at frequency index n + 1.
///
/// Construction precomputes the column-summed autocorrelation of the
/// observation, which makes the matched-filter energy of any delay atom an
/// O(K) evaluation:
///   P(nu) = sum_c |sum_k Y[k, c] e^{j 2 pi k nu}|^2.
class DelayObservation {
 public:
  explicit DelayObservation(const CfrTensor& hidden);

  const RowMatrixXcd& matrix() const { return matrix_; }
  const SweepConfig& sweep() const { return sweep_; }
  const ArrayConfig& array() const { return array_; }

  /// ||t(nu)^H Y||_F^2 / K, i.e. the energy captured by the unit-norm atom
  /// t(nu) / sqrt(K), for normalized delay nu = delta_f * tau_eff.
  double atom_energy(double nu) const;

  /// Per-path APDP from the same spectrum (matches per_path_apdp).
  std::vector<double> apdp() const;

 private:
  SweepConfig sweep_;
  ArrayConfig array_;
  RowMatrixXcd matrix_;
  std::vector<cd> lags_;  // r[m], m = 0..K-1; r[-m] = conj(r[m])
};

/// Hidden data of path l: observed - sum_{l' != l} components[l'].
CfrTensor e_step(const CfrTensor& observed, std::span<const CfrTensor> components, std::size_t l);

struct OmpResult {
  std::size_t index = 0;
  Eigen::RowVectorXcd coefficient;  // least-squares coefficient a^H Y / ||a||^2
  double energy = 0.0;              // ||a^H Y||^2 / ||a||^2
};

/// One-sparse matching pursuit: the atom with the largest matched-filter
/// energy wins, lowest index on ties.
OmpResult omp_rank1(const Eigen::MatrixXcd& observation, const Eigen::MatrixXcd& dictionary);

/// APDP_l[b] = 1/(N_R N_T) sum_{r,t} |IFFT(h^{(r,t)})[b]|^2 with a 1/K IFFT.
std::vector<double> per_path_apdp(const CfrTensor& component);

/// Coarse delay: APDP peak window, D_tau grid points over +-window bins.
double coarse_delay(const DelayObservation& obs, std::span<const double> apdp,
                    const SageConfig& cfg);

struct DelayPdEstimate {
  double delay = 0.0;  // seconds
  double pd = 0.0;     // radians per frequency index
};

/// Joint delay/drift refinement over the refined delay grid around `coarse`
/// and cfg.pd_grid. Joint atoms are e^{-j 2 pi k df tau_i} e^{j k phi_j} with
/// column index i * D_phi + j.
DelayPdEstimate refine_delay_pd(const DelayObservation& obs, double coarse, const SageConfig& cfg);

/// Y_R = mat(t^H Y / K), N_R x N_T. The AoD observation is its adjoint.
Eigen::MatrixXcd angle_observation(const DelayObservation& obs,
                                   const Eigen::VectorXcd& delay_atom);

/// Angle from the sin-domain steering dictionary of size dict_size.
double estimate_angle(const Eigen::MatrixXcd& y, std::size_t dict_size, std::size_t n_elems,
                      double spacing, double wavelength);

/// a_R(psi)^H Y_R a_T(omega).
cd estimate_gain(const Eigen::MatrixXcd& y_r, double psi, double omega, const ArrayConfig& array);

/// sum_k ||est[k] - obs[k]||_F^2 / sum_k ||obs[k]||_F^2.
double nmse(const CfrTensor& estimated, const CfrTensor& observed);

/// CFR of one estimated component including its own drift slope.
CfrTensor component_cfr(const PathComponent& path, double pd, const ArrayConfig& array,
                        const SweepConfig& sweep);

struct EstimationResult {
  std::vector<PathComponent> paths;
  std::vector<double> path_pd;    // per-path drift estimates
  std::vector<bool> weak;         // |gain|^2 below the weak-path threshold
  PhaseDrift pd_hat;              // power-weighted over non-weak paths
  std::vector<double> nmse_trace; // one entry per pass, initialization first
  CfrTensor reconstructed;
  SweepConfig sweep;
  ArrayConfig array;

  std::vector<CfrTensor> components() const;
};

/// SAGE with OMP-type M-steps. The initialization is one serial pass with
/// successive cancellation; subsequent passes iterate E-step and M-steps
/// until |dNMSE| <= eps or max_iters passes. With pd_aware false the drift
/// grid collapses to {0}.
EstimationResult run_pd_sage(const CfrTensor& observed, const SageConfig& cfg, bool pd_aware);

struct CirProfile {
  RowMatrixXcd cir;  // K x (N_R N_T), row = delay bin
  std::vector<double> apdp;
};

/// IFFT of the summed estimated CFR per Rx-Tx pair and the averaged PDP.
CirProfile reconstruct_cir(const EstimationResult& result);
CirProfile cir_from_cfr(const CfrTensor& cfr);

/// Extracts the MISO tensor of Rx element r.
CfrTensor rx_slice(const CfrTensor& cfr, std::size_t r);

struct SliceEstimates {
  std::vector<EstimationResult> slices;
  std::vector<PathComponent> pooled;
  std::vector<bool> pooled_weak;
};

/// Runs the estimator separately on every Rx element (MISO traversal) and
/// pools the recovered paths.
SliceEstimates run_per_rx_slices(const CfrTensor& observed, const SageConfig& cfg, bool pd_aware);

}  // namespace pdsage::sage
