#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pdsage/types.hpp"

namespace pdsage::synth {

/// ULA response (1/sqrt(n)) exp(-j (2 pi / wavelength) spacing sin(angle) m), m = 0..n-1.
Eigen::VectorXcd steering_vector(std::size_t n, double spacing, double wavelength, double angle);

/// Same response parameterized directly by s = sin(angle).
Eigen::VectorXcd steering_vector_sin(std::size_t n, double spacing, double wavelength, double s);

/// Sin-domain dictionary grid {-1, -1 + 2/D, ..., 1 - 2/D}.
std::vector<double> sin_grid(std::size_t dict_size);

/// exp(-j 2 pi k nu) for integer k, with the phase reduced modulo one turn
/// before scaling so large k * nu products keep full precision.
cd delay_phasor(double k, double nu);

/// Frequency signature [e^{-j 2 pi k df tau} e^{j k phi}]_{k=1..K}.
Eigen::VectorXcd delay_signature(std::size_t n_points, double delta_f, double delay,
                                 double drift_slope = 0.0);

/// Row vector a_R(aoa) a_T(aod)^H flattened in pair order r * n_tx + t.
Eigen::RowVectorXcd spatial_signature(const ArrayConfig& array, double aoa, double aod);

/// Multipath CFR: H[k] = sum_l gain_l e^{-j 2 pi k df tau_l} a_R(aoa_l) a_T(aod_l)^H.
/// The sqrt(N_R N_T / L) normalization is omitted and the carrier phase is
/// taken to be part of each gain.
CfrTensor synthesize_cfr(std::span<const PathComponent> paths, const ArrayConfig& array,
                         const SweepConfig& sweep);

/// Multiplies H[k] by e^{j k slope}.
CfrTensor apply_phase_drift(const CfrTensor& cfr, PhaseDrift pd);

/// Returns sqrt(tx_power) * cfr + N with N ~ CN(0, noise_power) i.i.d. per entry.
CfrTensor add_awgn(const CfrTensor& cfr, double noise_power, std::uint64_t seed,
                   double tx_power = 1.0);

/// Divides a raw S21 sweep by the system response (Tx RF, device, Rx RF
/// product) at each frequency point.
CfrTensor calibrate(const CfrTensor& raw, std::span<const cd> system_response);

struct ScenarioSpec {
  std::size_t l_paths = 1;
  double d_tr = 50.0;                                // meters
  std::pair<double, double> distance_range{5.0, 15.0};  // meters
  std::pair<double, double> pd_range{deg_to_rad(0.4), deg_to_rad(5.0)};
  std::size_t rx_grid = 0;  // angular grid sizes; 0 means "one per element"
  std::size_t tx_grid = 0;
};

struct Scenario {
  std::vector<PathComponent> paths;
  PhaseDrift drift;
};

/// Gain variance 1e-3 * d^-2.2 of the random gain model.
double gain_variance(double d_tr);

/// Random multipath scene: gains CN(0, 1e-3 d_tr^-2.2), delays from uniform
/// propagation distances, angles drawn from the sin-domain dictionary grids,
/// drift slope uniform in pd_range. Deterministic in the seed.
Scenario random_scenario(const ScenarioSpec& spec, const ArrayConfig& array, std::uint64_t seed);

}  // namespace pdsage::synth
