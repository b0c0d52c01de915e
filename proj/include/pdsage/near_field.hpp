#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pdsage/types.hpp"

namespace pdsage::stats {

/// 2 D^2 / lambda with aperture D = (n_tx - 1) * tx_spacing.
double rayleigh_distance(const ArrayConfig& array);

enum class WaveModel { kPlane, kSpherical };

struct PhasePrediction {
  std::vector<double> wrapped;    // (-pi, pi]
  std::vector<double> unwrapped;
};

/// Element positions of a ULA along the x axis starting at the origin.
std::vector<Eigen::Vector2d> ula_positions(std::size_t n, double spacing);

/// Per-element phase relative to element 0.
/// Spherical: (2 pi / lambda)(|rx - tx_n| - |rx - tx_0|).
/// Plane: linear phase of a plane wave arriving from the direction of rx as
/// seen from the array centroid.
PhasePrediction predict_phase(WaveModel model, std::span<const Eigen::Vector2d> tx_positions,
                              const Eigen::Vector2d& rx_position, double wavelength);

/// RMS of the element-wise difference of two unwrapped phase vectors.
double phase_residual_rms(std::span<const double> a, std::span<const double> b);

}  // namespace pdsage::stats
