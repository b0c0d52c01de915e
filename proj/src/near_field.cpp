#include "pdsage/near_field.hpp"

#include <cmath>
#include <stdexcept>

namespace pdsage::stats {

double rayleigh_distance(const ArrayConfig& array) {
  if (array.n_tx < 2) throw std::invalid_argument("Rayleigh distance needs at least 2 Tx elements");
  if (!(array.carrier_wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  const double aperture = static_cast<double>(array.n_tx - 1) * array.tx_spacing;
  return 2.0 * aperture * aperture / array.carrier_wavelength;
}

std::vector<Eigen::Vector2d> ula_positions(std::size_t n, double spacing) {
  std::vector<Eigen::Vector2d> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {spacing * static_cast<double>(i), 0.0};
  return out;
}

PhasePrediction predict_phase(WaveModel model, std::span<const Eigen::Vector2d> tx_positions,
                              const Eigen::Vector2d& rx_position, double wavelength) {
  if (tx_positions.empty()) throw std::invalid_argument("phase prediction needs Tx positions");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw std::invalid_argument("wavelength must be positive");
  if (!rx_position.allFinite()) throw std::invalid_argument("Rx position must be finite");
  for (const auto& p : tx_positions) {
    if (!p.allFinite()) throw std::invalid_argument("Tx positions must be finite");
    if ((rx_position - p).norm() == 0.0)
      throw std::invalid_argument("Rx position coincides with a Tx element");
  }

  const double k = 2.0 * kPi / wavelength;
  PhasePrediction out;
  out.unwrapped.resize(tx_positions.size());
  if (model == WaveModel::kSpherical) {
    const double d0 = (rx_position - tx_positions[0]).norm();
    for (std::size_t n = 0; n < tx_positions.size(); ++n)
      out.unwrapped[n] = k * ((rx_position - tx_positions[n]).norm() - d0);
  } else {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : tx_positions) centroid += p;
    centroid /= static_cast<double>(tx_positions.size());
    const Eigen::Vector2d toward = rx_position - centroid;
    if (toward.norm() == 0.0) throw std::invalid_argument("Rx position coincides with the array centroid");
    const Eigen::Vector2d u = toward.normalized();
    for (std::size_t n = 0; n < tx_positions.size(); ++n)
      out.unwrapped[n] = -k * (tx_positions[n] - tx_positions[0]).dot(u);
  }
  out.wrapped.resize(out.unwrapped.size());
  for (std::size_t n = 0; n < out.unwrapped.size(); ++n) {
    double w = std::remainder(out.unwrapped[n], 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    out.wrapped[n] = w;
  }
  return out;
}

double phase_residual_rms(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("phase vectors must be non-empty and of equal length");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

}  // namespace pdsage::stats
