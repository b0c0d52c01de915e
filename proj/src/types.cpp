#include "pdsage/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdsage {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

ArrayConfig ArrayConfig::half_wavelength(std::size_t n_tx, std::size_t n_rx, double wavelength) {
  ArrayConfig cfg{n_tx, n_rx, 0.5 * wavelength, 0.5 * wavelength, wavelength};
  cfg.validate();
  return cfg;
}

void ArrayConfig::validate() const {
  if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("array needs at least one element per side");
  if (!(tx_spacing > 0.0) || !(rx_spacing > 0.0) || !std::isfinite(tx_spacing) ||
      !std::isfinite(rx_spacing))
    throw std::invalid_argument("element spacing must be positive and finite");
  if (!(carrier_wavelength > 0.0) || !std::isfinite(carrier_wavelength))
    throw std::invalid_argument("carrier wavelength must be positive and finite");
}

void SweepConfig::validate() const {
  if (!(delta_f > 0.0) || !std::isfinite(delta_f))
    throw std::invalid_argument("sweep interval must be positive");
  if (n_points < 2) throw std::invalid_argument("sweep needs at least two points");
  if (!(f_start > 0.0) || !std::isfinite(f_start))
    throw std::invalid_argument("start frequency must be positive");
}

CfrTensor::CfrTensor(const SweepConfig& sweep, const ArrayConfig& array)
    : sweep_(sweep), array_(array) {
  sweep_.validate();
  array_.validate();
  data_ = RowMatrixXcd::Zero(static_cast<Eigen::Index>(n_freq()),
                             static_cast<Eigen::Index>(n_pairs()));
}

CfrTensor::CfrTensor(const SweepConfig& sweep, const ArrayConfig& array, RowMatrixXcd data)
    : sweep_(sweep), array_(array), data_(std::move(data)) {
  sweep_.validate();
  array_.validate();
  if (data_.rows() != static_cast<Eigen::Index>(n_freq()) ||
      data_.cols() != static_cast<Eigen::Index>(n_pairs()))
    throw std::invalid_argument("CFR data is " + std::to_string(data_.rows()) + "x" +
                                std::to_string(data_.cols()) + ", expected " +
                                std::to_string(n_freq()) + "x" + std::to_string(n_pairs()));
}

Eigen::MatrixXcd CfrTensor::snapshot(std::size_t n) const {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(n_rx()), static_cast<Eigen::Index>(n_tx()));
  for (std::size_t r = 0; r < n_rx(); ++r)
    for (std::size_t t = 0; t < n_tx(); ++t)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) = (*this)(n, r, t);
  return out;
}

bool CfrTensor::all_finite() const {
  for (Eigen::Index i = 0; i < data_.size(); ++i) {
    const cd v = data_.data()[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

bool CfrTensor::same_shape(const CfrTensor& other) const {
  return n_freq() == other.n_freq() && n_rx() == other.n_rx() && n_tx() == other.n_tx();
}

}  // namespace pdsage
