#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pdsage {

using cd = std::complex<double>;
using RowMatrixXcd = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;

// Matches the wavelength convention used for the 330-360 GHz system
// (lambda_c = 0.8696 mm at 345 GHz).
inline constexpr double kSpeedOfLight = 3.0e8;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

double db_to_linear(double db);
double linear_to_db(double linear);
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

/// One multipath component. Angles are measured from array broadside.
struct PathComponent {
  cd gain{0.0, 0.0};
  double delay = 0.0;  // seconds
  double aoa = 0.0;    // radians, [-pi/2, pi/2]
  double aod = 0.0;    // radians, [-pi/2, pi/2]

  bool operator==(const PathComponent&) const = default;
};

/// Uniform linear arrays at both link ends.
struct ArrayConfig {
  std::size_t n_tx = 1;
  std::size_t n_rx = 1;
  double tx_spacing = 0.0;          // meters
  double rx_spacing = 0.0;          // meters
  double carrier_wavelength = 0.0;  // meters

  static ArrayConfig half_wavelength(std::size_t n_tx, std::size_t n_rx, double wavelength);

  void validate() const;
  bool operator==(const ArrayConfig&) const = default;
};

/// Frequency sweep of a VNA-style sounder. Point n (0-based storage) is the
/// model's frequency index k = n + 1 at f_start + n * delta_f.
struct SweepConfig {
  double f_start = 330.0e9;
  double delta_f = 6.0e6;
  std::size_t n_points = 5001;

  double bandwidth() const { return static_cast<double>(n_points - 1) * delta_f; }
  double center_frequency() const { return f_start + 0.5 * bandwidth(); }
  double center_wavelength() const { return kSpeedOfLight / center_frequency(); }
  /// IFFT delay bin width 1/(K * delta_f).
  double delay_bin() const { return 1.0 / (static_cast<double>(n_points) * delta_f); }
  /// Alias-free delay window 1/delta_f.
  double max_delay() const { return 1.0 / delta_f; }

  void validate() const;
  bool operator==(const SweepConfig&) const = default;
};

/// Linear phase drift e^{j k slope}, one scalar per snapshot.
struct PhaseDrift {
  double slope = 0.0;  // radians per frequency index

  /// Delay offset slope / (2 pi delta_f) that the drift imprints on every path.
  double delay_shift(double delta_f) const { return slope / (2.0 * kPi * delta_f); }
};

/// Complex frequency response over (k, r, t). Rows are frequency points,
/// columns are Rx-Tx pairs with pair index r * n_tx + t.
class CfrTensor {
 public:
  CfrTensor() = default;
  CfrTensor(const SweepConfig& sweep, const ArrayConfig& array);
  CfrTensor(const SweepConfig& sweep, const ArrayConfig& array, RowMatrixXcd data);

  const SweepConfig& sweep() const { return sweep_; }
  const ArrayConfig& array() const { return array_; }

  std::size_t n_freq() const { return sweep_.n_points; }
  std::size_t n_rx() const { return array_.n_rx; }
  std::size_t n_tx() const { return array_.n_tx; }
  std::size_t n_pairs() const { return array_.n_rx * array_.n_tx; }

  std::size_t pair_index(std::size_t r, std::size_t t) const { return r * array_.n_tx + t; }

  cd& operator()(std::size_t n, std::size_t r, std::size_t t) {
    return data_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pair_index(r, t)));
  }
  const cd& operator()(std::size_t n, std::size_t r, std::size_t t) const {
    return data_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pair_index(r, t)));
  }

  /// N_R x N_T snapshot at storage row n.
  Eigen::MatrixXcd snapshot(std::size_t n) const;

  RowMatrixXcd& data() { return data_; }
  const RowMatrixXcd& data() const { return data_; }

  double frobenius_norm_squared() const { return data_.squaredNorm(); }
  bool all_finite() const;
  bool same_shape(const CfrTensor& other) const;

 private:
  SweepConfig sweep_;
  ArrayConfig array_;
  RowMatrixXcd data_;
};

}  // namespace pdsage
