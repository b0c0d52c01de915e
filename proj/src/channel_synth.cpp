#include "pdsage/channel_synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pdsage/rng.hpp"

namespace pdsage::synth {

Eigen::VectorXcd steering_vector_sin(std::size_t n, double spacing, double wavelength, double s) {
  if (n < 1) throw std::invalid_argument("steering vector needs n >= 1");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (!std::isfinite(s) || !std::isfinite(spacing))
    throw std::invalid_argument("steering vector angle must be finite");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  // Phase per element in turns, so the modulo reduction in delay_phasor applies.
  const double turns = spacing * s / wavelength;
  Eigen::VectorXcd a(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m)
    a(static_cast<Eigen::Index>(m)) = scale * delay_phasor(static_cast<double>(m), turns);
  return a;
}

Eigen::VectorXcd steering_vector(std::size_t n, double spacing, double wavelength, double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("steering vector angle must be finite");
  return steering_vector_sin(n, spacing, wavelength, std::sin(angle));
}

std::vector<double> sin_grid(std::size_t dict_size) {
  if (dict_size < 1) throw std::invalid_argument("dictionary size must be positive");
  std::vector<double> grid(dict_size);
  const double step = 2.0 / static_cast<double>(dict_size);
  for (std::size_t i = 0; i < dict_size; ++i) grid[i] = -1.0 + step * static_cast<double>(i);
  return grid;
}

cd delay_phasor(double k, double nu) {
  const double x = k * nu;
  const double frac = x - std::nearbyint(x);
  return std::polar(1.0, -2.0 * kPi * frac);
}

Eigen::VectorXcd delay_signature(std::size_t n_points, double delta_f, double delay,
                                 double drift_slope) {
  const double nu = delta_f * delay - drift_slope / (2.0 * kPi);
  Eigen::VectorXcd sig(static_cast<Eigen::Index>(n_points));
  for (std::size_t n = 0; n < n_points; ++n)
    sig(static_cast<Eigen::Index>(n)) = delay_phasor(static_cast<double>(n + 1), nu);
  return sig;
}

Eigen::RowVectorXcd spatial_signature(const ArrayConfig& array, double aoa, double aod) {
  const Eigen::VectorXcd ar =
      steering_vector(array.n_rx, array.rx_spacing, array.carrier_wavelength, aoa);
  const Eigen::VectorXcd at =
      steering_vector(array.n_tx, array.tx_spacing, array.carrier_wavelength, aod);
  Eigen::RowVectorXcd out(static_cast<Eigen::Index>(array.n_rx * array.n_tx));
  for (std::size_t r = 0; r < array.n_rx; ++r)
    for (std::size_t t = 0; t < array.n_tx; ++t)
      out(static_cast<Eigen::Index>(r * array.n_tx + t)) =
          ar(static_cast<Eigen::Index>(r)) * std::conj(at(static_cast<Eigen::Index>(t)));
  return out;
}

CfrTensor synthesize_cfr(std::span<const PathComponent> paths, const ArrayConfig& array,
                         const SweepConfig& sweep) {
  if (paths.empty()) throw std::invalid_argument("synthesize_cfr needs at least one path");
  CfrTensor out(sweep, array);
  for (const auto& p : paths) {
    if (!std::isfinite(p.delay) || !std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
      throw std::invalid_argument("path parameters must be finite");
    const Eigen::VectorXcd sig = p.gain * delay_signature(sweep.n_points, sweep.delta_f, p.delay);
    out.data().noalias() += sig * spatial_signature(array, p.aoa, p.aod);
  }
  return out;
}

CfrTensor apply_phase_drift(const CfrTensor& cfr, PhaseDrift pd) {
  CfrTensor out = cfr;
  const double turns = -pd.slope / (2.0 * kPi);
  for (std::size_t n = 0; n < cfr.n_freq(); ++n)
    out.data().row(static_cast<Eigen::Index>(n)) *= delay_phasor(static_cast<double>(n + 1), turns);
  return out;
}

CfrTensor add_awgn(const CfrTensor& cfr, double noise_power, std::uint64_t seed, double tx_power) {
  if (!(noise_power >= 0.0)) throw std::invalid_argument("noise power must be non-negative");
  if (!(tx_power >= 0.0)) throw std::invalid_argument("transmit power must be non-negative");
  CfrTensor out = cfr;
  if (tx_power != 1.0) out.data() *= std::sqrt(tx_power);
  if (noise_power == 0.0) return out;
  Rng rng(seed);
  cd* ptr = out.data().data();
  for (Eigen::Index i = 0; i < out.data().size(); ++i) ptr[i] += rng.complex_normal(noise_power);
  return out;
}

CfrTensor calibrate(const CfrTensor& raw, std::span<const cd> system_response) {
  if (system_response.size() != raw.n_freq())
    throw std::invalid_argument("system response length must match the sweep");
  CfrTensor out = raw;
  for (std::size_t n = 0; n < raw.n_freq(); ++n) {
    if (system_response[n] == cd{0.0, 0.0})
      throw std::invalid_argument("system response has a zero at point " + std::to_string(n));
    out.data().row(static_cast<Eigen::Index>(n)) /= system_response[n];
  }
  return out;
}

double gain_variance(double d_tr) { return 1.0e-3 * std::pow(d_tr, -2.2); }

Scenario random_scenario(const ScenarioSpec& spec, const ArrayConfig& array, std::uint64_t seed) {
  if (spec.l_paths < 1) throw std::invalid_argument("scenario needs at least one path");
  if (!(spec.d_tr > 0.0)) throw std::invalid_argument("Tx-Rx distance must be positive");
  const auto [d_lo, d_hi] = spec.distance_range;
  const auto [pd_lo, pd_hi] = spec.pd_range;
  if (!(d_lo > 0.0) || !(d_lo <= d_hi)) throw std::invalid_argument("bad distance range");
  if (!(pd_lo <= pd_hi)) throw std::invalid_argument("bad phase-drift range");

  const auto rx_grid = sin_grid(spec.rx_grid == 0 ? array.n_rx : spec.rx_grid);
  const auto tx_grid = sin_grid(spec.tx_grid == 0 ? array.n_tx : spec.tx_grid);
  const double variance = gain_variance(spec.d_tr);

  Rng rng(seed);
  Scenario scene;
  scene.paths.reserve(spec.l_paths);
  for (std::size_t l = 0; l < spec.l_paths; ++l) {
    PathComponent p;
    p.gain = rng.complex_normal(variance);
    p.delay = rng.uniform(d_lo, d_hi) / kSpeedOfLight;
    p.aoa = std::asin(rx_grid[rng.index(rx_grid.size())]);
    p.aod = std::asin(tx_grid[rng.index(tx_grid.size())]);
    scene.paths.push_back(p);
  }
  scene.drift.slope = rng.uniform(pd_lo, pd_hi);
  return scene;
}

}  // namespace pdsage::synth
