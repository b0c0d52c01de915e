#include "pdsage/pd_sage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pdsage/channel_synth.hpp"
#include "pdsage/errors.hpp"
#include "pdsage/fft.hpp"

namespace pdsage::sage {

using Eigen::Index;

namespace {

Index idx(std::size_t i) { return static_cast<Index>(i); }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Wraps a delay into the alias-free window [0, 1/delta_f).
double wrap_delay(double delay, double delta_f) {
  const double period = 1.0 / delta_f;
  double w = std::fmod(delay, period);
  if (w < 0.0) w += period;
  if (w >= period) w = 0.0;
  return w;
}

}  // namespace

std::vector<double> PdGrid::values() const {
  std::vector<double> out(size);
  for (std::size_t j = 0; j < size; ++j) out[j] = min + step() * static_cast<double>(j);
  return out;
}

double PdGrid::step() const {
  return size > 1 ? (max - min) / static_cast<double>(size - 1) : 0.0;
}

SageConfig SageConfig::defaults(const ArrayConfig& array, const SweepConfig& sweep,
                                std::size_t n_paths) {
  SageConfig cfg;
  cfg.n_paths_hat = n_paths;
  cfg.rx_dict_size = array.n_rx;
  cfg.tx_dict_size = array.n_tx;
  cfg.coarse_delay_grid_size = 2 * cfg.delay_window_half_width + 1;
  cfg.refine_half_width = 2.0 * cfg.coarse_step(sweep);
  return cfg;
}

void SageConfig::validate(const ArrayConfig& array) const {
  if (n_paths_hat < 1) throw std::invalid_argument("estimated path count must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(stop_epsilon > 0.0)) throw std::invalid_argument("stop_epsilon must be positive");
  if (coarse_delay_grid_size == 0 || refine_grid_size == 0 || pd_grid.size == 0)
    throw std::invalid_argument("grid sizes must be positive");
  if (!(refine_half_width >= 0.0)) throw std::invalid_argument("refine_half_width must be >= 0");
  if (!(pd_grid.min <= pd_grid.max)) throw std::invalid_argument("pd grid min exceeds max");
  if (rx_dict_size < array.n_rx || tx_dict_size < array.n_tx)
    throw std::invalid_argument("angular dictionaries must have at least one atom per element");
}

double SageConfig::coarse_step(const SweepConfig& sweep) const {
  if (coarse_delay_grid_size <= 1) return sweep.delay_bin();
  return 2.0 * static_cast<double>(delay_window_half_width) * sweep.delay_bin() /
         static_cast<double>(coarse_delay_grid_size - 1);
}

double SageConfig::refine_step() const {
  return refine_grid_size > 1 ? 2.0 * refine_half_width / static_cast<double>(refine_grid_size - 1)
                              : 0.0;
}

// ---------------------------------------------------------------------------
// Delay observation

DelayObservation::DelayObservation(const CfrTensor& hidden)
    : sweep_(hidden.sweep()), array_(hidden.array()), matrix_(hidden.data()) {
  const std::size_t k = hidden.n_freq();
  const std::size_t cols = hidden.n_pairs();
  const std::size_t len = next_pow2(2 * k - 1);

  // Zero-padded transforms of every column give P(q / len) = sum_c |Z_c[q]|^2.
  std::vector<cd> buf(cols * len, cd{0.0, 0.0});
  for (std::size_t n = 0; n < k; ++n) {
    const cd* row = matrix_.row(idx(n)).data();
    for (std::size_t c = 0; c < cols; ++c) buf[c * len + n] = row[c];
  }
  fft::transform_batch(buf, len, cols, fft::Direction::kBackward);

  std::vector<cd> power(len, cd{0.0, 0.0});
  for (std::size_t c = 0; c < cols; ++c) {
    const cd* z = buf.data() + c * len;
    for (std::size_t q = 0; q < len; ++q) power[q] += std::norm(z[q]);
  }
  // len >= 2K - 1, so the lag sequence is recovered without wrap-around.
  fft::transform_batch(power, len, 1, fft::Direction::kForward);
  lags_.resize(k);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t m = 0; m < k; ++m) lags_[m] = power[m] * scale;
}

double DelayObservation::atom_energy(double nu) const {
  const std::size_t k = lags_.size();
  double acc = 0.0;
  constexpr std::size_t kReanchor = 64;
  cd z{1.0, 0.0};
  const cd w = synth::delay_phasor(-1.0, nu);  // e^{+j 2 pi nu}
  for (std::size_t m = 1; m < k; ++m) {
    if (m % kReanchor == 0) {
      z = synth::delay_phasor(-static_cast<double>(m), nu);
    } else {
      z *= w;
    }
    acc += lags_[m].real() * z.real() - lags_[m].imag() * z.imag();
  }
  const double p = lags_[0].real() + 2.0 * acc;
  return std::max(p, 0.0) / static_cast<double>(k);
}

std::vector<double> DelayObservation::apdp() const {
  const std::size_t k = lags_.size();
  std::vector<cd> folded(k);
  folded[0] = lags_[0];
  for (std::size_t m = 1; m < k; ++m) folded[m] = lags_[m] + std::conj(lags_[k - m]);
  fft::transform_batch(folded, k, 1, fft::Direction::kBackward);
  const double scale = 1.0 / (static_cast<double>(k) * static_cast<double>(k) *
                              static_cast<double>(array_.n_rx * array_.n_tx));
  std::vector<double> out(k);
  for (std::size_t b = 0; b < k; ++b) out[b] = std::max(folded[b].real(), 0.0) * scale;
  return out;
}

// ---------------------------------------------------------------------------
// M-step building blocks

CfrTensor e_step(const CfrTensor& observed, std::span<const CfrTensor> components, std::size_t l) {
  if (l >= components.size())
    throw std::invalid_argument("path index " + std::to_string(l) + " out of range");
  CfrTensor hidden = observed;
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (j == l) continue;
    if (!components[j].same_shape(observed))
      throw std::invalid_argument("component dimensions differ from the observation");
    hidden.data() -= components[j].data();
  }
  return hidden;
}

OmpResult omp_rank1(const Eigen::MatrixXcd& observation, const Eigen::MatrixXcd& dictionary) {
  if (dictionary.cols() == 0) throw std::invalid_argument("empty dictionary");
  if (dictionary.rows() != observation.rows())
    throw std::invalid_argument("dictionary atoms must match the observation height");

  OmpResult best;
  double best_energy = -1.0;
  Index best_col = 0;
  for (Index j = 0; j < dictionary.cols(); ++j) {
    const double norm2 = dictionary.col(j).squaredNorm();
    if (!(norm2 > 0.0)) continue;
    const double e = (dictionary.col(j).adjoint() * observation).squaredNorm() / norm2;
    if (e > best_energy) {
      best_energy = e;
      best_col = j;
    }
  }
  const double norm2 = dictionary.col(best_col).squaredNorm();
  best.index = static_cast<std::size_t>(best_col);
  best.energy = std::max(best_energy, 0.0);
  best.coefficient = norm2 > 0.0
                         ? Eigen::RowVectorXcd(dictionary.col(best_col).adjoint() * observation / norm2)
                         : Eigen::RowVectorXcd::Zero(observation.cols());
  return best;
}

std::vector<double> per_path_apdp(const CfrTensor& component) {
  const std::size_t k = component.n_freq();
  const std::size_t cols = component.n_pairs();
  std::vector<cd> buf(cols * k);
  for (std::size_t n = 0; n < k; ++n)
    for (std::size_t c = 0; c < cols; ++c) buf[c * k + n] = component.data()(idx(n), idx(c));
  fft::transform_batch(buf, k, cols, fft::Direction::kBackward);
  const double scale = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  std::vector<double> out(k, 0.0);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t b = 0; b < k; ++b) out[b] += std::norm(buf[c * k + b]) * scale;
  for (auto& v : out) v /= static_cast<double>(cols);
  return out;
}

double coarse_delay(const DelayObservation& obs, std::span<const double> apdp,
                    const SageConfig& cfg) {
  if (apdp.empty()) throw DegenerateInput("empty APDP");
  const auto peak = std::max_element(apdp.begin(), apdp.end());
  if (!(*peak > 0.0)) throw DegenerateInput("all-zero APDP: no delay window to search");
  const double bin = obs.sweep().delay_bin();
  const double peak_bin = static_cast<double>(peak - apdp.begin());
  const double start = (peak_bin - static_cast<double>(cfg.delay_window_half_width)) * bin;
  const double step = cfg.coarse_step(obs.sweep());
  const double df = obs.sweep().delta_f;

  double best_delay = peak_bin * bin;
  double best_energy = -1.0;
  for (std::size_t d = 0; d < cfg.coarse_delay_grid_size; ++d) {
    const double tau = cfg.coarse_delay_grid_size > 1 ? start + step * static_cast<double>(d)
                                                      : peak_bin * bin;
    const double e = obs.atom_energy(df * tau);
    if (e > best_energy) {
      best_energy = e;
      best_delay = tau;
    }
  }
  return best_delay;
}

DelayPdEstimate refine_delay_pd(const DelayObservation& obs, double coarse, const SageConfig& cfg) {
  if (cfg.refine_grid_size == 0 || cfg.pd_grid.size == 0)
    throw std::invalid_argument("refinement grids must be non-empty");
  const double df = obs.sweep().delta_f;
  const double step = cfg.refine_step();
  const double start = cfg.refine_grid_size > 1 ? coarse - cfg.refine_half_width : coarse;
  const auto pds = cfg.pd_grid.values();

  DelayPdEstimate best{coarse, 0.0};
  double best_energy = -1.0;
  for (std::size_t i = 0; i < cfg.refine_grid_size; ++i) {
    const double tau = start + step * static_cast<double>(i);
    for (double phi : pds) {
      const double e = obs.atom_energy(df * tau - phi / (2.0 * kPi));
      if (e > best_energy) {
        best_energy = e;
        best = {tau, phi};
      }
    }
  }
  return best;
}

Eigen::MatrixXcd angle_observation(const DelayObservation& obs,
                                   const Eigen::VectorXcd& delay_atom) {
  const auto& y = obs.matrix();
  if (delay_atom.size() != y.rows())
    throw std::invalid_argument("delay atom length must equal the number of frequency points");
  const Eigen::RowVectorXcd proj =
      (delay_atom.adjoint() * y) / static_cast<double>(delay_atom.size());
  const std::size_t n_rx = obs.array().n_rx;
  const std::size_t n_tx = obs.array().n_tx;
  Eigen::MatrixXcd out(idx(n_rx), idx(n_tx));
  for (std::size_t r = 0; r < n_rx; ++r)
    for (std::size_t t = 0; t < n_tx; ++t) out(idx(r), idx(t)) = proj(idx(r * n_tx + t));
  return out;
}

double estimate_angle(const Eigen::MatrixXcd& y, std::size_t dict_size, std::size_t n_elems,
                      double spacing, double wavelength) {
  if (static_cast<std::size_t>(y.rows()) != n_elems)
    throw std::invalid_argument("angle observation height must equal the element count");
  if (dict_size < 1) throw std::invalid_argument("dictionary size must be positive");
  const auto grid = synth::sin_grid(dict_size);
  Eigen::MatrixXcd dict(idx(n_elems), idx(dict_size));
  for (std::size_t i = 0; i < dict_size; ++i)
    dict.col(idx(i)) = synth::steering_vector_sin(n_elems, spacing, wavelength, grid[i]);
  const auto hit = omp_rank1(y, dict);
  return std::asin(grid[hit.index]);
}

cd estimate_gain(const Eigen::MatrixXcd& y_r, double psi, double omega, const ArrayConfig& array) {
  const Eigen::VectorXcd ar =
      synth::steering_vector(array.n_rx, array.rx_spacing, array.carrier_wavelength, psi);
  const Eigen::VectorXcd at =
      synth::steering_vector(array.n_tx, array.tx_spacing, array.carrier_wavelength, omega);
  if (y_r.rows() != ar.size() || y_r.cols() != at.size())
    throw std::invalid_argument("gain observation must be N_R x N_T");
  return (ar.adjoint() * y_r * at)(0, 0);
}

double nmse(const CfrTensor& estimated, const CfrTensor& observed) {
  if (!estimated.same_shape(observed))
    throw std::invalid_argument("nmse needs tensors of identical dimensions");
  const double denom = observed.frobenius_norm_squared();
  if (!(denom > 0.0)) throw DegenerateInput("nmse of an all-zero observation is undefined");
  return (estimated.data() - observed.data()).squaredNorm() / denom;
}

CfrTensor component_cfr(const PathComponent& path, double pd, const ArrayConfig& array,
                        const SweepConfig& sweep) {
  RowMatrixXcd data =
      (path.gain * synth::delay_signature(sweep.n_points, sweep.delta_f, path.delay, pd)) *
      synth::spatial_signature(array, path.aoa, path.aod);
  return CfrTensor(sweep, array, std::move(data));
}

std::vector<CfrTensor> EstimationResult::components() const {
  std::vector<CfrTensor> out;
  out.reserve(paths.size());
  for (std::size_t l = 0; l < paths.size(); ++l)
    out.push_back(component_cfr(paths[l], path_pd[l], array, sweep));
  return out;
}

// ---------------------------------------------------------------------------
// Full estimator

namespace {

struct PathState {
  PathComponent path;
  double pd = 0.0;
  bool active = false;
};

RowMatrixXcd component_matrix(const PathState& s, const ArrayConfig& array,
                              const SweepConfig& sweep) {
  return (s.path.gain * synth::delay_signature(sweep.n_points, sweep.delta_f, s.path.delay, s.pd)) *
         synth::spatial_signature(array, s.path.aoa, s.path.aod);
}

// One M-step sweep for a single path against its hidden data.
PathState estimate_path(const CfrTensor& hidden, const SageConfig& cfg) {
  const auto& array = hidden.array();
  const auto& sweep = hidden.sweep();

  DelayObservation obs(hidden);
  const auto apdp = obs.apdp();
  const double coarse = coarse_delay(obs, apdp, cfg);
  const auto refined = refine_delay_pd(obs, coarse, cfg);

  const Eigen::VectorXcd atom =
      synth::delay_signature(sweep.n_points, sweep.delta_f, refined.delay, refined.pd);
  const Eigen::MatrixXcd y_r = angle_observation(obs, atom);

  PathState s;
  s.active = true;
  s.pd = refined.pd;
  s.path.delay = wrap_delay(refined.delay, sweep.delta_f);
  // A single element carries no angular information on that side.
  s.path.aoa = array.n_rx > 1 ? estimate_angle(y_r, cfg.rx_dict_size, array.n_rx,
                                               array.rx_spacing, array.carrier_wavelength)
                              : 0.0;
  s.path.aod = array.n_tx > 1 ? estimate_angle(y_r.adjoint(), cfg.tx_dict_size, array.n_tx,
                                               array.tx_spacing, array.carrier_wavelength)
                              : 0.0;
  s.path.gain = estimate_gain(y_r, s.path.aoa, s.path.aod, array);
  return s;
}

}  // namespace

EstimationResult run_pd_sage(const CfrTensor& observed, const SageConfig& cfg, bool pd_aware) {
  cfg.validate(observed.array());
  if (!observed.all_finite()) throw std::invalid_argument("observation contains non-finite values");

  SageConfig active_cfg = cfg;
  if (!pd_aware) active_cfg.pd_grid = PdGrid::zero();

  const auto& array = observed.array();
  const auto& sweep = observed.sweep();
  const std::size_t n_paths = cfg.n_paths_hat;

  std::vector<PathState> states(n_paths);
  std::vector<RowMatrixXcd> comps(n_paths);
  // residual = observed - sum of active components
  RowMatrixXcd residual = observed.data();

  auto reconstruct = [&]() {
    CfrTensor sum(sweep, array);
    for (std::size_t l = 0; l < n_paths; ++l)
      if (states[l].active) sum.data() += comps[l];
    return sum;
  };

  auto update_path = [&](std::size_t l) {
    CfrTensor hidden(sweep, array, states[l].active ? RowMatrixXcd(residual + comps[l]) : residual);
    states[l] = estimate_path(hidden, active_cfg);
    comps[l] = component_matrix(states[l], array, sweep);
    residual = hidden.data() - comps[l];
  };

  EstimationResult result;
  for (std::size_t l = 0; l < n_paths; ++l) update_path(l);
  result.reconstructed = reconstruct();
  result.nmse_trace.push_back(nmse(result.reconstructed, observed));

  double previous = 0.0;
  std::size_t pass = 1;
  while (std::abs(result.nmse_trace.back() - previous) > cfg.stop_epsilon &&
         pass < cfg.max_iters) {
    ++pass;
    previous = result.nmse_trace.back();
    for (std::size_t l = 0; l < n_paths; ++l) update_path(l);
    result.reconstructed = reconstruct();
    residual = observed.data() - result.reconstructed.data();
    result.nmse_trace.push_back(nmse(result.reconstructed, observed));
  }

  result.sweep = sweep;
  result.array = array;
  double strongest = 0.0;
  for (const auto& s : states) strongest = std::max(strongest, std::norm(s.path.gain));
  const double weak_limit = strongest * db_to_linear(-cfg.weak_path_threshold_db);
  double pd_num = 0.0;
  double pd_den = 0.0;
  for (const auto& s : states) {
    const double power = std::norm(s.path.gain);
    const bool weak = power < weak_limit;
    result.paths.push_back(s.path);
    result.path_pd.push_back(s.pd);
    result.weak.push_back(weak);
    if (!weak) {
      pd_num += power * s.pd;
      pd_den += power;
    }
  }
  result.pd_hat.slope = pd_den > 0.0 ? pd_num / pd_den : 0.0;
  return result;
}

CirProfile cir_from_cfr(const CfrTensor& cfr) {
  const std::size_t k = cfr.n_freq();
  const std::size_t cols = cfr.n_pairs();
  std::vector<cd> buf(cols * k);
  for (std::size_t n = 0; n < k; ++n)
    for (std::size_t c = 0; c < cols; ++c) buf[c * k + n] = cfr.data()(idx(n), idx(c));
  fft::transform_batch(buf, k, cols, fft::Direction::kBackward);

  CirProfile out;
  out.cir.resize(idx(k), idx(cols));
  out.apdp.assign(k, 0.0);
  const double scale = 1.0 / static_cast<double>(k);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t b = 0; b < k; ++b) {
      const cd v = buf[c * k + b] * scale;
      out.cir(idx(b), idx(c)) = v;
      out.apdp[b] += std::norm(v);
    }
  for (auto& v : out.apdp) v /= static_cast<double>(cols);
  return out;
}

CirProfile reconstruct_cir(const EstimationResult& result) {
  if (result.reconstructed.data().size() == 0) return {};
  return cir_from_cfr(result.reconstructed);
}

CfrTensor rx_slice(const CfrTensor& cfr, std::size_t r) {
  if (r >= cfr.n_rx()) throw std::invalid_argument("Rx element index out of range");
  ArrayConfig miso = cfr.array();
  miso.n_rx = 1;
  RowMatrixXcd data = cfr.data().middleCols(idx(r * cfr.n_tx()), idx(cfr.n_tx()));
  return CfrTensor(cfr.sweep(), miso, std::move(data));
}

SliceEstimates run_per_rx_slices(const CfrTensor& observed, const SageConfig& cfg, bool pd_aware) {
  SliceEstimates out;
  SageConfig slice_cfg = cfg;
  slice_cfg.rx_dict_size = std::max<std::size_t>(slice_cfg.rx_dict_size, 1);
  for (std::size_t r = 0; r < observed.n_rx(); ++r) {
    out.slices.push_back(run_pd_sage(rx_slice(observed, r), slice_cfg, pd_aware));
    const auto& res = out.slices.back();
    out.pooled.insert(out.pooled.end(), res.paths.begin(), res.paths.end());
    out.pooled_weak.insert(out.pooled_weak.end(), res.weak.begin(), res.weak.end());
  }
  return out;
}

}  // namespace pdsage::sage
