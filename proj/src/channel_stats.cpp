#include "pdsage/channel_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pdsage/errors.hpp"

namespace pdsage::stats {

using Eigen::Index;

std::vector<double> unwrap_phase(std::span<const double> phases) {
  std::vector<double> out(phases.begin(), phases.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < phases.size(); ++i) {
    const double jump = phases[i] - phases[i - 1];
    offset -= 2.0 * kPi * std::round(jump / (2.0 * kPi));
    out[i] = phases[i] + offset;
  }
  return out;
}

LinearPhaseFit fit_linear_phase(std::span<const double> phases, bool unwrap) {
  if (phases.size() < 3) throw std::invalid_argument("linear phase fit needs at least 3 samples");
  const std::vector<double> y = unwrap ? unwrap_phase(phases)
                                       : std::vector<double>(phases.begin(), phases.end());
  const double n = static_cast<double>(y.size());
  const double x_mean = (n - 1.0) / 2.0;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    sxy += dx * (y[i] - y_mean);
    sxx += dx * dx;
  }
  LinearPhaseFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * static_cast<double>(i));
    ss_res += r * r;
    ss_tot += (y[i] - y_mean) * (y[i] - y_mean);
  }
  // Variance at rounding level counts as constant input.
  double y_max = 0.0;
  for (double v : y) y_max = std::max(y_max, std::abs(v));
  const double eps = 16.0 * std::numeric_limits<double>::epsilon() * y_max;
  fit.r_squared = ss_tot > n * eps * eps ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double fspl(double f, double d) {
  if (!(f > 0.0) || !(d > 0.0)) throw std::invalid_argument("fspl needs positive f and d");
  return 20.0 * std::log10(4.0 * kPi * d * f / kSpeedOfLight);
}

double path_loss(std::span<const double> apdp, double tx_gain_db, double rx_gain_db, double f_c,
                 double d_tr, bool literal_eq19) {
  const double h = std::accumulate(apdp.begin(), apdp.end(), 0.0);
  if (!(h > 0.0)) throw DegenerateInput("path loss needs an APDP with positive total power");
  if (!literal_eq19) return -10.0 * std::log10(h);
  if (!(f_c > 0.0) || !(d_tr > 0.0)) throw std::invalid_argument("path loss needs positive f_c and d");
  const double friis = kSpeedOfLight / f_c / (4.0 * kPi * d_tr);
  return -10.0 * std::log10(db_to_linear(tx_gain_db) * db_to_linear(rx_gain_db) * friis * friis * h);
}

double PathLossModel::predict(double d_tr) const {
  return intercept + 10.0 * exponent_or_slope * std::log10(d_tr);
}

PathLossFit fit_path_loss(std::span<const PathLossSample> samples, PathLossKind kind, double f_c) {
  if (samples.size() < 2) throw std::invalid_argument("path loss fit needs at least 2 samples");
  for (const auto& s : samples)
    if (!(s.d_tr > 0.0) || !std::isfinite(s.pl))
      throw std::invalid_argument("path loss samples need positive distance and finite loss");

  PathLossFit out;
  out.model.kind = kind;
  std::vector<double> x(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) x[i] = 10.0 * std::log10(samples[i].d_tr);

  if (kind == PathLossKind::kCloseIn) {
    out.model.intercept = fspl(f_c, 1.0);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      num += x[i] * (samples[i].pl - out.model.intercept);
      den += x[i] * x[i];
    }
    if (!(den > 0.0)) throw std::invalid_argument("CI fit is singular: every sample sits at 1 m");
    out.model.exponent_or_slope = num / den;
  } else {
    const double n = static_cast<double>(samples.size());
    const double x_mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double y_mean = 0.0;
    for (const auto& s : samples) y_mean += s.pl;
    y_mean /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      sxx += (x[i] - x_mean) * (x[i] - x_mean);
      sxy += (x[i] - x_mean) * (samples[i].pl - y_mean);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("FI fit is singular: all distances are equal");
    out.model.exponent_or_slope = sxy / sxx;
    out.model.intercept = y_mean - out.model.exponent_or_slope * x_mean;
  }

  double ss = 0.0;
  out.residuals.reserve(samples.size());
  for (const auto& s : samples) {
    const double r = s.pl - out.model.predict(s.d_tr);
    out.residuals.push_back(r);
    ss += r * r;
  }
  out.model.sf_sigma = std::sqrt(ss / static_cast<double>(samples.size()));
  return out;
}

namespace {

template <typename Get>
double weighted_spread(std::span<const PathComponent> paths, Get get) {
  if (paths.empty()) throw std::invalid_argument("spread needs at least one path");
  // Moments about the first path keep the subtraction well conditioned.
  const double ref = get(paths.front());
  double w_sum = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (const auto& p : paths) {
    const double w = std::norm(p.gain);
    const double v = get(p) - ref;
    w_sum += w;
    m1 += w * v;
    m2 += w * v * v;
  }
  if (!(w_sum > 0.0)) throw DegenerateInput("spread of zero total power is undefined");
  m1 /= w_sum;
  m2 /= w_sum;
  return std::sqrt(std::max(m2 - m1 * m1, 0.0));
}

}  // namespace

double rms_delay_spread(std::span<const PathComponent> paths) {
  return weighted_spread(paths, [](const PathComponent& p) { return p.delay; });
}

double rms_angular_spread(std::span<const PathComponent> paths, AngleSide side) {
  if (side == AngleSide::kAoa)
    return weighted_spread(paths, [](const PathComponent& p) { return p.aoa; });
  return weighted_spread(paths, [](const PathComponent& p) { return p.aod; });
}

std::vector<double> aggregate_clusters(std::span<const double> apdp, std::size_t aggregation_bins) {
  if (aggregation_bins < 1) throw std::invalid_argument("aggregation window must be >= 1 bin");
  for (double v : apdp)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("APDP must be finite and >= 0");
  const std::size_t half = aggregation_bins / 2;
  std::vector<std::size_t> order(apdp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return apdp[a] > apdp[b]; });
  std::vector<bool> taken(apdp.size(), false);
  std::vector<double> clusters;
  for (std::size_t peak : order) {
    if (taken[peak] || apdp[peak] <= 0.0) continue;
    const std::size_t lo = peak >= half ? peak - half : 0;
    const std::size_t hi = std::min(apdp.size() - 1, peak + half);
    double power = 0.0;
    for (std::size_t b = lo; b <= hi; ++b) {
      if (taken[b]) continue;
      taken[b] = true;
      power += apdp[b];
    }
    clusters.push_back(power);
  }
  return clusters;
}

double rician_k(std::span<const double> apdp, std::size_t aggregation_bins) {
  const auto clusters = aggregate_clusters(apdp, aggregation_bins);
  if (clusters.empty()) throw DegenerateInput("K-factor of an all-zero APDP is undefined");
  const double total = std::accumulate(clusters.begin(), clusters.end(), 0.0);
  const double peak = *std::max_element(clusters.begin(), clusters.end());
  const double rest = total - peak;
  if (clusters.size() < 2 || !(rest > 0.0)) return std::numeric_limits<double>::infinity();
  return peak / rest;
}

std::vector<double> kf_samples(const RowMatrixXcd& cir, std::size_t aggregation_bins) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cir.cols()));
  std::vector<double> pdp(static_cast<std::size_t>(cir.rows()));
  for (Index c = 0; c < cir.cols(); ++c) {
    for (Index b = 0; b < cir.rows(); ++b) pdp[static_cast<std::size_t>(b)] = std::norm(cir(b, c));
    out.push_back(rician_k(pdp, aggregation_bins));
  }
  return out;
}

double cir_correlation(std::span<const cd> a, std::span<const cd> b) {
  if (a.size() != b.size()) throw std::invalid_argument("correlation needs equal-length CIRs");
  if (a.size() < 2) throw std::invalid_argument("correlation needs at least 2 taps");
  const double n = static_cast<double>(a.size());
  const cd mean_a = std::accumulate(a.begin(), a.end(), cd{}) / n;
  const cd mean_b = std::accumulate(b.begin(), b.end(), cd{}) / n;
  cd inner{};
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const cd da = a[i] - mean_a;
    const cd db = b[i] - mean_b;
    inner += std::conj(da) * db;
    na += std::norm(da);
    nb += std::norm(db);
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw DegenerateInput("correlation of a constant CIR is undefined");
  return std::min(1.0, std::abs(inner) / std::sqrt(na * nb));
}

std::vector<double> correlation_profile(const RowMatrixXcd& cir, std::size_t n_tx, std::size_t r,
                                        std::size_t reference) {
  if (n_tx == 0 || static_cast<std::size_t>(cir.cols()) % n_tx != 0)
    throw std::invalid_argument("CIR columns are not a multiple of n_tx");
  if ((r + 1) * n_tx > static_cast<std::size_t>(cir.cols()) || reference >= n_tx)
    throw std::invalid_argument("element index out of range");
  auto column = [&](std::size_t t) {
    const Index c = static_cast<Index>(r * n_tx + t);
    std::vector<cd> v(static_cast<std::size_t>(cir.rows()));
    for (Index b = 0; b < cir.rows(); ++b) v[static_cast<std::size_t>(b)] = cir(b, c);
    return v;
  };
  const auto ref = column(reference);
  std::vector<double> out(n_tx);
  for (std::size_t t = 0; t < n_tx; ++t) out[t] = cir_correlation(ref, column(t));
  return out;
}

std::vector<PowerProfile> power_element_profile(std::span<const CfrTensor> components) {
  std::vector<PowerProfile> out;
  out.reserve(components.size());
  for (const auto& comp : components) {
    PowerProfile p;
    const double k = static_cast<double>(comp.n_freq());
    p.profile_db.resize(comp.n_pairs());
    for (std::size_t c = 0; c < comp.n_pairs(); ++c) {
      const double power = comp.data().col(static_cast<Index>(c)).squaredNorm() / k;
      p.profile_db[c] = linear_to_db(power);
    }
    const double n = static_cast<double>(p.profile_db.size());
    if (n > 0) {
      p.mean_db = std::accumulate(p.profile_db.begin(), p.profile_db.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : p.profile_db) ss += (v - p.mean_db) * (v - p.mean_db);
      p.std_db = std::sqrt(ss / n);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> detect_birth_death(std::span<const double> profile,
                                                                    double threshold_db,
                                                                    double noise_floor_db) {
  if (!(threshold_db > 0.0)) throw std::invalid_argument("birth-death threshold must be positive");
  const double level = noise_floor_db + threshold_db;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  bool open = false;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const bool visible = profile[i] >= level;
    if (visible && !open) {
      out.emplace_back(i + 1, i + 1);
      open = true;
    } else if (visible) {
      out.back().second = i + 1;
    } else {
      open = false;
    }
  }
  return out;
}

}  // namespace pdsage::stats
