#include "pdsage/distribution_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace pdsage::stats {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kLogNormal: return "LN";
    case Family::kGaussian: return "Gaussian";
    case Family::kNakagami: return "Nakagami";
    case Family::kRician: return "Rician";
    case Family::kWeibull: return "Weibull";
  }
  return "?";
}

double DistributionFit::cdf(double x) const {
  const auto [a, b] = params;
  switch (family) {
    case Family::kLogNormal:
      if (x <= 0.0) return 0.0;
      return boost::math::cdf(boost::math::normal(a, b), std::log10(x));
    case Family::kGaussian:
      return boost::math::cdf(boost::math::normal(a, b), x);
    case Family::kNakagami:
      if (x <= 0.0) return 0.0;
      return boost::math::gamma_p(a, a * x * x / b);
    case Family::kRician: {
      if (x <= 0.0) return 0.0;
      const double s2 = b * b;
      const boost::math::non_central_chi_squared dist(2.0, a * a / s2);
      return boost::math::cdf(dist, x * x / s2);
    }
    case Family::kWeibull:
      if (x <= 0.0) return 0.0;
      return boost::math::cdf(boost::math::weibull(a, b), x);
  }
  return 0.0;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS statistic needs samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS statistic needs samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(x.size()) -
                             static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return d;
}

namespace {

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double population_std(std::span<const double> x, double mu) {
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

std::array<double, 2> fit_weibull(std::span<const double> x) {
  // Samples are scaled by their maximum so x^k stays representable.
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> lx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) lx[i] = std::log(x[i] / top);
  const double mean_log = mean(lx);
  const double sd_log = population_std(lx, mean_log);
  if (!(sd_log > 0.0)) throw std::invalid_argument("Weibull fit needs non-constant samples");

  auto score = [&](double k, double* deriv) {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (double l : lx) {
      const double w = std::exp(k * l);
      s0 += w;
      s1 += w * l;
      s2 += w * l * l;
    }
    const double g = s1 / s0 - 1.0 / k - mean_log;
    if (deriv) *deriv = s2 / s0 - (s1 / s0) * (s1 / s0) + 1.0 / (k * k);
    return g;
  };

  double k = 1.2825 / sd_log;  // moment guess from the Gumbel spread of log x
  for (int it = 0; it < 100; ++it) {
    double dg = 0.0;
    const double g = score(k, &dg);
    double next = k - g / dg;
    if (!(next > 0.0)) next = 0.5 * k;
    if (std::abs(next - k) <= 1e-12 * k) {
      k = next;
      break;
    }
    k = next;
  }
  double s0 = 0.0;
  for (double l : lx) s0 += std::exp(k * l);
  const double scale = top * std::pow(s0 / static_cast<double>(lx.size()), 1.0 / k);
  return {k, scale};
}

}  // namespace

DistributionFit fit_distribution(std::span<const double> samples, Family family) {
  if (samples.size() < 8) throw std::invalid_argument("distribution fit needs at least 8 samples");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("distribution samples must be finite");
  if (family != Family::kGaussian)
    for (double v : samples)
      if (!(v > 0.0))
        throw std::invalid_argument(std::string(family_name(family)) +
                                    " fit needs strictly positive samples");

  DistributionFit fit;
  fit.family = family;
  switch (family) {
    case Family::kLogNormal: {
      std::vector<double> l(samples.size());
      std::transform(samples.begin(), samples.end(), l.begin(),
                     [](double v) { return std::log10(v); });
      const double mu = mean(l);
      fit.params = {mu, population_std(l, mu)};
      break;
    }
    case Family::kGaussian: {
      const double mu = mean(samples);
      fit.params = {mu, population_std(samples, mu)};
      break;
    }
    case Family::kNakagami: {
      std::vector<double> sq(samples.size());
      std::transform(samples.begin(), samples.end(), sq.begin(), [](double v) { return v * v; });
      const double omega = mean(sq);
      const double var = std::pow(population_std(sq, omega), 2);
      const double m = var > 0.0 ? std::max(0.5, omega * omega / var) : 1e6;
      fit.params = {m, omega};
      break;
    }
    case Family::kRician: {
      double m2 = 0.0;
      double m4 = 0.0;
      for (double v : samples) {
        m2 += v * v;
        m4 += v * v * v * v;
      }
      m2 /= static_cast<double>(samples.size());
      m4 /= static_cast<double>(samples.size());
      // nu^4 = 2 E[x^2]^2 - E[x^4]; a negative estimate collapses to Rayleigh.
      const double nu4 = 2.0 * m2 * m2 - m4;
      const double nu2 = nu4 > 0.0 ? std::min(std::sqrt(nu4), m2) : 0.0;
      const double s2 = std::max((m2 - nu2) / 2.0, 1e-300);
      fit.params = {std::sqrt(nu2), std::sqrt(s2)};
      break;
    }
    case Family::kWeibull:
      fit.params = fit_weibull(samples);
      break;
  }
  if (!(fit.params[1] > 0.0)) throw std::invalid_argument("fitted scale parameter is degenerate");
  fit.ks_distance = ks_statistic(samples, [&](double x) { return fit.cdf(x); });
  return fit;
}

std::vector<DistributionFit> rank_distributions(std::span<const double> samples) {
  const bool positive = std::all_of(samples.begin(), samples.end(), [](double v) { return v > 0.0; });
  std::vector<DistributionFit> out;
  for (Family f : kAllFamilies) {
    if (f != Family::kGaussian && !positive) continue;
    out.push_back(fit_distribution(samples, f));
  }
  std::stable_sort(out.begin(), out.end(), [](const DistributionFit& a, const DistributionFit& b) {
    return a.ks_distance < b.ks_distance;
  });
  return out;
}

}  // namespace pdsage::stats
