#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace pdsage::stats {

enum class Family { kLogNormal, kGaussian, kNakagami, kRician, kWeibull };

inline constexpr std::array<Family, 5> kAllFamilies{Family::kLogNormal, Family::kGaussian,
                                                    Family::kNakagami, Family::kRician,
                                                    Family::kWeibull};

std::string_view family_name(Family f);

/// Parameter pairs:
///   LN        (mu, sigma) of log10(x)
///   Gaussian  (mu, sigma)
///   Nakagami  (m, omega)
///   Rician    (nu, sigma)
///   Weibull   (shape, scale)
struct DistributionFit {
  Family family = Family::kGaussian;
  std::array<double, 2> params{0.0, 1.0};
  double ks_distance = 1.0;

  double cdf(double x) const;
};

/// sup_x |F_n(x) - F(x)| for a continuous F.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS distance between empirical CDFs.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Nakagami by moments (m >= 0.5), Rician by second/fourth moments, Weibull by
/// maximum likelihood, LN and Gaussian by maximum likelihood.
DistributionFit fit_distribution(std::span<const double> samples, Family family);

/// Fits every family whose support admits the samples, sorted by KS distance.
std::vector<DistributionFit> rank_distributions(std::span<const double> samples);

}  // namespace pdsage::stats
