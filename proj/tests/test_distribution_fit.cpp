#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pdsage/distribution_fit.hpp"
#include "pdsage/rng.hpp"
#include "test_support.hpp"

using namespace pdsage;
using namespace pdsage::stats;

TEST_CASE("LN parameters are recovered from 1e5 samples and LN ranks first") {
  Rng rng(50);
  std::vector<double> x(100000);
  for (auto& v : x) v = testing::lognormal10_sample(rng, -0.348, 0.197);
  const auto fit = fit_distribution(x, Family::kLogNormal);
  CHECK(std::abs(fit.params[0] - (-0.348)) < 0.01);
  CHECK(std::abs(fit.params[1] - 0.197) < 0.01);
  CHECK(rank_distributions(x).front().family == Family::kLogNormal);
}

TEST_CASE("KS of a sample against its own empirical CDF is zero") {
  Rng rng(51);
  std::vector<double> x(500);
  for (auto& v : x) v = rng.normal();
  CHECK(ks_two_sample(x, x) == 0.0);
}

TEST_CASE("KS statistic against a step at the sample points") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  // Uniform(0, 4): F(i) = i/4 matches the empirical CDF after each jump.
  CHECK(ks_statistic(x, [](double v) { return std::clamp(v / 4.0, 0.0, 1.0); }) ==
        doctest::Approx(0.25));
}

TEST_CASE("fitted KS against the generating samples vanishes for large n") {
  // 99% of seeded trials at n = 1e5 must stay below 0.01.
  Rng rng(52);
  int below = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(100000);
    const auto fam = kAllFamilies[static_cast<std::size_t>(t) % kAllFamilies.size()];
    for (auto& v : x) {
      switch (fam) {
        case Family::kLogNormal: v = testing::lognormal10_sample(rng, 1.448, 0.449); break;
        case Family::kGaussian: v = 10.0 + 2.0 * rng.normal(); break;
        case Family::kNakagami: v = testing::nakagami_sample(rng, 1.362, 15.913); break;
        case Family::kRician: v = testing::rician_sample(rng, 2.0, 1.0); break;
        case Family::kWeibull: v = testing::weibull_sample(rng, 0.8, 2.0); break;
      }
    }
    if (fit_distribution(x, fam).ks_distance < 0.01) ++below;
  }
  CHECK(below >= 99);
}

TEST_CASE("fits stay inside their parameter domains") {
  Rng rng(53);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(8 + rng.index(500));
    for (auto& v : x) v = rng.uniform(0.01, 5.0);
    for (auto fam : kAllFamilies) {
      const auto fit = fit_distribution(x, fam);
      CHECK(fit.ks_distance >= 0.0);
      CHECK(fit.ks_distance <= 1.0);
      CHECK(fit.params[1] > 0.0);
      if (fam == Family::kNakagami) CHECK(fit.params[0] >= 0.5);
      if (fam == Family::kRician) CHECK(fit.params[0] >= 0.0);
      if (fam == Family::kWeibull) CHECK(fit.params[0] > 0.0);
    }
  }
}

TEST_CASE("Nakagami moment fit recovers the reference AS parameters") {
  Rng rng(54);
  std::vector<double> x(200000);
  for (auto& v : x) v = testing::nakagami_sample(rng, 1.362, 15.913);
  const auto fit = fit_distribution(x, Family::kNakagami);
  CHECK(fit.params[0] == doctest::Approx(1.362).epsilon(0.03));
  CHECK(fit.params[1] == doctest::Approx(15.913).epsilon(0.01));
}

TEST_CASE("Weibull and Rician fits recover their generators") {
  Rng rng(55);
  std::vector<double> w(100000), r(100000);
  for (auto& v : w) v = testing::weibull_sample(rng, 1.7, 3.0);
  for (auto& v : r) v = testing::rician_sample(rng, 3.0, 1.0);
  const auto fw = fit_distribution(w, Family::kWeibull);
  CHECK(fw.params[0] == doctest::Approx(1.7).epsilon(0.02));
  CHECK(fw.params[1] == doctest::Approx(3.0).epsilon(0.02));
  const auto fr = fit_distribution(r, Family::kRician);
  CHECK(fr.params[0] == doctest::Approx(3.0).epsilon(0.03));
  CHECK(fr.params[1] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("domain violations and tiny samples are rejected") {
  std::vector<double> x{1.0, 2.0, -0.5, 3.0, 4.0, 5.0, 6.0, 7.0};
  CHECK_THROWS_AS(fit_distribution(x, Family::kLogNormal), std::invalid_argument);
  CHECK_THROWS_AS(fit_distribution(x, Family::kWeibull), std::invalid_argument);
  CHECK_NOTHROW(fit_distribution(x, Family::kGaussian));
  const auto ranked = rank_distributions(x);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].family == Family::kGaussian);
  const std::vector<double> few{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(fit_distribution(few, Family::kGaussian), std::invalid_argument);
}

TEST_CASE("ranking is sorted by KS distance") {
  Rng rng(56);
  std::vector<double> x(512);
  for (auto& v : x) v = testing::weibull_sample(rng, 0.8, 2.0);
  const auto ranked = rank_distributions(x);
  CHECK(ranked.size() == kAllFamilies.size());
  for (std::size_t i = 1; i < ranked.size(); ++i)
    CHECK(ranked[i - 1].ks_distance <= ranked[i].ks_distance);
}
