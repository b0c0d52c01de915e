#include <doctest.h>

#include <cmath>
#include <vector>

#include "pdsage/near_field.hpp"
#include "pdsage/types.hpp"

using namespace pdsage;
using namespace pdsage::stats;

namespace {

const double kLambda345 = kSpeedOfLight / 345e9;

}  // namespace

TEST_CASE("Rayleigh distance examples") {
  CHECK(rayleigh_distance(ArrayConfig::half_wavelength(128, 1, kLambda345)) ==
        doctest::Approx(7.013).epsilon(0.005 / 7.013));
  CHECK(rayleigh_distance(ArrayConfig::half_wavelength(2, 1, kLambda345)) ==
        doctest::Approx(kLambda345 / 2));
  CHECK(rayleigh_distance(ArrayConfig::half_wavelength(64, 1, 0.8696e-3)) ==
        doctest::Approx(1.726).epsilon(1e-3));
  CHECK_THROWS_AS(rayleigh_distance(ArrayConfig::half_wavelength(1, 1, kLambda345)),
                  std::invalid_argument);
}

TEST_CASE("on the array axis the spherical phase steps by k times the spacing") {
  const double spacing = kLambda345 / 2;
  const auto tx = ula_positions(16, spacing);
  const Eigen::Vector2d rx(-3.0, 0.0);
  const auto sw = predict_phase(WaveModel::kSpherical, tx, rx, kLambda345);
  for (std::size_t n = 1; n < tx.size(); ++n)
    CHECK(sw.unwrapped[n] - sw.unwrapped[n - 1] ==
          doctest::Approx(2 * kPi / kLambda345 * spacing).epsilon(1e-6));
}

TEST_CASE("far-field spherical and plane phases agree") {
  const std::size_t n = 128;
  const auto tx = ula_positions(n, kLambda345 / 2);
  const double rd = rayleigh_distance(ArrayConfig::half_wavelength(n, 1, kLambda345));
  const double cx = 0.5 * (n - 1) * kLambda345 / 2;
  const Eigen::Vector2d rx(cx, 100.0 * rd);
  const auto sw = predict_phase(WaveModel::kSpherical, tx, rx, kLambda345);
  const auto pw = predict_phase(WaveModel::kPlane, tx, rx, kLambda345);
  CHECK(phase_residual_rms(sw.unwrapped, pw.unwrapped) < 0.01);
}

TEST_CASE("near-field residual grows quadratically toward the array edges") {
  const std::size_t n = 128;
  const auto tx = ula_positions(n, kLambda345 / 2);
  const double cx = 0.5 * (n - 1) * kLambda345 / 2;
  const Eigen::Vector2d rx(cx, 1.0);
  const auto sw = predict_phase(WaveModel::kSpherical, tx, rx, kLambda345);
  const auto pw = predict_phase(WaveModel::kPlane, tx, rx, kLambda345);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = sw.unwrapped[i] - pw.unwrapped[i];
  // Symmetric bowl: the ends match each other and the centre sits below them.
  CHECK(diff.front() == doctest::Approx(diff.back()).epsilon(1e-6).scale(1.0));
  CHECK(std::abs(diff[n / 2] - diff.front()) > 1.0);
}

TEST_CASE("residual shrinks with distance") {
  const std::size_t n = 128;
  const auto tx = ula_positions(n, kLambda345 / 2);
  const double cx = 0.5 * (n - 1) * kLambda345 / 2;
  double prev = 1e9;
  for (double d : {2.0, 5.0, 10.0, 20.0, 70.0}) {
    const Eigen::Vector2d rx(cx, d);
    const auto sw = predict_phase(WaveModel::kSpherical, tx, rx, kLambda345);
    const auto pw = predict_phase(WaveModel::kPlane, tx, rx, kLambda345);
    const double r = phase_residual_rms(sw.unwrapped, pw.unwrapped);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("wrapped phases lie in (-pi, pi] and match the unwrapped ones modulo 2 pi") {
  const auto tx = ula_positions(32, kLambda345 / 2);
  const Eigen::Vector2d rx(0.3, 0.4);
  const auto sw = predict_phase(WaveModel::kSpherical, tx, rx, kLambda345);
  for (std::size_t i = 0; i < sw.wrapped.size(); ++i) {
    CHECK(sw.wrapped[i] > -kPi);
    CHECK(sw.wrapped[i] <= kPi);
    const double k = (sw.unwrapped[i] - sw.wrapped[i]) / (2 * kPi);
    CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("coincident positions are rejected") {
  const auto tx = ula_positions(4, 0.001);
  CHECK_THROWS_AS(predict_phase(WaveModel::kSpherical, tx, tx[2], kLambda345), std::invalid_argument);
  CHECK_THROWS_AS(phase_residual_rms(std::vector<double>{1.0}, std::vector<double>{}),
                  std::invalid_argument);
}
