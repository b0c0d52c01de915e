#include <doctest.h>

#include <cmath>
#include <vector>

#include "pdsage/channel_synth.hpp"
#include "pdsage/fft.hpp"
#include "pdsage/rng.hpp"
#include "test_support.hpp"

using namespace pdsage;

namespace {

SweepConfig small_sweep(std::size_t k = 64) {
  SweepConfig s;
  s.n_points = k;
  return s;
}

}  // namespace

TEST_CASE("steering vectors have unit norm for any angle") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.index(64);
    const double angle = rng.uniform(-kPi / 2, kPi / 2);
    const auto a = synth::steering_vector(n, 0.5e-3, 1.0e-3, angle);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("steering vector at broadside is constant") {
  const auto a = synth::steering_vector(8, 0.5e-3, 1.0e-3, 0.0);
  for (Eigen::Index m = 0; m < a.size(); ++m)
    CHECK(std::abs(a[m] - cd(1.0 / std::sqrt(8.0), 0.0)) < 1e-15);
}

TEST_CASE("sin grid spans [-1, 1) with step 2/D") {
  const auto g = synth::sin_grid(8);
  REQUIRE(g.size() == 8);
  CHECK(g.front() == doctest::Approx(-1.0));
  CHECK(g.back() == doctest::Approx(0.75));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == doctest::Approx(0.25));
}

TEST_CASE("delay phasor keeps precision for large arguments") {
  const double nu = 0.123456789;
  for (double k : {1.0, 1000.0, 5001.0}) {
    const cd ref = std::exp(cd(0.0, -2.0 * kPi * std::fmod(k * nu, 1.0)));
    CHECK(std::abs(synth::delay_phasor(k, nu) - ref) < 1e-12);
  }
}

TEST_CASE("phase drift equals a delay shift of slope / (2 pi delta_f)") {
  Rng rng(5);
  const auto sweep = small_sweep(128);
  const auto array = ArrayConfig::half_wavelength(4, 3, sweep.center_wavelength());
  for (int trial = 0; trial < 20; ++trial) {
    const PhaseDrift pd{deg_to_rad(rng.uniform(0.1, 5.0))};
    PathComponent p{rng.complex_normal(1.0), rng.uniform(1e-9, 50e-9), rng.uniform(-1.0, 1.0),
                    rng.uniform(-1.0, 1.0)};
    const std::vector<PathComponent> one{p};
    const auto drifted = synth::apply_phase_drift(synth::synthesize_cfr(one, array, sweep), pd);
    p.delay -= pd.delay_shift(sweep.delta_f);
    const std::vector<PathComponent> shifted{p};
    const auto reference = synth::synthesize_cfr(shifted, array, sweep);
    CHECK((drifted.data() - reference.data()).norm() < 1e-9 * reference.data().norm());
  }
}

TEST_CASE("synthesized CFR is linear in the paths") {
  Rng rng(6);
  const auto sweep = small_sweep(32);
  const auto array = ArrayConfig::half_wavelength(3, 2, sweep.center_wavelength());
  std::vector<PathComponent> paths;
  for (int i = 0; i < 4; ++i)
    paths.push_back({rng.complex_normal(1.0), rng.uniform(0.0, 80e-9), rng.uniform(-1.0, 1.0),
                     rng.uniform(-1.0, 1.0)});
  const auto all = synth::synthesize_cfr(paths, array, sweep);
  RowMatrixXcd sum = RowMatrixXcd::Zero(all.data().rows(), all.data().cols());
  for (const auto& p : paths) {
    const std::vector<PathComponent> one{p};
    sum += synth::synthesize_cfr(one, array, sweep).data();
  }
  CHECK((all.data() - sum).norm() < 1e-12 * sum.norm());
}

TEST_CASE("single path energy is K |gain|^2 with unit-norm steering") {
  const auto sweep = small_sweep(50);
  const auto array = ArrayConfig::half_wavelength(4, 4, sweep.center_wavelength());
  const std::vector<PathComponent> one{{cd(0.3, -0.4), 12e-9, 0.2, -0.3}};
  const auto h = synth::synthesize_cfr(one, array, sweep);
  CHECK(h.frobenius_norm_squared() == doctest::Approx(50 * 0.25).epsilon(1e-12));
}

TEST_CASE("AWGN has the requested per-entry variance and is seed-deterministic") {
  const auto sweep = small_sweep(2000);
  const auto array = ArrayConfig::half_wavelength(4, 4, sweep.center_wavelength());
  const CfrTensor zero(sweep, array);
  const double var = 2.5e-3;
  const auto a = synth::add_awgn(zero, var, 77);
  const auto b = synth::add_awgn(zero, var, 77);
  const auto c = synth::add_awgn(zero, var, 78);
  const double measured = a.frobenius_norm_squared() / static_cast<double>(a.data().size());
  CHECK(measured == doctest::Approx(var).epsilon(0.02));
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
}

TEST_CASE("transmit power scales the signal by its square root") {
  const auto sweep = small_sweep(16);
  const auto array = ArrayConfig::half_wavelength(2, 2, sweep.center_wavelength());
  const std::vector<PathComponent> one{{cd(1.0, 0.0), 5e-9, 0.0, 0.0}};
  const auto h = synth::synthesize_cfr(one, array, sweep);
  const auto y = synth::add_awgn(h, 0.0, 1, 4.0);
  CHECK((y.data() - 2.0 * h.data()).norm() < 1e-12);
}

TEST_CASE("calibration divides by the system response") {
  Rng rng(3);
  const auto h = testing::random_tensor(rng, 20, 2, 2);
  std::vector<cd> response(20);
  for (auto& r : response) r = rng.complex_normal(1.0) + cd(2.0, 0.0);
  CfrTensor raw = h;
  for (std::size_t n = 0; n < 20; ++n)
    raw.data().row(static_cast<Eigen::Index>(n)) *= response[n];
  const auto cal = synth::calibrate(raw, response);
  CHECK((cal.data() - h.data()).norm() < 1e-12 * h.data().norm());
  CHECK_THROWS_AS(synth::calibrate(raw, std::vector<cd>(19, cd(1.0, 0.0))), std::invalid_argument);
}

TEST_CASE("random scenarios are deterministic and respect the requested ranges") {
  const auto sweep = small_sweep(501);
  const auto array = ArrayConfig::half_wavelength(8, 8, sweep.center_wavelength());
  synth::ScenarioSpec spec;
  spec.l_paths = 5;
  const auto a = synth::random_scenario(spec, array, 99);
  const auto b = synth::random_scenario(spec, array, 99);
  REQUIRE(a.paths.size() == 5);
  CHECK(a.paths == b.paths);
  CHECK(a.drift.slope == b.drift.slope);
  CHECK(a.drift.slope >= spec.pd_range.first);
  CHECK(a.drift.slope <= spec.pd_range.second);
  for (const auto& p : a.paths) {
    CHECK(p.delay >= spec.distance_range.first / kSpeedOfLight - 1e-15);
    CHECK(p.delay <= spec.distance_range.second / kSpeedOfLight + 1e-15);
    CHECK(std::abs(p.aoa) <= kPi / 2);
    CHECK(std::abs(p.aod) <= kPi / 2);
  }
}

TEST_CASE("gain variance follows 1e-3 d^-2.2") {
  CHECK(synth::gain_variance(50.0) == doctest::Approx(1e-3 * std::pow(50.0, -2.2)));
}

TEST_CASE("inverse FFT is the 1/N-normalized inverse of the forward FFT") {
  Rng rng(8);
  std::vector<cd> x(37);
  for (auto& v : x) v = rng.complex_normal(1.0);
  const auto back = fft::inverse(fft::forward(x));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
  double ex = 0.0, ei = 0.0;
  const auto y = fft::inverse(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ex += std::norm(x[i]);
    ei += std::norm(y[i]);
  }
  CHECK(ex == doctest::Approx(37.0 * ei).epsilon(1e-12));
}

TEST_CASE("invalid geometry is rejected") {
  ArrayConfig bad;
  bad.n_tx = 0;
  CHECK_THROWS(bad.validate());
  SweepConfig s;
  s.delta_f = -1.0;
  CHECK_THROWS(s.validate());
}

TEST_CASE("phase drift preserves every snapshot norm and is undone by its negative") {
  Rng rng(9);
  const auto h = testing::random_tensor(rng, 80, 3, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const double phi = rng.uniform(-0.2, 0.2);
    const auto d = synth::apply_phase_drift(h, {phi});
    for (Eigen::Index n = 0; n < h.data().rows(); ++n)
      CHECK(d.data().row(n).norm() == doctest::Approx(h.data().row(n).norm()).epsilon(1e-12));
    const auto back = synth::apply_phase_drift(d, {-phi});
    CHECK((back.data() - h.data()).norm() <= 1e-12 * h.data().norm());
  }
}

TEST_CASE("noiseless single-path snapshots are rank one") {
  Rng rng(10);
  const auto sweep = small_sweep(20);
  const auto array = ArrayConfig::half_wavelength(6, 4, sweep.center_wavelength());
  const std::vector<PathComponent> one{{rng.complex_normal(1.0), 7e-9, 0.4, -0.7}};
  const auto h = synth::synthesize_cfr(one, array, sweep);
  for (std::size_t n = 0; n < 20; ++n) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h.snapshot(n));
    const auto s = svd.singularValues();
    CHECK(s[1] / s[0] < 1e-10);
  }
}

TEST_CASE("IFFT peak of a drifted single path sits at the effective-delay bin") {
  Rng rng(12);
  const auto sweep = small_sweep(256);
  const auto array = ArrayConfig::half_wavelength(1, 1, sweep.center_wavelength());
  for (int trial = 0; trial < 30; ++trial) {
    const double tau = rng.uniform(20.0, 200.0) * sweep.delay_bin();
    const PhaseDrift pd{deg_to_rad(rng.uniform(0.0, 5.0))};
    const std::vector<PathComponent> one{{cd(1.0, 0.0), tau, 0.0, 0.0}};
    const auto h = synth::apply_phase_drift(synth::synthesize_cfr(one, array, sweep), pd);
    std::vector<cd> column(256);
    for (std::size_t n = 0; n < 256; ++n) column[n] = h(n, 0, 0);
    const auto cir = fft::inverse(column);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < cir.size(); ++i)
      if (std::abs(cir[i]) > std::abs(cir[peak])) peak = i;
    const double eff = (tau - pd.delay_shift(sweep.delta_f)) / sweep.delay_bin();
    CHECK(peak == static_cast<std::size_t>(std::lround(eff)));
  }
}

TEST_CASE("on-grid half-wavelength steering vectors are orthonormal") {
  const double lambda = 1.0e-3;
  const auto grid = synth::sin_grid(64);
  Eigen::MatrixXcd a(64, 64);
  for (std::size_t i = 0; i < 64; ++i)
    a.col(static_cast<Eigen::Index>(i)) = synth::steering_vector_sin(64, lambda / 2, lambda, grid[i]);
  const Eigen::MatrixXcd gram = a.adjoint() * a;
  CHECK((gram - Eigen::MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scenario examples: gain variance at 50 m and the 5-15 m delay window") {
  CHECK(synth::gain_variance(50.0) == doctest::Approx(1.836e-7).epsilon(1e-3));
  CHECK(5.0 / kSpeedOfLight == doctest::Approx(16.68e-9).epsilon(1e-3));
  CHECK(15.0 / kSpeedOfLight == doctest::Approx(50.03e-9).epsilon(1e-3));
}
