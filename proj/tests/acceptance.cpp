// Acceptance checks. One PASS/FAIL line per criterion; tolerances are fixed
// here and never relaxed to make a criterion pass.
//
//   acceptance            run all criteria
//   acceptance N [M ...]  run the listed criteria

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pdsage/channel_stats.hpp"
#include "pdsage/channel_synth.hpp"
#include "pdsage/distribution_fit.hpp"
#include "pdsage/experiment.hpp"
#include "pdsage/measured_reference.hpp"
#include "pdsage/near_field.hpp"
#include "pdsage/pd_sage.hpp"
#include "pdsage/report.hpp"
#include "pdsage/rng.hpp"
#include "test_support.hpp"

namespace {

using namespace pdsage;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// 1. NMSE-vs-power sweep at desk scale.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<io::TrialRecord> records;
  for (auto cfg : io::preset("fig3a-desk")) {
    cfg.seed = 20240601;
    auto r = io::run_experiment(cfg);
    records.insert(records.end(), r.begin(), r.end());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ordered = true;
  bool gap_ok = true;
  std::ostringstream detail;
  for (const auto& s : io::summarize(records)) {
    const double gap_db = linear_to_db(s.mean_nmse_unaware / s.mean_nmse_aware);
    if (!(s.mean_nmse_aware <= s.mean_nmse_unaware)) ordered = false;
    std::printf("  %-10s p=%6.1f dBm  aware=%.4e  unaware=%.4e  gap=%6.2f dB\n",
                s.scenario.c_str(), s.p_dbm, s.mean_nmse_aware, s.mean_nmse_unaware, gap_db);
    if (s.p_dbm == 20.0 && s.scenario.find("phi4") != std::string::npos && !(gap_db >= 3.0)) {
      gap_ok = false;
      detail << s.scenario << " gap " << fmt("%.2f", gap_db) << " dB < 3 dB; ";
    }
  }
  // Limit is for a 4-core desktop; this run uses however many cores exist.
  const bool fast = seconds < 600.0;
  detail << "aware<=unaware at every p: " << (ordered ? "yes" : "no")
         << "; runtime " << fmt("%.1f", seconds) << " s on "
         << std::max(1u, std::thread::hardware_concurrency()) << " core(s)";
  return {ordered && gap_ok && fast, detail.str()};
}

// 2. Delay bias of the drift-unaware estimator and drift recovery of the aware one.
Outcome criterion2() {
  SweepConfig sweep;
  sweep.n_points = 501;
  const auto array = ArrayConfig::half_wavelength(8, 8, sweep.center_wavelength());
  const auto cfg = sage::SageConfig::defaults(array, sweep, 1);
  const double half_step = 0.5 * cfg.refine_step();
  const double pd_step = cfg.pd_grid.step();

  const double bias_1deg = PhaseDrift{deg_to_rad(1.0)}.delay_shift(sweep.delta_f);
  bool unaware_ok = std::abs(bias_1deg - 0.4630e-9) < 0.00005e-9;
  bool aware_ok = true;
  std::ostringstream detail;
  detail << "bias(1 deg)=" << fmt("%.4f", bias_1deg * 1e9) << " ns; ";

  PathComponent path;
  path.gain = {1.0, 0.0};
  path.delay = 10.0 / kSpeedOfLight;
  path.aoa = std::asin(synth::sin_grid(8)[5]);
  path.aod = std::asin(synth::sin_grid(8)[2]);
  const std::vector<PathComponent> paths{path};
  for (double phi_deg : {0.4, 1.0, 2.0, 5.0}) {
    const PhaseDrift drift{deg_to_rad(phi_deg)};
    const auto y = synth::apply_phase_drift(synth::synthesize_cfr(paths, array, sweep), drift);
    const auto un = sage::run_pd_sage(y, cfg, false);
    const auto aw = sage::run_pd_sage(y, cfg, true);
    const double expect = path.delay - drift.delay_shift(sweep.delta_f);
    const double un_err = std::abs(un.paths[0].delay - expect);
    const double aw_err = std::abs(aw.paths[0].delay - path.delay);
    const double pd_err = std::abs(aw.path_pd[0] - drift.slope);
    const bool u = un_err <= half_step * (1 + 1e-9);
    const bool a = aw_err <= half_step * (1 + 1e-9) && pd_err <= pd_step * (1 + 1e-9);
    unaware_ok = unaware_ok && u;
    aware_ok = aware_ok && a;
    std::printf("  phi=%.1f deg  unaware |err|=%.2f ps (%s)  aware |dtau|=%.2f ps |dphi|=%.4f deg (%s)\n",
                phi_deg, un_err * 1e12, u ? "ok" : "bad", aw_err * 1e12, rad_to_deg(pd_err),
                a ? "ok" : "bad");
  }
  detail << "half refined step " << fmt("%.2f", half_step * 1e12) << " ps, PD step "
         << fmt("%.4f", rad_to_deg(pd_step)) << " deg; unaware " << (unaware_ok ? "ok" : "FAIL")
         << ", aware " << (aware_ok ? "ok" : "FAIL");
  return {unaware_ok && aware_ok, detail.str()};
}

// 3. With no drift, both pipelines return the same paths.
Outcome criterion3() {
  SweepConfig sweep;
  sweep.n_points = 501;
  const auto array = ArrayConfig::half_wavelength(8, 8, sweep.center_wavelength());
  const auto cfg = sage::SageConfig::defaults(array, sweep, 3);
  std::size_t identical = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    synth::ScenarioSpec spec;
    spec.l_paths = 3;
    spec.pd_range = {0.0, 0.0};
    const auto scene = synth::random_scenario(spec, array, derive_seed(303, s, 0));
    const auto y = synth::synthesize_cfr(scene.paths, array, sweep);
    const auto aw = sage::run_pd_sage(y, cfg, true);
    const auto un = sage::run_pd_sage(y, cfg, false);
    const bool same = aw.paths == un.paths;
    identical += same ? 1 : 0;
    if (!same) {
      double worst = 0.0;
      for (std::size_t l = 0; l < aw.paths.size(); ++l)
        worst = std::max(worst, std::abs(aw.paths[l].delay - un.paths[l].delay));
      std::printf("  scene %llu differs: max |delay diff| %.2f ps, aware phi %.4f deg\n",
                  static_cast<unsigned long long>(s), worst * 1e12,
                  rad_to_deg(aw.pd_hat.slope));
    }
  }
  return {identical == 10, std::to_string(identical) + "/10 scenes identical"};
}

// 4. APDP energy matches the CFR energy.
Outcome criterion4() {
  Rng rng(404);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = 16 + rng.index(300);
    const auto t = testing::random_tensor(rng, k, 1 + rng.index(4), 1 + rng.index(4));
    const double expect =
        t.frobenius_norm_squared() / static_cast<double>(t.n_freq() * t.n_pairs());
    auto rel = [&](const std::vector<double>& apdp) {
      return std::abs(std::accumulate(apdp.begin(), apdp.end(), 0.0) - expect) / expect;
    };
    worst = std::max({worst, rel(sage::cir_from_cfr(t).apdp), rel(sage::per_path_apdp(t)),
                      rel(sage::DelayObservation(t).apdp())});
  }
  return {worst <= 1e-10, fmt("max relative error %.3e over 100 tensors", worst)};
}

// 5. Statistics oracles.
Outcome criterion5() {
  const double tol = 1e-9;
  std::vector<PathComponent> two(2);
  two[0].gain = two[1].gain = {1.0, 0.0};
  two[0].delay = 0.0;
  two[1].delay = 2e-9;
  const double ds = stats::rms_delay_spread(two);
  two[0].aod = deg_to_rad(-10.0);
  two[1].aod = deg_to_rad(10.0);
  const double as = stats::rms_angular_spread(two, stats::AngleSide::kAod);
  const std::vector<double> apdp{0.9, 0.1};
  const double k = stats::rician_k(apdp, 1);
  const double k_db = linear_to_db(k);

  Rng rng(505);
  double worst_rho = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::vector<cd> x(64);
    for (auto& v : x) v = rng.complex_normal(1.0);
    const cd rot = std::polar(1.0, rng.uniform(-kPi, kPi));
    std::vector<cd> y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = rot * x[j];
    worst_rho = std::max(worst_rho, std::abs(stats::cir_correlation(x, y) - 1.0));
  }
  const bool ok = std::abs(ds - 1e-9) <= tol * 1e-9 && std::abs(as - deg_to_rad(10.0)) <= tol &&
                  std::abs(k - 9.0) <= tol && std::abs(k_db - 9.54) < 0.005 && worst_rho <= tol;
  std::ostringstream d;
  d << "DS=" << fmt("%.12f", ds * 1e9) << " ns, AS=" << fmt("%.12f", rad_to_deg(as))
    << " deg, K=" << fmt("%.12f", k) << " (" << fmt("%.4f", k_db) << " dB), max|rho-1|="
    << fmt("%.2e", worst_rho);
  return {ok, d.str()};
}

// 6. Path-loss regression recovery.
Outcome criterion6() {
  const double f_c = 345e9;
  const double n_true = 2.443;
  double n_sum = 0.0;
  double s_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(606, seed, 0));
    std::vector<stats::PathLossSample> samples(200);
    for (auto& s : samples) {
      s.d_tr = rng.uniform(5.0, 50.0);
      s.pl = stats::fspl(f_c, 1.0) + 10.0 * n_true * std::log10(s.d_tr) + 3.0 * rng.normal();
    }
    const auto fit = stats::fit_path_loss(samples, stats::PathLossKind::kCloseIn, f_c);
    n_sum += fit.model.exponent_or_slope;
    s_sum += fit.model.sf_sigma;
  }
  const double n_hat = n_sum / 50.0;
  const double s_hat = s_sum / 50.0;

  std::vector<stats::PathLossSample> fi(40);
  for (std::size_t i = 0; i < fi.size(); ++i) {
    fi[i].d_tr = 5.0 + static_cast<double>(i);
    fi[i].pl = 10.0 * 3.905 * std::log10(fi[i].d_tr) + 65.810;
  }
  const auto fit = stats::fit_path_loss(fi, stats::PathLossKind::kFloatingIntercept, f_c);
  const double da = std::abs(fit.model.exponent_or_slope - 3.905);
  const double db = std::abs(fit.model.intercept - 65.810);
  const bool ok = std::abs(n_hat - n_true) <= 0.1 && std::abs(s_hat - 3.0) <= 0.4 && da <= 1e-6 &&
                  db <= 1e-6;
  return {ok, fmt("CI mean n=%.4f sigma=%.4f dB; ", n_hat, s_hat) +
                  fmt("FI |dalpha|=%.1e |dbeta|=%.1e", da, db)};
}

// 7. Rayleigh distance of the 128-element array.
Outcome criterion7() {
  const auto array = ArrayConfig::half_wavelength(128, 4, kSpeedOfLight / 345e9);
  const double r = stats::rayleigh_distance(array);
  return {std::abs(r - 7.013) <= 0.005, fmt("%.4f m (target 7.013 +- 0.005)", r)};
}

// 8. KS-based family selection.
Outcome criterion8() {
  struct Gen {
    stats::Family family;
    std::function<double(Rng&)> draw;
  };
  // LN and Nakagami use the campaign's fitted KF and AS parameters; the other
  // three have no campaign fit and use fixed moderate-shape regimes.
  const std::vector<Gen> gens{
      {stats::Family::kLogNormal, [](Rng& r) { return testing::lognormal10_sample(r, 1.448, 0.449); }},
      {stats::Family::kGaussian, [](Rng& r) { return 10.0 + 2.0 * r.normal(); }},
      {stats::Family::kNakagami, [](Rng& r) { return testing::nakagami_sample(r, 1.362, 15.913); }},
      {stats::Family::kRician, [](Rng& r) { return testing::rician_sample(r, 2.0, 1.0); }},
      {stats::Family::kWeibull, [](Rng& r) { return testing::weibull_sample(r, 0.8, 2.0); }},
  };
  bool ok = true;
  std::ostringstream d;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    std::size_t wins = 0;
    for (std::uint64_t ds = 0; ds < 100; ++ds) {
      Rng rng(derive_seed(808, g, ds));
      std::vector<double> x(512);
      for (auto& v : x) v = gens[g].draw(rng);
      const auto ranking = stats::rank_distributions(x);
      if (ranking.front().family == gens[g].family) ++wins;
    }
    ok = ok && wins >= 85;
    d << stats::family_name(gens[g].family) << " " << wins << "% ";
  }
  return {ok, d.str() + "(need >= 85% each)"};
}

// 9. Spherical vs plane wave phase residual.
Outcome criterion9() {
  const double lambda = kSpeedOfLight / 345e9;
  const auto tx = stats::ula_positions(128, lambda / 2.0);
  const double center = 0.5 * 127.0 * lambda / 2.0;
  auto residual = [&](double range) {
    const Eigen::Vector2d rx{center, range};
    const auto swm = stats::predict_phase(stats::WaveModel::kSpherical, tx, rx, lambda);
    const auto pwm = stats::predict_phase(stats::WaveModel::kPlane, tx, rx, lambda);
    return stats::phase_residual_rms(swm.unwrapped, pwm.unwrapped);
  };
  const double near = residual(5.0);
  const double far = residual(70.0);
  return {near > 1.0 && far < 0.05,
          fmt("RMS residual %.4f rad at 5 m (need > 1), %.4f rad at 70 m (need < 0.05)", near,
              far)};
}

// 10. Measured-campaign values are documentation constants and format fixtures only.
Outcome criterion10() {
  io::TrialRecord r;
  r.scenario = "measured_fixture";
  r.nmse_aware = reference::kMeasuredNmseAware;
  r.nmse_unaware = reference::kMeasuredNmseUnaware;
  const std::vector<io::TrialRecord> recs{r};
  std::stringstream csv;
  io::write_csv(csv, recs);
  std::stringstream json;
  io::write_json(json, recs);
  const auto back_csv = io::read_csv(csv);
  const auto back_json = io::read_json(json);
  const bool ok = back_csv.size() == 1 && back_json.size() == 1 && back_csv[0] == r &&
                  back_json[0] == r;
  return {ok, "reference NMSE values survive CSV/JSON round trip; no computed output is compared "
              "against campaign values"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> all{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.push_back(std::atoi(argv[i]));
  if (chosen.empty())
    for (const auto& [id, fn] : all) chosen.push_back(id);

  bool all_pass = true;
  for (int id : chosen) {
    const auto it = all.find(id);
    if (it == all.end()) {
      std::printf("CRITERION %d: FAIL - unknown criterion\n", id);
      all_pass = false;
      continue;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("CRITERION %d: %s - %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
