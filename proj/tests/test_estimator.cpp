#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qcs/estimator.hpp"
#include "qcs/protocol.hpp"

using namespace qcs;

namespace {

CountDistribution make_exact(std::initializer_list<double> probs) {
  Eigen::VectorXd p(static_cast<int>(probs.size()));
  int i = 0;
  for (double v : probs) p(i++) = v;
  return exact_distribution(p);
}

// Exact output distribution of the squeezed-vacuum interference experiment.
CountDistribution sv_distribution(double r, double eta) {
  const ExperimentResult res =
      run_circuit(build_sv_experiment(r, 0.0, eta), Engine::Gaussian);
  return res.exact_distribution;
}

}  // namespace

TEST_CASE("estimator on point masses") {
  const QcsEstimate vac = qcs_from_distribution(make_exact({1.0}));
  CHECK(vac.qcs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(vac.purity == doctest::Approx(1.0).epsilon(1e-14));

  // A pure number state |n> gives 2n + 1.
  const QcsEstimate two = qcs_from_distribution(make_exact({0.0, 0.0, 1.0}));
  CHECK(two.qcs == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("estimator can report diagnostic values outside [0, W]") {
  const QcsEstimate est = qcs_from_distribution(make_exact({0.6, 0.4}));
  CHECK(est.purity == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(est.qcs == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("estimator matches the closed form on an exact experiment output") {
  const double r = 0.653, eta = 0.2010;
  const QcsEstimate est = qcs_from_distribution(sv_distribution(r, eta));
  CHECK(est.qcs == doctest::Approx(oracles::squeezed_lossy_reference(r, eta)).epsilon(1e-8));
}

TEST_CASE("conditioning floor: balanced parity is rejected with diagnostics") {
  const CountDistribution bad = make_exact({0.5, 0.5});
  CHECK_THROWS_AS(qcs_from_distribution(bad), ConditioningError);
  try {
    qcs_from_distribution(bad);
  } catch (const ConditioningError& e) {
    CHECK(std::abs(e.parity) < 1e-10);
  }
  // An explicit floor overrides the provenance-based default both ways.
  const CountDistribution close = make_exact({0.50005, 0.49995});  // parity 1e-4
  CHECK_NOTHROW(qcs_from_distribution(close));  // exact default floor is 1e-10
  CHECK_THROWS_AS(qcs_from_distribution(close, 1e-3), ConditioningError);
}

TEST_CASE("variance: closed form, N scaling and preconditions") {
  CountDistribution d = sv_distribution(0.653, 0.2010);
  d.n_trials = 1000001;
  const QcsEstimate est = qcs_from_distribution(d);
  // Hand-evaluated multinomial formula.
  double s = 0.0;
  for (int n = 0; n < d.probs.size(); ++n) {
    const double dev = 2.0 * n + 1.0 - est.qcs;
    s += d.probs(n) * dev * dev;
  }
  const double expected = s / (est.purity * est.purity * (d.n_trials - 1));
  CHECK(qcs_variance(d, est.qcs, est.purity) == doctest::Approx(expected).epsilon(1e-12));

  // Var scales as 1/(N-1).
  CountDistribution d2 = d;
  d2.n_trials = 2 * (d.n_trials - 1) + 1;
  CHECK(qcs_variance(d2, est.qcs, est.purity) ==
        doctest::Approx(0.5 * qcs_variance(d, est.qcs, est.purity)).epsilon(1e-12));

  CountDistribution few = d;
  few.n_trials = 1;
  CHECK_THROWS_AS(qcs_variance(few, est.qcs, est.purity), std::invalid_argument);
}

TEST_CASE("multinomial variance predicts the observed scatter over seeds") {
  const CountDistribution exact = sv_distribution(0.653, 0.2010);
  const std::int64_t n_trials = 100000;
  std::vector<double> estimates;
  double predicted = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const QcsEstimate est =
        qcs_from_distribution(sample_counts(exact, n_trials, seed));
    estimates.push_back(est.qcs);
    predicted += std::sqrt(est.variance);
  }
  predicted /= estimates.size();
  double mean = 0.0;
  for (double q : estimates) mean += q;
  mean /= estimates.size();
  double var = 0.0;
  for (double q : estimates) var += (q - mean) * (q - mean);
  const double empirical = std::sqrt(var / (estimates.size() - 1));
  CHECK(empirical > 0.5 * predicted);
  CHECK(empirical < 2.0 * predicted);
}

TEST_CASE("parity reduction residual vanishes at the estimator's value") {
  const CountDistribution d = sv_distribution(0.978, 0.1901);
  const QcsEstimate est = qcs_from_distribution(d);
  CHECK(std::abs(parity_reduction_residual(d, est.qcs)) < 1e-12);
  CHECK(std::abs(parity_reduction_residual(d, est.qcs + 0.1)) > 1e-3);
}

TEST_CASE("sampling is deterministic and conserves trials") {
  const CountDistribution exact = sv_distribution(0.653, 0.2010);
  const CountDistribution a = sample_counts(exact, 20000, 42);
  const CountDistribution b = sample_counts(exact, 20000, 42);
  REQUIRE(a.counts.size() == b.counts.size());
  for (std::size_t n = 0; n < a.counts.size(); ++n) CHECK(a.counts[n] == b.counts[n]);
  std::int64_t total = 0;
  for (auto c : a.counts) total += c;
  CHECK(total == 20000);
  CHECK(a.provenance == Provenance::Sampled);

  // A different seed gives a different draw.
  const CountDistribution c = sample_counts(exact, 20000, 43);
  bool any_diff = false;
  for (std::size_t n = 0; n < a.counts.size(); ++n)
    any_diff = any_diff || a.counts[n] != c.counts[n];
  CHECK(any_diff);

  // Point mass input puts every trial in one bin.
  const CountDistribution delta = sample_counts(make_exact({1.0, 0.0}), 500, 7);
  CHECK(delta.counts[0] == 500);

  CHECK_THROWS_AS(sample_counts(exact, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_counts(a, 10, 1), std::invalid_argument);  // already sampled
}

TEST_CASE("sampled estimates converge to the exact value") {
  const CountDistribution exact = sv_distribution(0.978, 0.1901);
  const double truth = qcs_from_distribution(exact).qcs;
  const double err_small =
      std::abs(qcs_from_distribution(sample_counts(exact, 2000, 5)).qcs - truth);
  const double err_large =
      std::abs(qcs_from_distribution(sample_counts(exact, 2000000, 5)).qcs - truth);
  CHECK(err_large < err_small);
  CHECK(err_large < 5e-3);
}

TEST_CASE("eta_from_energy inverts the energy relation") {
  const double r = 0.653, eta = 0.2010;
  const ExperimentResult res =
      run_circuit(build_sv_experiment(r, 0.0, eta), Engine::Gaussian);
  const EtaEstimate est = eta_from_energy(res.mean_photon_out, r);
  CHECK(est.value == doctest::Approx(eta).epsilon(1e-8));
  CHECK_FALSE(est.exceeds_unity);

  CHECK(eta_from_energy(0.0, 1.0).value == doctest::Approx(0.0));
  CHECK(eta_from_energy(2.0 * std::sinh(1.0) * std::sinh(1.0), 1.0).exceeds_unity);
  CHECK_THROWS_AS(eta_from_energy(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("truncated detector study") {
  // Distributions supported below the truncation are unchanged.
  const CountDistribution small = make_exact({0.7, 0.0, 0.3});
  const QcsEstimate full = qcs_from_distribution(small);
  const QcsEstimate cut = truncated_estimate(small, 4);
  CHECK(cut.qcs == doctest::Approx(full.qcs).epsilon(1e-14));

  // For the interference experiments, counting only n <= 4 shifts the
  // estimate by well under five percent.
  for (auto cfg : {std::pair{0.653, 0.2010}, std::pair{1.156, 0.183}}) {
    const CountDistribution d = sv_distribution(cfg.first, cfg.second);
    const double exact_qcs = qcs_from_distribution(d).qcs;
    const double trunc_qcs = truncated_estimate(d, 4).qcs;
    CHECK(std::abs(trunc_qcs - exact_qcs) / exact_qcs < 0.05);
  }

  // Without renormalization the parity (purity) shrinks by the lost mass.
  const CountDistribution d = sv_distribution(1.156, 0.183);
  const QcsEstimate raw = truncated_estimate(d, 4, false);
  const QcsEstimate ren = truncated_estimate(d, 4, true);
  CHECK(raw.purity < ren.purity);

  CHECK_THROWS_AS(truncated_estimate(small, 0), std::invalid_argument);
}

TEST_CASE("theory error band: zero at agreement, hand value for a perturbation") {
  const CountDistribution theory = sv_distribution(0.653, 0.2010);
  CHECK(theory_error_band(theory, theory) == doctest::Approx(0.0));

  // Perturb the first two bins by +/- eps and propagate by hand.
  const double eps = 1e-3;
  CountDistribution observed = theory;
  observed.probs(0) += eps;
  observed.probs(1) -= eps;
  const QcsEstimate ref = qcs_from_distribution(theory);
  const double d0 = 1.0 - ref.qcs, d1 = 3.0 - ref.qcs;
  const double expected =
      (eps * eps / 3.0) * (d0 * d0 + d1 * d1) / (ref.purity * ref.purity);
  CHECK(theory_error_band(observed, theory) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("theory error band widens with squeezing under the same mismatch") {
  // Same relative transmission miscalibration applied to both settings.
  const double low = theory_error_band(sv_distribution(0.653, 0.2010 * 0.98),
                                       sv_distribution(0.653, 0.2010));
  const double high = theory_error_band(sv_distribution(1.156, 0.183 * 0.98),
                                        sv_distribution(1.156, 0.183));
  CHECK(high > low);
}

TEST_CASE("distribution CSV round trip") {
  const CountDistribution exact = sv_distribution(0.653, 0.2010);
  const CountDistribution sampled = sample_counts(exact, 5000, 9);
  std::stringstream ss;
  write_distribution_csv(ss, sampled);
  CHECK(ss.str().rfind("n,p,count", 0) == 0);
  const CountDistribution back = read_distribution_csv(ss);
  REQUIRE(back.probs.size() == sampled.probs.size());
  CHECK((back.probs - sampled.probs).norm() < 1e-14);
  REQUIRE(back.counts.size() == sampled.counts.size());
  for (std::size_t n = 0; n < back.counts.size(); ++n)
    CHECK(back.counts[n] == sampled.counts[n]);
  CHECK(back.n_trials == sampled.n_trials);

  std::stringstream bad("not,a,header\n0,1,0\n");
  CHECK_THROWS_AS(read_distribution_csv(bad), std::invalid_argument);
}

TEST_CASE("estimate writer emits the documented keys") {
  QcsEstimate est{0.91, 0.87, 1e-6, 1000};
  std::stringstream ss;
  write_estimate(ss, est);
  const std::string text = ss.str();
  for (const char* key : {"qcs ", "purity ", "variance ", "n_trials "})
    CHECK(text.find(key) != std::string::npos);
}

TEST_CASE("negative probabilities are rejected at construction") {
  Eigen::VectorXd p(2);
  p << 1.2, -0.2;
  CHECK_THROWS_AS(exact_distribution(p), std::invalid_argument);
}
