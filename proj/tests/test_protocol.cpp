#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "qcs/protocol.hpp"
#include "qcs/sweeps.hpp"

using namespace qcs;
using std::complex;

namespace {

// Applies a single-mode operator to one mode of a multimode ket (test-only
// helper for the brute-force oracle below).
FockKet apply_single_mode(const FockKet& ket, const CMat& op, int mode) {
  const int d = ket.dim_per_mode();
  FockKet out = ket;
  out.amps.setZero();
  int stride = 1;
  for (int m = ket.num_modes - 1; m > mode; --m) stride *= d;
  const int dim = static_cast<int>(ket.amps.size());
  for (int idx = 0; idx < dim; ++idx) {
    const int n = (idx / stride) % d;
    for (int np = 0; np < d; ++np) {
      const complex<double> w = op(np, n);
      if (w == complex<double>(0.0)) continue;
      out.amps(idx + (np - n) * stride) += w * ket.amps(idx);
    }
  }
  return out;
}

// Kraus operators of the pure-loss channel at the given cutoff.
std::vector<CMat> loss_kraus(double eta, int cutoff) {
  const int d = cutoff + 1;
  std::vector<CMat> ks(d, CMat::Zero(d, d));
  for (int n = 0; n < d; ++n) {
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      ks[k](n - k, n) = std::sqrt(binom * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
      binom *= static_cast<double>(n - k) / (k + 1);
    }
  }
  return ks;
}

}  // namespace

TEST_CASE("sv experiment: lossless squeezed vacuum gives cosh 2r on every route") {
  const double r = 0.978;
  const ExperimentResult res = run_circuit(build_sv_experiment(r, 0.0, 1.0), Engine::Gaussian);
  const double expected = std::cosh(2.0 * r);
  CHECK(res.qcs_analytic == doctest::Approx(expected).epsilon(1e-10));
  CHECK(res.qcs_direct == doctest::Approx(expected).epsilon(1e-6));
  CHECK(res.qcs_two_copy == doctest::Approx(expected).epsilon(1e-6));
  CHECK(res.purity == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.kind == "sv");
}

TEST_CASE("sv experiment with loss matches the closed form on both engines") {
  const double r = 0.653, eta = 0.2010;
  const double expected = oracles::squeezed_lossy_reference(r, eta);
  const CircuitSpec spec = build_sv_experiment(r, 0.0, eta);
  for (Engine engine : {Engine::Gaussian, Engine::Fock}) {
    const ExperimentResult res = run_circuit(spec, engine);
    CHECK(res.qcs_analytic == doctest::Approx(expected).epsilon(1e-10));
    CHECK(res.qcs_direct == doctest::Approx(expected).epsilon(1e-6));
    CHECK(res.qcs_two_copy == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("thermal experiment matches the closed form on both engines") {
  const double r = 0.653, eta = 0.2564;
  const double nbar = std::sinh(r) * std::sinh(r);
  const double expected = oracles::thermal_lossy_reference(nbar, eta);
  const CircuitSpec spec = build_thermal_experiment(r, 0.0, eta);
  for (Engine engine : {Engine::Gaussian, Engine::Fock}) {
    const ExperimentResult res = run_circuit(spec, engine);
    CHECK(res.kind == "thermal");
    CHECK(res.qcs_analytic == doctest::Approx(expected).epsilon(1e-10));
    CHECK(res.qcs_two_copy == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("the two engines agree on the exact output distribution") {
  for (const CircuitSpec& spec : {build_sv_experiment(0.978, 0.0, 0.1901),
                                  build_thermal_experiment(0.978, 0.0, 0.2447)}) {
    const ExperimentResult g = run_circuit(spec, Engine::Gaussian);
    const ExperimentResult f = run_circuit(spec, Engine::Fock);
    CHECK(std::abs(g.qcs_two_copy - f.qcs_two_copy) < 1e-5);
    CHECK(std::abs(g.purity - f.purity) < 1e-5);
    const int head = std::min<int>(10, std::min(g.exact_distribution.probs.size(),
                                                f.exact_distribution.probs.size()));
    for (int n = 0; n < head; ++n)
      CHECK(std::abs(g.exact_distribution.probs(n) - f.exact_distribution.probs(n)) < 1e-6);
  }
}

TEST_CASE("zero transmission sends every count to the vacuum bin") {
  const ExperimentResult res = run_circuit(build_sv_experiment(1.0, 0.0, 0.0), Engine::Gaussian);
  CHECK(res.exact_distribution.probs(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.qcs_analytic == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("brute-force four-mode simulation validates the compositional path") {
  // Small cutoff, modest squeezing: every truncation is shared between the
  // two routes, so they must agree to near machine precision.
  const double r = 0.4, eta = 0.6, chi = M_PI / 2.0;
  const int cutoff = 5, d = cutoff + 1;

  // Route A: all four modes simulated explicitly.
  const FockKet src = squeezed_vacuum_ket(r, chi, cutoff, 1.0);
  FockKet state = tensor(tensor(src, src), tensor(src, src));
  const CMat bs_s = bs_unitary(BsKind::Symmetric, cutoff);
  state = apply_two_mode_unitary(state, bs_s, 0, 1);
  state = apply_two_mode_unitary(state, bs_s, 2, 3);
  const CMat bs_b = bs_unitary(BsKind::Balanced, cutoff);
  const std::vector<CMat> kraus = loss_kraus(eta, cutoff);
  Eigen::VectorXd marginal2 = Eigen::VectorXd::Zero(d);
  for (const CMat& k0 : kraus)
    for (const CMat& k2 : kraus) {
      FockKet branch = apply_single_mode(state, k0, 0);
      branch = apply_single_mode(branch, k2, 2);
      branch = apply_two_mode_unitary(branch, bs_b, 0, 2);
      for (int idx = 0; idx < branch.amps.size(); ++idx)
        marginal2((idx / d) % d) += std::norm(branch.amps(idx));
    }

  // Route B: compositional single-copy state plus the two-copy protocol.
  FockKet pair = apply_two_mode_passive(tensor(src, src), bs_mode_matrix(BsKind::Symmetric));
  FockDensityOperator rho = partial_trace(pair, 0);
  rho = apply_loss_channel(rho, eta, 0);
  const std::vector<double> composed = two_copy_marginal(rho);

  for (int n = 0; n < d; ++n)
    CHECK(marginal2(n) == doctest::Approx(composed[n]).epsilon(1e-8));
}

TEST_CASE("loss placement before or after the balanced beam splitter is equivalent") {
  const double r = 0.9, eta = 0.35;
  const CircuitSpec before = build_sv_experiment(r, 0.0, eta);
  CircuitSpec after = before;
  // Move both loss elements behind the beam splitter.
  std::rotate(after.elements.begin(), after.elements.begin() + 2, after.elements.end());
  const ExperimentResult a = run_circuit(before, Engine::Gaussian);
  const ExperimentResult b = run_circuit(after, Engine::Gaussian);
  CHECK(std::abs(a.qcs_analytic - b.qcs_analytic) < 1e-10);
  const int head = std::min(a.exact_distribution.probs.size(), b.exact_distribution.probs.size());
  for (int n = 0; n < head; ++n)
    CHECK(std::abs(a.exact_distribution.probs(n) - b.exact_distribution.probs(n)) < 1e-8);
}

TEST_CASE("the detection list does not change the marginal result") {
  CircuitSpec wide = build_thermal_experiment(0.8, 0.0, 0.5);
  CircuitSpec narrow = wide;
  narrow.detected = {wide.marginal_mode};
  const ExperimentResult a = run_circuit(wide, Engine::Gaussian);
  const ExperimentResult b = run_circuit(narrow, Engine::Gaussian);
  CHECK(a.qcs_analytic == doctest::Approx(b.qcs_analytic).epsilon(1e-14));
  CHECK((a.exact_distribution.probs - b.exact_distribution.probs).norm() < 1e-14);
}

TEST_CASE("asymmetric wiring is rejected") {
  CircuitSpec spec = build_sv_experiment(0.8, 0.0, 0.5);
  spec.elements[0].value = 0.4;  // loss on one arm only changed
  CHECK_THROWS_AS(run_circuit(spec, Engine::Gaussian), std::invalid_argument);

  CircuitSpec mismatched = build_sv_experiment(0.8, 0.0, 0.5);
  mismatched.sources[1].r = 0.7;
  CHECK_THROWS_AS(run_circuit(mismatched, Engine::Gaussian), std::invalid_argument);
}

TEST_CASE("spec validation catches malformed circuits") {
  CircuitSpec spec = build_sv_experiment(0.8, 0.0, 0.5);
  spec.elements[0].value = 1.5;  // eta out of range
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  CircuitSpec bs_self = build_sv_experiment(0.8, 0.0, 0.5);
  bs_self.elements[2].mode_b = bs_self.elements[2].mode_a;
  CHECK_THROWS_AS(bs_self.validate(), std::invalid_argument);

  CircuitSpec undetected = build_sv_experiment(0.8, 0.0, 0.5);
  undetected.detected = {0};
  CHECK_THROWS_AS(undetected.validate(), std::invalid_argument);
}

TEST_CASE("circuit text format round trip") {
  for (const CircuitSpec& spec : {build_sv_experiment(0.653, 0.25, 0.2010),
                                  build_thermal_experiment(1.156, 0.0, 0.240)}) {
    const std::string text = serialize_circuit(spec);
    const CircuitSpec back = parse_circuit(text);
    CHECK(serialize_circuit(back) == text);
    // The round-tripped circuit runs to the same answer.
    const ExperimentResult a = run_circuit(spec, Engine::Gaussian);
    const ExperimentResult b = run_circuit(back, Engine::Gaussian);
    CHECK(a.qcs_analytic == doctest::Approx(b.qcs_analytic).epsilon(1e-14));
  }
}

TEST_CASE("circuit parser diagnostics") {
  CHECK_THROWS_AS(parse_circuit("warp 0 r=1\nmarginal 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_circuit("source 0 r=0.5 phi=0\ndetect 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_circuit("source 0 q=0.5 phi=0\ndetect 0\nmarginal 0\n"),
                  std::invalid_argument);
  // Comments and blank lines are fine.
  const CircuitSpec ok = parse_circuit(
      "# a single squeezed mode\n\nsource 0 r=0.5 phi=0\ndetect 0\nmarginal 0\n");
  CHECK(ok.sources.size() == 1);
}

TEST_CASE("phase elements are honoured and leave the qcs unchanged") {
  CircuitSpec spec = build_sv_experiment(0.8, 0.0, 0.4);
  spec.elements.insert(spec.elements.begin(),
                       {CircuitSpec::Element::Kind::Phase, BsKind::Balanced, 0, 0, 0.7});
  spec.elements.insert(spec.elements.begin(),
                       {CircuitSpec::Element::Kind::Phase, BsKind::Balanced, 1, 0, 0.7});
  const ExperimentResult res = run_circuit(spec, Engine::Gaussian);
  CHECK(res.qcs_analytic ==
        doctest::Approx(oracles::squeezed_lossy_reference(0.8, 0.4)).epsilon(1e-10));
}

TEST_CASE("output energy equals the transmitted input energy") {
  for (const CircuitSpec& spec : {build_sv_experiment(0.978, 0.0, 0.1901),
                                  build_thermal_experiment(0.653, 0.0, 0.2564)}) {
    const ExperimentResult res = run_circuit(spec, Engine::Gaussian);
    const auto [measured, implied] = mean_photon_and_difference_moment(res);
    CHECK(measured == doctest::Approx(implied).epsilon(1e-8));
  }
}

TEST_CASE("reference table: six configurations with matching closed forms") {
  const auto& rows = reference_rows();
  REQUIRE(rows.size() == 6);
  int sv_count = 0;
  for (const auto& row : rows) {
    if (row.kind == "sv") {
      ++sv_count;
      CHECK(theory_qcs(row, row.eta_m) ==
            doctest::Approx(oracles::squeezed_lossy_reference(row.r, row.eta_m)).epsilon(1e-12));
    } else {
      const double nbar = std::sinh(row.r) * std::sinh(row.r);
      CHECK(theory_qcs(row, row.eta_m) ==
            doctest::Approx(oracles::thermal_lossy_reference(nbar, row.eta_m)).epsilon(1e-12));
    }
    CHECK(row.measured_qcs < theory_qcs(row, row.eta_m));
  }
  CHECK(sv_count == 3);
}

TEST_CASE("analytic sweep covers the grid and hits the closed forms") {
  const std::vector<double> etas = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto points = analytic_sweep({0.653, 1.156}, {1.0}, etas);
  REQUIRE(points.size() == 3 * etas.size());
  for (const auto& p : points) {
    const double expected = p.kind == "sv"
                                ? oracles::squeezed_lossy_reference(p.param, p.eta)
                                : oracles::thermal_lossy_reference(p.param, p.eta);
    CHECK(p.qcs == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("simulated comparison table stays within sampling error of theory") {
  const std::int64_t trials = 200000;
  const auto entries = table1_comparison(trials, 12345);
  REQUIRE(entries.size() == 6);
  for (const auto& e : entries) {
    CHECK(e.simulated_err > 0.0);
    CHECK(std::abs(e.simulated - e.theory) < 6.0 * e.simulated_err);
  }
}

TEST_CASE("parallel_for preserves output order") {
  std::vector<int> out(64, -1);
  parallel_for(64, [&](int i) { out[i] = 3 * i; }, 8);
  for (int i = 0; i < 64; ++i) CHECK(out[i] == 3 * i);
  parallel_for(0, [&](int) { CHECK(false); });
}
