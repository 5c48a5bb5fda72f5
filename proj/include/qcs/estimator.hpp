#pragma once

// Statistical layer on top of photon-count distributions: the parity-based
// QCS estimator, its multinomial variance, seeded sampling, transmission
// estimation and the truncated-detector study.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace qcs {

enum class Provenance { Exact, Sampled };

/// Photon-number probability vector, optionally with the count tallies it
/// was estimated from.
struct CountDistribution {
  Eigen::VectorXd probs;
  std::vector<std::int64_t> counts;  // empty unless sampled
  std::int64_t n_trials = 0;
  Provenance provenance = Provenance::Exact;

  int n_max() const { return static_cast<int>(probs.size()) - 1; }
  bool has_tallies() const { return !counts.empty(); }
};

struct QcsEstimate {
  double qcs = 0.0;
  double purity = 0.0;
  double variance = 0.0;
  std::int64_t n_trials = 0;
};

/// Thrown when the parity denominator of the estimator is too close to zero
/// for the result to be trusted; carries the offending parity value.
struct ConditioningError : std::domain_error {
  double parity;
  ConditioningError(const std::string& what, double parity_)
      : std::domain_error(what), parity(parity_) {}
};

CountDistribution exact_distribution(const Eigen::VectorXd& probs);

/// QCS and purity from a count distribution:
///   C^2 = 1 + 2 sum_n n (-1)^n p_n / sum_n (-1)^n p_n,  P = sum_n (-1)^n p_n.
/// The conditioning floor defaults to 1e-10 for exact input, 1e-4 for
/// sampled input; pass a non-negative value to override.
QcsEstimate qcs_from_distribution(const CountDistribution& dist, double floor = -1.0);

/// Multinomial variance of the QCS estimate,
///   Var = (1/P^2) sum_n p_n (2n+1-C^2)^2 / (N-1).
double qcs_variance(const CountDistribution& dist, double qcs, double purity);

/// Residual of the Poisson-reduction identity sum_m p_m (-1)^m (2m+1-C^2).
double parity_reduction_residual(const CountDistribution& dist, double qcs);

/// Multinomial draw of N trials from an exact distribution.  Deterministic
/// given the seed: mt19937_64 drives an inverse-CDF categorical sampler.
CountDistribution sample_counts(const CountDistribution& dist, std::int64_t n_trials,
                                std::uint64_t seed);

struct EtaEstimate {
  double value = 0.0;
  bool exceeds_unity = false;  // raw ratio > 1; value is reported unclamped
};

/// Transmission from energy: eta = <n>_out / sinh^2 r.
EtaEstimate eta_from_energy(double mean_photon_out, double r);

/// Re-runs the estimator after dropping all counts above n_max, mimicking a
/// detector that resolves only small photon numbers.
QcsEstimate truncated_estimate(const CountDistribution& dist, int n_max = 4,
                               bool renormalize = true);

/// Variance of the theory QCS induced by a flat-distribution discrepancy
/// model, Cov(p_m,p_n) = delta_mn (p_n - ptilde_n)^2 / 3.
double theory_error_band(const CountDistribution& observed, const CountDistribution& theory);

/// CSV with header "n,p,count"; count column is 0 for exact distributions.
void write_distribution_csv(std::ostream& os, const CountDistribution& dist);
CountDistribution read_distribution_csv(std::istream& is);

/// Key/value lines: qcs, purity, variance, n_trials.
void write_estimate(std::ostream& os, const QcsEstimate& est);

}  // namespace qcs
