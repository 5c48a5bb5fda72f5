#include "qcs/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace qcs {

namespace {

double parity_sum(const Eigen::VectorXd& p) {
  double s = 0.0;
  for (int n = 0; n < p.size(); ++n) s += (n % 2 == 0 ? 1.0 : -1.0) * p(n);
  return s;
}

}  // namespace

CountDistribution exact_distribution(const Eigen::VectorXd& probs) {
  CountDistribution d;
  d.probs = probs;
  d.provenance = Provenance::Exact;
  for (int n = 0; n < probs.size(); ++n)
    if (probs(n) < -1e-12)
      throw std::invalid_argument("exact_distribution: negative probability");
  return d;
}

QcsEstimate qcs_from_distribution(const CountDistribution& dist, double floor) {
  if (floor < 0.0) floor = dist.provenance == Provenance::Exact ? 1e-10 : 1e-4;
  const double parity = parity_sum(dist.probs);
  if (std::abs(parity) < floor)
    throw ConditioningError("qcs_from_distribution: parity denominator below floor", parity);
  double weighted = 0.0;
  for (int n = 0; n < dist.probs.size(); ++n)
    weighted += (n % 2 == 0 ? 1.0 : -1.0) * n * dist.probs(n);
  QcsEstimate est;
  est.qcs = 1.0 + 2.0 * weighted / parity;
  est.purity = parity;
  est.n_trials = dist.n_trials;
  if (dist.n_trials >= 2) est.variance = qcs_variance(dist, est.qcs, est.purity);
  return est;
}

double qcs_variance(const CountDistribution& dist, double qcs, double purity) {
  if (dist.n_trials < 2) throw std::invalid_argument("qcs_variance: need N >= 2");
  double s = 0.0;
  for (int n = 0; n < dist.probs.size(); ++n) {
    const double d = 2.0 * n + 1.0 - qcs;
    s += dist.probs(n) * d * d;
  }
  return s / (purity * purity * (dist.n_trials - 1));
}

double parity_reduction_residual(const CountDistribution& dist, double qcs) {
  double s = 0.0;
  for (int n = 0; n < dist.probs.size(); ++n)
    s += (n % 2 == 0 ? 1.0 : -1.0) * dist.probs(n) * (2.0 * n + 1.0 - qcs);
  return s;
}

CountDistribution sample_counts(const CountDistribution& dist, std::int64_t n_trials,
                                std::uint64_t seed) {
  if (dist.provenance != Provenance::Exact)
    throw std::invalid_argument("sample_counts: input must be an exact distribution");
  if (n_trials <= 0) throw std::invalid_argument("sample_counts: need N > 0");
  const int bins = static_cast<int>(dist.probs.size());
  std::vector<double> cdf(bins);
  double cum = 0.0;
  for (int n = 0; n < bins; ++n) {
    cum += std::max(0.0, dist.probs(n));
    cdf[n] = cum;
  }
  // Truncated tail mass folds into the last bin so every draw lands.
  cdf[bins - 1] = std::max(cdf[bins - 1], 1.0);

  std::mt19937_64 rng(seed);
  CountDistribution out;
  out.counts.assign(bins, 0);
  for (std::int64_t t = 0; t < n_trials; ++t) {
    // 53-bit uniform in [0,1); bit-exact across platforms.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++out.counts[std::min<std::size_t>(it - cdf.begin(), bins - 1)];
  }
  out.n_trials = n_trials;
  out.provenance = Provenance::Sampled;
  out.probs = Eigen::VectorXd::Zero(bins);
  for (int n = 0; n < bins; ++n)
    out.probs(n) = static_cast<double>(out.counts[n]) / static_cast<double>(n_trials);
  return out;
}

EtaEstimate eta_from_energy(double mean_photon_out, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("eta_from_energy: r must be positive");
  EtaEstimate e;
  e.value = mean_photon_out / (std::sinh(r) * std::sinh(r));
  e.exceeds_unity = e.value > 1.0;
  return e;
}

QcsEstimate truncated_estimate(const CountDistribution& dist, int n_max, bool renormalize) {
  if (n_max < 1) throw std::invalid_argument("truncated_estimate: n_max must be >= 1");
  CountDistribution cut = dist;
  const int keep = std::min<int>(n_max + 1, static_cast<int>(dist.probs.size()));
  cut.probs = dist.probs.head(keep).eval();
  if (!cut.counts.empty()) cut.counts.resize(keep);
  if (renormalize) {
    const double mass = cut.probs.sum();
    if (!(mass > 0.0)) throw std::domain_error("truncated_estimate: no mass below n_max");
    cut.probs /= mass;
  }
  return qcs_from_distribution(cut);
}

double theory_error_band(const CountDistribution& observed, const CountDistribution& theory) {
  const int bins = std::max<int>(observed.probs.size(), theory.probs.size());
  const auto at = [](const Eigen::VectorXd& v, int n) {
    return n < v.size() ? v(n) : 0.0;
  };
  const QcsEstimate ref = qcs_from_distribution(theory);
  double var = 0.0;
  for (int n = 0; n < bins; ++n) {
    const double half_width = at(observed.probs, n) - at(theory.probs, n);
    const double deriv = 2.0 * n + 1.0 - ref.qcs;
    var += (half_width * half_width / 3.0) * deriv * deriv;
  }
  return var / (ref.purity * ref.purity);
}

void write_distribution_csv(std::ostream& os, const CountDistribution& dist) {
  os << "n,p,count\n";
  for (int n = 0; n < dist.probs.size(); ++n) {
    os.precision(17);
    os << n << ',' << dist.probs(n) << ','
       << (dist.has_tallies() ? dist.counts[n] : 0) << '\n';
  }
}

CountDistribution read_distribution_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("n,p,count", 0) != 0)
    throw std::invalid_argument("read_distribution_csv: missing header");
  std::vector<double> probs;
  std::vector<std::int64_t> counts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    std::getline(row, field, ',');
    probs.push_back(std::stod(field));
    std::getline(row, field, ',');
    counts.push_back(std::stoll(field));
  }
  CountDistribution d;
  d.probs = Eigen::Map<Eigen::VectorXd>(probs.data(), probs.size());
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  if (total > 0) {
    d.counts = std::move(counts);
    d.n_trials = total;
    d.provenance = Provenance::Sampled;
  }
  return d;
}

void write_estimate(std::ostream& os, const QcsEstimate& est) {
  os.precision(17);
  os << "qcs " << est.qcs << "\n"
     << "purity " << est.purity << "\n"
     << "variance " << est.variance << "\n"
     << "n_trials " << est.n_trials << "\n";
}

}  // namespace qcs
