#include "qcs/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace qcs {

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {"sv", 0.653, 0.190, 0.2010, 0.9003, 0.0009},
      {"sv", 0.978, 0.190, 0.1901, 0.809, 0.002},
      {"sv", 1.156, 0.190, 0.183, 0.760, 0.003},
      {"thermal", 0.653, 0.267, 0.2564, 0.792, 0.001},
      {"thermal", 0.978, 0.267, 0.2447, 0.584, 0.003},
      {"thermal", 1.156, 0.267, 0.240, 0.459, 0.005},
  };
  return rows;
}

double theory_qcs(const ReferenceRow& row, double eta) {
  if (row.kind == "sv") return qcs_squeezed_lossy(row.r, eta);
  const double sh = std::sinh(row.r);
  return qcs_thermal_lossy(sh * sh, eta);
}

std::vector<AnalyticPoint> analytic_sweep(const std::vector<double>& r_values,
                                          const std::vector<double>& nbar_values,
                                          const std::vector<double>& etas) {
  std::vector<AnalyticPoint> out;
  out.reserve((r_values.size() + nbar_values.size()) * etas.size());
  for (double r : r_values)
    for (double eta : etas) out.push_back({"sv", r, eta, qcs_squeezed_lossy(r, eta)});
  for (double nbar : nbar_values)
    for (double eta : etas) out.push_back({"thermal", nbar, eta, qcs_thermal_lossy(nbar, eta)});
  return out;
}

std::vector<Table1Entry> table1_comparison(std::int64_t n_trials, std::uint64_t seed,
                                           Engine engine) {
  const auto& rows = reference_rows();
  std::vector<Table1Entry> out(rows.size());
  parallel_for(static_cast<int>(rows.size()), [&](int i) {
    const ReferenceRow& row = rows[i];
    const CircuitSpec spec = row.kind == "sv"
                                 ? build_sv_experiment(row.r, 0.0, row.eta_m)
                                 : build_thermal_experiment(row.r, 0.0, row.eta_m);
    const ExperimentResult res = run_circuit(spec, engine);
    const CountDistribution sampled =
        sample_counts(res.exact_distribution, n_trials, seed + static_cast<std::uint64_t>(i));
    const QcsEstimate est = qcs_from_distribution(sampled);
    out[i] = {row, theory_qcs(row, row.eta_m), est.qcs, std::sqrt(est.variance)};
  });
  return out;
}

void parallel_for(int n, const std::function<void(int)>& fn, int workers) {
  if (workers <= 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace qcs
