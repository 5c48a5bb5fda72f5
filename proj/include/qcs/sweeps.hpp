#pragma once

// Grid sweeps and the published-run comparison table, shared between the
// command-line tool and the verification suite.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qcs/estimator.hpp"
#include "qcs/protocol.hpp"

namespace qcs {

/// One configuration of the published measurement run: state family,
/// squeezing parameter, calibrated and energy-measured transmissions, and
/// the reported QCS with its standard error.
struct ReferenceRow {
  std::string kind;  // "sv" or "thermal"
  double r;
  double eta_c;
  double eta_m;
  double measured_qcs;
  double measured_err;
};

/// The six configurations of the reference measurement run.
const std::vector<ReferenceRow>& reference_rows();

/// Closed-form QCS for a row's state family at transmission eta.
double theory_qcs(const ReferenceRow& row, double eta);

struct AnalyticPoint {
  std::string kind;
  double param;  // r for squeezed rows, nbar for thermal rows
  double eta;
  double qcs;
};

std::vector<AnalyticPoint> analytic_sweep(const std::vector<double>& r_values,
                                          const std::vector<double>& nbar_values,
                                          const std::vector<double>& etas);

struct Table1Entry {
  ReferenceRow row;
  double theory;        // closed form at eta_m
  double simulated;     // sampled estimate at eta_m
  double simulated_err; // sqrt of the multinomial variance
};

/// Simulates every reference configuration at eta_m with n_trials samples.
std::vector<Table1Entry> table1_comparison(std::int64_t n_trials, std::uint64_t seed,
                                           Engine engine = Engine::Gaussian);

/// Runs fn(0..n-1) on a bounded pool of workers; results keep input order.
void parallel_for(int n, const std::function<void(int)>& fn, int workers = 0);

}  // namespace qcs
