// Command-line front end: closed-form sweeps, the published-run comparison
// table, and end-to-end simulated experiments with sampled statistics.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "qcs/estimator.hpp"
#include "qcs/protocol.hpp"
#include "qcs/sweeps.hpp"

namespace {

using nlohmann::json;

struct OutputTarget {
  std::string path;
  std::ofstream file;
  std::ostream& stream() {
    if (path.empty()) return std::cout;
    if (!file.is_open()) {
      file.open(path);
      if (!file) throw std::invalid_argument("cannot open output file " + path);
    }
    return file;
  }
};

std::vector<double> eta_grid(std::vector<double> etas) {
  if (!etas.empty()) return etas;
  for (int i = 0; i <= 100; ++i) etas.push_back(i / 100.0);
  return etas;
}

json distribution_json(const qcs::CountDistribution& d) {
  json j;
  j["p"] = std::vector<double>(d.probs.data(), d.probs.data() + d.probs.size());
  if (d.has_tallies()) {
    j["count"] = d.counts;
    j["n_trials"] = d.n_trials;
  }
  return j;
}

int run_analytic(const std::vector<double>& rs, const std::vector<double>& nbars,
                 const std::vector<double>& etas, const std::string& format, OutputTarget& out) {
  const auto points = qcs::analytic_sweep(rs, nbars, eta_grid(etas));
  std::ostream& os = out.stream();
  os.precision(12);
  if (format == "json") {
    json j = json::array();
    for (const auto& p : points)
      j.push_back({{"kind", p.kind}, {"param", p.param}, {"eta", p.eta}, {"qcs", p.qcs}});
    for (double r : rs)
      if (r > 0.0)
        j.push_back({{"kind", "sv_etastar"}, {"param", r},
                     {"eta", qcs::eta_star(std::cosh(2.0 * r), 1.0)}, {"qcs", 1.0}});
    os << j.dump(2) << '\n';
  } else {
    os << "kind,param,eta,qcs\n";
    for (const auto& p : points)
      os << p.kind << ',' << p.param << ',' << p.eta << ',' << p.qcs << '\n';
    // Transmission threshold where each squeezed curve crosses unity.
    for (double r : rs)
      if (r > 0.0)
        os << "sv_etastar," << r << ',' << qcs::eta_star(std::cosh(2.0 * r), 1.0) << ",1\n";
  }
  return 0;
}

int run_table1(std::int64_t trials, std::uint64_t seed, qcs::Engine engine,
               const std::string& format, OutputTarget& out) {
  const auto entries = qcs::table1_comparison(trials, seed, engine);
  std::ostream& os = out.stream();
  os.precision(12);
  if (format == "json") {
    json j = json::array();
    for (const auto& e : entries)
      j.push_back({{"kind", e.row.kind}, {"r", e.row.r}, {"eta_c", e.row.eta_c},
                   {"eta_m", e.row.eta_m}, {"theory_qcs", e.theory},
                   {"simulated_qcs", e.simulated}, {"simulated_err", e.simulated_err},
                   {"measured_qcs", e.row.measured_qcs}, {"measured_err", e.row.measured_err}});
    os << j.dump(2) << '\n';
  } else {
    os << "kind,r,eta_c,eta_m,theory_qcs,simulated_qcs,simulated_err,measured_qcs,measured_err\n";
    for (const auto& e : entries)
      os << e.row.kind << ',' << e.row.r << ',' << e.row.eta_c << ',' << e.row.eta_m << ','
         << e.theory << ',' << e.simulated << ',' << e.simulated_err << ','
         << e.row.measured_qcs << ',' << e.row.measured_err << '\n';
  }
  return 0;
}

int run_simulate(const std::string& experiment, const std::string& circuit_file, double r,
                 double eta, std::int64_t trials, std::uint64_t seed, qcs::Engine engine,
                 int cutoff, const std::string& format, OutputTarget& out) {
  qcs::CircuitSpec spec;
  if (!circuit_file.empty()) {
    std::ifstream in(circuit_file);
    if (!in) throw std::invalid_argument("cannot open circuit file " + circuit_file);
    spec = qcs::parse_circuit(in);
  } else if (experiment == "sv") {
    spec = qcs::build_sv_experiment(r, 0.0, eta);
  } else if (experiment == "thermal") {
    spec = qcs::build_thermal_experiment(r, 0.0, eta);
  } else {
    throw std::invalid_argument("simulate: give a built-in experiment (sv|thermal) or --circuit");
  }

  qcs::RunOptions options;
  if (cutoff > 0) options.cutoff = cutoff;
  const qcs::ExperimentResult res = qcs::run_circuit(spec, engine, options);
  const qcs::CountDistribution sampled = qcs::sample_counts(res.exact_distribution, trials, seed);
  const qcs::QcsEstimate est = qcs::qcs_from_distribution(sampled);
  const qcs::QcsEstimate truncated = qcs::truncated_estimate(sampled, 4);
  const double band = qcs::theory_error_band(sampled, res.exact_distribution);
  double sampled_mean = 0.0;
  for (int n = 0; n < sampled.probs.size(); ++n) sampled_mean += n * sampled.probs(n);

  std::ostream& os = out.stream();
  os.precision(12);
  if (format == "json") {
    json j;
    j["kind"] = res.kind;
    j["engine"] = engine == qcs::Engine::Gaussian ? "gaussian" : "fock";
    j["cutoff"] = res.cutoff_used;
    j["qcs_analytic"] = res.qcs_analytic;
    j["qcs_direct"] = res.qcs_direct;
    j["qcs_two_copy"] = res.qcs_two_copy;
    j["purity"] = res.purity;
    j["mean_photon_out"] = res.mean_photon_out;
    j["exact_distribution"] = distribution_json(res.exact_distribution);
    j["sampled"] = distribution_json(sampled);
    j["estimate"] = {{"qcs", est.qcs}, {"purity", est.purity}, {"variance", est.variance},
                     {"n_trials", est.n_trials}};
    j["estimate_truncated_4"] = {{"qcs", truncated.qcs}, {"purity", truncated.purity}};
    j["theory_error_band_variance"] = band;
    if (res.kind == "sv" && res.r > 0.0) {
      const qcs::EtaEstimate eh = qcs::eta_from_energy(sampled_mean, res.r);
      j["eta_from_energy"] = eh.value;
      j["eta_exceeds_unity"] = eh.exceeds_unity;
    }
    os << j.dump(2) << '\n';
  } else {
    os << "# kind " << res.kind << "\n";
    os << "# qcs_analytic " << res.qcs_analytic << "\n";
    os << "# qcs_direct " << res.qcs_direct << "\n";
    os << "# qcs_two_copy " << res.qcs_two_copy << "\n";
    os << "# purity " << res.purity << "\n";
    os << "# mean_photon_out " << res.mean_photon_out << "\n";
    if (res.kind == "sv" && res.r > 0.0) {
      const qcs::EtaEstimate eh = qcs::eta_from_energy(sampled_mean, res.r);
      os << "# eta_from_energy " << eh.value << (eh.exceeds_unity ? " (exceeds unity)" : "")
         << "\n";
    }
    os << "# estimate qcs " << est.qcs << " purity " << est.purity << " variance "
       << est.variance << "\n";
    os << "# estimate_truncated_4 qcs " << truncated.qcs << "\n";
    os << "# theory_error_band_variance " << band << "\n";
    os << "# exact distribution\n";
    qcs::write_distribution_csv(os, res.exact_distribution);
    os << "# sampled distribution\n";
    qcs::write_distribution_csv(os, sampled);
  }
  return 0;
}

int run_etastar(const std::vector<double>& ws, const std::vector<double>& purities,
                const std::string& format, OutputTarget& out) {
  std::ostream& os = out.stream();
  os.precision(12);
  json j = json::array();
  if (format != "json") os << "w,purity,eta_star\n";
  for (double w : ws)
    for (double p : purities) {
      const double es = qcs::eta_star(w, p);
      if (format == "json")
        j.push_back({{"w", w}, {"purity", p}, {"eta_star", es}});
      else
        os << w << ',' << p << ',' << es << '\n';
    }
  if (format == "json") os << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadrature coherence scale simulator"};
  app.require_subcommand(1);

  std::vector<double> rs, nbars, etas, ws, purities;
  std::int64_t trials = 1000000;
  std::uint64_t seed = 1;
  std::string engine_name = "gaussian";
  int cutoff = 0;
  std::string out_path, format = "csv", circuit_file, experiment;
  double r = 0.0, eta = 1.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output file (default stdout)");
    cmd->add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* analytic = app.add_subcommand("analytic", "closed-form QCS grids");
  analytic->add_option("--r", rs, "squeezing parameters");
  analytic->add_option("--nbar", nbars, "thermal mean photon numbers");
  analytic->add_option("--eta", etas, "transmission grid (default 0..1 step 0.01)");
  add_common(analytic);

  CLI::App* table1 = app.add_subcommand("table1", "theory vs published measurements");
  table1->add_option("--trials", trials, "samples per configuration");
  table1->add_option("--seed", seed, "sampling seed");
  table1->add_option("--engine", engine_name)->check(CLI::IsMember({"gaussian", "fock"}));
  add_common(table1);

  CLI::App* simulate = app.add_subcommand("simulate", "run one experiment end to end");
  simulate->add_option("experiment", experiment, "built-in experiment: sv | thermal");
  simulate->add_option("--circuit", circuit_file, "circuit spec file");
  simulate->add_option("--r", r, "squeezing parameter");
  simulate->add_option("--eta", eta, "transmission");
  simulate->add_option("--trials", trials, "number of sampled trials");
  simulate->add_option("--seed", seed, "sampling seed");
  simulate->add_option("--engine", engine_name)->check(CLI::IsMember({"gaussian", "fock"}));
  simulate->add_option("--cutoff", cutoff, "Fock cutoff override");
  add_common(simulate);

  CLI::App* etastar = app.add_subcommand("etastar", "loss threshold for Gaussian states");
  etastar->add_option("--w", ws, "total variances W")->required();
  etastar->add_option("--purity", purities, "initial purities")->required();
  add_common(etastar);

  CLI11_PARSE(app, argc, argv);

  try {
    OutputTarget out{out_path, {}};
    const qcs::Engine engine =
        engine_name == "fock" ? qcs::Engine::Fock : qcs::Engine::Gaussian;
    if (*analytic) return run_analytic(rs, nbars, etas, format, out);
    if (*table1) return run_table1(trials, seed, engine, format, out);
    if (*simulate)
      return run_simulate(experiment, circuit_file, r, eta, trials, seed, engine, cutoff,
                          format, out);
    if (*etastar) return run_etastar(ws, purities, format, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
