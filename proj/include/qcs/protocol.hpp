#pragma once

// The two interference experiments, expressed as declarative circuit
// descriptions and executed on either engine.  Time-bin modes are modelled
// as spatial modes; delay loops are pure routing.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcs/estimator.hpp"
#include "qcs/fock.hpp"
#include "qcs/gaussian.hpp"

namespace qcs {

struct CircuitSpec {
  struct Source {
    int mode;
    double r;
    double phi;
  };
  struct Element {
    enum class Kind { BeamSplitter, Phase, Loss };
    Kind kind;
    BsKind bs_kind = BsKind::Balanced;  // BeamSplitter only
    int mode_a = 0;
    int mode_b = 0;      // BeamSplitter only
    double value = 0.0;  // theta for Phase, eta for Loss
  };

  std::vector<Source> sources;
  std::vector<Element> elements;
  std::vector<int> detected;
  int marginal_mode = 0;

  int num_modes() const;
  void validate() const;
};

/// Two copies of squeezed vacuum, loss eta on each, balanced beam splitter,
/// marginal on the destructive-interference output.
CircuitSpec build_sv_experiment(double r, double phi, double eta);

/// Four squeezed sources pairwise combined on symmetric beam splitters into
/// TMSV states; one branch of each meets at a balanced beam splitter with
/// loss eta on both compared branches.  Effective single-copy state is
/// thermal(sinh^2 r) under loss eta.
CircuitSpec build_thermal_experiment(double r, double phi, double eta);

/// Line-oriented text format:
///   source <mode> r=<f> phi=<f>
///   bs <symmetric|balanced> <m1> <m2>
///   loss <mode> eta=<f>
///   phase <mode> theta=<f>
///   detect <modes...>
///   marginal <mode>
CircuitSpec parse_circuit(std::istream& is);
CircuitSpec parse_circuit(const std::string& text);
std::string serialize_circuit(const CircuitSpec& spec);

enum class Engine { Gaussian, Fock };

struct RunOptions {
  std::optional<int> cutoff;        // source-construction cutoff override
  bool want_distribution = true;    // skip the Fock work when false
};

struct ExperimentResult {
  CountDistribution exact_distribution;
  double qcs_analytic = 0.0;
  double qcs_direct = 0.0;
  double qcs_two_copy = 0.0;
  double purity = 0.0;
  double mean_photon_out = 0.0;
  // metadata
  double r = 0.0;
  double eta = 1.0;
  Engine engine = Engine::Gaussian;
  int cutoff_used = 0;
  std::string kind;  // "sv" or "thermal"
};

/// Executes the circuit end to end.  The Gaussian engine evolves covariance
/// matrices and converts the measured-mode marginal to Fock space for the
/// photon distribution; the Fock engine composes the single-copy state from
/// kets and Kraus loss and runs the two-copy protocol explicitly.
ExperimentResult run_circuit(const CircuitSpec& spec, Engine engine,
                             const RunOptions& options = {});

/// Gaussian-engine reduced state of the marginal mode (exact for any wiring).
GaussianState marginal_mode_state(const CircuitSpec& spec);

/// Output-mode <n> together with the value implied by the input state,
/// eta (<adag a>_in - |<a>_in|^2); the two agree for every circuit here.
std::pair<double, double> mean_photon_and_difference_moment(const ExperimentResult& result);

}  // namespace qcs
