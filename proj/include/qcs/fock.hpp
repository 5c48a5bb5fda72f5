#pragma once

// Truncated Fock-space engine.  Serves as an independent computational route
// for everything the covariance calculus produces, and as the only route for
// non-Gaussian states.  Dense complex matrices throughout; intended scale is
// one or two modes with per-mode cutoffs of a few tens.
//
// Multimode index convention: |n0, n1> maps to n0*(cutoff+1) + n1.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcs/gaussian.hpp"

namespace qcs {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Thrown when a requested construction does not fit in the truncated space.
struct CutoffError : std::runtime_error {
  int required_cutoff;
  CutoffError(const std::string& what, int required)
      : std::runtime_error(what), required_cutoff(required) {}
};

/// Ladder and quadrature operators on a single truncated mode (dim cutoff+1).
struct LadderOps {
  int cutoff;
  CMat a, adag, x, p, n, parity;
  explicit LadderOps(int cutoff);
};

struct FockKet {
  int num_modes = 1;
  int cutoff = 0;
  CVec amps;
  // Probability mass lost to truncation, estimated at construction time.
  double norm_deficit = 0.0;

  int dim_per_mode() const { return cutoff + 1; }
};

struct FockDensityOperator {
  int num_modes = 1;
  int cutoff = 0;
  CMat rho;

  int dim_per_mode() const { return cutoff + 1; }
  double trace_deficit() const { return 1.0 - rho.trace().real(); }
};

/// Truncation tolerance used by state constructors when none is given.
inline constexpr double kDefaultTruncTol = 1e-8;

/// Smallest cutoff holding a squeezed-vacuum ket of parameter r with
/// truncated tail mass below tol.
int cutoff_for_squeezing(double r, double tol = kDefaultTruncTol);

FockKet vacuum_ket(int num_modes, int cutoff);
FockKet fock_ket(int n, int cutoff);
FockKet ket_from_amplitudes(const CVec& amps, int cutoff);
FockKet tensor(const FockKet& a, const FockKet& b);

/// Squeezed vacuum built by exponentiating the truncated squeeze generator.
/// Throws CutoffError when the truncated tail exceeds trunc_tol.
FockKet squeezed_vacuum_ket(double r, double phi, int cutoff,
                            double trunc_tol = kDefaultTruncTol);

/// Squeeze unitary exp(-(r e^{i phi} adag^2 - r e^{-i phi} a^2)/2).
CMat squeeze_unitary(double r, double phi, int cutoff);
CMat phase_unitary(double theta, int cutoff);

/// Two-mode squeezed vacuum, amplitudes (e^{i phi} tanh r)^m / cosh r on |m,m>.
FockKet tmsv_ket(double r, double phi, int cutoff,
                 double trunc_tol = kDefaultTruncTol);

enum class BsKind { Symmetric, Balanced };

/// Fock lift of a two-mode passive transformation with the given mode matrix,
/// assembled block-by-block over total photon number (exactly unitary).
CMat two_mode_passive_unitary(const Eigen::Matrix2cd& mode_unitary, int cutoff);
CMat bs_unitary(BsKind kind, int cutoff);
Eigen::Matrix2cd bs_mode_matrix(BsKind kind);

FockDensityOperator to_density(const FockKet& ket);
FockDensityOperator tensor(const FockDensityOperator& a, const FockDensityOperator& b);

/// Geometric thermal state truncated at the cutoff (trace < 1 by the tail).
FockDensityOperator thermal_density(double nbar, int cutoff);

/// rho -> U rho U^dag.  U must be unitary on the truncated space (1e-10).
FockDensityOperator apply_unitary(const FockDensityOperator& state, const CMat& u);
FockKet apply_unitary(const FockKet& ket, const CMat& u);

/// Applies a two-mode unitary to the given pair of modes of a multimode ket.
FockKet apply_two_mode_unitary(const FockKet& ket, const CMat& u2, int mode_a, int mode_b);

/// Block-wise (per total photon number) passive transform of a two-mode ket;
/// equivalent to apply_unitary with two_mode_passive_unitary but never forms
/// the full lifted matrix, so it scales to large cutoffs.
FockKet apply_two_mode_passive(const FockKet& ket, const Eigen::Matrix2cd& mode_unitary);

/// Pure-loss channel via Kraus sum on one mode.
FockDensityOperator apply_loss_channel(const FockDensityOperator& state, double eta, int mode);

FockDensityOperator partial_trace(const FockDensityOperator& state, int keep_mode);
FockDensityOperator partial_trace(const FockKet& ket, int keep_mode);

/// Shrinks (or grows) the per-mode cutoff, renormalizing away the shaved tail.
FockDensityOperator truncate(const FockDensityOperator& state, int new_cutoff);

double purity_fock(const FockDensityOperator& state);
double mean_photon(const FockDensityOperator& state, int mode = 0);
double mean_photon(const FockKet& ket, int mode = 0);

/// QCS from the commutator definition,
/// C^2 = [Tr([rho,x][x,rho]) + Tr([rho,p][p,rho])] / (2 P).
double qcs_direct(const FockDensityOperator& state, double purity_floor = 1e-6);

/// Photon-number distribution of the destructive-interference output of a
/// balanced beam splitter fed with rho (x) rho.
std::vector<double> two_copy_marginal(const FockDensityOperator& state);

/// QCS via the two-copy interference protocol; equals qcs_direct up to
/// truncation error.
double qcs_two_copy(const FockDensityOperator& state, double purity_floor = 1e-6);

/// Joint photon-number probabilities (diagonal of rho in the Fock basis).
Eigen::VectorXd photon_distribution(const FockDensityOperator& state);
/// Marginal distribution of one mode of a (possibly multimode) state.
Eigen::VectorXd photon_marginal(const FockDensityOperator& state, int mode);

/// Exact Fock representation of a centred single-mode Gaussian state,
/// via its Williamson decomposition (thermal core + squeeze unitary).
FockDensityOperator from_gaussian(const GaussianState& state, int cutoff);

}  // namespace qcs
