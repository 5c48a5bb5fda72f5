#pragma once

// Covariance-matrix calculus for zero-mean and displaced Gaussian states of
// m bosonic modes.  Conventions (fixed once, asserted in the test suite):
//   x = (a + a^dag)/sqrt(2),  p = -i(a - a^dag)/sqrt(2)
//   vacuum variance 1/2, quadrature ordering (x1, p1, x2, p2, ...).

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace qcs {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// m-mode Gaussian state: mean vector and 2m x 2m covariance matrix.
struct GaussianState {
  int num_modes = 0;
  Vec mean;
  Mat cov;

  static GaussianState vacuum(int num_modes);
  bool is_centred(double tol = 1e-12) const;
};

/// Standard symplectic form for m modes in interleaved ordering.
Mat symplectic_form(int num_modes);

/// Real symplectic matrix together with a human-readable tag.
struct SymplecticOp {
  Mat matrix;
  std::string descriptor;
  int num_modes() const { return static_cast<int>(matrix.rows()) / 2; }
};

SymplecticOp squeeze_op(double r, double phi);
SymplecticOp phase_op(double theta);
SymplecticOp bs_symmetric_op();  // (a,b) -> ((a+ib)/sqrt2, (ia+b)/sqrt2)
SymplecticOp bs_balanced_op();   // (a,b) -> ((a+b)/sqrt2, (a-b)/sqrt2)
/// Symplectic image of an m x m mode-space unitary (a_j -> sum_k U_jk a_k).
SymplecticOp passive_op(const Eigen::MatrixXcd& mode_unitary,
                        const std::string& descriptor = "custom");
/// Wraps an arbitrary matrix, verifying S^T Omega S = Omega to 1e-10.
SymplecticOp custom_op(const Mat& matrix, const std::string& descriptor = "custom");

GaussianState make_squeezed_vacuum(double r, double phi);
GaussianState make_thermal(double nbar);
GaussianState tensor(const GaussianState& a, const GaussianState& b);

/// Applies op to the listed modes: mean -> S mean, cov -> S cov S^T.
GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op,
                               const std::vector<int>& modes);

/// Pure-loss channel with transmission eta on one mode.
GaussianState apply_loss(const GaussianState& state, double eta, int mode);

/// Reduced state on the listed modes.
GaussianState marginal(const GaussianState& state, const std::vector<int>& modes);

/// 1/(2^m sqrt(det V)); throws on non-positive det.
double purity(const GaussianState& state);

/// W = Var(x) + Var(p) of a single-mode state.
double total_variance(const GaussianState& state);

/// <n> of one mode, including any displacement energy.
double mean_photon(const GaussianState& state, int mode = 0);

/// QCS of a centred single-mode Gaussian state: [Var(x)+Var(p)] P^2,
/// equal to tr(V^-1)/4.  Throws on displaced input.
double qcs_gaussian(const GaussianState& state);

/// Closed form for a centred Gaussian state with initial total variance W and
/// initial purity P_i, after transmission eta.
double qcs_lossy_gaussian(double w, double purity_i, double eta);

/// QCS of squeezed vacuum with parameter r after transmission eta.
double qcs_squeezed_lossy(double r, double eta);

/// QCS of a thermal state with mean photon number nbar after transmission eta.
double qcs_thermal_lossy(double nbar, double eta);

/// Transmission below which an initially quantum Gaussian state (W P_i^2 > 1)
/// stops being certified by the QCS; equals 1/2 for pure states.
double eta_star(double w, double purity_i);

/// Checks cov + (i/2) Omega >= 0 via eigenvalues (O(m^3), validation only).
bool is_physical(const GaussianState& state, double tol = 1e-9);

}  // namespace qcs
