#include "qcs/gaussian.hpp"

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

namespace qcs {

namespace {

void symmetrize(Mat& v) { v = ((v + v.transpose()) * 0.5).eval(); }

Mat squeeze_axis_matrix(double phi) {
  Mat r(2, 2);
  r << std::cos(phi), std::sin(phi), std::sin(phi), -std::cos(phi);
  return r;
}

}  // namespace

GaussianState GaussianState::vacuum(int num_modes) {
  if (num_modes <= 0) throw std::invalid_argument("vacuum: num_modes must be positive");
  GaussianState s;
  s.num_modes = num_modes;
  s.mean = Vec::Zero(2 * num_modes);
  s.cov = 0.5 * Mat::Identity(2 * num_modes, 2 * num_modes);
  return s;
}

bool GaussianState::is_centred(double tol) const {
  return mean.lpNorm<Eigen::Infinity>() <= tol;
}

Mat symplectic_form(int num_modes) {
  Mat omega = Mat::Zero(2 * num_modes, 2 * num_modes);
  for (int k = 0; k < num_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

SymplecticOp squeeze_op(double r, double phi) {
  if (!std::isfinite(r)) throw std::invalid_argument("squeeze_op: r must be finite");
  Mat s = std::cosh(r) * Mat::Identity(2, 2) - std::sinh(r) * squeeze_axis_matrix(phi);
  return {s, "squeeze"};
}

SymplecticOp phase_op(double theta) {
  Mat s(2, 2);
  s << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return {s, "phase"};
}

SymplecticOp passive_op(const Eigen::MatrixXcd& mode_unitary, const std::string& descriptor) {
  const int m = static_cast<int>(mode_unitary.rows());
  if (mode_unitary.cols() != m) throw std::invalid_argument("passive_op: square matrix required");
  if ((mode_unitary * mode_unitary.adjoint() - Eigen::MatrixXcd::Identity(m, m)).norm() > 1e-10)
    throw std::invalid_argument("passive_op: matrix is not unitary");
  Mat s = Mat::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      const double re = mode_unitary(j, k).real();
      const double im = mode_unitary(j, k).imag();
      s(2 * j, 2 * k) = re;
      s(2 * j, 2 * k + 1) = -im;
      s(2 * j + 1, 2 * k) = im;
      s(2 * j + 1, 2 * k + 1) = re;
    }
  return {s, descriptor};
}

SymplecticOp bs_symmetric_op() {
  Eigen::Matrix2cd u;
  const std::complex<double> i(0.0, 1.0);
  u << 1.0, i, i, 1.0;
  u /= std::sqrt(2.0);
  return passive_op(u, "bs_symmetric");
}

SymplecticOp bs_balanced_op() {
  Eigen::Matrix2cd u;
  u << 1.0, 1.0, 1.0, -1.0;
  u /= std::sqrt(2.0);
  return passive_op(u, "bs_balanced");
}

SymplecticOp custom_op(const Mat& matrix, const std::string& descriptor) {
  const int n = static_cast<int>(matrix.rows());
  if (matrix.cols() != n || n % 2 != 0)
    throw std::invalid_argument("custom_op: even-dimensional square matrix required");
  const Mat omega = symplectic_form(n / 2);
  if ((matrix.transpose() * omega * matrix - omega).lpNorm<Eigen::Infinity>() > 1e-10)
    throw std::invalid_argument("custom_op: matrix is not symplectic");
  return {matrix, descriptor};
}

GaussianState make_squeezed_vacuum(double r, double phi) {
  if (!std::isfinite(r)) throw std::invalid_argument("make_squeezed_vacuum: r must be finite");
  GaussianState s;
  s.num_modes = 1;
  s.mean = Vec::Zero(2);
  s.cov = 0.5 * std::cosh(2.0 * r) * Mat::Identity(2, 2) -
          0.5 * std::sinh(2.0 * r) * squeeze_axis_matrix(phi);
  return s;
}

GaussianState make_thermal(double nbar) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("make_thermal: nbar must be >= 0");
  GaussianState s;
  s.num_modes = 1;
  s.mean = Vec::Zero(2);
  s.cov = (nbar + 0.5) * Mat::Identity(2, 2);
  return s;
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  GaussianState s;
  s.num_modes = a.num_modes + b.num_modes;
  s.mean = Vec::Zero(2 * s.num_modes);
  s.mean.head(2 * a.num_modes) = a.mean;
  s.mean.tail(2 * b.num_modes) = b.mean;
  s.cov = Mat::Zero(2 * s.num_modes, 2 * s.num_modes);
  s.cov.topLeftCorner(2 * a.num_modes, 2 * a.num_modes) = a.cov;
  s.cov.bottomRightCorner(2 * b.num_modes, 2 * b.num_modes) = b.cov;
  return s;
}

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op,
                               const std::vector<int>& modes) {
  const int k = static_cast<int>(modes.size());
  if (op.num_modes() != k)
    throw std::invalid_argument("apply_symplectic: op dimension does not match mode count");
  std::set<int> seen;
  for (int m : modes) {
    if (m < 0 || m >= state.num_modes)
      throw std::invalid_argument("apply_symplectic: mode index out of range");
    if (!seen.insert(m).second)
      throw std::invalid_argument("apply_symplectic: repeated mode index");
  }
  Mat s = Mat::Identity(2 * state.num_modes, 2 * state.num_modes);
  for (int l = 0; l < k; ++l)
    for (int lp = 0; lp < k; ++lp) {
      s(2 * modes[l], 2 * modes[lp]) = op.matrix(2 * l, 2 * lp);
      s(2 * modes[l], 2 * modes[lp] + 1) = op.matrix(2 * l, 2 * lp + 1);
      s(2 * modes[l] + 1, 2 * modes[lp]) = op.matrix(2 * l + 1, 2 * lp);
      s(2 * modes[l] + 1, 2 * modes[lp] + 1) = op.matrix(2 * l + 1, 2 * lp + 1);
    }
  GaussianState out = state;
  out.mean = s * state.mean;
  out.cov = s * state.cov * s.transpose();
  symmetrize(out.cov);
  return out;
}

GaussianState apply_loss(const GaussianState& state, double eta, int mode) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("apply_loss: eta must be in [0,1]");
  if (mode < 0 || mode >= state.num_modes)
    throw std::invalid_argument("apply_loss: mode index out of range");
  const double root = std::sqrt(eta);
  Vec scale = Vec::Ones(2 * state.num_modes);
  scale(2 * mode) = root;
  scale(2 * mode + 1) = root;
  GaussianState out = state;
  out.mean = scale.asDiagonal() * state.mean;
  out.cov = scale.asDiagonal() * state.cov * scale.asDiagonal();
  out.cov(2 * mode, 2 * mode) += 0.5 * (1.0 - eta);
  out.cov(2 * mode + 1, 2 * mode + 1) += 0.5 * (1.0 - eta);
  symmetrize(out.cov);
  return out;
}

GaussianState marginal(const GaussianState& state, const std::vector<int>& modes) {
  GaussianState out;
  out.num_modes = static_cast<int>(modes.size());
  out.mean = Vec::Zero(2 * out.num_modes);
  out.cov = Mat::Zero(2 * out.num_modes, 2 * out.num_modes);
  for (int l = 0; l < out.num_modes; ++l) {
    if (modes[l] < 0 || modes[l] >= state.num_modes)
      throw std::invalid_argument("marginal: mode index out of range");
    out.mean.segment<2>(2 * l) = state.mean.segment<2>(2 * modes[l]);
    for (int lp = 0; lp < out.num_modes; ++lp)
      out.cov.block<2, 2>(2 * l, 2 * lp) = state.cov.block<2, 2>(2 * modes[l], 2 * modes[lp]);
  }
  return out;
}

double purity(const GaussianState& state) {
  const double det = state.cov.determinant();
  if (!(det > 0.0)) throw std::domain_error("purity: covariance has non-positive determinant");
  return 1.0 / (std::pow(2.0, state.num_modes) * std::sqrt(det));
}

double total_variance(const GaussianState& state) {
  if (state.num_modes != 1) throw std::invalid_argument("total_variance: single mode only");
  return state.cov(0, 0) + state.cov(1, 1);
}

double mean_photon(const GaussianState& state, int mode) {
  if (mode < 0 || mode >= state.num_modes)
    throw std::invalid_argument("mean_photon: mode index out of range");
  const double vxx = state.cov(2 * mode, 2 * mode);
  const double vpp = state.cov(2 * mode + 1, 2 * mode + 1);
  const double mx = state.mean(2 * mode);
  const double mp = state.mean(2 * mode + 1);
  return 0.5 * (vxx + vpp - 1.0) + 0.5 * (mx * mx + mp * mp);
}

double qcs_gaussian(const GaussianState& state) {
  if (state.num_modes != 1) throw std::invalid_argument("qcs_gaussian: single mode only");
  if (!state.is_centred())
    throw std::invalid_argument("qcs_gaussian: state must be centred at the origin");
  const double p = purity(state);
  return total_variance(state) * p * p;
}

double qcs_lossy_gaussian(double w, double purity_i, double eta) {
  if (!(w >= 1.0)) throw std::invalid_argument("qcs_lossy_gaussian: W must be >= 1");
  if (!(purity_i > 0.0 && purity_i <= 1.0))
    throw std::invalid_argument("qcs_lossy_gaussian: purity must be in (0,1]");
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("qcs_lossy_gaussian: eta must be in [0,1]");
  const double p2 = purity_i * purity_i;
  const double num = (eta * (w - 1.0) + 1.0) * p2;
  const double den = eta * eta + (1.0 - eta) * (eta * (2.0 * w - 1.0) + 1.0) * p2;
  return num / den;
}

double qcs_squeezed_lossy(double r, double eta) {
  if (!(r >= 0.0)) throw std::invalid_argument("qcs_squeezed_lossy: r must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("qcs_squeezed_lossy: eta must be in [0,1]");
  const double t = eta * std::cosh(2.0 * r) - eta;
  return 1.0 / (1.0 + (1.0 - 2.0 * eta) * t / (t + 1.0));
}

double qcs_thermal_lossy(double nbar, double eta) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("qcs_thermal_lossy: nbar must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("qcs_thermal_lossy: eta must be in [0,1]");
  return 1.0 / (1.0 + 2.0 * eta * nbar);
}

double eta_star(double w, double purity_i) {
  if (!(w >= 1.0)) throw std::invalid_argument("eta_star: W must be >= 1");
  if (!(purity_i > 0.0 && purity_i <= 1.0))
    throw std::invalid_argument("eta_star: purity must be in (0,1]");
  const double p2 = purity_i * purity_i;
  if (!(w * p2 > 1.0))
    throw std::domain_error("eta_star: initial state has QCS <= 1, no crossing exists");
  return p2 * (w - 1.0) / (2.0 * p2 * w - p2 - 1.0);
}

bool is_physical(const GaussianState& state, double tol) {
  const int n = 2 * state.num_modes;
  if ((state.cov - state.cov.transpose()).lpNorm<Eigen::Infinity>() >
      1e-12 * std::max(1.0, state.cov.lpNorm<Eigen::Infinity>()))
    return false;
  Eigen::MatrixXcd m = state.cov.cast<std::complex<double>>() +
                       std::complex<double>(0.0, 0.5) * symplectic_form(state.num_modes).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace qcs
