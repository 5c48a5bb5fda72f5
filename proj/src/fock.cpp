#include "qcs/fock.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace qcs {

namespace {

using std::complex;
const complex<double> kI(0.0, 1.0);

// Tail mass of the squeezed-vacuum photon-number distribution beyond the
// cutoff: p(2m) = C(2m,m) 4^-m tanh^{2m} r / cosh r.
double squeezed_tail(double r, int cutoff) {
  if (r == 0.0) return 0.0;
  const double t2 = std::tanh(r) * std::tanh(r);
  double term = 1.0 / std::cosh(r);  // p(0)
  double cum = term;
  for (int m = 1; 2 * m <= cutoff; ++m) {
    term *= t2 * (2.0 * m - 1.0) / (2.0 * m);
    cum += term;
  }
  return std::max(0.0, 1.0 - cum);
}

CMat embed_on_mode(const CMat& op, int num_modes, int mode, int dim) {
  CMat out = op;
  for (int k = 0; k < mode; ++k)
    out = Eigen::kroneckerProduct(CMat::Identity(dim, dim), out).eval();
  for (int k = mode + 1; k < num_modes; ++k)
    out = Eigen::kroneckerProduct(out, CMat::Identity(dim, dim)).eval();
  return out;
}

std::vector<CMat> loss_kraus_ops(double eta, int cutoff) {
  const int dim = cutoff + 1;
  std::vector<CMat> ops;
  for (int k = 0; k <= cutoff; ++k) {
    CMat kk = CMat::Zero(dim, dim);
    for (int n = k; n <= cutoff; ++n) {
      double binom = 1.0;
      for (int j = 0; j < k; ++j) binom *= static_cast<double>(n - j) / (j + 1);
      kk(n - k, n) = std::sqrt(binom * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    ops.push_back(std::move(kk));
    if (eta == 1.0) break;  // only K_0 survives
  }
  return ops;
}

}  // namespace

LadderOps::LadderOps(int cutoff_) : cutoff(cutoff_) {
  const int dim = cutoff + 1;
  a = CMat::Zero(dim, dim);
  for (int m = 1; m <= cutoff; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  adag = a.adjoint();
  x = (a + adag) / std::sqrt(2.0);
  p = -kI * (a - adag) / std::sqrt(2.0);
  n = CMat::Zero(dim, dim);
  parity = CMat::Zero(dim, dim);
  for (int m = 0; m <= cutoff; ++m) {
    n(m, m) = m;
    parity(m, m) = (m % 2 == 0) ? 1.0 : -1.0;
  }
}

int cutoff_for_squeezing(double r, double tol) {
  for (int d = 10; d <= 400; d += 2)
    if (squeezed_tail(r, d) <= tol) return d;
  throw std::invalid_argument("cutoff_for_squeezing: squeezing too strong for dense cutoffs");
}

FockKet vacuum_ket(int num_modes, int cutoff) {
  FockKet k;
  k.num_modes = num_modes;
  k.cutoff = cutoff;
  int dim = 1;
  for (int m = 0; m < num_modes; ++m) dim *= cutoff + 1;
  k.amps = CVec::Zero(dim);
  k.amps(0) = 1.0;
  return k;
}

FockKet fock_ket(int n, int cutoff) {
  if (n > cutoff) throw CutoffError("fock_ket: n exceeds cutoff", n);
  FockKet k = vacuum_ket(1, cutoff);
  k.amps(0) = 0.0;
  k.amps(n) = 1.0;
  return k;
}

FockKet ket_from_amplitudes(const CVec& amps, int cutoff) {
  if (amps.size() != cutoff + 1)
    throw std::invalid_argument("ket_from_amplitudes: size mismatch");
  FockKet k;
  k.num_modes = 1;
  k.cutoff = cutoff;
  k.amps = amps / amps.norm();
  return k;
}

FockKet tensor(const FockKet& a, const FockKet& b) {
  if (a.cutoff != b.cutoff) throw std::invalid_argument("tensor: cutoffs differ");
  FockKet k;
  k.num_modes = a.num_modes + b.num_modes;
  k.cutoff = a.cutoff;
  k.amps = Eigen::kroneckerProduct(a.amps, b.amps).eval();
  k.norm_deficit = a.norm_deficit + b.norm_deficit;
  return k;
}

CMat squeeze_unitary(double r, double phi, int cutoff) {
  const LadderOps ops(cutoff);
  const complex<double> xi = r * std::exp(kI * phi);
  CMat gen = -0.5 * (xi * ops.adag * ops.adag - std::conj(xi) * ops.a * ops.a);
  return gen.exp();
}

CMat phase_unitary(double theta, int cutoff) {
  const int dim = cutoff + 1;
  CMat u = CMat::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) u(m, m) = std::exp(-kI * (theta * m));
  return u;
}

FockKet squeezed_vacuum_ket(double r, double phi, int cutoff, double trunc_tol) {
  const double tail = squeezed_tail(r, cutoff);
  if (tail > trunc_tol)
    throw CutoffError("squeezed_vacuum_ket: cutoff too small for requested tolerance",
                      cutoff_for_squeezing(r, trunc_tol));
  FockKet k;
  k.num_modes = 1;
  k.cutoff = cutoff;
  k.amps = squeeze_unitary(r, phi, cutoff).col(0);
  k.norm_deficit = tail;
  return k;
}

FockKet tmsv_ket(double r, double phi, int cutoff, double trunc_tol) {
  const int dim = cutoff + 1;
  const double th = std::tanh(r);
  const double tail = std::pow(th * th, dim);
  if (tail > trunc_tol)
    throw CutoffError("tmsv_ket: cutoff too small for requested tolerance",
                      static_cast<int>(std::ceil(std::log(trunc_tol) / std::log(th * th))));
  FockKet k;
  k.num_modes = 2;
  k.cutoff = cutoff;
  k.amps = CVec::Zero(dim * dim);
  const complex<double> ratio = std::exp(kI * phi) * th;
  complex<double> amp = 1.0 / std::cosh(r);
  for (int m = 0; m < dim; ++m) {
    k.amps(m * dim + m) = amp;
    amp *= ratio;
  }
  k.norm_deficit = tail;
  return k;
}

Eigen::Matrix2cd bs_mode_matrix(BsKind kind) {
  Eigen::Matrix2cd u;
  if (kind == BsKind::Symmetric)
    u << 1.0, kI, kI, 1.0;
  else
    u << 1.0, 1.0, 1.0, -1.0;
  return u / std::sqrt(2.0);
}

namespace {

// Generator g of the lift V = exp(sum_jk g_jk adag_j a_k) such that
// V^dag a_l V = sum_k U_lk a_k, i.e. states evolve with <a>' = U <a>.
// That requires g = +log U; the result is anti-Hermitized against round-off.
Eigen::Matrix2cd passive_generator(const Eigen::Matrix2cd& mode_unitary) {
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(mode_unitary);
  Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2cd v = es.eigenvectors().col(k);
    g += std::log(es.eigenvalues()(k)) * (v * v.adjoint());
  }
  return 0.5 * (g - g.adjoint());
}

// Unitary block of the lift within the total-photon-number sector `total`,
// over basis |k, total-k> for k in [max(0,total-cutoff), min(cutoff,total)].
CMat passive_block(const Eigen::Matrix2cd& g, int total, int cutoff) {
  const int kmin = std::max(0, total - cutoff);
  const int kmax = std::min(cutoff, total);
  const int bs = kmax - kmin + 1;
  CMat block = CMat::Zero(bs, bs);
  for (int k = kmin; k <= kmax; ++k) {
    const int row = k - kmin;
    block(row, row) = g(0, 0) * static_cast<double>(k) + g(1, 1) * static_cast<double>(total - k);
    if (k + 1 <= kmax)  // adag_0 a_1
      block(row + 1, row) = g(0, 1) * std::sqrt(static_cast<double>((k + 1) * (total - k)));
    if (k - 1 >= kmin)  // adag_1 a_0
      block(row - 1, row) = g(1, 0) * std::sqrt(static_cast<double>(k * (total - k + 1)));
  }
  return block.exp();
}

}  // namespace

CMat two_mode_passive_unitary(const Eigen::Matrix2cd& mode_unitary, int cutoff) {
  // The generator conserves total photon number, so the lift is assembled
  // per total-n block; truncation keeps the generator anti-Hermitian and
  // hence the lift exactly unitary.
  const Eigen::Matrix2cd g = passive_generator(mode_unitary);
  const int dim = cutoff + 1;
  CMat u = CMat::Zero(dim * dim, dim * dim);
  for (int total = 0; total <= 2 * cutoff; ++total) {
    const int kmin = std::max(0, total - cutoff);
    const int kmax = std::min(cutoff, total);
    const CMat block = passive_block(g, total, cutoff);
    for (int k = kmin; k <= kmax; ++k)
      for (int kp = kmin; kp <= kmax; ++kp)
        u(k * dim + (total - k), kp * dim + (total - kp)) = block(k - kmin, kp - kmin);
  }
  return u;
}

FockKet apply_two_mode_passive(const FockKet& ket, const Eigen::Matrix2cd& mode_unitary) {
  if (ket.num_modes != 2)
    throw std::invalid_argument("apply_two_mode_passive: two-mode kets only");
  const Eigen::Matrix2cd g = passive_generator(mode_unitary);
  const int dim = ket.dim_per_mode();
  FockKet out = ket;
  for (int total = 0; total <= 2 * ket.cutoff; ++total) {
    const int kmin = std::max(0, total - ket.cutoff);
    const int kmax = std::min(ket.cutoff, total);
    const CMat block = passive_block(g, total, ket.cutoff);
    CVec fibre(kmax - kmin + 1);
    for (int k = kmin; k <= kmax; ++k) fibre(k - kmin) = ket.amps(k * dim + (total - k));
    fibre = (block * fibre).eval();
    for (int k = kmin; k <= kmax; ++k) out.amps(k * dim + (total - k)) = fibre(k - kmin);
  }
  return out;
}

CMat bs_unitary(BsKind kind, int cutoff) {
  return two_mode_passive_unitary(bs_mode_matrix(kind), cutoff);
}

FockDensityOperator to_density(const FockKet& ket) {
  FockDensityOperator d;
  d.num_modes = ket.num_modes;
  d.cutoff = ket.cutoff;
  d.rho = ket.amps * ket.amps.adjoint();
  return d;
}

FockDensityOperator tensor(const FockDensityOperator& a, const FockDensityOperator& b) {
  if (a.cutoff != b.cutoff) throw std::invalid_argument("tensor: cutoffs differ");
  FockDensityOperator d;
  d.num_modes = a.num_modes + b.num_modes;
  d.cutoff = a.cutoff;
  d.rho = Eigen::kroneckerProduct(a.rho, b.rho).eval();
  return d;
}

FockDensityOperator thermal_density(double nbar, int cutoff) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("thermal_density: nbar must be >= 0");
  FockDensityOperator d;
  d.num_modes = 1;
  d.cutoff = cutoff;
  d.rho = CMat::Zero(cutoff + 1, cutoff + 1);
  double pm = 1.0 / (nbar + 1.0);
  for (int m = 0; m <= cutoff; ++m) {
    d.rho(m, m) = pm;
    pm *= nbar / (nbar + 1.0);
  }
  return d;
}

FockDensityOperator apply_unitary(const FockDensityOperator& state, const CMat& u) {
  if (u.rows() != state.rho.rows())
    throw std::invalid_argument("apply_unitary: dimension mismatch");
  const double dev = (u * u.adjoint() - CMat::Identity(u.rows(), u.cols()))
                         .cwiseAbs().maxCoeff();
  if (dev > 1e-10) throw std::invalid_argument("apply_unitary: matrix is not unitary");
  FockDensityOperator out = state;
  out.rho = u * state.rho * u.adjoint();
  return out;
}

FockKet apply_unitary(const FockKet& ket, const CMat& u) {
  if (u.rows() != ket.amps.size())
    throw std::invalid_argument("apply_unitary: dimension mismatch");
  FockKet out = ket;
  out.amps = u * ket.amps;
  return out;
}

FockKet apply_two_mode_unitary(const FockKet& ket, const CMat& u2, int mode_a, int mode_b) {
  const int dim = ket.dim_per_mode();
  if (u2.rows() != dim * dim)
    throw std::invalid_argument("apply_two_mode_unitary: dimension mismatch");
  if (mode_a == mode_b || mode_a < 0 || mode_b < 0 || mode_a >= ket.num_modes ||
      mode_b >= ket.num_modes)
    throw std::invalid_argument("apply_two_mode_unitary: bad mode indices");
  // Gather the (n_a, n_b) fibres for every configuration of the other modes.
  const int total = static_cast<int>(ket.amps.size());
  std::vector<int> strides(ket.num_modes);
  int s = 1;
  for (int m = ket.num_modes - 1; m >= 0; --m) {
    strides[m] = s;
    s *= dim;
  }
  FockKet out = ket;
  const int rest = total / (dim * dim);
  std::vector<int> other_modes;
  for (int m = 0; m < ket.num_modes; ++m)
    if (m != mode_a && m != mode_b) other_modes.push_back(m);
  for (int cfg = 0; cfg < rest; ++cfg) {
    int base = 0, c = cfg;
    for (int m = static_cast<int>(other_modes.size()) - 1; m >= 0; --m) {
      base += (c % dim) * strides[other_modes[m]];
      c /= dim;
    }
    CVec fibre(dim * dim);
    for (int na = 0; na < dim; ++na)
      for (int nb = 0; nb < dim; ++nb)
        fibre(na * dim + nb) = ket.amps(base + na * strides[mode_a] + nb * strides[mode_b]);
    fibre = (u2 * fibre).eval();
    for (int na = 0; na < dim; ++na)
      for (int nb = 0; nb < dim; ++nb)
        out.amps(base + na * strides[mode_a] + nb * strides[mode_b]) = fibre(na * dim + nb);
  }
  return out;
}

FockDensityOperator apply_loss_channel(const FockDensityOperator& state, double eta, int mode) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("apply_loss_channel: eta must be in [0,1]");
  if (mode < 0 || mode >= state.num_modes)
    throw std::invalid_argument("apply_loss_channel: mode index out of range");
  const int dim = state.dim_per_mode();
  FockDensityOperator out = state;
  out.rho.setZero();
  for (const CMat& k : loss_kraus_ops(eta, state.cutoff)) {
    const CMat ke = state.num_modes == 1 ? k : embed_on_mode(k, state.num_modes, mode, dim);
    out.rho += ke * state.rho * ke.adjoint();
  }
  return out;
}

FockDensityOperator partial_trace(const FockDensityOperator& state, int keep_mode) {
  if (state.num_modes != 2)
    throw std::invalid_argument("partial_trace: two-mode states only");
  const int dim = state.dim_per_mode();
  FockDensityOperator out;
  out.num_modes = 1;
  out.cutoff = state.cutoff;
  out.rho = CMat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int t = 0; t < dim; ++t)
        out.rho(i, j) += keep_mode == 0 ? state.rho(i * dim + t, j * dim + t)
                                        : state.rho(t * dim + i, t * dim + j);
  return out;
}

FockDensityOperator partial_trace(const FockKet& ket, int keep_mode) {
  if (ket.num_modes != 2)
    throw std::invalid_argument("partial_trace: two-mode kets only");
  const int dim = ket.dim_per_mode();
  Eigen::Map<const CMat> m(ket.amps.data(), dim, dim);  // m(n1, n0), column-major
  FockDensityOperator out;
  out.num_modes = 1;
  out.cutoff = ket.cutoff;
  // amps index is n0*dim + n1, so column c of the map is the fibre at n0 = c.
  if (keep_mode == 0)
    out.rho = (m.adjoint() * m).conjugate();
  else
    out.rho = m * m.adjoint();
  return out;
}

FockDensityOperator truncate(const FockDensityOperator& state, int new_cutoff) {
  if (state.num_modes != 1)
    throw std::invalid_argument("truncate: single-mode states only");
  const int dim = new_cutoff + 1;
  FockDensityOperator out;
  out.num_modes = 1;
  out.cutoff = new_cutoff;
  out.rho = CMat::Zero(dim, dim);
  const int copy = std::min(dim, state.dim_per_mode());
  out.rho.topLeftCorner(copy, copy) = state.rho.topLeftCorner(copy, copy);
  const double tr = out.rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("truncate: vanishing trace");
  out.rho /= tr;
  return out;
}

double purity_fock(const FockDensityOperator& state) {
  return (state.rho * state.rho).trace().real();
}

double mean_photon(const FockDensityOperator& state, int mode) {
  const Eigen::VectorXd p = photon_marginal(state, mode);
  double n = 0.0;
  for (int m = 0; m < p.size(); ++m) n += m * p(m);
  return n;
}

double mean_photon(const FockKet& ket, int mode) {
  return mean_photon(to_density(ket), mode);
}

double qcs_direct(const FockDensityOperator& state, double purity_floor) {
  if (state.num_modes != 1)
    throw std::invalid_argument("qcs_direct: single-mode states only");
  const double pur = purity_fock(state);
  if (pur < purity_floor)
    throw std::domain_error("qcs_direct: purity below conditioning floor");
  const double top = state.rho(state.cutoff, state.cutoff).real() +
                     (state.cutoff > 0 ? state.rho(state.cutoff - 1, state.cutoff - 1).real() : 0.0);
  if (top > 1e-6)
    throw CutoffError("qcs_direct: state population reaches the cutoff", 2 * state.cutoff);
  const LadderOps ops(state.cutoff);
  const CMat cx = state.rho * ops.x - ops.x * state.rho;
  const CMat cp = state.rho * ops.p - ops.p * state.rho;
  // Tr([rho,x][x,rho]) = ||[rho,x]||_F^2 since [rho,x] is anti-Hermitian.
  return (cx.squaredNorm() + cp.squaredNorm()) / (2.0 * pur);
}

std::vector<double> two_copy_marginal(const FockDensityOperator& state) {
  if (state.num_modes != 1)
    throw std::invalid_argument("two_copy_marginal: single-mode states only");
  // Eigendecompose rho and interfere every pair of eigenvectors; this never
  // forms rho (x) rho, so it scales to the cutoffs pure states need.
  const int dim = state.dim_per_mode();
  Eigen::SelfAdjointEigenSolver<CMat> es(state.rho);
  std::vector<double> p(dim, 0.0);
  FockKet pair;
  pair.num_modes = 2;
  pair.cutoff = state.cutoff;
  const Eigen::Matrix2cd bs = bs_mode_matrix(BsKind::Balanced);
  for (int i = 0; i < dim; ++i) {
    const double li = es.eigenvalues()(i);
    if (li < 1e-15) continue;
    for (int j = 0; j < dim; ++j) {
      const double lj = es.eigenvalues()(j);
      if (li * lj < 1e-16) continue;
      pair.amps = CVec::Zero(dim * dim);
      for (int na = 0; na < dim; ++na)
        pair.amps.segment(na * dim, dim) = es.eigenvectors()(na, i) * es.eigenvectors().col(j);
      const FockKet out = apply_two_mode_passive(pair, bs);
      for (int na = 0; na < dim; ++na)
        for (int nb = 0; nb < dim; ++nb)
          p[nb] += li * lj * std::norm(out.amps(na * dim + nb));
    }
  }
  return p;
}

double qcs_two_copy(const FockDensityOperator& state, double purity_floor) {
  const std::vector<double> p = two_copy_marginal(state);
  double num = 0.0, den = 0.0;
  for (int n = 0; n < static_cast<int>(p.size()); ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    den += sign * p[n];
    num += sign * (1.0 + 2.0 * n) * p[n];
  }
  if (std::abs(den) < purity_floor)
    throw std::domain_error("qcs_two_copy: parity denominator below conditioning floor");
  return num / den;
}

Eigen::VectorXd photon_distribution(const FockDensityOperator& state) {
  return state.rho.diagonal().real();
}

Eigen::VectorXd photon_marginal(const FockDensityOperator& state, int mode) {
  const Eigen::VectorXd joint = photon_distribution(state);
  if (state.num_modes == 1) return joint;
  if (state.num_modes != 2)
    throw std::invalid_argument("photon_marginal: at most two modes");
  const int dim = state.dim_per_mode();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
  for (int n0 = 0; n0 < dim; ++n0)
    for (int n1 = 0; n1 < dim; ++n1)
      p(mode == 0 ? n0 : n1) += joint(n0 * dim + n1);
  return p;
}

FockDensityOperator from_gaussian(const GaussianState& state, int cutoff) {
  if (state.num_modes != 1)
    throw std::invalid_argument("from_gaussian: single-mode states only");
  if (!state.is_centred())
    throw std::invalid_argument("from_gaussian: centred states only");
  const double det = state.cov.determinant();
  if (!(det > 0.0)) throw std::domain_error("from_gaussian: invalid covariance");
  const double nu = std::sqrt(det);
  const double nbar = std::max(0.0, nu - 0.5);
  // V = M (nu I) M with M = sqrt(V/nu) symmetric symplectic, i.e. a squeeze.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(state.cov / nu);
  const double r = 0.5 * std::log(es.eigenvalues().maxCoeff());
  FockDensityOperator th = thermal_density(nbar, cutoff);
  if (r < 1e-12) return th;
  const Eigen::Matrix2d m = es.operatorSqrt();
  const Eigen::Matrix2d axis = (std::cosh(r) * Eigen::Matrix2d::Identity() - m) / std::sinh(r);
  const double phi = std::atan2(axis(0, 1), axis(0, 0));
  return apply_unitary(th, squeeze_unitary(r, phi, cutoff));
}

}  // namespace qcs
