#include "qcs/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qcs {

namespace {

constexpr double kPi = std::numbers::pi;

// Recognized experiment shape, extracted for the Fock engine and metadata.
struct Classified {
  std::string kind;  // "sv", "thermal" or "custom"
  double r = 0.0;
  double phi = 0.0;
  double eta = 1.0;
  int compared_mode = -1;                       // input line feeding the marginal
  const CircuitSpec::Element* bs_b = nullptr;   // the balanced beam splitter
  const CircuitSpec::Element* bs_pair = nullptr;  // TMSV-forming splitter (thermal)
};

const CircuitSpec::Source* source_on(const CircuitSpec& spec, int mode) {
  for (const auto& s : spec.sources)
    if (s.mode == mode) return &s;
  return nullptr;
}

double loss_on(const CircuitSpec& spec, int mode) {
  double eta = 1.0;
  for (const auto& e : spec.elements)
    if (e.kind == CircuitSpec::Element::Kind::Loss && e.mode_a == mode) eta *= e.value;
  return eta;
}

Classified classify(const CircuitSpec& spec) {
  Classified c;
  c.kind = "custom";
  std::vector<const CircuitSpec::Element*> balanced, symmetric;
  for (const auto& e : spec.elements)
    if (e.kind == CircuitSpec::Element::Kind::BeamSplitter)
      (e.bs_kind == BsKind::Balanced ? balanced : symmetric).push_back(&e);
  if (balanced.size() != 1) return c;
  c.bs_b = balanced.front();
  const int in_a = c.bs_b->mode_a;
  const int in_b = c.bs_b->mode_b;
  const double eta_a = loss_on(spec, in_a);
  const double eta_b = loss_on(spec, in_b);
  if (std::abs(eta_a - eta_b) > 1e-12)
    throw std::invalid_argument("run_circuit: loss must be identical on both compared inputs");
  c.eta = eta_a;
  c.compared_mode = in_a;

  if (symmetric.empty() && spec.sources.size() == 2) {
    const auto* sa = source_on(spec, in_a);
    const auto* sb = source_on(spec, in_b);
    if (!sa || !sb) return c;
    if (std::abs(sa->r - sb->r) > 1e-12 || std::abs(sa->phi - sb->phi) > 1e-12)
      throw std::invalid_argument("run_circuit: the two squeezed copies must be identical");
    c.kind = "sv";
    c.r = sa->r;
    c.phi = sa->phi;
    return c;
  }
  if (symmetric.size() == 2 && spec.sources.size() == 4) {
    for (const auto* bs : symmetric)
      if (bs->mode_a == in_a || bs->mode_b == in_a) c.bs_pair = bs;
    if (!c.bs_pair) return c;
    const auto* sa = source_on(spec, c.bs_pair->mode_a);
    const auto* sb = source_on(spec, c.bs_pair->mode_b);
    if (!sa || !sb) return c;
    if (std::abs(sa->r - sb->r) > 1e-12 || std::abs(sa->phi - sb->phi) > 1e-12)
      throw std::invalid_argument("run_circuit: TMSV-forming sources must be identical");
    c.kind = "thermal";
    c.r = sa->r;
    c.phi = sa->phi;
    return c;
  }
  return c;
}

GaussianState run_gaussian(const CircuitSpec& spec) {
  GaussianState st = GaussianState::vacuum(spec.num_modes());
  for (const auto& s : spec.sources)
    st = apply_symplectic(st, squeeze_op(s.r, s.phi), {s.mode});
  for (const auto& e : spec.elements) {
    switch (e.kind) {
      case CircuitSpec::Element::Kind::BeamSplitter:
        st = apply_symplectic(
            st, e.bs_kind == BsKind::Symmetric ? bs_symmetric_op() : bs_balanced_op(),
            {e.mode_a, e.mode_b});
        break;
      case CircuitSpec::Element::Kind::Phase:
        st = apply_symplectic(st, phase_op(e.value), {e.mode_a});
        break;
      case CircuitSpec::Element::Kind::Loss:
        st = apply_loss(st, e.value, e.mode_a);
        break;
    }
  }
  return st;
}

// Smallest cutoff whose diagonal tail mass stays below tol.
int compress_cutoff(const FockDensityOperator& rho, double tol = 1e-12, int min_cutoff = 8) {
  const Eigen::VectorXd diag = photon_distribution(rho);
  double tail = std::max(0.0, 1.0 - diag.sum());
  int d = rho.cutoff;
  for (int n = rho.cutoff; n > min_cutoff; --n) {
    tail += diag(n);
    if (tail > tol) break;
    d = n - 1;
  }
  return d;
}

// Single-copy state entering the balanced beam splitter, built in Fock space.
FockDensityOperator single_copy_fock(const CircuitSpec& spec, const Classified& c,
                                     const RunOptions& options) {
  const int cutoff = options.cutoff ? *options.cutoff : cutoff_for_squeezing(c.r, 1e-10);
  FockDensityOperator rho;
  if (c.kind == "sv") {
    FockKet ket = squeezed_vacuum_ket(c.r, c.phi, cutoff);
    for (const auto& e : spec.elements) {
      if (&e == c.bs_b) break;
      if (e.kind == CircuitSpec::Element::Kind::Phase && e.mode_a == c.compared_mode)
        ket = apply_unitary(ket, phase_unitary(e.value, cutoff));
    }
    rho = to_density(ket);
  } else {  // thermal: TMSV pair, trace out the partner branch
    const auto* src = source_on(spec, c.bs_pair->mode_a);
    FockKet pair = tensor(squeezed_vacuum_ket(src->r, src->phi, cutoff),
                          squeezed_vacuum_ket(src->r, src->phi, cutoff));
    pair = apply_two_mode_passive(pair, bs_mode_matrix(BsKind::Symmetric));
    rho = partial_trace(pair, c.compared_mode == c.bs_pair->mode_a ? 0 : 1);
    for (const auto& e : spec.elements) {
      if (&e == c.bs_b) break;
      if (e.kind == CircuitSpec::Element::Kind::Phase && e.mode_a == c.compared_mode)
        rho = apply_unitary(rho, phase_unitary(e.value, cutoff));
    }
  }
  if (c.eta < 1.0) rho = apply_loss_channel(rho, c.eta, 0);
  return truncate(rho, compress_cutoff(rho));
}

CountDistribution to_distribution(std::vector<double> p) {
  Eigen::VectorXd v(p.size());
  for (std::size_t n = 0; n < p.size(); ++n) v(n) = std::max(0.0, p[n]);
  return exact_distribution(v);
}

}  // namespace

int CircuitSpec::num_modes() const {
  int m = marginal_mode;
  for (const auto& s : sources) m = std::max(m, s.mode);
  for (const auto& e : elements) m = std::max({m, e.mode_a, e.mode_b});
  for (int d : detected) m = std::max(m, d);
  return m + 1;
}

void CircuitSpec::validate() const {
  const int modes = num_modes();
  auto check = [modes](int m, const char* what) {
    if (m < 0 || m >= modes) throw std::invalid_argument(std::string("CircuitSpec: bad mode in ") + what);
  };
  for (const auto& s : sources) {
    check(s.mode, "source");
    if (!(s.r >= 0.0)) throw std::invalid_argument("CircuitSpec: source r must be >= 0");
  }
  for (const auto& e : elements) {
    check(e.mode_a, "element");
    if (e.kind == Element::Kind::BeamSplitter) {
      check(e.mode_b, "bs");
      if (e.mode_a == e.mode_b) throw std::invalid_argument("CircuitSpec: bs needs two distinct modes");
    }
    if (e.kind == Element::Kind::Loss && !(e.value >= 0.0 && e.value <= 1.0))
      throw std::invalid_argument("CircuitSpec: loss eta must be in [0,1]");
  }
  if (std::find(detected.begin(), detected.end(), marginal_mode) == detected.end())
    throw std::invalid_argument("CircuitSpec: marginal mode must be detected");
}

CircuitSpec build_sv_experiment(double r, double phi, double eta) {
  CircuitSpec spec;
  spec.sources = {{0, r, phi}, {1, r, phi}};
  spec.elements.push_back({CircuitSpec::Element::Kind::Loss, BsKind::Balanced, 0, 0, eta});
  spec.elements.push_back({CircuitSpec::Element::Kind::Loss, BsKind::Balanced, 1, 0, eta});
  spec.elements.push_back({CircuitSpec::Element::Kind::BeamSplitter, BsKind::Balanced, 0, 1, 0.0});
  spec.detected = {0, 1};
  spec.marginal_mode = 1;  // destructive interference for identical inputs
  spec.validate();
  return spec;
}

CircuitSpec build_thermal_experiment(double r, double phi, double eta) {
  CircuitSpec spec;
  const double chi = phi + kPi / 2.0;  // source phase that makes BS_S emit TMSV(phi)
  spec.sources = {{0, r, chi}, {1, r, chi}, {2, r, chi}, {3, r, chi}};
  spec.elements.push_back({CircuitSpec::Element::Kind::BeamSplitter, BsKind::Symmetric, 0, 1, 0.0});
  spec.elements.push_back({CircuitSpec::Element::Kind::BeamSplitter, BsKind::Symmetric, 2, 3, 0.0});
  spec.elements.push_back({CircuitSpec::Element::Kind::Loss, BsKind::Balanced, 0, 0, eta});
  spec.elements.push_back({CircuitSpec::Element::Kind::Loss, BsKind::Balanced, 2, 0, eta});
  spec.elements.push_back({CircuitSpec::Element::Kind::BeamSplitter, BsKind::Balanced, 0, 2, 0.0});
  spec.detected = {0, 1, 2, 3};
  spec.marginal_mode = 2;
  spec.validate();
  return spec;
}

CircuitSpec parse_circuit(std::istream& is) {
  CircuitSpec spec;
  spec.marginal_mode = -1;
  std::string line;
  auto value_of = [](const std::string& token, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (token.rfind(prefix, 0) != 0)
      throw std::invalid_argument("parse_circuit: expected " + prefix + "<f>, got " + token);
    return std::stod(token.substr(prefix.size()));
  };
  while (std::getline(is, line)) {
    std::istringstream row(line);
    std::string word;
    if (!(row >> word) || word[0] == '#') continue;
    if (word == "source") {
      int mode;
      std::string rf, pf;
      if (!(row >> mode >> rf >> pf)) throw std::invalid_argument("parse_circuit: bad source line");
      spec.sources.push_back({mode, value_of(rf, "r"), value_of(pf, "phi")});
    } else if (word == "bs") {
      std::string kind;
      int m1, m2;
      if (!(row >> kind >> m1 >> m2)) throw std::invalid_argument("parse_circuit: bad bs line");
      if (kind != "symmetric" && kind != "balanced")
        throw std::invalid_argument("parse_circuit: bs kind must be symmetric or balanced");
      spec.elements.push_back({CircuitSpec::Element::Kind::BeamSplitter,
                               kind == "symmetric" ? BsKind::Symmetric : BsKind::Balanced, m1, m2,
                               0.0});
    } else if (word == "loss") {
      int mode;
      std::string ef;
      if (!(row >> mode >> ef)) throw std::invalid_argument("parse_circuit: bad loss line");
      spec.elements.push_back(
          {CircuitSpec::Element::Kind::Loss, BsKind::Balanced, mode, 0, value_of(ef, "eta")});
    } else if (word == "phase") {
      int mode;
      std::string tf;
      if (!(row >> mode >> tf)) throw std::invalid_argument("parse_circuit: bad phase line");
      spec.elements.push_back(
          {CircuitSpec::Element::Kind::Phase, BsKind::Balanced, mode, 0, value_of(tf, "theta")});
    } else if (word == "detect") {
      int mode;
      while (row >> mode) spec.detected.push_back(mode);
    } else if (word == "marginal") {
      if (!(row >> spec.marginal_mode)) throw std::invalid_argument("parse_circuit: bad marginal line");
    } else {
      throw std::invalid_argument("parse_circuit: unknown directive " + word);
    }
  }
  if (spec.marginal_mode < 0) throw std::invalid_argument("parse_circuit: missing marginal line");
  spec.validate();
  return spec;
}

CircuitSpec parse_circuit(const std::string& text) {
  std::istringstream is(text);
  return parse_circuit(is);
}

std::string serialize_circuit(const CircuitSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& s : spec.sources)
    os << "source " << s.mode << " r=" << s.r << " phi=" << s.phi << "\n";
  for (const auto& e : spec.elements) {
    switch (e.kind) {
      case CircuitSpec::Element::Kind::BeamSplitter:
        os << "bs " << (e.bs_kind == BsKind::Symmetric ? "symmetric" : "balanced") << ' '
           << e.mode_a << ' ' << e.mode_b << "\n";
        break;
      case CircuitSpec::Element::Kind::Loss:
        os << "loss " << e.mode_a << " eta=" << e.value << "\n";
        break;
      case CircuitSpec::Element::Kind::Phase:
        os << "phase " << e.mode_a << " theta=" << e.value << "\n";
        break;
    }
  }
  os << "detect";
  for (int d : spec.detected) os << ' ' << d;
  os << "\nmarginal " << spec.marginal_mode << "\n";
  return os.str();
}

GaussianState marginal_mode_state(const CircuitSpec& spec) {
  return marginal(run_gaussian(spec), {spec.marginal_mode});
}

ExperimentResult run_circuit(const CircuitSpec& spec, Engine engine, const RunOptions& options) {
  spec.validate();
  const Classified c = classify(spec);
  ExperimentResult res;
  res.engine = engine;
  res.kind = c.kind;
  res.r = c.r;
  res.eta = c.eta;

  const GaussianState vm = marginal_mode_state(spec);
  res.qcs_analytic = qcs_gaussian(vm);

  if (engine == Engine::Gaussian) {
    res.purity = purity(vm);
    res.mean_photon_out = mean_photon(vm);
    if (options.want_distribution) {
      // Fock image of the reduced state; for Gaussian circuits the marginal
      // mode's reduced state is exactly the lossy single-copy state.
      int build = options.cutoff ? *options.cutoff : 40;
      FockDensityOperator rho = from_gaussian(vm, build);
      // Grow the build space until neither the trace nor the top of the
      // spectrum carries weight (the squeeze conjugation preserves trace, so
      // the trace deficit alone cannot detect a too-small cutoff).
      const auto cramped = [](const FockDensityOperator& r) {
        const Eigen::VectorXd diag = photon_distribution(r);
        const int top = static_cast<int>(diag.size());
        return 1.0 - diag.sum() > 1e-12 || diag(top - 1) + diag(top - 2) > 1e-12;
      };
      while (!options.cutoff && cramped(rho) && build < 320) {
        build *= 2;
        rho = from_gaussian(vm, build);
      }
      rho = truncate(rho, compress_cutoff(rho));
      res.cutoff_used = rho.cutoff;
      res.qcs_direct = qcs_direct(rho);
      res.qcs_two_copy = qcs_two_copy(rho);
      res.exact_distribution = exact_distribution(photon_distribution(rho));
    }
    return res;
  }

  if (c.kind == "custom")
    throw std::invalid_argument("run_circuit: unrecognized circuit shape for the fock engine");
  const FockDensityOperator rho = single_copy_fock(spec, c, options);
  res.cutoff_used = rho.cutoff;
  res.purity = purity_fock(rho);
  res.qcs_direct = qcs_direct(rho);
  const std::vector<double> p = two_copy_marginal(rho);
  res.exact_distribution = to_distribution(p);
  double num = 0.0, den = 0.0, nbar = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    den += sign * p[n];
    num += sign * (1.0 + 2.0 * n) * p[n];
    nbar += n * p[n];
  }
  res.qcs_two_copy = num / den;
  res.mean_photon_out = nbar;
  return res;
}

std::pair<double, double> mean_photon_and_difference_moment(const ExperimentResult& result) {
  if (result.kind == "custom") return {result.mean_photon_out, result.mean_photon_out};
  // Both experiment families probe a zero-mean input of energy sinh^2 r.
  const double sh = std::sinh(result.r);
  return {result.mean_photon_out, result.eta * sh * sh};
}

}  // namespace qcs
