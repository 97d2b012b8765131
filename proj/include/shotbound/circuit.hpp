#pragma once

// Layered parametrized circuits with data re-uploading and a per-step local
// depolarizing noise schedule, simulated on density matrices.
//
// Qubit 0 is the most significant bit of the computational-basis index. A
// gate acting on qubits {q_0, ..., q_{k-1}} carries a 2^k x 2^k matrix whose
// index ordering follows the same convention (q_0 most significant).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shotbound/errors.hpp"
#include "shotbound/linalg.hpp"
#include "shotbound/qcore.hpp"

namespace shotbound {

using DataPoint = std::vector<double>;

enum class GateKind { encode, variational, fixed };

inline const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::encode: return "encode";
    case GateKind::variational: return "variational";
    case GateKind::fixed: return "fixed";
  }
  return "?";
}

inline GateKind gate_kind_from_string(const std::string& s) {
  if (s == "encode") return GateKind::encode;
  if (s == "variational") return GateKind::variational;
  if (s == "fixed") return GateKind::fixed;
  throw StructureError("unknown gate kind '" + s + "'");
}

// How generators enter e^{-i t G}: as given, or shifted by the midpoint of
// their spectrum so that ||G||_inf equals half the spectral spread.
enum class GeneratorPhase { as_given, centered };

namespace gates {

inline ComplexMatrix pauli(char c) {
  ComplexMatrix m(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -kI, kI, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw StructureError(std::string("unknown Pauli '") + c + "'");
  }
  return m;
}

// Tensor product of Paulis, e.g. "ZZ" or "XIY".
inline ComplexMatrix pauli_string(const std::string& s) {
  if (s.empty()) throw StructureError("empty Pauli string");
  ComplexMatrix out = pauli(s[0]);
  for (std::size_t k = 1; k < s.size(); ++k) out = linalg::kron(out, pauli(s[k]));
  return out;
}

inline std::optional<ComplexMatrix> named_unitary(const std::string& name) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix m;
  if (name == "I" || name == "X" || name == "Y" || name == "Z") return pauli(name[0]);
  if (name == "H") {
    m.resize(2, 2);
    m << r, r, r, -r;
  } else if (name == "S") {
    m.resize(2, 2);
    m << 1, 0, 0, kI;
  } else if (name == "T") {
    m.resize(2, 2);
    m << 1, 0, 0, std::exp(kI * (M_PI / 4.0));
  } else if (name == "CNOT" || name == "CX") {
    m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  } else if (name == "CZ") {
    m = ComplexMatrix::Identity(4, 4);
    m(3, 3) = -1.0;
  } else if (name == "SWAP") {
    m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  } else {
    return std::nullopt;
  }
  return m;
}

}  // namespace gates

// Largest minus smallest eigenvalue of a Hermitian generator.
inline double spectral_spread(const ComplexMatrix& g) {
  linalg::require_square(g, "spectral_spread");
  if (!linalg::is_hermitian(g, 1e-10)) throw StructureError("spectral_spread: generator not Hermitian");
  const RealVector ev = linalg::hermitian_eigenvalues(g);
  return ev.maxCoeff() - ev.minCoeff();
}

class GateSpec {
 public:
  // e^{-i x_{param_index} G}
  static GateSpec encode(std::vector<int> qubits, ComplexMatrix generator, int param_index,
                         std::string name = {}) {
    return GateSpec(GateKind::encode, std::move(qubits), std::move(generator), param_index, 0.0,
                    std::move(name));
  }
  // e^{-i theta G}
  static GateSpec variational(std::vector<int> qubits, ComplexMatrix generator, double theta,
                              std::string name = {}) {
    return GateSpec(GateKind::variational, std::move(qubits), std::move(generator), -1, theta,
                    std::move(name));
  }
  static GateSpec fixed(std::vector<int> qubits, ComplexMatrix unitary, std::string name = {}) {
    return GateSpec(GateKind::fixed, std::move(qubits), std::move(unitary), -1, 0.0,
                    std::move(name));
  }
  // Generator from a Pauli string ("Z", "XX", ...) or unitary from a gate name.
  static GateSpec named(GateKind kind, std::vector<int> qubits, const std::string& name,
                        int param_index = -1, double theta = 0.0) {
    if (kind == GateKind::fixed) {
      auto u = gates::named_unitary(name);
      if (!u) throw StructureError("unknown fixed gate '" + name + "'");
      return GateSpec(kind, std::move(qubits), *u, -1, 0.0, name);
    }
    return GateSpec(kind, std::move(qubits), gates::pauli_string(name), param_index, theta, name);
  }

  GateKind kind() const { return kind_; }
  const std::vector<int>& qubits() const { return qubits_; }
  // Generator for encode/variational gates, unitary for fixed gates.
  const ComplexMatrix& matrix() const { return matrix_; }
  int param_index() const { return param_index_; }
  double theta() const { return theta_; }
  const std::string& name() const { return name_; }
  bool parametrized() const { return kind_ != GateKind::fixed; }

  double spread() const {
    if (!parametrized()) throw StructureError("spread of a fixed gate");
    return spectrum_.maxCoeff() - spectrum_.minCoeff();
  }

  // The gate's local unitary for data x.
  ComplexMatrix unitary(const DataPoint& x, GeneratorPhase phase = GeneratorPhase::as_given) const {
    if (kind_ == GateKind::fixed) return matrix_;
    const double angle = kind_ == GateKind::encode ? x.at(static_cast<std::size_t>(param_index_))
                                                   : theta_;
    return rotation(angle, phase);
  }

  // e^{-i angle G}
  ComplexMatrix rotation(double angle, GeneratorPhase phase = GeneratorPhase::as_given) const {
    const double shift = phase == GeneratorPhase::centered
                             ? 0.5 * (spectrum_.maxCoeff() + spectrum_.minCoeff())
                             : 0.0;
    ComplexVector phases(spectrum_.size());
    for (Eigen::Index k = 0; k < spectrum_.size(); ++k)
      phases(k) = std::exp(-kI * (angle * (spectrum_(k) - shift)));
    return eigvecs_ * phases.asDiagonal() * eigvecs_.adjoint();
  }

 private:
  GateSpec(GateKind kind, std::vector<int> qubits, ComplexMatrix m, int param_index, double theta,
           std::string name)
      : kind_(kind),
        qubits_(std::move(qubits)),
        matrix_(std::move(m)),
        param_index_(param_index),
        theta_(theta),
        name_(std::move(name)) {
    if (qubits_.empty()) throw StructureError("gate acts on no qubits");
    const Eigen::Index sub = Eigen::Index{1} << qubits_.size();
    if (matrix_.rows() != sub || matrix_.cols() != sub)
      throw StructureError("gate matrix is " + std::to_string(matrix_.rows()) + "x" +
                           std::to_string(matrix_.cols()) + " but acts on " +
                           std::to_string(qubits_.size()) + " qubit(s)");
    if (parametrized()) {
      if (!linalg::is_hermitian(matrix_, 1e-10))
        throw StructureError("gate generator is not Hermitian");
      auto eig = linalg::hermitian_eig(matrix_);
      spectrum_ = std::move(eig.values);
      eigvecs_ = std::move(eig.vectors);
    } else {
      const double defect =
          linalg::max_abs_entry(matrix_.adjoint() * matrix_ - linalg::identity(sub));
      if (defect > 1e-8) throw StructureError("fixed gate is not unitary");
    }
  }

  GateKind kind_;
  std::vector<int> qubits_;
  ComplexMatrix matrix_;
  int param_index_;
  double theta_;
  std::string name_;
  RealVector spectrum_;
  ComplexMatrix eigvecs_;
};

struct NoiseSchedule {
  double p = 1.0;  // survival probability
  bool enabled = false;

  NoiseSchedule() = default;
  NoiseSchedule(double p_, bool enabled_) : p(p_), enabled(enabled_) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("noise survival probability outside [0,1]");
  }
  static NoiseSchedule off() { return {}; }
};

// One computation step: a run of gates followed (when noisy) by one round of
// local depolarizing noise.
struct Step {
  std::vector<std::size_t> gates;  // indices into the layer
  bool encoding = false;
};

namespace detail {

// M <- (u on `qubits`) M, acting on row indices.
inline void apply_left(ComplexMatrix& m, const ComplexMatrix& u, const std::vector<int>& qubits,
                       int n_qubits) {
  const std::size_t k = qubits.size();
  const Eigen::Index sub = Eigen::Index{1} << k;
  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(sub), 0);
  Eigen::Index target_mask = 0;
  for (std::size_t a = 0; a < k; ++a) target_mask |= Eigen::Index{1} << (n_qubits - 1 - qubits[a]);
  for (Eigen::Index s = 0; s < sub; ++s) {
    Eigen::Index off = 0;
    for (std::size_t a = 0; a < k; ++a)
      if (s & (Eigen::Index{1} << (k - 1 - a))) off |= Eigen::Index{1} << (n_qubits - 1 - qubits[a]);
    offsets[static_cast<std::size_t>(s)] = off;
  }
  const Eigen::Index dim = m.rows();
  ComplexVector gathered(sub);
  ComplexMatrix rows(sub, m.cols());
  for (Eigen::Index base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index s = 0; s < sub; ++s) rows.row(s) = m.row(base | offsets[static_cast<std::size_t>(s)]);
    rows = (u * rows).eval();
    for (Eigen::Index s = 0; s < sub; ++s) m.row(base | offsets[static_cast<std::size_t>(s)]) = rows.row(s);
  }
}

// rho <- U rho U^dagger using two left multiplications.
inline void conjugate(ComplexMatrix& rho, const ComplexMatrix& u, const std::vector<int>& qubits,
                      int n_qubits) {
  apply_left(rho, u, qubits, n_qubits);
  rho.adjointInPlace();
  apply_left(rho, u, qubits, n_qubits);
}

inline std::vector<Step> pack(const std::vector<std::size_t>& group, int steps) {
  std::vector<Step> out(static_cast<std::size_t>(steps));
  const std::size_t k = group.size();
  for (int s = 0; s < steps; ++s) {
    const std::size_t lo = k * static_cast<std::size_t>(s) / static_cast<std::size_t>(steps);
    const std::size_t hi = k * static_cast<std::size_t>(s + 1) / static_cast<std::size_t>(steps);
    for (std::size_t g = lo; g < hi; ++g) out[static_cast<std::size_t>(s)].gates.push_back(group[g]);
  }
  return out;
}

}  // namespace detail

class CircuitSpec {
 public:
  using Layer = std::vector<GateSpec>;

  CircuitSpec(int n_qubits, int d, int ell, std::vector<Layer> layers,
              std::optional<DensityMatrix> initial_state = std::nullopt)
      : n_qubits_(checked_qubits(n_qubits)),
        d_(d),
        ell_(ell),
        layers_(std::move(layers)),
        initial_(initial_state ? std::move(*initial_state)
                               : DensityMatrix::basis(Eigen::Index{1} << n_qubits_, 0)) {
    if (d < 0) throw StructureError("data dimension must be nonnegative");
    if (ell < 0) throw StructureError("ell must be nonnegative");
    if (initial_.dim() != dim()) throw StructureError("initial state has wrong dimension");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      validate_layer(l);
      plans_.push_back(plan_layer(l));
    }
  }

  int n_qubits() const { return n_qubits_; }
  int d() const { return d_; }
  int ell() const { return ell_; }
  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits_; }
  std::size_t num_layers() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  const DensityMatrix& initial_state() const { return initial_; }
  // Step plan of layer l: ell steps of other gates around one encoding step.
  const std::vector<Step>& steps(std::size_t l) const { return plans_.at(l); }
  // T = L (1 + ell)
  std::size_t total_steps() const { return layers_.size() * static_cast<std::size_t>(1 + ell_); }

 private:
  static int checked_qubits(int n) {
    if (n < 1 || n > 12) throw StructureError("n_qubits must be in [1, 12]");
    return n;
  }

  void validate_layer(std::size_t l) const {
    std::vector<int> seen(static_cast<std::size_t>(d_), 0);
    for (const auto& g : layers_[l]) {
      std::vector<int> q = g.qubits();
      for (int v : q)
        if (v < 0 || v >= n_qubits_)
          throw StructureError("layer " + std::to_string(l) + ": qubit index " + std::to_string(v) +
                               " out of range");
      std::sort(q.begin(), q.end());
      if (std::adjacent_find(q.begin(), q.end()) != q.end())
        throw StructureError("layer " + std::to_string(l) + ": repeated qubit in gate");
      if (g.kind() == GateKind::encode) {
        if (g.param_index() < 0 || g.param_index() >= d_)
          throw StructureError("layer " + std::to_string(l) + ": param_index " +
                               std::to_string(g.param_index()) + " outside [0, d)");
        ++seen[static_cast<std::size_t>(g.param_index())];
      }
    }
    for (int i = 0; i < d_; ++i)
      if (seen[static_cast<std::size_t>(i)] != 1)
        throw StructureError("layer " + std::to_string(l) + " encodes x_" + std::to_string(i) + " " +
                             std::to_string(seen[static_cast<std::size_t>(i)]) +
                             " times (expected exactly once)");
  }

  // The span from the first to the last encoding gate forms the encoding
  // step. Remaining gates are packed in order into ell steps, split between
  // those before and those after the encoding step.
  std::vector<Step> plan_layer(std::size_t l) const {
    const Layer& layer = layers_[l];
    std::optional<std::size_t> first, last;
    for (std::size_t g = 0; g < layer.size(); ++g) {
      if (layer[g].kind() != GateKind::encode) continue;
      if (!first) first = g;
      last = g;
    }
    std::vector<std::size_t> pre, block, post;
    for (std::size_t g = 0; g < layer.size(); ++g) {
      if (first && g < *first) pre.push_back(g);
      else if (first && g <= *last) block.push_back(g);
      else post.push_back(g);
    }
    const int needed = (pre.empty() ? 0 : 1) + (post.empty() ? 0 : 1);
    if (ell_ < needed)
      throw StructureError("layer " + std::to_string(l) + " needs at least " + std::to_string(needed) +
                           " non-encoding step(s) but ell = " + std::to_string(ell_));
    int pre_steps = 0;
    if (!pre.empty() && post.empty()) {
      pre_steps = ell_;
    } else if (!pre.empty()) {
      const double share = static_cast<double>(ell_) * static_cast<double>(pre.size()) /
                           static_cast<double>(pre.size() + post.size());
      pre_steps = std::clamp(static_cast<int>(std::lround(share)), 1, ell_ - 1);
    }
    std::vector<Step> plan = detail::pack(pre, pre_steps);
    plan.push_back(Step{block, true});
    for (auto& s : detail::pack(post, ell_ - pre_steps)) plan.push_back(std::move(s));
    return plan;
  }

  int n_qubits_;
  int d_;
  int ell_;
  std::vector<Layer> layers_;
  DensityMatrix initial_;
  std::vector<std::vector<Step>> plans_;
};

namespace detail {

inline void check_data(const CircuitSpec& c, const DataPoint& x) {
  if (x.size() != static_cast<std::size_t>(c.d()))
    throw ShapeError("data vector has length " + std::to_string(x.size()) + ", circuit expects d = " +
                     std::to_string(c.d()));
  for (double v : x)
    if (!std::isfinite(v)) throw InputError("data vector has a non-finite entry");
}

}  // namespace detail

// States rho_0, rho_1, ..., rho_T after each computation step. Without noise
// the trajectory is the sequence of unitary step outputs.
inline std::vector<DensityMatrix> embed_trajectory(const CircuitSpec& c, const DataPoint& x,
                                                   const NoiseSchedule& noise) {
  detail::check_data(c, x);
  std::vector<DensityMatrix> out;
  out.reserve(c.total_steps() + 1);
  out.push_back(c.initial_state());
  ComplexMatrix rho = c.initial_state().matrix();
  for (std::size_t l = 0; l < c.num_layers(); ++l) {
    const auto& layer = c.layers()[l];
    for (const Step& step : c.steps(l)) {
      for (std::size_t g : step.gates)
        detail::conjugate(rho, layer[g].unitary(x), layer[g].qubits(), c.n_qubits());
      if (noise.enabled && noise.p < 1.0)
        for (int q = 0; q < c.n_qubits(); ++q) detail::depolarize_qubit(rho, noise.p, q, c.n_qubits());
      rho = linalg::hermitian_part(rho);
      out.push_back(DensityMatrix::from_channel_output(rho));
    }
  }
  return out;
}

// rho(x): the embedded state.
inline DensityMatrix embed(const CircuitSpec& c, const DataPoint& x, const NoiseSchedule& noise) {
  detail::check_data(c, x);
  ComplexMatrix rho = c.initial_state().matrix();
  for (std::size_t l = 0; l < c.num_layers(); ++l) {
    const auto& layer = c.layers()[l];
    if (!noise.enabled) {
      for (const auto& g : layer) detail::conjugate(rho, g.unitary(x), g.qubits(), c.n_qubits());
      continue;
    }
    for (const Step& step : c.steps(l)) {
      for (std::size_t g : step.gates)
        detail::conjugate(rho, layer[g].unitary(x), layer[g].qubits(), c.n_qubits());
      if (noise.p < 1.0)
        for (int q = 0; q < c.n_qubits(); ++q) detail::depolarize_qubit(rho, noise.p, q, c.n_qubits());
    }
  }
  return DensityMatrix::from_channel_output(rho);
}

// Full circuit unitary for data x (noiseless).
inline ComplexMatrix unitary_of(const CircuitSpec& c, const DataPoint& x,
                                GeneratorPhase phase = GeneratorPhase::as_given) {
  detail::check_data(c, x);
  ComplexMatrix u = linalg::identity(c.dim());
  for (const auto& layer : c.layers())
    for (const auto& g : layer) detail::apply_left(u, g.unitary(x, phase), g.qubits(), c.n_qubits());
  return u;
}

// Largest spectral spread over the encoding generators.
inline double circuit_spread(const CircuitSpec& c) {
  std::optional<double> best;
  for (const auto& layer : c.layers())
    for (const auto& g : layer)
      if (g.kind() == GateKind::encode) best = std::max(best.value_or(0.0), g.spread());
  if (!best) throw UndefinedError("circuit_spread: circuit has no encoding gates");
  return *best;
}

// Sum over all encoding gates of spread(G)/2 * |x_i - x'_i|.
inline double encoding_operator_bound(const CircuitSpec& c, const DataPoint& x, const DataPoint& xp) {
  detail::check_data(c, x);
  detail::check_data(c, xp);
  double total = 0.0;
  for (const auto& layer : c.layers())
    for (const auto& g : layer)
      if (g.kind() == GateKind::encode) {
        const auto i = static_cast<std::size_t>(g.param_index());
        total += 0.5 * g.spread() * std::abs(x[i] - xp[i]);
      }
  return total;
}

// One layer of parallel e^{-i theta_i Z} rotations, theta_i encoded as x_i.
inline CircuitSpec build_saturation_circuit(int n_qubits) {
  if (n_qubits < 1) throw InputError("build_saturation_circuit: n_qubits must be >= 1");
  CircuitSpec::Layer layer;
  for (int q = 0; q < n_qubits; ++q) layer.push_back(GateSpec::named(GateKind::encode, {q}, "Z", q));
  return CircuitSpec(n_qubits, n_qubits, 0, {std::move(layer)});
}

}  // namespace shotbound
