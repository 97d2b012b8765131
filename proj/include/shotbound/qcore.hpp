#pragma once

// Quantum primitives: density matrices, POVMs, ensembles, trace norm,
// Helstrom error, local depolarizing noise and relative entropy.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shotbound/errors.hpp"
#include "shotbound/linalg.hpp"

namespace shotbound {

namespace tol {
inline constexpr double kStateHermitian = 1e-10;
inline constexpr double kStatePositive = 1e-10;
inline constexpr double kStateTrace = 1e-10;
inline constexpr double kEffectPositive = 1e-8;
inline constexpr double kEffectHermitian = 1e-8;
inline constexpr double kPovmCompleteness = 1e-8;
inline constexpr double kPriorSum = 1e-10;
}  // namespace tol

// One named invariant check with the measured violation magnitude.
struct Check {
  std::string name;
  bool passed = true;
  double violation = 0.0;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  std::string summary() const {
    std::string out;
    for (const auto& c : checks) {
      if (c.passed) continue;
      if (!out.empty()) out += "; ";
      out += c.name + " violated by " + std::to_string(c.violation);
    }
    return out.empty() ? "ok" : out;
  }
};

// Density-matrix checks on a raw matrix: hermiticity, positivity, unit trace.
inline ValidationReport validate_density(const ComplexMatrix& m) {
  ValidationReport report;
  if (m.rows() != m.cols() || m.rows() == 0) {
    report.checks.push_back({"square", false, 1.0});
    return report;
  }
  const double herm = linalg::hermiticity_defect(m);
  report.checks.push_back({"hermitian", herm <= tol::kStateHermitian, herm});
  const double min_eig = linalg::hermitian_eigenvalues(m).minCoeff();
  const double neg = std::max(0.0, -min_eig);
  report.checks.push_back({"positive", neg <= tol::kStatePositive, neg});
  const double tr_dev = std::abs(m.trace() - Complex(1.0));
  report.checks.push_back({"unit_trace", tr_dev <= tol::kStateTrace, tr_dev});
  return report;
}

// POVM checks: each effect Hermitian and PSD, effects sum to identity.
inline ValidationReport validate_povm(const std::vector<ComplexMatrix>& effects) {
  ValidationReport report;
  if (effects.empty()) {
    report.checks.push_back({"nonempty", false, 1.0});
    return report;
  }
  const auto dim = effects.front().rows();
  for (const auto& e : effects) {
    if (e.rows() != dim || e.cols() != dim) {
      report.checks.push_back({"shape", false, 1.0});
      return report;
    }
  }
  double worst_herm = 0.0;
  double worst_neg = 0.0;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& e : effects) {
    worst_herm = std::max(worst_herm, linalg::hermiticity_defect(e));
    worst_neg = std::max(worst_neg, -linalg::hermitian_eigenvalues(e).minCoeff());
    sum += e;
  }
  worst_neg = std::max(worst_neg, 0.0);
  report.checks.push_back({"hermitian", worst_herm <= tol::kEffectHermitian, worst_herm});
  report.checks.push_back({"positive", worst_neg <= tol::kEffectPositive, worst_neg});
  const double residual = linalg::max_abs_entry(sum - linalg::identity(dim));
  report.checks.push_back({"completeness", residual <= tol::kPovmCompleteness, residual});
  return report;
}

class DensityMatrix {
 public:
  // Validates the invariants; throws StructureError on violation.
  explicit DensityMatrix(ComplexMatrix m) {
    linalg::require_square(m, "DensityMatrix");
    auto report = validate_density(m);
    if (!report.ok()) throw StructureError("invalid density matrix: " + report.summary());
    m_ = linalg::hermitian_part(m);
  }

  // Output of a trace-preserving channel applied to a valid state. Only the
  // Hermitian part is kept; positivity and trace hold up to float drift.
  static DensityMatrix from_channel_output(const ComplexMatrix& m) {
    DensityMatrix out;
    out.m_ = linalg::hermitian_part(m);
    return out;
  }

  static DensityMatrix pure(const ComplexVector& ket) {
    if (ket.size() == 0) throw ShapeError("pure: empty ket");
    const double norm = ket.norm();
    if (norm == 0.0) throw InputError("pure: zero vector");
    ComplexVector v = ket / norm;
    return from_channel_output(v * v.adjoint());
  }

  static DensityMatrix basis(Eigen::Index dim, Eigen::Index k) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return pure(v);
  }

  static DensityMatrix maximally_mixed(Eigen::Index dim) {
    if (dim <= 0) throw ShapeError("maximally_mixed: dim must be positive");
    return from_channel_output(linalg::identity(dim) / static_cast<double>(dim));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  DensityMatrix() = default;
  ComplexMatrix m_;
};

class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> effects) {
    auto report = validate_povm(effects);
    if (!report.ok()) throw StructureError("invalid POVM: " + report.summary());
    for (auto& e : effects) e = linalg::hermitian_part(e);
    effects_ = std::move(effects);
  }

  // Projective measurement in the computational basis.
  static Povm computational(Eigen::Index dim) {
    std::vector<ComplexMatrix> effects;
    for (Eigen::Index k = 0; k < dim; ++k) {
      ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
      e(k, k) = 1.0;
      effects.push_back(e);
    }
    return Povm(std::move(effects));
  }

  Eigen::Index dim() const { return effects_.front().rows(); }
  std::size_t size() const { return effects_.size(); }
  const ComplexMatrix& effect(std::size_t y) const { return effects_.at(y); }
  const std::vector<ComplexMatrix>& effects() const { return effects_; }

  // Tr[Pi_y rho] for every y.
  std::vector<double> probabilities(const DensityMatrix& rho) const {
    if (rho.dim() != dim()) throw ShapeError("Povm::probabilities: dimension mismatch");
    std::vector<double> out;
    out.reserve(effects_.size());
    for (const auto& e : effects_) out.push_back(linalg::real_inner(e, rho.matrix()));
    return out;
  }

 private:
  std::vector<ComplexMatrix> effects_;
};

class Ensemble {
 public:
  explicit Ensemble(std::vector<DensityMatrix> states,
                    std::optional<std::vector<double>> priors = std::nullopt)
      : states_(std::move(states)), priors_(std::move(priors)) {
    if (states_.empty()) throw InputError("Ensemble: no states");
    for (const auto& s : states_)
      if (s.dim() != states_.front().dim()) throw ShapeError("Ensemble: states differ in dimension");
    if (priors_) {
      if (priors_->size() != states_.size())
        throw ShapeError("Ensemble: prior count does not match state count");
      double sum = 0.0;
      for (double p : *priors_) {
        if (!(p >= 0.0)) throw InputError("Ensemble: priors must be nonnegative");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol::kPriorSum)
        throw InputError("Ensemble: priors sum to " + std::to_string(sum));
    }
  }

  static Ensemble uniform(std::vector<DensityMatrix> states) {
    const std::size_t r = states.size();
    return Ensemble(std::move(states), std::vector<double>(r, 1.0 / static_cast<double>(r)));
  }

  Eigen::Index dim() const { return states_.front().dim(); }
  std::size_t size() const { return states_.size(); }
  const std::vector<DensityMatrix>& states() const { return states_; }
  const DensityMatrix& state(std::size_t j) const { return states_.at(j); }
  bool has_priors() const { return priors_.has_value(); }
  const std::vector<double>& priors() const {
    if (!priors_) throw InputError("Ensemble: priors required");
    return *priors_;
  }
  double prior(std::size_t j) const { return priors().at(j); }

  // p_j rho_j
  ComplexMatrix weighted(std::size_t j) const { return prior(j) * states_.at(j).matrix(); }

 private:
  std::vector<DensityMatrix> states_;
  std::optional<std::vector<double>> priors_;
};

// Sum of singular values. Hermitian input uses |eigenvalues|.
inline double trace_norm(const ComplexMatrix& a) {
  linalg::require_square(a, "trace_norm");
  const double scale = std::max(1.0, linalg::max_abs_entry(a));
  if (linalg::hermiticity_defect(a) <= 1e-13 * scale) {
    return linalg::hermitian_eigenvalues(a).cwiseAbs().sum();
  }
  return linalg::singular_values(a).sum();
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ShapeError("trace_distance: dimension mismatch");
  return trace_norm(rho.matrix() - sigma.matrix());
}

// Minimal error of discriminating p*rho from (1-p)*sigma.
inline double helstrom_error(double p, const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ShapeError("helstrom_error: dimension mismatch");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("helstrom_error: prior outside [0,1]");
  const double value = 0.5 - 0.5 * trace_norm(p * rho.matrix() - (1.0 - p) * sigma.matrix());
  return std::clamp(value, 0.0, std::min(p, 1.0 - p));
}

// Helstrom error for unnormalized weights a*rho vs b*sigma, a + b = 1.
inline double helstrom_error_weighted(double a, const ComplexMatrix& rho, double b,
                                      const ComplexMatrix& sigma) {
  const double value = 0.5 - 0.5 * trace_norm(a * rho - b * sigma);
  return std::clamp(value, 0.0, std::min(a, b));
}

namespace detail {

// rho -> p rho + (1-p) Tr_q(rho) (x) I/2 on qubit q (qubit 0 is the most
// significant index bit).
inline void depolarize_qubit(ComplexMatrix& rho, double p, int qubit, int n_qubits) {
  const Eigen::Index dim = rho.rows();
  const Eigen::Index mask = Eigen::Index{1} << (n_qubits - 1 - qubit);
  const double mix = 0.5 * (1.0 - p);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & mask) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & mask) continue;
      const Complex a00 = rho(i, j);
      const Complex a01 = rho(i, j | mask);
      const Complex a10 = rho(i | mask, j);
      const Complex a11 = rho(i | mask, j | mask);
      const Complex avg = mix * (a00 + a11);
      rho(i, j) = p * a00 + avg;
      rho(i | mask, j | mask) = p * a11 + avg;
      rho(i, j | mask) = p * a01;
      rho(i | mask, j) = p * a10;
    }
  }
}

}  // namespace detail

// Applies the single-qubit depolarizing channel with survival probability p
// to every qubit.
inline DensityMatrix depolarize_local(const DensityMatrix& rho, double p, int n_qubits) {
  if (n_qubits < 0 || (Eigen::Index{1} << n_qubits) != rho.dim())
    throw StructureError("depolarize_local: dim " + std::to_string(rho.dim()) +
                         " is not 2^" + std::to_string(n_qubits));
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("depolarize_local: p outside [0,1]");
  if (p == 1.0) return rho;
  ComplexMatrix m = rho.matrix();
  for (int q = 0; q < n_qubits; ++q) detail::depolarize_qubit(m, p, q, n_qubits);
  return DensityMatrix::from_channel_output(m);
}

// Von Neumann entropy in bits, with 0 log 0 = 0.
inline double von_neumann_entropy_bits(const DensityMatrix& rho) {
  const RealVector ev = linalg::hermitian_eigenvalues(rho.matrix());
  double h = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const double v = ev(k);
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

// D(rho || I/dim) = log2(dim) - S(rho), in bits.
inline double relative_entropy_to_mixed(const DensityMatrix& rho) {
  const double value = std::log2(static_cast<double>(rho.dim())) - von_neumann_entropy_bits(rho);
  return std::max(value, 0.0);
}

inline ValidationReport validate(const DensityMatrix& rho) { return validate_density(rho.matrix()); }
inline ValidationReport validate(const Povm& povm) { return validate_povm(povm.effects()); }

}  // namespace shotbound
