#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "shotbound/errors.hpp"

namespace shotbound {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

namespace linalg {

inline void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

// (A + A^dagger) / 2
inline ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

// Largest entrywise modulus of A - A^dagger.
inline double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

struct HermitianEigen {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns are eigenvectors
};

// Eigendecomposition of the Hermitian part of A.
inline HermitianEigen hermitian_eig(const ComplexMatrix& a) {
  require_square(a, "hermitian_eig");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    throw InvariantViolation("hermitian_eig: eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& a) {
  require_square(a, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw InvariantViolation("hermitian_eigenvalues: eigensolver failed");
  }
  return solver.eigenvalues();
}

// V f(Lambda) V^dagger for a Hermitian operator.
inline ComplexMatrix spectral_apply(const HermitianEigen& eig,
                                    const std::function<Complex(double)>& f) {
  ComplexVector fv(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) fv(k) = f(eig.values(k));
  return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

inline ComplexMatrix spectral_apply(const ComplexMatrix& a,
                                    const std::function<Complex(double)>& f) {
  return spectral_apply(hermitian_eig(a), f);
}

// Square root of a PSD operator; negative eigenvalues are clipped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  return spectral_apply(a, [](double v) { return Complex(v > 0.0 ? std::sqrt(v) : 0.0); });
}

// Moore-Penrose inverse square root on the support {lambda > cutoff * lambda_max}.
inline ComplexMatrix psd_inverse_sqrt(const ComplexMatrix& a, double rel_cutoff = 1e-12) {
  auto eig = hermitian_eig(a);
  const double top = std::max(eig.values.maxCoeff(), 0.0);
  const double cut = rel_cutoff * std::max(top, 1e-300);
  return spectral_apply(eig, [cut](double v) {
    return Complex(v > cut ? 1.0 / std::sqrt(v) : 0.0);
  });
}

// Projector onto the kernel {lambda <= cutoff * lambda_max} of a PSD operator.
inline ComplexMatrix psd_kernel_projector(const ComplexMatrix& a, double rel_cutoff = 1e-12) {
  auto eig = hermitian_eig(a);
  const double top = std::max(eig.values.maxCoeff(), 0.0);
  const double cut = rel_cutoff * std::max(top, 1e-300);
  return spectral_apply(eig, [cut](double v) { return Complex(v > cut ? 0.0 : 1.0); });
}

// Clip eigenvalues below zero; result is PSD.
inline ComplexMatrix psd_clip(const ComplexMatrix& a) {
  return spectral_apply(a, [](double v) { return Complex(std::max(v, 0.0)); });
}

inline RealVector singular_values(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

// Largest singular value.
inline double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a).maxCoeff();
}

inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr[A B] without forming the product.
  return (a.transpose().cwiseProduct(b)).sum();
}

// Re Tr[A B]; the real inner product for Hermitian A, B.
inline double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return trace_product(a, b).real();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline bool is_power_of_two(Eigen::Index dim) { return dim > 0 && (dim & (dim - 1)) == 0; }

inline int log2_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

inline double max_abs_entry(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace linalg
}  // namespace shotbound
