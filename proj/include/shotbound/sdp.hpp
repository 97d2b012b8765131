#pragma once

// Dense primal-dual interior-point method for small block-diagonal
// semidefinite programs over complex Hermitian blocks.
//
//   primal:  min <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
//   dual:    max b^T y    s.t.  Z = C - sum_i y_i A_i >= 0
//
// <A, X> = Re Tr[A X] summed over blocks. Search directions are HKM with a
// Mehrotra predictor-corrector step. Scalar variables are 1x1 blocks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "shotbound/errors.hpp"
#include "shotbound/linalg.hpp"

namespace shotbound::sdp {

using Blocks = std::vector<ComplexMatrix>;

struct Constraint {
  std::vector<std::pair<std::size_t, ComplexMatrix>> terms;  // (block, coefficient)
  double rhs = 0.0;
};

struct Problem {
  std::vector<Eigen::Index> block_sizes;
  Blocks objective;  // C
  std::vector<Constraint> constraints;
};

struct Options {
  double gap_tol = 1e-10;
  double feas_tol = 1e-10;
  int max_iterations = 120;
};

struct Solution {
  Blocks x;
  Blocks z;
  RealVector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += linalg::real_inner(a[k], b[k]);
  return s;
}

inline double frob(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

inline Blocks zeros_like(const std::vector<Eigen::Index>& sizes) {
  Blocks out;
  for (auto n : sizes) out.push_back(ComplexMatrix::Zero(n, n));
  return out;
}

inline double apply(const Constraint& c, const Blocks& x) {
  double s = 0.0;
  for (const auto& [k, m] : c.terms) s += linalg::real_inner(m, x[k]);
  return s;
}

inline RealVector apply_all(const Problem& p, const Blocks& x) {
  RealVector out(static_cast<Eigen::Index>(p.constraints.size()));
  for (std::size_t i = 0; i < p.constraints.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = apply(p.constraints[i], x);
  return out;
}

inline Blocks adjoint(const Problem& p, const RealVector& y) {
  Blocks out = zeros_like(p.block_sizes);
  for (std::size_t i = 0; i < p.constraints.size(); ++i)
    for (const auto& [k, m] : p.constraints[i].terms) out[k] += y(static_cast<Eigen::Index>(i)) * m;
  return out;
}

// Largest alpha <= cap with X + alpha dX >= 0, per block via Cholesky of X.
inline double max_step(const Blocks& x, const Blocks& dx, double cap) {
  double alpha = cap;
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<ComplexMatrix> llt(linalg::hermitian_part(x[k]));
    if (llt.info() != Eigen::Success) return 0.0;
    const ComplexMatrix linv = llt.matrixL().solve(linalg::identity(x[k].rows()));
    const ComplexMatrix w = linv * dx[k] * linv.adjoint();
    const double lmin = linalg::hermitian_eigenvalues(w).minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

inline Blocks inverse(const Blocks& z) {
  Blocks out;
  for (const auto& m : z) {
    Eigen::LLT<ComplexMatrix> llt(linalg::hermitian_part(m));
    if (llt.info() != Eigen::Success) throw InvariantViolation("sdp: dual slack lost definiteness");
    out.push_back(linalg::hermitian_part(llt.solve(linalg::identity(m.rows()))));
  }
  return out;
}

}  // namespace detail

inline Solution solve(const Problem& p, const Options& opt = {}) {
  using detail::frob;
  using detail::inner;
  const std::size_t nb = p.block_sizes.size();
  const auto m = static_cast<Eigen::Index>(p.constraints.size());
  if (p.objective.size() != nb) throw ShapeError("sdp: objective block count mismatch");

  RealVector b(m);
  for (Eigen::Index i = 0; i < m; ++i) b(i) = p.constraints[static_cast<std::size_t>(i)].rhs;

  double total_dim = 0.0;
  for (auto n : p.block_sizes) total_dim += static_cast<double>(n);
  const double norm_c = frob(p.objective);
  const double norm_b = b.norm();

  // Starting point scaled to the data.
  double xi = std::max(10.0, std::sqrt(total_dim));
  double eta = std::max({10.0, std::sqrt(total_dim), norm_c});
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    double an = 0.0;
    for (const auto& [k, a] : p.constraints[i].terms) an += a.squaredNorm();
    an = std::sqrt(an);
    xi = std::max(xi, total_dim * (1.0 + std::abs(p.constraints[i].rhs)) / (1.0 + an));
    eta = std::max(eta, an);
  }
  Blocks x, z;
  for (auto n : p.block_sizes) {
    x.push_back(xi * linalg::identity(n));
    z.push_back(eta * linalg::identity(n));
  }
  RealVector y = RealVector::Zero(m);

  Solution sol;
  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    const RealVector rp = b - detail::apply_all(p, x);
    const Blocks aty = detail::adjoint(p, y);
    Blocks rd(nb);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = p.objective[k] - aty[k] - z[k];

    const double pobj = inner(p.objective, x);
    const double dobj = b.dot(y);
    const double mu = inner(x, z) / total_dim;
    sol.iterations = iter;
    sol.primal_infeasibility = rp.norm() / (1.0 + norm_b);
    sol.dual_infeasibility = frob(rd) / (1.0 + norm_c);
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.x = x;
    sol.z = z;
    sol.y = y;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double rel_comp = inner(x, z) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (std::max(rel_gap, rel_comp) < opt.gap_tol && sol.primal_infeasibility < opt.feas_tol &&
        sol.dual_infeasibility < opt.feas_tol) {
      sol.converged = true;
      break;
    }
    if (iter == opt.max_iterations) break;

    Blocks zinv;
    try {
      zinv = detail::inverse(z);
    } catch (const InvariantViolation&) {
      break;
    }

    // Schur complement M_ij = <A_i, X A_j Z^{-1}>.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& cj = p.constraints[static_cast<std::size_t>(j)];
      Blocks g = detail::zeros_like(p.block_sizes);
      std::vector<bool> touched(nb, false);
      for (const auto& [k, a] : cj.terms) {
        g[k] += x[k] * a * zinv[k];
        touched[k] = true;
      }
      for (Eigen::Index i = 0; i < m; ++i) {
        double s = 0.0;
        for (const auto& [k, a] : p.constraints[static_cast<std::size_t>(i)].terms)
          if (touched[k]) s += linalg::real_inner(a, g[k]);
        schur(i, j) = s;
      }
    }
    schur = 0.5 * (schur + schur.transpose()).eval();
    Eigen::LDLT<Eigen::MatrixXd> factor(schur);
    if (factor.info() != Eigen::Success) break;

    // Direction for a given complementarity residual R_c (XZ target).
    auto direction = [&](const Blocks& rc, Blocks& dx, RealVector& dy, Blocks& dz) {
      Blocks t(nb);
      for (std::size_t k = 0; k < nb; ++k) t[k] = x[k] * rd[k] * zinv[k] - rc[k] * zinv[k];
      const RealVector rhs = rp + detail::apply_all(p, t);
      dy = factor.solve(rhs);
      const Blocks ady = detail::adjoint(p, dy);
      dz.assign(nb, ComplexMatrix());
      dx.assign(nb, ComplexMatrix());
      for (std::size_t k = 0; k < nb; ++k) {
        dz[k] = rd[k] - ady[k];
        dx[k] = linalg::hermitian_part((rc[k] - x[k] * dz[k]) * zinv[k]);
      }
    };

    Blocks rc(nb);
    for (std::size_t k = 0; k < nb; ++k) rc[k] = -x[k] * z[k];
    Blocks dx, dz;
    RealVector dy;
    direction(rc, dx, dy, dz);
    const double ap = detail::max_step(x, dx, 1.0);
    const double ad = detail::max_step(z, dz, 1.0);
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k)
      mu_aff += linalg::real_inner(x[k] + ap * dx[k], z[k] + ad * dz[k]);
    mu_aff /= total_dim;
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

    for (std::size_t k = 0; k < nb; ++k)
      rc[k] = sigma * mu * linalg::identity(p.block_sizes[k]) - x[k] * z[k] - dx[k] * dz[k];
    direction(rc, dx, dy, dz);

    const double tau = 0.98;
    const double step_p = std::min(1.0, tau * detail::max_step(x, dx, 1e3));
    const double step_d = std::min(1.0, tau * detail::max_step(z, dz, 1e3));
    if (step_p <= 0.0 || step_d <= 0.0) break;
    for (std::size_t k = 0; k < nb; ++k) {
      x[k] = linalg::hermitian_part(x[k] + step_p * dx[k]);
      z[k] = linalg::hermitian_part(z[k] + step_d * dz[k]);
    }
    y += step_d * dy;
  }
  return sol;
}

// Orthonormal basis of d x d Hermitian matrices under Re Tr[A B].
inline std::vector<ComplexMatrix> hermitian_basis(Eigen::Index d) {
  std::vector<ComplexMatrix> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index k = 0; k < d; ++k) {
    ComplexMatrix e = ComplexMatrix::Zero(d, d);
    e(k, k) = 1.0;
    basis.push_back(e);
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index l = k + 1; l < d; ++l) {
      ComplexMatrix s = ComplexMatrix::Zero(d, d);
      s(k, l) = s(l, k) = r;
      basis.push_back(s);
      ComplexMatrix a = ComplexMatrix::Zero(d, d);
      a(k, l) = Complex(0.0, r);
      a(l, k) = Complex(0.0, -r);
      basis.push_back(a);
    }
  }
  return basis;
}

}  // namespace shotbound::sdp
