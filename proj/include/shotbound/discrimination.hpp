#pragma once

// Minimum-error and minimax quantum state discrimination with certified
// duality gaps, plus the pairwise lower bounds and the pretty good
// measurement upper bound.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shotbound/errors.hpp"
#include "shotbound/linalg.hpp"
#include "shotbound/qcore.hpp"
#include "shotbound/sdp.hpp"

namespace shotbound {

inline constexpr double kDefaultSolverTol = 1e-8;

struct DiscriminationResult {
  double error = 0.0;        // attained by `povm`
  double lower_bound = 0.0;  // certified by the dual
  double duality_gap = 0.0;  // error - lower_bound
  Povm povm;
  int iterations = 0;
  bool converged = false;
  std::string method;
  std::vector<double> prior;  // least favorable prior (minimax only)
};

struct BayesOptions {
  double tol = kDefaultSolverTol;
  int max_iterations = 10000;
  int check_every = 10;
  std::optional<std::vector<ComplexMatrix>> initial;  // warm start
  bool allow_interior_point = true;
};

namespace discrimination_detail {

inline void require_priors(const Ensemble& ens, const char* what) {
  if (!ens.has_priors()) throw InputError(std::string(what) + ": ensemble priors required");
  if (ens.size() < 2) throw InputError(std::string(what) + ": at least two states required");
}

// Clip effects to PSD and renormalize so they sum exactly to the identity.
inline std::vector<ComplexMatrix> clean_povm(std::vector<ComplexMatrix> effects) {
  const auto dim = effects.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (auto& e : effects) {
    e = linalg::psd_clip(e);
    sum += e;
  }
  const ComplexMatrix s = linalg::psd_inverse_sqrt(sum, 1e-14);
  const ComplexMatrix kernel = linalg::psd_kernel_projector(sum, 1e-14);
  for (auto& e : effects) e = linalg::hermitian_part(s * e * s);
  effects.front() += kernel;
  return effects;
}

inline double success(const Ensemble& ens, const std::vector<ComplexMatrix>& effects) {
  double s = 0.0;
  for (std::size_t j = 0; j < ens.size(); ++j)
    s += ens.prior(j) * linalg::real_inner(effects[j], ens.state(j).matrix());
  return s;
}

// Smallest Tr[Y + lambda I] with Y + lambda I >= p_j rho_j for all j.
inline double feasible_dual_value(const Ensemble& ens, const ComplexMatrix& y_raw) {
  const ComplexMatrix y = linalg::hermitian_part(y_raw);
  double lambda = -INFINITY;
  for (std::size_t j = 0; j < ens.size(); ++j)
    lambda = std::max(lambda, linalg::hermitian_eigenvalues(ens.weighted(j) - y).maxCoeff());
  return y.trace().real() + static_cast<double>(ens.dim()) * lambda;
}

// Dual candidate from the stationarity condition Y = sum_j p_j rho_j Pi_j.
inline ComplexMatrix holevo_operator(const Ensemble& ens, const std::vector<ComplexMatrix>& effects) {
  ComplexMatrix y = ComplexMatrix::Zero(ens.dim(), ens.dim());
  for (std::size_t j = 0; j < ens.size(); ++j) y += ens.weighted(j) * effects[j];
  return linalg::hermitian_part(y);
}

struct Certified {
  std::vector<ComplexMatrix> effects;
  double error;
  double lower;
};

inline Certified certify_bayes(const Ensemble& ens, std::vector<ComplexMatrix> effects,
                               const std::optional<ComplexMatrix>& extra_dual = std::nullopt) {
  effects = clean_povm(std::move(effects));
  const double ps = success(ens, effects);
  double dual = feasible_dual_value(ens, holevo_operator(ens, effects));
  if (extra_dual) dual = std::min(dual, feasible_dual_value(ens, *extra_dual));
  const double error = std::clamp(1.0 - ps, 0.0, 1.0);
  const double lower = std::clamp(1.0 - dual, 0.0, error);
  return {std::move(effects), error, lower};
}

inline sdp::Problem bayes_problem(const Ensemble& ens) {
  const auto d = ens.dim();
  const std::size_t r = ens.size();
  sdp::Problem prob;
  prob.block_sizes.assign(r, d);
  for (std::size_t j = 0; j < r; ++j) prob.objective.push_back(-ens.weighted(j));
  for (const auto& e : sdp::hermitian_basis(d)) {
    sdp::Constraint c;
    for (std::size_t j = 0; j < r; ++j) c.terms.emplace_back(j, e);
    c.rhs = e.trace().real();
    prob.constraints.push_back(std::move(c));
  }
  return prob;
}

inline std::optional<Certified> bayes_interior_point(const Ensemble& ens) {
  const auto prob = bayes_problem(ens);
  const auto sol = sdp::solve(prob);
  if (sol.x.empty()) return std::nullopt;
  const auto basis = sdp::hermitian_basis(ens.dim());
  // Dual: C - sum y_k E_k >= 0 with C_j = -p_j rho_j, i.e. -Y >= p_j rho_j.
  ComplexMatrix y = ComplexMatrix::Zero(ens.dim(), ens.dim());
  for (std::size_t k = 0; k < basis.size(); ++k) y -= sol.y(static_cast<Eigen::Index>(k)) * basis[k];
  std::vector<ComplexMatrix> effects(sol.x.begin(), sol.x.end());
  return certify_bayes(ens, std::move(effects), y);
}

}  // namespace discrimination_detail

// Pi_j = S^{-1/2} p_j rho_j S^{-1/2}, S = sum_j p_j rho_j. On a singular S the
// kernel projector is assigned to label 0.
inline std::pair<Povm, double> pretty_good_measurement(const Ensemble& ens) {
  discrimination_detail::require_priors(ens, "pretty_good_measurement");
  const auto d = ens.dim();
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (std::size_t j = 0; j < ens.size(); ++j) s += ens.weighted(j);
  const ComplexMatrix sinv = linalg::psd_inverse_sqrt(s);
  std::vector<ComplexMatrix> effects;
  for (std::size_t j = 0; j < ens.size(); ++j)
    effects.push_back(linalg::hermitian_part(sinv * ens.weighted(j) * sinv));
  effects = discrimination_detail::clean_povm(std::move(effects));
  const double err = std::clamp(1.0 - discrimination_detail::success(ens, effects), 0.0, 1.0);
  return {Povm(std::move(effects)), err};
}

// Minimum Bayesian error: fixed-point iteration Pi_j <- R^{-1/2} A_j Pi_j A_j
// R^{-1/2} (A_j = p_j rho_j, R = sum_k A_k Pi_k A_k) from the pretty good
// measurement, certified by the dual Y = sum_j A_j Pi_j shifted to
// feasibility. Falls back to the interior-point solver when the iteration
// cap is reached with the gap above tolerance.
inline DiscriminationResult bayes_optimal(const Ensemble& ens, const BayesOptions& opt = {}) {
  using namespace discrimination_detail;
  require_priors(ens, "bayes_optimal");
  const auto d = ens.dim();
  const std::size_t r = ens.size();

  std::vector<ComplexMatrix> effects =
      opt.initial ? clean_povm(*opt.initial) : pretty_good_measurement(ens).first.effects();
  std::vector<ComplexMatrix> weighted;
  for (std::size_t j = 0; j < r; ++j) weighted.push_back(ens.weighted(j));

  Certified best = certify_bayes(ens, effects);
  int iterations = 0;
  while (best.error - best.lower > opt.tol && iterations < opt.max_iterations) {
    for (int k = 0; k < opt.check_every && iterations < opt.max_iterations; ++k, ++iterations) {
      std::vector<ComplexMatrix> num(r);
      ComplexMatrix total = ComplexMatrix::Zero(d, d);
      for (std::size_t j = 0; j < r; ++j) {
        num[j] = linalg::hermitian_part(weighted[j] * effects[j] * weighted[j]);
        total += num[j];
      }
      const ComplexMatrix rinv = linalg::psd_inverse_sqrt(total);
      const ComplexMatrix kernel = linalg::psd_kernel_projector(total);
      for (std::size_t j = 0; j < r; ++j) effects[j] = linalg::hermitian_part(rinv * num[j] * rinv);
      effects.front() += kernel;
    }
    Certified next = certify_bayes(ens, effects);
    if (next.error - next.lower <= best.error - best.lower || next.error < best.error) best = next;
    effects = best.effects;
  }

  std::string method = "fixed_point";
  if (best.error - best.lower > opt.tol && opt.allow_interior_point) {
    if (auto ip = bayes_interior_point(ens); ip && ip->error - ip->lower < best.error - best.lower) {
      best = std::move(*ip);
      method = "interior_point";
    }
  }
  DiscriminationResult out{best.error,
                           best.lower,
                           best.error - best.lower,
                           Povm(std::move(best.effects)),
                           iterations,
                           best.error - best.lower <= opt.tol,
                           method,
                           {}};
  return out;
}

inline DiscriminationResult bayes_optimal(const Ensemble& ens, double tol) {
  BayesOptions opt;
  opt.tol = tol;
  return bayes_optimal(ens, opt);
}

namespace discrimination_detail {

inline std::vector<double> per_state_errors(const std::vector<DensityMatrix>& states,
                                            const std::vector<ComplexMatrix>& effects) {
  std::vector<double> errs;
  for (std::size_t j = 0; j < states.size(); ++j)
    errs.push_back(1.0 - linalg::real_inner(effects[j], states[j].matrix()));
  return errs;
}

inline double worst(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Binary minimax: maximize the concave Helstrom error over the prior by
// golden-section search, then mix the projector onto the null space of
// q rho - (1-q) sigma so the two per-state errors balance.
inline std::optional<DiscriminationResult> binary_minimax(const DensityMatrix& rho,
                                                          const DensityMatrix& sigma, double tol) {
  auto g = [&](double q) { return helstrom_error(q, rho, sigma); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double ga = g(a), gb = g(b);
  int iters = 0;
  while (hi - lo > 1e-13 && iters < 200) {
    ++iters;
    if (ga < gb) {
      lo = a;
      a = b;
      ga = gb;
      b = lo + phi * (hi - lo);
      gb = g(b);
    } else {
      hi = b;
      b = a;
      gb = ga;
      a = hi - phi * (hi - lo);
      ga = g(a);
    }
  }
  const double q = 0.5 * (lo + hi);
  const double lower = g(q);
  const auto eig = linalg::hermitian_eig(q * rho.matrix() - (1.0 - q) * sigma.matrix());
  const double scale = std::max(1e-300, eig.values.cwiseAbs().maxCoeff());
  const double eps = 1e-9 * std::max(scale, 1.0);
  const auto d = rho.dim();
  ComplexMatrix plus = ComplexMatrix::Zero(d, d), null = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const ComplexVector v = eig.vectors.col(k);
    if (eig.values(k) > eps) plus += v * v.adjoint();
    else if (eig.values(k) >= -eps) null += v * v.adjoint();
  }
  // err1(c) = 1 - Tr[(P+ + c P0) rho], err2(c) = Tr[(P+ + c P0) sigma]
  const double r_plus = linalg::real_inner(plus, rho.matrix());
  const double r_null = linalg::real_inner(null, rho.matrix());
  const double s_plus = linalg::real_inner(plus, sigma.matrix());
  const double s_null = linalg::real_inner(null, sigma.matrix());
  double c = 0.5;
  if (r_null + s_null > 1e-15) c = std::clamp((1.0 - r_plus - s_plus) / (r_null + s_null), 0.0, 1.0);
  ComplexMatrix pi1 = plus + c * null;
  std::vector<ComplexMatrix> effects{pi1, linalg::identity(d) - pi1};
  effects = clean_povm(std::move(effects));
  const double err = worst(per_state_errors({rho, sigma}, effects));
  const double gap = err - lower;
  if (gap > tol) return std::nullopt;
  return DiscriminationResult{err, lower, gap, Povm(std::move(effects)), iters, true,
                              "binary_prior_search", {q, 1.0 - q}};
}

// Epigraph form: max s  s.t.  Tr[Pi_j rho_j] - s - w_j = 0, sum Pi_j = I.
inline DiscriminationResult minimax_interior_point(const std::vector<DensityMatrix>& states,
                                                   double tol) {
  const auto d = states.front().dim();
  const std::size_t r = states.size();
  sdp::Problem prob;
  prob.block_sizes.assign(r, d);
  for (std::size_t j = 0; j < r; ++j) prob.objective.push_back(ComplexMatrix::Zero(d, d));
  const std::size_t s_block = r;
  prob.block_sizes.push_back(1);
  prob.objective.push_back(-ComplexMatrix::Identity(1, 1));
  for (std::size_t j = 0; j < r; ++j) {
    prob.block_sizes.push_back(1);
    prob.objective.push_back(ComplexMatrix::Zero(1, 1));
  }
  const auto basis = sdp::hermitian_basis(d);
  for (const auto& e : basis) {
    sdp::Constraint c;
    for (std::size_t j = 0; j < r; ++j) c.terms.emplace_back(j, e);
    c.rhs = e.trace().real();
    prob.constraints.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < r; ++j) {
    sdp::Constraint c;
    c.terms.emplace_back(j, states[j].matrix());
    c.terms.emplace_back(s_block, -ComplexMatrix::Identity(1, 1));
    c.terms.emplace_back(s_block + 1 + j, -ComplexMatrix::Identity(1, 1));
    c.rhs = 0.0;
    prob.constraints.push_back(std::move(c));
  }
  const auto sol = sdp::solve(prob);

  std::vector<ComplexMatrix> effects(sol.x.begin(), sol.x.begin() + static_cast<long>(r));
  effects = clean_povm(std::move(effects));
  const double err = worst(per_state_errors(states, effects));

  // Dual multipliers of the per-state constraints form the prior q; the
  // remaining multipliers give Y = -sum_k y_k E_k with Y >= q_j rho_j.
  std::vector<double> q(r);
  double qsum = 0.0;
  for (std::size_t j = 0; j < r; ++j) {
    q[j] = std::max(0.0, sol.y(static_cast<Eigen::Index>(basis.size() + j)));
    qsum += q[j];
  }
  double lower = 0.0;
  if (qsum > 0.0) {
    for (auto& v : q) v /= qsum;
    ComplexMatrix y = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < basis.size(); ++k) y -= sol.y(static_cast<Eigen::Index>(k)) * basis[k];
    Ensemble weighted(states, q);
    lower = std::clamp(1.0 - feasible_dual_value(weighted, y / qsum), 0.0, err);
  }
  return DiscriminationResult{err,  lower, err - lower, Povm(std::move(effects)), sol.iterations,
                              err - lower <= tol, "interior_point", q};
}

}  // namespace discrimination_detail

// min over POVMs of max_j (1 - Tr[Pi_j rho_j]). Priors, if any, are ignored.
inline DiscriminationResult minimax_optimal(const std::vector<DensityMatrix>& states,
                                            double tol = kDefaultSolverTol) {
  using namespace discrimination_detail;
  if (states.size() < 2) throw InputError("minimax_optimal: at least two states required");
  for (const auto& s : states)
    if (s.dim() != states.front().dim()) throw ShapeError("minimax_optimal: dimension mismatch");
  if (states.size() == 2)
    if (auto res = binary_minimax(states[0], states[1], tol)) return std::move(*res);
  return minimax_interior_point(states, tol);
}

inline DiscriminationResult minimax_optimal(const Ensemble& ens, double tol = kDefaultSolverTol) {
  return minimax_optimal(ens.states(), tol);
}

// Euclidean projection onto the probability simplex.
inline std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    css += u[k];
    const double t = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  for (auto& x : v) x = std::max(x - theta, 0.0);
  return v;
}

struct PriorAscentResult {
  double value = 0.0;  // best Bayes error found, a lower bound on the minimax error
  std::vector<double> prior;
  int steps = 0;
};

// Worst-case Bayes error by projected supergradient ascent over the prior.
// The supergradient at q is the vector of per-state errors of a
// Bayes-optimal POVM for q.
inline PriorAscentResult minimax_prior_ascent(const std::vector<DensityMatrix>& states,
                                              int steps = 1000, double step0 = 0.5) {
  const std::size_t r = states.size();
  if (r < 2) throw InputError("minimax_prior_ascent: at least two states required");
  std::vector<double> q(r, 1.0 / static_cast<double>(r));
  PriorAscentResult best{-1.0, q, 0};
  BayesOptions opt;
  opt.tol = 1e-10;
  for (int k = 1; k <= steps; ++k) {
    const auto res = bayes_optimal(Ensemble(states, q), opt);
    opt.initial = res.povm.effects();
    if (res.lower_bound > best.value) best = {res.lower_bound, q, k};
    const auto errs = discrimination_detail::per_state_errors(states, res.povm.effects());
    const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(r);
    const double eta = step0 / std::sqrt(static_cast<double>(k));
    for (std::size_t j = 0; j < r; ++j) q[j] += eta * (errs[j] - mean);
    q = project_to_simplex(std::move(q));
    double sum = std::accumulate(q.begin(), q.end(), 0.0);
    for (auto& v : q) v /= sum;
  }
  best.steps = steps;
  return best;
}

struct Lemma1Bound {
  double prior_weighted;  // sum_i p_i max_{j != i} P_e(...)
  double min_max;         // min_i max_{j != i} P_e(...)
  double value;           // max of the two
  std::vector<std::size_t> partner;  // argmax j per i, smallest index on ties
};

// Pairwise Helstrom lower bound on the multi-hypothesis Bayes error.
inline Lemma1Bound lemma1_lower_bound(const Ensemble& ens) {
  discrimination_detail::require_priors(ens, "lemma1_lower_bound");
  const std::size_t r = ens.size();
  Lemma1Bound out{0.0, INFINITY, 0.0, std::vector<std::size_t>(r, 0)};
  for (std::size_t i = 0; i < r; ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < r; ++j) {
      if (j == i) continue;
      const double pi = ens.prior(i), pj = ens.prior(j);
      double pe = 0.0;
      if (pi + pj > 0.0)
        pe = helstrom_error_weighted(pi / (pi + pj), ens.state(i).matrix(), pj / (pi + pj),
                                     ens.state(j).matrix());
      if (pe > best) {
        best = pe;
        out.partner[i] = j;
      }
    }
    out.prior_weighted += ens.prior(i) * best;
    out.min_max = std::min(out.min_max, best);
  }
  out.value = std::max(out.prior_weighted, out.min_max);
  return out;
}

// max over pairs of the binary minimax error.
inline double minimax_pairwise_lower_bound(const std::vector<DensityMatrix>& states,
                                           double tol = kDefaultSolverTol) {
  if (states.size() < 2) throw InputError("minimax_pairwise_lower_bound: at least two states required");
  double best = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j)
      best = std::max(best, minimax_optimal({states[i], states[j]}, tol).error);
  return best;
}

}  // namespace shotbound
