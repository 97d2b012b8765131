#pragma once

// Closed-form trace-distance bounds for noiseless and depolarized circuits,
// and the depth requirements they imply.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "shotbound/errors.hpp"

namespace shotbound {

inline constexpr double kTraceDistanceCap = 2.0;

struct BoundInputs {
  std::int64_t L = 0;   // layers
  std::int64_t ell = 0; // non-encoding steps per layer
  std::int64_t n = 1;   // qubits
  double p = 1.0;       // depolarizing survival probability
  double spread = 0.0;  // encoding spectral spread
  double x_dist = 0.0;  // |x - x'|_1
  double gamma_max = 0.0;

  void validate() const {
    if (L < 0 || ell < 0 || n < 0) throw InputError("bound inputs: L, ell and n must be nonnegative");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("bound inputs: p outside [0,1]");
    if (!(spread >= 0.0) || !(x_dist >= 0.0) || !(gamma_max >= 0.0))
      throw InputError("bound inputs: spread, x_dist and gamma_max must be nonnegative");
  }
};

// L * spread * x_dist
inline double continuity_bound(const BoundInputs& in) {
  in.validate();
  return static_cast<double>(in.L) * in.spread * in.x_dist;
}

// p^{L(1+ell)} sqrt(8n)
inline double noise_only_bound(const BoundInputs& in) {
  in.validate();
  return std::pow(in.p, static_cast<double>(in.L * (1 + in.ell))) * std::sqrt(8.0 * static_cast<double>(in.n));
}

namespace depth_detail {

inline std::optional<std::int64_t> ceil_threshold(double scale, double n, double p) {
  if (!(p > 0.0 && p < 1.0)) return std::nullopt;
  if (!(n >= 1.0)) throw InputError("threshold: n must be >= 1");
  const double v = std::ceil(1.0 + scale * std::log(2.0 * n) / std::log(1.0 / p));
  if (!(v < 9.0e18)) throw UndefinedError("threshold exceeds the representable range");
  return static_cast<std::int64_t>(v);
}

}  // namespace depth_detail

// ceil(1 + log(2n) / (2(ell+1) log(1/p))); nullopt for p in {0, 1}.
inline std::optional<std::int64_t> L0(const BoundInputs& in) {
  in.validate();
  return depth_detail::ceil_threshold(0.5 / static_cast<double>(in.ell + 1), static_cast<double>(in.n), in.p);
}

// ceil(1 + log(2n) / (2 log(1/p))); nullopt for p in {0, 1}.
inline std::optional<std::int64_t> t0(double p, std::int64_t n) {
  return depth_detail::ceil_threshold(0.5, static_cast<double>(n), p);
}

inline std::optional<std::int64_t> t0(const BoundInputs& in) {
  in.validate();
  return t0(in.p, in.n);
}

// L0 with its p -> 0+ limit (2) filled in; nullopt only at p = 1.
inline std::optional<std::int64_t> L0_or_limit(const BoundInputs& in) {
  if (in.p == 0.0) return 2;
  return L0(in);
}

// Replacement for L in the noisy floor:
// L0 + sqrt(2n) (p^{L0(ell+1)} - p^{L(ell+1)}) / (1 - p^{ell+1}), or L when L <= L0.
inline double effective_layers(const BoundInputs& in) {
  in.validate();
  const auto l0 = L0_or_limit(in);
  if (!l0 || in.L <= *l0) return static_cast<double>(in.L);
  const double k = static_cast<double>(in.ell + 1);
  const double q = std::pow(in.p, k);
  const double series = (std::pow(in.p, static_cast<double>(*l0) * k) - std::pow(in.p, static_cast<double>(in.L) * k)) /
                        (1.0 - q);
  return std::min(static_cast<double>(in.L),
                  static_cast<double>(*l0) + std::sqrt(2.0 * static_cast<double>(in.n)) * series);
}

// spread * x_dist * effective_layers; equals the continuity bound for L <= L0.
inline double noisy_continuity_bound(const BoundInputs& in) {
  in.validate();
  const auto l0 = L0_or_limit(in);
  if (!l0 || in.L <= *l0) return continuity_bound(in);
  return in.spread * in.x_dist * effective_layers(in);
}

inline double combined_bound(const BoundInputs& in) {
  return std::min(noise_only_bound(in), noisy_continuity_bound(in));
}

inline double capped(double bound) { return std::min(bound, kTraceDistanceCap); }

// spread * x_dist * sum_{i=1}^{L} min(1, p^{(i-1)(ell+1)} sqrt(2n)): the
// per-layer sum before the geometric series is bounded.
inline double layerwise_noisy_bound(const BoundInputs& in) {
  in.validate();
  const double root = std::sqrt(2.0 * static_cast<double>(in.n));
  const double k = static_cast<double>(in.ell + 1);
  double s = 0.0;
  for (std::int64_t i = 1; i <= in.L; ++i) {
    const double term = std::min(1.0, std::pow(in.p, static_cast<double>(i - 1) * k) * root);
    if (term == 0.0) break;
    s += term;
  }
  return in.spread * in.x_dist * s;
}

// gamma_max * t for t <= t0, else gamma_max (t0 + sqrt(2n)(p^{t0} - p^t)/(1-p)).
inline double theorem13_bound(std::int64_t t, std::int64_t t0_steps, double gamma_max, double p, std::int64_t n) {
  if (t < 0 || t0_steps < 0 || n < 0) throw InputError("theorem13_bound: t, t0 and n must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("theorem13_bound: p outside [0,1]");
  if (!(gamma_max >= 0.0)) throw InputError("theorem13_bound: gamma_max must be nonnegative");
  if (t <= t0_steps) return gamma_max * static_cast<double>(t);
  const double root = std::sqrt(2.0 * static_cast<double>(n));
  double series;
  if (p == 1.0) series = static_cast<double>(t - t0_steps);
  else series = (std::pow(p, static_cast<double>(t0_steps)) - std::pow(p, static_cast<double>(t))) / (1.0 - p);
  return gamma_max * (static_cast<double>(t0_steps) + root * series);
}

// ceil(2(1 - 2 delta) / (spread d_avg)); 0 when delta >= 1/2.
inline std::int64_t min_depth(double delta, double spread, double d_avg) {
  if (!(spread > 0.0) || !(d_avg > 0.0)) throw InputError("min_depth: spread and d_avg must be positive");
  if (!(delta >= 0.0)) throw InputError("min_depth: delta must be nonnegative");
  if (delta >= 0.5) return 0;
  const double v = 2.0 * (1.0 - 2.0 * delta) / (spread * d_avg);
  // Absorb rounding in the quotient so exact integers are not bumped up.
  return static_cast<std::int64_t>(std::ceil(v - 1e-12 * std::max(1.0, v)));
}

// min_i max_{j != i} min(p_i,p_j)/(p_i+p_j) (1 - L spread d^{ij} / 2), clamped at 0.
// `layers` may be fractional to accept the noisy effective depth.
inline double theorem9_floor(const std::vector<double>& priors, const Eigen::MatrixXd& davg, double layers,
                             double spread) {
  const auto r = static_cast<Eigen::Index>(priors.size());
  if (r < 2) throw InputError("theorem9_floor: at least two classes required");
  if (davg.rows() != r || davg.cols() != r) throw ShapeError("theorem9_floor: d_avg matrix does not match priors");
  if (!(layers >= 0.0) || !(spread >= 0.0)) throw InputError("theorem9_floor: layers and spread must be nonnegative");
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0)) throw InputError("theorem9_floor: priors must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw InputError("theorem9_floor: priors do not sum to 1");
  double floor = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < r; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < r; ++j) {
      if (j == i) continue;
      const double pi = priors[static_cast<std::size_t>(i)], pj = priors[static_cast<std::size_t>(j)];
      const double w = pi + pj > 0.0 ? std::min(pi, pj) / (pi + pj) : 0.0;
      best = std::max(best, w * (1.0 - layers * spread * davg(i, j) / 2.0));
    }
    floor = std::min(floor, best);
  }
  return std::max(floor, 0.0);
}

struct BoundRow {
  std::int64_t L = 0;
  double noiseless = 0.0;
  double noise_only = 0.0;
  double noisy_continuity = 0.0;
  double combined = 0.0;
};

struct BoundCurve {
  BoundInputs inputs;
  std::optional<std::int64_t> L0;
  std::vector<BoundRow> rows;
};

// All bounds for each L in [l_min, l_max].
inline BoundCurve sweep(const BoundInputs& in, std::int64_t l_min, std::int64_t l_max) {
  if (l_min < 0 || l_max < l_min) throw InputError("sweep: empty or negative L range");
  BoundCurve out;
  out.inputs = in;
  out.L0 = L0_or_limit(in);
  for (std::int64_t L = l_min; L <= l_max; ++L) {
    BoundInputs at = in;
    at.L = L;
    out.rows.push_back({L, continuity_bound(at), noise_only_bound(at), noisy_continuity_bound(at), combined_bound(at)});
  }
  return out;
}

}  // namespace shotbound
