#pragma once

// Probabilistic classifiers and their single-shot error quantities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "shotbound/circuit.hpp"
#include "shotbound/data.hpp"
#include "shotbound/discrimination.hpp"
#include "shotbound/errors.hpp"
#include "shotbound/parallel.hpp"
#include "shotbound/qcore.hpp"

namespace shotbound {

class Classifier {
 public:
  Classifier(CircuitSpec circuit, NoiseSchedule noise, Povm povm, std::vector<std::string> labels = {})
      : circuit_(std::move(circuit)), noise_(noise), povm_(std::move(povm)), labels_(std::move(labels)) {
    if (labels_.empty())
      for (std::size_t y = 0; y < povm_.size(); ++y) labels_.push_back(std::to_string(y));
    if (labels_.size() != povm_.size())
      throw StructureError("classifier: " + std::to_string(povm_.size()) + " effects but " +
                           std::to_string(labels_.size()) + " labels");
    if (povm_.dim() != circuit_.dim()) throw ShapeError("classifier: POVM dimension differs from circuit");
  }

  const CircuitSpec& circuit() const { return circuit_; }
  const NoiseSchedule& noise() const { return noise_; }
  const Povm& povm() const { return povm_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t num_labels() const { return labels_.size(); }

  DensityMatrix state(const DataPoint& x) const { return embed(circuit_, x, noise_); }

 private:
  CircuitSpec circuit_;
  NoiseSchedule noise_;
  Povm povm_;
  std::vector<std::string> labels_;
};

// Index of the largest entry, smallest index on ties.
inline std::size_t argmax_first(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

// Tr[Pi_y rho], with float drift below zero clipped.
inline std::vector<double> label_probs(const Povm& povm, const DensityMatrix& rho) {
  auto p = povm.probabilities(rho);
  for (double& v : p) v = std::max(v, 0.0);
  return p;
}

inline std::vector<double> label_probs(const Classifier& c, const DataPoint& x) {
  return label_probs(c.povm(), c.state(x));
}

inline std::size_t majority_label(const Classifier& c, const DataPoint& x) {
  return argmax_first(label_probs(c, x));
}

struct PointEval {
  std::vector<double> probs;
  std::size_t majority = 0;
  double max_prob = 0.0;
};

inline std::vector<PointEval> evaluate_points(const Classifier& c, const std::vector<DataPoint>& xs) {
  return parallel_map(xs.size(), [&](std::size_t k) {
    PointEval e;
    e.probs = label_probs(c, xs[k]);
    e.majority = argmax_first(e.probs);
    e.max_prob = e.probs[e.majority];
    return e;
  });
}

// 1 - sum_x w(x) max_y Tr[Pi_y rho(x)]
inline double bayes_delta(const Classifier& c, const LabeledDataset& ds) {
  const auto evals = evaluate_points(c, ds.points());
  double s = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) s += ds.weight(k) * evals[k].max_prob;
  return std::clamp(1.0 - s, 0.0, 1.0);
}

// 1 - min_x max_y Tr[Pi_y rho(x)] over a finite candidate set.
inline double agnostic_delta(const Classifier& c, const std::vector<DataPoint>& candidates) {
  if (candidates.empty()) throw InputError("agnostic_delta: empty candidate set");
  const auto evals = evaluate_points(c, candidates);
  double worst = 1.0;
  for (const auto& e : evals) worst = std::min(worst, e.max_prob);
  return std::clamp(1.0 - worst, 0.0, 1.0);
}

enum class LabelSource { assigned, true_label };

struct ClassStats {
  std::vector<std::size_t> labels;     // labels with positive weight, ascending
  std::vector<double> priors;          // p~_y, sums to 1
  std::vector<DensityMatrix> states;   // rho~_y
  std::vector<std::size_t> support;    // point count per included label
  std::vector<std::size_t> excluded;   // classifier labels with zero weight

  Ensemble ensemble() const { return Ensemble(states, priors); }
};

namespace singleshot_detail {

inline ClassStats average_states(const Classifier& c, const LabeledDataset& ds,
                                 const std::vector<std::size_t>& assignment,
                                 const std::vector<DensityMatrix>& rhos) {
  const std::size_t ny = c.num_labels();
  std::vector<double> mass(ny, 0.0);
  std::vector<std::size_t> count(ny, 0);
  std::vector<ComplexMatrix> acc(ny, ComplexMatrix::Zero(c.circuit().dim(), c.circuit().dim()));
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const auto y = assignment[k];
    mass[y] += ds.weight(k);
    ++count[y];
    acc[y] += ds.weight(k) * rhos[k].matrix();
  }
  ClassStats out;
  double total = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    if (mass[y] > 0.0) {
      out.labels.push_back(y);
      out.priors.push_back(mass[y]);
      out.states.push_back(DensityMatrix::from_channel_output(acc[y] / mass[y]));
      out.support.push_back(count[y]);
      total += mass[y];
    } else {
      out.excluded.push_back(y);
    }
  }
  for (double& p : out.priors) p /= total;
  return out;
}

}  // namespace singleshot_detail

// Average state per class, grouped by the classifier's majority label or by
// the dataset's true label.
inline ClassStats class_average_states(const Classifier& c, const LabeledDataset& ds, LabelSource by) {
  const auto rhos = parallel_map(ds.size(), [&](std::size_t k) { return c.state(ds.point(k)); });
  std::vector<std::size_t> assignment(ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (by == LabelSource::assigned) {
      assignment[k] = argmax_first(label_probs(c.povm(), rhos[k]));
    } else {
      if (ds.label(k) >= c.num_labels())
        throw InputError("dataset label " + std::to_string(ds.label(k)) + " has no POVM effect");
      assignment[k] = ds.label(k);
    }
  }
  return singleshot_detail::average_states(c, ds, assignment, rhos);
}

struct FloorResult {
  double value = 0.0;
  double duality_gap = 0.0;
  bool converged = true;
  std::size_t classes = 0;
};

inline FloorResult bayes_floor(const ClassStats& stats, double tol = kDefaultSolverTol) {
  FloorResult out;
  out.classes = stats.labels.size();
  if (out.classes < 2) return out;  // one hypothesis is identified without error
  const auto res = bayes_optimal(stats.ensemble(), tol);
  out.value = res.error;
  out.duality_gap = res.duality_gap;
  out.converged = res.converged;
  return out;
}

// Minimum Bayes error of the assigned-class ensemble {p~_y, rho~_y}.
inline FloorResult theorem6_floor(const Classifier& c, const LabeledDataset& ds, double tol = kDefaultSolverTol) {
  return bayes_floor(class_average_states(c, ds, LabelSource::assigned), tol);
}

struct PairwiseFloor {
  double prior_weighted = 0.0;  // sum_y p~_y max_{y'} e(y,y')/2
  double min_max = 0.0;         // min_y max_{y'} e(y,y')/2
};

// e(y,y') = 1 - || p~_y/(p~_y+p~_y') rho~_y - p~_y'/(p~_y+p~_y') rho~_y' ||_1
inline PairwiseFloor pairwise_bayes_floor(const ClassStats& stats) {
  const std::size_t r = stats.labels.size();
  if (r < 2) throw InputError("pairwise_bayes_floor: at least two classes required");
  PairwiseFloor out{0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < r; ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      if (j == i) continue;
      const double s = stats.priors[i] + stats.priors[j];
      const double e =
          1.0 - trace_norm(stats.priors[i] / s * stats.states[i].matrix() - stats.priors[j] / s * stats.states[j].matrix());
      best = std::max(best, 0.5 * e);
    }
    out.prior_weighted += stats.priors[i] * best;
    out.min_max = std::min(out.min_max, best);
  }
  return out;
}

struct AssignedCandidates {
  std::vector<DataPoint> points;
  std::vector<DensityMatrix> states;
  std::vector<PointEval> evals;
  std::vector<std::vector<std::size_t>> by_label;  // candidate indices per classifier label
};

inline AssignedCandidates assign_candidates(const Classifier& c, const std::vector<DataPoint>& candidates) {
  AssignedCandidates out;
  out.points = candidates;
  out.states = parallel_map(candidates.size(), [&](std::size_t k) { return c.state(candidates[k]); });
  out.by_label.assign(c.num_labels(), {});
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    PointEval e;
    e.probs = label_probs(c.povm(), out.states[k]);
    e.majority = argmax_first(e.probs);
    e.max_prob = e.probs[e.majority];
    out.by_label[e.majority].push_back(k);
    out.evals.push_back(std::move(e));
  }
  return out;
}

struct CrossPair {
  std::size_t a = 0, b = 0;
  double trace_norm = 0.0;
};

// Closest pair of candidates with different assigned labels.
inline CrossPair closest_cross_pair(const AssignedCandidates& ac) {
  std::optional<CrossPair> best;
  for (std::size_t a = 0; a < ac.points.size(); ++a)
    for (std::size_t b = a + 1; b < ac.points.size(); ++b) {
      if (ac.evals[a].majority == ac.evals[b].majority) continue;
      const double t = trace_norm(ac.states[a].matrix() - ac.states[b].matrix());
      if (!best || t < best->trace_norm) best = CrossPair{a, b, t};
    }
  if (!best) throw UndefinedError("candidates span a single assigned label");
  return *best;
}

// 1/2 - 1/4 min over cross-label pairs of ||rho(x) - rho(x')||_1
inline double agnostic_pairwise_floor(const Classifier& c, const std::vector<DataPoint>& candidates) {
  const auto ac = assign_candidates(c, candidates);
  return 0.5 - 0.25 * closest_cross_pair(ac).trace_norm;
}

// Half trace distance that every cross-label pair must reach for delta-bar.
inline double required_distance(double delta_bar) {
  if (!(delta_bar >= 0.0 && delta_bar <= 1.0)) throw InputError("required_distance: delta outside [0,1]");
  return 1.0 - 2.0 * delta_bar;
}

inline constexpr double kExhaustiveSelectionLimit = 1e5;

struct Theorem7Result {
  double value = 0.0;
  std::vector<std::size_t> labels;     // labels with candidates
  std::vector<std::size_t> selection;  // candidate index per entry of `labels`
  std::vector<std::size_t> skipped;    // labels without candidates
  bool exhaustive = true;
  double duality_gap = 0.0;
};

// max over selections {x_y in X~_y} of the minimax error of {rho(x_y)}.
inline Theorem7Result theorem7_floor(const Classifier& c, const std::vector<DataPoint>& candidates,
                                     double tol = kDefaultSolverTol) {
  if (candidates.empty()) throw InputError("theorem7_floor: empty candidate set");
  const auto ac = assign_candidates(c, candidates);
  Theorem7Result out;
  std::vector<const std::vector<std::size_t>*> sets;
  for (std::size_t y = 0; y < ac.by_label.size(); ++y) {
    if (ac.by_label[y].empty()) {
      out.skipped.push_back(y);
    } else {
      out.labels.push_back(y);
      sets.push_back(&ac.by_label[y]);
    }
  }
  const std::size_t r = sets.size();
  if (r < 2) {
    out.selection.assign(r, r == 1 ? sets.front()->front() : 0);
    return out;
  }

  struct Eval {
    double value, gap;
  };
  auto evaluate = [&](const std::vector<std::size_t>& pick) {
    std::vector<DensityMatrix> states;
    for (auto k : pick) states.push_back(ac.states[k]);
    const auto res = minimax_optimal(states, tol);
    return Eval{res.error, res.duality_gap};
  };

  double combos = 1.0;
  for (auto* s : sets) combos *= static_cast<double>(s->size());

  if (combos <= kExhaustiveSelectionLimit) {
    const auto total = static_cast<std::size_t>(combos);
    auto decode = [&](std::size_t code) {
      std::vector<std::size_t> pick(r);
      for (std::size_t a = r; a-- > 0;) {
        pick[a] = (*sets[a])[code % sets[a]->size()];
        code /= sets[a]->size();
      }
      return pick;
    };
    const auto vals = parallel_map(total, [&](std::size_t code) { return evaluate(decode(code)); });
    std::size_t best = 0;
    for (std::size_t k = 1; k < total; ++k)
      if (vals[k].value > vals[best].value) best = k;
    out.value = vals[best].value;
    out.duality_gap = vals[best].gap;
    out.selection = decode(best);
    return out;
  }

  // Coordinate ascent from the selection holding the closest cross-label pair.
  out.exhaustive = false;
  const auto pair = closest_cross_pair(ac);
  std::vector<std::size_t> pick(r);
  for (std::size_t a = 0; a < r; ++a) {
    const auto y = out.labels[a];
    if (ac.evals[pair.a].majority == y) pick[a] = pair.a;
    else if (ac.evals[pair.b].majority == y) pick[a] = pair.b;
    else pick[a] = sets[a]->front();
  }
  Eval current = evaluate(pick);
  for (int sweep = 0; sweep < 10; ++sweep) {
    bool improved = false;
    for (std::size_t a = 0; a < r; ++a) {
      const auto& set = *sets[a];
      const auto vals = parallel_map(set.size(), [&](std::size_t k) {
        auto trial = pick;
        trial[a] = set[k];
        return evaluate(trial);
      });
      for (std::size_t k = 0; k < set.size(); ++k)
        if (vals[k].value > current.value) {
          current = vals[k];
          pick[a] = set[k];
          improved = true;
        }
    }
    if (!improved) break;
  }
  out.value = current.value;
  out.duality_gap = current.gap;
  out.selection = pick;
  return out;
}

struct GapProfile {
  std::vector<double> gaps;
  double gap = 0.0;  // min over points
};

// Largest minus second-largest label probability.
inline double probability_gap(const std::vector<double>& probs) {
  if (probs.empty()) throw InputError("probability_gap: no labels");
  double first = -1.0, second = 0.0;
  for (double p : probs) {
    if (p > first) {
      second = std::max(second, first);
      first = p;
    } else {
      second = std::max(second, p);
    }
  }
  return std::max(first - second, 0.0);
}

inline GapProfile gap_profile(const Classifier& c, const std::vector<DataPoint>& points) {
  if (points.empty()) throw InputError("gap_profile: no points");
  GapProfile out;
  for (const auto& e : evaluate_points(c, points)) out.gaps.push_back(probability_gap(e.probs));
  out.gap = *std::min_element(out.gaps.begin(), out.gaps.end());
  return out;
}

// |Y| exp(-m gap^2 / 2)
inline double boost_bound(std::uint64_t m, double gap, std::size_t n_labels) {
  if (m < 1) throw InputError("boost_bound: m must be >= 1");
  if (!(gap >= 0.0 && gap <= 1.0)) throw InputError("boost_bound: gap outside [0,1]");
  return static_cast<double>(n_labels) * std::exp(-0.5 * static_cast<double>(m) * gap * gap);
}

// Smallest m >= 1 with boost_bound(m) <= target; nullopt when gap = 0.
inline std::optional<std::uint64_t> shots_needed(double target, double gap, std::size_t n_labels) {
  if (!(target > 0.0)) throw InputError("shots_needed: target must be positive");
  if (!(gap >= 0.0 && gap <= 1.0)) throw InputError("shots_needed: gap outside [0,1]");
  if (gap == 0.0) return std::nullopt;
  const double est = 2.0 * std::log(static_cast<double>(n_labels) / target) / (gap * gap);
  auto m = static_cast<std::uint64_t>(std::max(1.0, std::ceil(est)));
  while (m > 1 && boost_bound(m - 1, gap, n_labels) <= target) --m;
  while (boost_bound(m, gap, n_labels) > target) ++m;
  return m;
}

namespace singleshot_detail {

inline std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace singleshot_detail

struct MonteCarloResult {
  double failure_rate = 0.0;
  std::uint64_t failures = 0;
  std::uint64_t trials = 0;
};

// Fraction of trials whose m-sample majority vote (ties to the smallest
// label) differs from argmax probs. Each trial draws from its own stream
// seeded by (seed, trial).
inline MonteCarloResult monte_carlo_majority(const std::vector<double>& probs, std::uint64_t m,
                                             std::uint64_t trials, std::uint64_t seed) {
  if (m < 1 || trials < 1) throw InputError("monte_carlo_majority: m and trials must be >= 1");
  if (probs.empty()) throw InputError("monte_carlo_majority: no labels");
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) cdf[k] = (acc += std::max(probs[k], 0.0));
  const double total = acc;
  const std::size_t target = argmax_first(probs);
  const auto failed = parallel_map(static_cast<std::size_t>(trials), [&](std::size_t t) {
    auto rng = singleshot_detail::trial_stream(seed, t);
    std::vector<std::uint64_t> votes(probs.size(), 0);
    for (std::uint64_t s = 0; s < m; ++s) {
      const double u = singleshot_detail::unit_draw(rng) * total;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      ++votes[static_cast<std::size_t>(it - cdf.begin())];
    }
    std::size_t winner = 0;
    for (std::size_t k = 1; k < votes.size(); ++k)
      if (votes[k] > votes[winner]) winner = k;
    return static_cast<int>(winner != target);
  });
  MonteCarloResult out;
  out.trials = trials;
  for (int f : failed) out.failures += static_cast<std::uint64_t>(f);
  out.failure_rate = static_cast<double>(out.failures) / static_cast<double>(trials);
  return out;
}

inline MonteCarloResult monte_carlo_majority(const Classifier& c, const DataPoint& x, std::uint64_t m,
                                             std::uint64_t trials, std::uint64_t seed) {
  return monte_carlo_majority(label_probs(c, x), m, trials, seed);
}

// delta-bar on a subset plus the probability mass outside it, capped at 1.
inline double restriction_bound(double delta_bar_subset, double mass_outside) {
  if (!(delta_bar_subset >= 0.0 && delta_bar_subset <= 1.0) || !(mass_outside >= 0.0 && mass_outside <= 1.0))
    throw InputError("restriction_bound: arguments must lie in [0,1]");
  return std::min(1.0, delta_bar_subset + mass_outside);
}

struct AccuracyReport {
  double success = 0.0;  // sum_y Tr[Pi_y p_y rho_y] over true classes
  FloorResult floor;     // optimal error on the true-class ensemble
  ClassStats stats;
};

inline AccuracyReport accuracy_and_floor(const Classifier& c, const LabeledDataset& ds,
                                         double tol = kDefaultSolverTol) {
  AccuracyReport out;
  out.stats = class_average_states(c, ds, LabelSource::true_label);
  for (std::size_t k = 0; k < out.stats.labels.size(); ++k)
    out.success += out.stats.priors[k] *
                   linalg::real_inner(c.povm().effect(out.stats.labels[k]), out.stats.states[k].matrix());
  out.success = std::clamp(out.success, 0.0, 1.0);
  out.floor = bayes_floor(out.stats, tol);
  return out;
}

struct Grid2D {
  double x1_min = 0.0, x1_max = 1.0;
  std::size_t n1 = 11;
  double x2_min = 0.0, x2_max = 1.0;
  std::size_t n2 = 11;

  // Evenly spaced coordinates including both endpoints.
  static std::vector<double> axis(double lo, double hi, std::size_t n) {
    if (n == 0) throw InputError("grid axis needs at least one point");
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
      out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
  }
};

struct RegionCell {
  double x1 = 0.0, x2 = 0.0;
  std::size_t label = 0;
  double max_prob = 0.0;
  bool singleshot = false;  // max_y prob >= 1 - delta
};

// Row-major over (x1, x2): x2 varies fastest.
inline std::vector<RegionCell> decision_regions(const Classifier& c, const Grid2D& grid, double delta) {
  if (c.circuit().d() != 2) throw UnsupportedError("decision_regions: data dimension must be 2");
  if (!(delta >= 0.0 && delta <= 1.0)) throw InputError("decision_regions: delta outside [0,1]");
  const auto a1 = Grid2D::axis(grid.x1_min, grid.x1_max, grid.n1);
  const auto a2 = Grid2D::axis(grid.x2_min, grid.x2_max, grid.n2);
  std::vector<DataPoint> pts;
  for (double u : a1)
    for (double v : a2) pts.push_back({u, v});
  const auto evals = evaluate_points(c, pts);
  std::vector<RegionCell> out;
  for (std::size_t k = 0; k < pts.size(); ++k)
    out.push_back({pts[k][0], pts[k][1], evals[k].majority, evals[k].max_prob, evals[k].max_prob >= 1.0 - delta});
  return out;
}

}  // namespace shotbound
