// Builds a two-qubit re-uploading classifier, samples two Gaussian clusters
// and prints the single-shot error together with its lower bounds.

#include <iostream>

#include "shotbound/shotbound.hpp"

using namespace shotbound;

int main() {
  std::vector<CircuitSpec::Layer> layers;
  for (int l = 0; l < 2; ++l) {
    layers.push_back({GateSpec::named(GateKind::encode, {0}, "Y", 0),
                      GateSpec::named(GateKind::encode, {1}, "Y", 1),
                      GateSpec::named(GateKind::fixed, {0, 1}, "CNOT"),
                      GateSpec::named(GateKind::variational, {0}, "X", -1, 0.3)});
  }
  CircuitSpec circuit(2, 2, 1, layers);

  // Label 0 <-> first qubit measured 0.
  ComplexMatrix p0 = ComplexMatrix::Zero(4, 4);
  p0(0, 0) = p0(1, 1) = 1.0;
  Classifier clf(circuit, NoiseSchedule(0.95, true), Povm({p0, linalg::identity(4) - p0}), {"a", "b"});

  const auto ds = gen_blobs({{0.2, 0.3}, {1.2, 0.9}}, {0.15, 0.15}, {40, 40}, 7);

  const double delta = bayes_delta(clf, ds);
  const auto floor6 = theorem6_floor(clf, ds);
  const auto stats = class_average_states(clf, ds, LabelSource::assigned);
  const auto acc = accuracy_and_floor(clf, ds);

  std::cout << "single-shot error delta      " << delta << "\n"
            << "optimal-discrimination floor " << floor6.value << "\n";
  if (stats.labels.size() >= 2) {
    const auto pw = pairwise_bayes_floor(stats);
    std::cout << "pairwise floor               " << pw.prior_weighted << "\n";
  }
  std::cout << "accuracy                     " << acc.success << " (error floor " << acc.floor.value << ")\n";

  const auto cd = davg_matrix(ds);
  std::cout << "depth floor at L=2           " << theorem9_floor(cd.priors, cd.davg, 2.0, circuit_spread(circuit))
            << "\n";
  return 0;
}
