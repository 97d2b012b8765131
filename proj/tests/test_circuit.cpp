#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace shotbound;
using testutil::rng;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

DensityMatrix plus_state() {
  ComplexVector v(2);
  v << 1.0, 1.0;
  return DensityMatrix::pure(v);
}

}  // namespace

TEST(Embed, EmptyCircuitReturnsInitialState) {
  auto g = rng(1);
  const auto init = testutil::random_state(4, g);
  CircuitSpec c(2, 0, 0, {}, init);
  const auto out = embed(c, {}, NoiseSchedule::off());
  EXPECT_LT(linalg::max_abs_entry(out.matrix() - init.matrix()), 1e-15);
  EXPECT_EQ(c.total_steps(), 0u);
}

TEST(Embed, FullDepolarizationGivesMaximallyMixed) {
  auto g = rng(2);
  const auto c = testutil::random_circuit(3, 2, 2, 1, g);
  const auto out = embed(c, testutil::random_point(2, g), NoiseSchedule(0.0, true));
  EXPECT_LT(linalg::max_abs_entry(out.matrix() - linalg::identity(8) / 8.0), 1e-14);
}

TEST(Embed, PhaseRotationOnPlus) {
  // e^{-i x diag(0,1)} at x = pi/2 maps |+> to (|0> - i|1>)/sqrt 2.
  CircuitSpec c(1, 1, 0, {{GateSpec::encode({0}, diag2(0.0, 1.0), 0)}}, plus_state());
  const auto rho = embed(c, {M_PI / 2}, NoiseSchedule::off()).matrix();
  EXPECT_NEAR(rho(1, 0).real(), 0.0, 1e-15);
  EXPECT_NEAR(rho(1, 0).imag(), -0.5, 1e-15);
  const double bx = 2.0 * rho(0, 1).real(), by = 2.0 * rho(1, 0).imag(), bz = (rho(0, 0) - rho(1, 1)).real();
  EXPECT_NEAR(bx, 0.0, 1e-15);
  EXPECT_NEAR(by, -1.0, 1e-15);
  EXPECT_NEAR(bz, 0.0, 1e-15);
}

TEST(Embed, PauliZRotationOnPlus) {
  // e^{-i (pi/2) Z} = -i Z, so |+> goes to |->.
  CircuitSpec c(1, 1, 0, {{GateSpec::named(GateKind::encode, {0}, "Z", 0)}}, plus_state());
  const auto rho = embed(c, {M_PI / 2}, NoiseSchedule::off()).matrix();
  EXPECT_NEAR(rho(0, 1).real(), -0.5, 1e-15);
  EXPECT_NEAR(rho(0, 1).imag(), 0.0, 1e-15);
}

TEST(Embed, MatchesUnitaryConjugation) {
  auto g = rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto c = testutil::random_circuit(3, 3, 3, 2, g);
    const auto x = testutil::random_point(3, g);
    const ComplexMatrix u = unitary_of(c, x);
    const ComplexMatrix expect = u * c.initial_state().matrix() * u.adjoint();
    EXPECT_LT(linalg::max_abs_entry(embed(c, x, NoiseSchedule::off()).matrix() - expect), 1e-12);
    EXPECT_LT(linalg::max_abs_entry(u.adjoint() * u - linalg::identity(8)), 1e-8);
  }
}

TEST(Embed, NoisyPathAtUnitSurvivalMatchesNoiseless) {
  auto g = rng(4);
  const auto c = testutil::random_circuit(2, 2, 3, 2, g);
  const auto x = testutil::random_point(2, g);
  EXPECT_LT(linalg::max_abs_entry(embed(c, x, NoiseSchedule(1.0, true)).matrix() -
                                  embed(c, x, NoiseSchedule::off()).matrix()),
            1e-13);
}

TEST(Embed, TrajectoryLengthAndFinalState) {
  auto g = rng(5);
  const auto c = testutil::random_circuit(2, 2, 3, 2, g);
  const auto x = testutil::random_point(2, g);
  const NoiseSchedule noise(0.9, true);
  const auto traj = embed_trajectory(c, x, noise);
  ASSERT_EQ(traj.size(), c.total_steps() + 1);
  EXPECT_EQ(c.total_steps(), 3u * 3u);
  EXPECT_LT(linalg::max_abs_entry(traj.back().matrix() - embed(c, x, noise).matrix()), 1e-13);
}

TEST(Embed, NoiseAppliedOncePerStep) {
  // With only encodes on qubit 0 of one qubit and ell = 2 empty steps, the
  // Bloch vector shrinks by p per step: p^3 after one layer.
  CircuitSpec c(1, 1, 2, {{GateSpec::named(GateKind::encode, {0}, "Z", 0)}});
  const auto rho = embed(c, {0.3}, NoiseSchedule(0.8, true)).matrix();
  EXPECT_NEAR((rho(0, 0) - rho(1, 1)).real(), std::pow(0.8, 3), 1e-14);
}

TEST(Embed, ContractionTowardMaximallyMixed) {
  auto g = rng(6);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 4;
    const auto c = testutil::random_circuit(n, 2, 3, t % 3, g);
    const double p = t % 2 ? 0.9 : 0.75;
    const auto traj = embed_trajectory(c, testutil::random_point(2, g), NoiseSchedule(p, true));
    const ComplexMatrix omega = linalg::identity(c.dim()) / static_cast<double>(c.dim());
    for (std::size_t s = 0; s < traj.size(); ++s)
      EXPECT_LE(trace_norm(traj[s].matrix() - omega), std::pow(p, static_cast<double>(s)) * std::sqrt(2.0 * n) + 1e-12);
  }
}

TEST(Embed, DataErrors) {
  CircuitSpec c(1, 1, 0, {{GateSpec::named(GateKind::encode, {0}, "Z", 0)}});
  EXPECT_THROW(embed(c, {0.1, 0.2}, NoiseSchedule::off()), ShapeError);
  EXPECT_THROW(embed(c, {NAN}, NoiseSchedule::off()), InputError);
}

TEST(Embed, ParallelMatchesSequential) {
  auto g = rng(7);
  const auto c = testutil::random_circuit(3, 2, 2, 1, g);
  std::vector<DataPoint> xs;
  for (int k = 0; k < 16; ++k) xs.push_back(testutil::random_point(2, g));
  const NoiseSchedule noise(0.9, true);
  const auto par = parallel_map(xs.size(), [&](std::size_t k) { return embed(c, xs[k], noise); });
  for (std::size_t k = 0; k < xs.size(); ++k)
    EXPECT_EQ(par[k].matrix(), embed(c, xs[k], noise).matrix());
}

TEST(Structure, Validation) {
  auto z = [](int q, int i) { return GateSpec::named(GateKind::encode, {q}, "Z", i); };
  EXPECT_THROW(CircuitSpec(1, 2, 0, {{z(0, 0)}}), StructureError);                // x_1 missing
  EXPECT_THROW(CircuitSpec(1, 1, 0, {{z(0, 0), z(0, 0)}}), StructureError);        // x_0 twice
  EXPECT_THROW(CircuitSpec(1, 1, 0, {{z(0, 1)}}), StructureError);                 // param out of range
  EXPECT_THROW(CircuitSpec(1, 1, 0, {{z(1, 0)}}), StructureError);                 // qubit out of range
  EXPECT_THROW(CircuitSpec(0, 0, 0, {}), StructureError);
  EXPECT_THROW(GateSpec::fixed({0}, diag2(1.0, 2.0)), StructureError);             // not unitary
  ComplexMatrix nh(2, 2);
  nh << 0, 1, 0, 0;
  EXPECT_THROW(GateSpec::encode({0}, nh, 0), StructureError);
  EXPECT_THROW(GateSpec::encode({0, 1}, diag2(0, 1), 0), StructureError);  // size mismatch
}

TEST(Structure, RepeatedQubitInGate) {
  EXPECT_THROW(CircuitSpec(2, 0, 1, {{GateSpec::fixed({1, 1}, linalg::identity(4))}}), StructureError);
}

TEST(Structure, StepBudget) {
  auto z = GateSpec::named(GateKind::encode, {0}, "Z", 0);
  auto x = GateSpec::named(GateKind::variational, {0}, "X", -1, 0.2);
  // A trailing variational gate needs ell >= 1; gates on both sides need ell >= 2.
  EXPECT_THROW(CircuitSpec(1, 1, 0, {{z, x}}), StructureError);
  EXPECT_NO_THROW(CircuitSpec(1, 1, 1, {{z, x}}));
  EXPECT_THROW(CircuitSpec(1, 1, 1, {{x, z, x}}), StructureError);
  CircuitSpec c(1, 1, 4, {{x, x, z, x}});
  const auto& steps = c.steps(0);
  ASSERT_EQ(steps.size(), 5u);
  int encoding = 0;
  std::size_t gates = 0;
  for (const auto& s : steps) {
    encoding += s.encoding ? 1 : 0;
    gates += s.gates.size();
  }
  EXPECT_EQ(encoding, 1);
  EXPECT_EQ(gates, 4u);
  EXPECT_TRUE(steps[2].encoding || steps[3].encoding);
}

TEST(Spread, Examples) {
  EXPECT_DOUBLE_EQ(spectral_spread(gates::pauli('Z')), 2.0);
  EXPECT_NEAR(spectral_spread(linalg::identity(2)), 0.0, 1e-15);
  EXPECT_NEAR(spectral_spread(diag2(0.0, 3.0)), 3.0, 1e-15);
  ComplexMatrix nh(2, 2);
  nh << 0, 1, 0, 0;
  EXPECT_THROW(spectral_spread(nh), StructureError);
}

TEST(Spread, CircuitSpread) {
  CircuitSpec zs(2, 2, 0, {{GateSpec::named(GateKind::encode, {0}, "Z", 0), GateSpec::named(GateKind::encode, {1}, "Z", 1)}});
  EXPECT_NEAR(circuit_spread(zs), 2.0, 1e-14);
  CircuitSpec mixed(2, 2, 0, {{GateSpec::named(GateKind::encode, {0}, "Z", 0), GateSpec::encode({1}, diag2(0, 1), 1)}});
  EXPECT_NEAR(circuit_spread(mixed), 2.0, 1e-14);
  CircuitSpec half(1, 1, 1,
                   {{GateSpec::encode({0}, diag2(-0.5, 0.5), 0),
                     GateSpec::variational({0}, 5.0 * gates::pauli('X'), 0.1)}});
  EXPECT_NEAR(circuit_spread(half), 1.0, 1e-14);  // variational generator excluded
  CircuitSpec none(1, 0, 1, {{GateSpec::named(GateKind::fixed, {0}, "H")}});
  EXPECT_THROW(circuit_spread(none), UndefinedError);
}

TEST(Unitary, Examples) {
  CircuitSpec empty(2, 0, 0, {});
  EXPECT_LT(linalg::max_abs_entry(unitary_of(empty, {}) - linalg::identity(4)), 1e-15);

  CircuitSpec h(1, 0, 1, {{GateSpec::named(GateKind::fixed, {0}, "H")}});
  EXPECT_LT(linalg::max_abs_entry(unitary_of(h, {}) - *gates::named_unitary("H")), 1e-15);

  const double a = 0.37, b = -1.1;
  const auto c = build_saturation_circuit(2);
  const ComplexMatrix u = unitary_of(c, {a, b});
  // (cos a I - i sin a Z) (x) (cos b I - i sin b Z), qubit 0 most significant.
  const Complex d[4] = {std::exp(-kI * (a + b)), std::exp(-kI * (a - b)), std::exp(-kI * (-a + b)),
                        std::exp(kI * (a + b))};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(u(k, k) - d[k]), 0.0, 1e-14);
  EXPECT_NEAR(linalg::max_abs_entry(u - ComplexMatrix(u.diagonal().asDiagonal())), 0.0, 1e-15);
}

TEST(Unitary, QubitOrderingOfTwoQubitGates) {
  // CNOT with control 0 acting on |10> gives |11>.
  CircuitSpec c(2, 0, 1, {{GateSpec::named(GateKind::fixed, {0, 1}, "CNOT")}}, DensityMatrix::basis(4, 2));
  EXPECT_NEAR(embed(c, {}, NoiseSchedule::off()).matrix()(3, 3).real(), 1.0, 1e-15);
  CircuitSpec r(2, 0, 1, {{GateSpec::named(GateKind::fixed, {1, 0}, "CNOT")}}, DensityMatrix::basis(4, 1));
  EXPECT_NEAR(embed(r, {}, NoiseSchedule::off()).matrix()(3, 3).real(), 1.0, 1e-15);
}

TEST(Saturation, Construction) {
  const auto one = build_saturation_circuit(1);
  EXPECT_EQ(one.d(), 1);
  EXPECT_EQ(one.layers().front().size(), 1u);
  const auto three = build_saturation_circuit(3);
  EXPECT_EQ(three.d(), 3);
  EXPECT_EQ(three.num_layers(), 1u);
  EXPECT_EQ(three.layers().front().size(), 3u);
  EXPECT_DOUBLE_EQ(circuit_spread(three), 2.0);
}

TEST(Saturation, OperatorNormEqualsL1Distance) {
  for (int n : {1, 2, 4}) {
    const auto c = build_saturation_circuit(n);
    DataPoint dtheta(static_cast<std::size_t>(n), 1e-4 / n);
    const DataPoint zero(static_cast<std::size_t>(n), 0.0);
    const double dist = linalg::operator_norm(unitary_of(c, zero) - unitary_of(c, dtheta));
    EXPECT_NEAR(dist / 1e-4, 1.0, 1e-3);
  }
}

TEST(Continuity, OperatorNormBoundWithCenteredGenerators) {
  auto g = rng(8);
  for (int t = 0; t < 40; ++t) {
    const auto c = testutil::random_circuit(1 + t % 3, 3, 1 + t % 4, t % 3, g);
    const auto x = testutil::random_point(3, g), xp = testutil::random_point(3, g);
    const double lhs =
        linalg::operator_norm(unitary_of(c, x, GeneratorPhase::centered) - unitary_of(c, xp, GeneratorPhase::centered));
    EXPECT_LE(lhs, encoding_operator_bound(c, x, xp) + 1e-12);
  }
}

TEST(Continuity, StateDistanceBound) {
  auto g = rng(9);
  for (int t = 0; t < 40; ++t) {
    const int d = 1 + t % 3;
    const auto c = testutil::random_circuit(1 + t % 3, d, 1 + t % 4, t % 3, g);
    const auto x = testutil::random_point(d, g), xp = testutil::random_point(d, g, 0.2);
    double l1 = 0.0;
    for (int i = 0; i < d; ++i) l1 += std::abs(x[i] - xp[i]);
    const double lhs = trace_norm(embed(c, x, NoiseSchedule::off()).matrix() - embed(c, xp, NoiseSchedule::off()).matrix());
    EXPECT_LE(lhs, static_cast<double>(c.num_layers()) * circuit_spread(c) * l1 + 1e-12);
  }
}
