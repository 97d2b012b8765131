#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace shotbound;
using testutil::rng;

namespace {

ComplexVector ket(std::initializer_list<Complex> v) {
  ComplexVector k(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto c : v) k(i++) = c;
  return k;
}

const double kR = 1.0 / std::sqrt(2.0);

}  // namespace

TEST(TraceNorm, ZeroAndSelfDifference) {
  EXPECT_DOUBLE_EQ(trace_norm(ComplexMatrix::Zero(3, 3)), 0.0);
  auto g = rng(1);
  const auto rho = testutil::random_state(4, g);
  EXPECT_NEAR(trace_norm(rho.matrix() - rho.matrix()), 0.0, 1e-15);
}

TEST(TraceNorm, ZeroMinusPlus) {
  const auto zero = DensityMatrix::basis(2, 0);
  const auto plus = DensityMatrix::pure(ket({kR, kR}));
  const ComplexMatrix diff = zero.matrix() - plus.matrix();
  // [[1/2, -1/2], [-1/2, -1/2]] has eigenvalues +-1/sqrt(2).
  EXPECT_NEAR(trace_norm(diff), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(testutil::trace_norm_2x2(diff), std::sqrt(2.0), 1e-12);
}

TEST(TraceNorm, NonSquareThrows) {
  EXPECT_THROW(trace_norm(ComplexMatrix::Zero(2, 3)), ShapeError);
}

TEST(TraceNorm, NonHermitianUsesSingularValues) {
  ComplexMatrix a(2, 2);
  a << 0, 1, 0, 0;
  EXPECT_NEAR(trace_norm(a), 1.0, 1e-14);
}

TEST(TraceNorm, NormAxioms) {
  auto g = rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto a = testutil::ginibre(3, 3, g), b = testutil::ginibre(3, 3, g);
    const Complex c(0.7, -1.3);
    EXPECT_GE(trace_norm(a), 0.0);
    EXPECT_NEAR(trace_norm(c * a), std::abs(c) * trace_norm(a), 1e-10);
    EXPECT_LE(trace_norm(a + b), trace_norm(a) + trace_norm(b) + 1e-10);
  }
}

TEST(TraceNorm, StateDifferenceWithinTwo) {
  auto g = rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto r = testutil::random_state(4, g), s = testutil::random_pure(4, g);
    const double d = trace_norm(r.matrix() - s.matrix());
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0 + 1e-12);
  }
}

TEST(Helstrom, IdenticalStates) {
  auto g = rng(4);
  const auto r = testutil::random_state(2, g);
  EXPECT_NEAR(helstrom_error(0.7, r, r), 0.3, 1e-12);
}

TEST(Helstrom, OrthogonalStates) {
  EXPECT_NEAR(helstrom_error(0.5, DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)), 0.0, 1e-15);
}

TEST(Helstrom, ZeroVersusPlusMatchesProjectiveGrid) {
  const auto zero = DensityMatrix::basis(2, 0);
  const auto plus = DensityMatrix::pure(ket({kR, kR}));
  const double value = helstrom_error(0.5, zero, plus);
  EXPECT_NEAR(value, 0.5 - std::sqrt(2.0) / 4.0, 1e-12);
  // Real projective measurements suffice for real states: scan the angle.
  double best = 1.0;
  for (int k = 0; k <= 200000; ++k) {
    const double th = M_PI * k / 200000.0;
    const double c = std::cos(th), s = std::sin(th);
    // Pi_0 = |v><v|, v = (c, s): error = 1/2 (1 - <v|0>^2 + <v|+>^2)
    const double p00 = c * c;
    const double pp = 0.5 * (c + s) * (c + s);
    best = std::min(best, 0.5 * (1.0 - p00) + 0.5 * pp);
  }
  EXPECT_NEAR(value, best, 1e-9);
}

TEST(Helstrom, SymmetryAndRange) {
  auto g = rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const auto r = testutil::random_state(3, g), s = testutil::random_state(3, g);
    const double p = u(g);
    const double e = helstrom_error(p, r, s);
    EXPECT_NEAR(e, helstrom_error(1.0 - p, s, r), 1e-12);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, std::min(p, 1.0 - p) + 1e-15);
  }
}

TEST(Helstrom, Errors) {
  EXPECT_THROW(helstrom_error(0.5, DensityMatrix::basis(2, 0), DensityMatrix::basis(4, 0)), ShapeError);
  EXPECT_THROW(helstrom_error(1.5, DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 0)), InputError);
}

TEST(Depolarize, IdentityAndFull) {
  auto g = rng(6);
  const auto r = testutil::random_state(8, g);
  EXPECT_LT(linalg::max_abs_entry(depolarize_local(r, 1.0, 3).matrix() - r.matrix()), 1e-15);
  EXPECT_LT(linalg::max_abs_entry(depolarize_local(r, 0.0, 3).matrix() - linalg::identity(8) / 8.0), 1e-15);
}

TEST(Depolarize, SingleQubitExample) {
  const auto out = depolarize_local(DensityMatrix::basis(2, 0), 0.9, 1);
  EXPECT_NEAR(out.matrix()(0, 0).real(), 0.95, 1e-15);
  EXPECT_NEAR(out.matrix()(1, 1).real(), 0.05, 1e-15);
  EXPECT_NEAR(std::abs(out.matrix()(0, 1)), 0.0, 1e-15);
}

TEST(Depolarize, MatchesTensorProductChannel) {
  // Oracle: the n-qubit channel as a sum over subsets of qubits that are
  // replaced by I/2, weighted p^{n-|S|} (1-p)^{|S|}.
  auto g = rng(7);
  const int n = 3;
  const auto r = testutil::random_state(8, g);
  const double p = 0.8;
  ComplexMatrix expect = ComplexMatrix::Zero(8, 8);
  for (int mask = 0; mask < (1 << n); ++mask) {
    ComplexMatrix m = r.matrix();
    for (int q = 0; q < n; ++q) {
      if (!(mask & (1 << q))) continue;
      // Replace qubit q by I/2: partial trace over q then tensor I/2 back.
      const int bit = 1 << (n - 1 - q);
      ComplexMatrix t = ComplexMatrix::Zero(8, 8);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          if ((i & bit) != (j & bit)) continue;
          const Complex v = 0.5 * (m(i & ~bit, j & ~bit) + m(i | bit, j | bit));
          t(i, j) = v;
        }
      m = t;
    }
    const int k = __builtin_popcount(static_cast<unsigned>(mask));
    expect += std::pow(p, n - k) * std::pow(1 - p, k) * m;
  }
  EXPECT_LT(linalg::max_abs_entry(depolarize_local(r, p, n).matrix() - expect), 1e-14);
}

TEST(Depolarize, ValidOutputAndContraction) {
  auto g = rng(8);
  for (int t = 0; t < 30; ++t) {
    const auto r = testutil::random_state(4, g), s = testutil::random_pure(4, g);
    const auto dr = depolarize_local(r, 0.7, 2), ds = depolarize_local(s, 0.7, 2);
    EXPECT_TRUE(validate(dr).ok()) << validate(dr).summary();
    EXPECT_LE(trace_norm(dr.matrix() - ds.matrix()), trace_norm(r.matrix() - s.matrix()) + 1e-12);
  }
}

TEST(Depolarize, NonPowerOfTwoThrows) {
  EXPECT_THROW(depolarize_local(DensityMatrix::maximally_mixed(3), 0.5, 2), StructureError);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(relative_entropy_to_mixed(DensityMatrix::maximally_mixed(4)), 0.0, 1e-12);
  auto g = rng(9);
  EXPECT_NEAR(relative_entropy_to_mixed(testutil::random_pure(8, g)), 3.0, 1e-9);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  const double h = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  EXPECT_NEAR(relative_entropy_to_mixed(DensityMatrix(d)), 1.0 - h, 1e-12);
  EXPECT_NEAR(1.0 - h, 0.188722, 1e-6);
}

TEST(Entropy, BoundedByQubitCount) {
  auto g = rng(10);
  for (int t = 0; t < 20; ++t) {
    const double d = relative_entropy_to_mixed(testutil::random_state(8, g));
    EXPECT_GE(d, -1e-12);
    EXPECT_LE(d, 3.0 + 1e-12);
  }
}

TEST(Validate, Reports) {
  auto g = rng(11);
  EXPECT_TRUE(validate(testutil::random_state(2, g)).ok());

  std::vector<ComplexMatrix> bad{linalg::identity(2) * 0.5, linalg::identity(2) * 0.4};
  const auto rep = validate_povm(bad);
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.find("completeness")->passed);
  EXPECT_NEAR(rep.find("completeness")->violation, 0.1, 1e-12);

  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0 + 1e-4;
  m(1, 1) = -1e-4;
  const auto dr = validate_density(m);
  EXPECT_FALSE(dr.find("positive")->passed);
  EXPECT_NEAR(dr.find("positive")->violation, 1e-4, 1e-12);
  EXPECT_TRUE(dr.find("unit_trace")->passed);
  EXPECT_THROW(DensityMatrix{m}, StructureError);
}

TEST(Ensemble, Invariants) {
  EXPECT_THROW(Ensemble({DensityMatrix::basis(2, 0), DensityMatrix::basis(4, 0)}), ShapeError);
  EXPECT_THROW(Ensemble({DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)}, std::vector<double>{0.5, 0.6}),
               InputError);
  Ensemble e({DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)});
  EXPECT_FALSE(e.has_priors());
  EXPECT_THROW(e.priors(), InputError);
}

TEST(Sdp, HermitianBasisIsOrthonormal) {
  const auto b = sdp::hermitian_basis(3);
  ASSERT_EQ(b.size(), 9u);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      EXPECT_NEAR(linalg::real_inner(b[i], b[j]), i == j ? 1.0 : 0.0, 1e-14);
}

TEST(Sdp, MaxEigenvalueProblem) {
  // min <-A, X> s.t. Tr X = 1, X >= 0 has value -lambda_max(A).
  auto g = rng(12);
  const auto a = testutil::random_hermitian(4, g);
  sdp::Problem p;
  p.block_sizes = {4};
  p.objective = {-a};
  sdp::Constraint c;
  c.terms.emplace_back(0, linalg::identity(4));
  c.rhs = 1.0;
  p.constraints.push_back(c);
  const auto sol = sdp::solve(p);
  EXPECT_LT(sol.iterations, 60);
  EXPECT_TRUE(sol.converged);
  const double lmax = linalg::hermitian_eigenvalues(a).maxCoeff();
  EXPECT_NEAR(sol.primal_objective, -lmax, 1e-8);
  EXPECT_NEAR(sol.dual_objective, -lmax, 1e-8);
}
