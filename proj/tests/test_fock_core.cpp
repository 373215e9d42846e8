#include "ppqnd/fock_core.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ppqnd;

namespace {

CMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  CMatrix h = 0.5 * (m + m.adjoint());
  return scale * h / h.cwiseAbs().maxCoeff();
}

StateVector random_state(std::mt19937_64& rng, const HilbertSpace& sp) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(Eigen::Index(sp.total_dim()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return StateVector(sp, v).normalized();
}

}  // namespace

TEST(HilbertSpace, TotalDimensions) {
  EXPECT_EQ(make_space(1, {1}).total_dim(), 1u);
  EXPECT_EQ(make_space(5, {2, 2, 2}).total_dim(), 40u);
  EXPECT_EQ(make_space(4, {2, 8}).total_dim(), 64u);
}

TEST(HilbertSpace, RejectsNonPositiveSizes) {
  EXPECT_THROW(make_space(0, {2}), std::invalid_argument);
  EXPECT_THROW(make_space(-3, {2}), std::invalid_argument);
  EXPECT_THROW(make_space(2, {2, 0}), std::invalid_argument);
  EXPECT_THROW(make_space(2, {-1}), std::invalid_argument);
}

TEST(HilbertSpace, IndexRoundTripOnRandomShapes) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> atom(1, 5), modes(0, 3), cut(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> cuts(std::size_t(modes(rng)));
    for (auto& c : cuts) c = std::size_t(cut(rng));
    const HilbertSpace sp(std::size_t(atom(rng)), cuts);
    for (std::size_t i = 0; i < sp.total_dim(); ++i) {
      const BasisLabel l = sp.label(i);
      ASSERT_EQ(sp.index(l), i);
      ASSERT_EQ(sp.atom_level(i), l.atom);
      for (std::size_t m = 0; m < cuts.size(); ++m) ASSERT_EQ(sp.photons(i, m), l.photons[m]);
    }
  }
}

TEST(HilbertSpace, RowMajorAtomSlowest) {
  const HilbertSpace sp(3, {2, 4});
  EXPECT_EQ(sp.index({0, {0, 1}}), 1u);
  EXPECT_EQ(sp.index({0, {1, 0}}), 4u);
  EXPECT_EQ(sp.index({1, {0, 0}}), 8u);
}

TEST(Annihilation, MatrixElements) {
  const auto sp2 = single_mode_space(2);
  const Operator a2 = annihilation_op(sp2, 0);
  EXPECT_EQ(a2.apply(fock_state(2, 1)).amplitudes(), fock_state(2, 0).amplitudes());
  EXPECT_EQ(a2.apply(fock_state(2, 0)).norm(), 0.0);

  const Operator a4 = annihilation_op(single_mode_space(4), 0);
  const StateVector out = a4.apply(fock_state(4, 3));
  EXPECT_DOUBLE_EQ(out[2].real(), std::sqrt(3.0));
  EXPECT_EQ(out.norm(), std::sqrt(3.0));
}

TEST(Annihilation, NumberIdentityAndCommutator) {
  const HilbertSpace sp(2, {3, 5});
  for (std::size_t mode = 0; mode < 2; ++mode) {
    const Operator a = annihilation_op(sp, mode);
    const CMatrix n = (creation_op(sp, mode) * a).matrix();
    EXPECT_LE((n - number_op(sp, mode).matrix()).cwiseAbs().maxCoeff(), 1e-14);
    const CMatrix comm = (a * creation_op(sp, mode) - creation_op(sp, mode) * a).matrix();
    for (std::size_t i = 0; i < sp.total_dim(); ++i) {
      if (sp.photons(i, mode) + 1 >= sp.cutoff(mode)) continue;
      for (std::size_t j = 0; j < sp.total_dim(); ++j)
        ASSERT_NEAR(std::abs(comm(Eigen::Index(i), Eigen::Index(j)) - (i == j ? 1.0 : 0.0)), 0.0, 1e-14);
    }
  }
  EXPECT_THROW(annihilation_op(sp, 2), std::out_of_range);
}

TEST(NumberOp, Expectations) {
  EXPECT_EQ(number_op(single_mode_space(3), 0).expectation(fock_state(3, 0)).real(), 0.0);
  const CoherentState c = coherent_state(40, 2.0);
  EXPECT_NEAR(number_op(c.state.space(), 0).expectation(c.state).real(), 4.0, 1e-9);

  const HilbertSpace sp(1, {2, 2});
  const StateVector left = StateVector::basis(sp, {0, {1, 0}});
  const Operator total = number_op(sp, 0) + number_op(sp, 1);
  EXPECT_EQ((total.apply(left).amplitudes() - left.amplitudes()).norm(), 0.0);
}

TEST(AtomTransition, ProjectorAdjointCompleteness) {
  const HilbertSpace sp(4, {3});
  const Operator p = atom_transition_op(sp, 2, 2);
  EXPECT_EQ(((p * p).matrix() - p.matrix()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((atom_transition_op(sp, 0, 1).adjoint().matrix() - atom_transition_op(sp, 1, 0).matrix())
                .cwiseAbs()
                .maxCoeff(),
            0.0);
  CMatrix sum = CMatrix::Zero(12, 12);
  for (std::size_t i = 0; i < 4; ++i) sum += atom_transition_op(sp, i, i).matrix();
  EXPECT_EQ((sum - CMatrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(atom_transition_op(sp, 4, 0), std::out_of_range);
}

TEST(Coherent, VacuumTailAndMean) {
  const CoherentState vac = coherent_state(5, 0.0);
  EXPECT_EQ(vac.state[0], cplx(1.0));
  EXPECT_EQ(vac.truncation_loss, 0.0);

  const CoherentState c2 = coherent_state(40, 2.0);
  EXPECT_LT(c2.truncation_loss, 1e-12);
  EXPECT_NEAR(c2.truncation_loss, oracle::coherent2_tail_cutoff40, 1e-15);
  EXPECT_NEAR(c2.state.norm(), 1.0, 1e-15);
  EXPECT_FALSE(c2.truncation_warning());

  const CoherentState c = coherent_state(40, cplx(1, 1));
  const cplx mean = annihilation_op(c.state.space(), 0).expectation(c.state);
  EXPECT_NEAR(std::abs(mean - cplx(1, 1)), 0.0, 1e-9);

  EXPECT_TRUE(coherent_state(5, 3.0).truncation_warning());
}

TEST(Coherent, DefaultCutoffKeepsLossSmall) {
  for (double a : {0.5, 1.0, 2.0, 3.0, 5.0}) {
    const CoherentState c = coherent_state(default_cutoff(a), a);
    EXPECT_LT(c.truncation_loss, 1e-9) << a;
  }
}

TEST(TensorState, BasisNormOrthogonality) {
  const HilbertSpace sp(1, {3, 3});
  const StateVector v = tensor_state(sp, 0, {fock_state(3, 0), fock_state(3, 0)});
  EXPECT_EQ(v[0], cplx(1.0));
  const StateVector w = tensor_state(sp, 0, {coherent_state(3, 0.3).state, coherent_state(3, cplx(0, 0.5)).state});
  EXPECT_NEAR(w.norm(), 1.0, 1e-14);
  const StateVector x = tensor_state(sp, 0, {fock_state(3, 1), fock_state(3, 2)});
  EXPECT_EQ(std::abs(v.inner(x)), 0.0);
  EXPECT_THROW(tensor_state(sp, 0, {fock_state(3, 1)}), std::invalid_argument);
  EXPECT_THROW(tensor_state(sp, 0, {fock_state(3, 1), fock_state(4, 1)}), std::invalid_argument);
}

TEST(HermitianEig, SimpleCases) {
  const auto sp = single_mode_space(2);
  const Eigensystem id = hermitian_eig(Operator::identity(sp));
  EXPECT_EQ(id.values(0), 1.0);
  EXPECT_EQ(id.values(1), 1.0);
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const Eigensystem e = hermitian_eig(Operator(sp, x, true));
  EXPECT_NEAR(e.values(0), -1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
  EXPECT_THROW(hermitian_eig(Operator(sp, x)), std::invalid_argument);
  CMatrix y = x;
  y(0, 1) = 2.0;
  EXPECT_THROW(Operator(sp, y, true), std::invalid_argument);
}

TEST(HermitianEig, RandomResidualsUpToDim200) {
  std::mt19937_64 rng(11);
  for (Eigen::Index n : {5, 40, 200}) {
    const HilbertSpace sp(1, {std::size_t(n)});
    const Operator h(sp, random_hermitian(rng, n, 100.0), true);
    const Eigensystem e = hermitian_eig(h);
    const double norm = h.matrix().norm();
    for (Eigen::Index k = 0; k < n; ++k)
      ASSERT_LE((h.matrix() * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).norm(), 1e-9 * norm);
    EXPECT_LE((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((e.vectors * e.values.asDiagonal() * e.vectors.adjoint() - h.matrix()).cwiseAbs().maxCoeff(),
              1e-9 * norm);
    for (Eigen::Index k = 1; k < n; ++k) ASSERT_LE(e.values(k - 1), e.values(k));
  }
}

TEST(Evolve, IdentityEigenphaseAndGroupProperty) {
  std::mt19937_64 rng(3);
  const HilbertSpace sp(2, {4});
  const Operator h(sp, random_hermitian(rng, 8, 1e3), true);
  const StateVector psi = random_state(rng, sp);
  EXPECT_LE((evolve(h, psi, 0.0).amplitudes() - psi.amplitudes()).norm(), 1e-12);

  for (double t : {1e-3, 1.0, 1e3}) EXPECT_NEAR(evolve(h, psi, t).norm(), 1.0, 1e-10);

  const StateVector a = evolve(h, psi, 0.7 + 1.9);
  const StateVector b = evolve(h, evolve(h, psi, 0.7), 1.9);
  EXPECT_LE((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff(), 1e-10);

  CVector d(3);
  d << 0.5, -2.0, 3.0;
  const Operator hd(single_mode_space(3), d.asDiagonal().toDenseMatrix(), true);
  const StateVector e1 = evolve(hd, fock_state(3, 1), 0.3);
  EXPECT_NEAR(std::abs(e1[1] - std::polar(1.0, 0.6)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e1[0]) + std::abs(e1[2]), 0.0, 1e-14);

  EXPECT_THROW(evolve(h, fock_state(3, 0), 1.0), std::invalid_argument);
}

TEST(PartialTrace, ProductEntangledAndTrace) {
  const HilbertSpace sp(1, {2, 3});
  const StateVector prod = tensor_state(sp, 0, {coherent_state(2, 0.4).state, coherent_state(3, 0.7).state});
  const DensityMatrix r = partial_trace(prod, KeepSelector{false, {0}});
  EXPECT_NEAR(r.purity(), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(coherent_state(2, 0.4).state, r), 1.0, 1e-12);

  CVector bell = CVector::Zero(6);
  bell(Eigen::Index(sp.index({0, {0, 0}}))) = 1.0 / std::sqrt(2.0);
  bell(Eigen::Index(sp.index({0, {1, 1}}))) = 1.0 / std::sqrt(2.0);
  const DensityMatrix m = partial_trace(StateVector(sp, bell), KeepSelector{false, {0}});
  EXPECT_NEAR((m.matrix() - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-15);

  EXPECT_THROW(partial_trace(prod, KeepSelector{}), std::invalid_argument);
}

TEST(PartialTrace, RandomStatesStayPhysical) {
  std::mt19937_64 rng(5);
  const HilbertSpace sp(3, {2, 3});
  for (int k = 0; k < 20; ++k) {
    const StateVector psi = random_state(rng, sp);
    for (const KeepSelector& keep : {KeepSelector{true, {}}, KeepSelector{false, {1}}, KeepSelector{true, {0}},
                                     KeepSelector{false, {0, 1}}}) {
      const DensityMatrix r = partial_trace(psi, keep);
      EXPECT_NEAR(std::abs(r.matrix().trace() - 1.0), 0.0, 1e-12);
      EXPECT_LE(hermitian_deviation(r.matrix()), 1e-12);
      const Eigen::SelfAdjointEigenSolver<CMatrix> es(r.matrix());
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
  }
}

TEST(PartialTrace, KeepAtomSeesAtomicPopulations) {
  const HilbertSpace sp(2, {2});
  CVector v = CVector::Zero(4);
  v(Eigen::Index(sp.index({0, {1}}))) = std::sqrt(0.25);
  v(Eigen::Index(sp.index({1, {0}}))) = std::sqrt(0.75);
  const DensityMatrix r = partial_trace(StateVector(sp, v), KeepSelector{true, {}});
  EXPECT_NEAR(r.matrix()(0, 0).real(), 0.25, 1e-15);
  EXPECT_NEAR(r.matrix()(1, 1).real(), 0.75, 1e-15);
  EXPECT_NEAR(std::abs(r.matrix()(0, 1)), 0.0, 1e-15);
}

TEST(DensityMatrixValidation, Rejections) {
  const auto sp = single_mode_space(2);
  CMatrix m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityMatrix(sp, m), std::invalid_argument);
  m << 0.6, 0, 0, 0.6;
  EXPECT_THROW(DensityMatrix(sp, m), std::invalid_argument);
  m << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityMatrix(sp, m), std::invalid_argument);
}

TEST(Fidelity, PurePureMixedAndPhase) {
  const auto sp = single_mode_space(3);
  const StateVector a = coherent_state(3, 0.3).state;
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-15);
  EXPECT_EQ(fidelity(fock_state(3, 0), fock_state(3, 2)), 0.0);
  const StateVector phased(sp, std::polar(1.0, 1.234) * a.amplitudes());
  EXPECT_NEAR(fidelity(a, phased), 1.0, 1e-15);

  const DensityMatrix mixed(sp, CMatrix::Identity(3, 3) / 3.0);
  EXPECT_NEAR(fidelity(fock_state(3, 1), mixed), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(fidelity(DensityMatrix::pure(a), DensityMatrix::pure(phased)), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(DensityMatrix::pure(a), mixed), 1.0 / 3.0, 1e-12);
  EXPECT_THROW(fidelity(a, fock_state(4, 0)), std::invalid_argument);
}
