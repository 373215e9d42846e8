#include "ppqnd/qnd_sim.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace ppqnd;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Wrap, Interval) {
  EXPECT_DOUBLE_EQ(wrap_phase(pi), pi);
  EXPECT_DOUBLE_EQ(wrap_phase(-pi), pi);
  EXPECT_NEAR(wrap_phase(3 * pi + 0.1), -pi + 0.1, 1e-14);
  EXPECT_DOUBLE_EQ(wrap_phase(0.3), 0.3);
}

TEST(EvolveQnd, NoSignalLeavesProbe) {
  const QndEvolution r = evolve_qnd(0, 2.0, 0.3, 1.0);
  EXPECT_NEAR(r.readout.phase_shift, 0.0, 1e-12);
  EXPECT_GE(r.fidelity_minus, 1 - 1e-12);
  EXPECT_EQ(r.readout.inferred_n_s, 0u);
}

TEST(EvolveQnd, HalfTurnFlipsAmplitude) {
  const QndEvolution r = evolve_qnd(1, 1.5, 1.0, pi);
  const DensityMatrix probe = partial_trace(r.joint, KeepSelector{false, {1}});
  EXPECT_GE(fidelity(coherent_state(probe.space().cutoff(0), -1.5).state, probe), 1 - 1e-12);
}

TEST(EvolveQnd, TwoPhotonsRotateByTwiceChiT) {
  const QndEvolution r = evolve_qnd(2, 3.0, 0.1, 1.0);
  EXPECT_NEAR(r.readout.phase_shift, -0.2, 1e-9);
  EXPECT_EQ(r.matching_sign, -1);
  EXPECT_GE(r.fidelity_minus, 1 - 1e-9);
  EXPECT_LT(r.fidelity_plus, 0.9);
  EXPECT_LE(r.schmidt_second, 1e-10);
  EXPECT_LE(r.signal_distribution_change, 1e-12);
  EXPECT_TRUE(r.readout.inferred);
  EXPECT_EQ(r.readout.inferred_n_s, 2u);
}

TEST(EvolveQnd, GridUpToAlpha5) {
  for (double a : {0.5, 2.0, 5.0})
    for (std::size_t n : {0u, 1u, 3u})
      for (double chit : {-pi, -1.0, 0.2, pi}) {
        const QndEvolution r = evolve_qnd(n, std::polar(a, 0.4), chit, 1.0);
        EXPECT_GE(std::max(r.fidelity_minus, r.fidelity_plus), 1 - 1e-9);
        EXPECT_LE(r.schmidt_second, 1e-10);
        EXPECT_LE(r.signal_distribution_change, 1e-12);
      }
}

TEST(Homodyne, CoherentQuadratures) {
  const CoherentState c = coherent_state(40, 2.0);
  const ProbeReadout r = homodyne_estimate(c.state, 0.0);
  EXPECT_NEAR(r.quadrature_mean, 2.0, 1e-9);
  EXPECT_NEAR(r.quadrature_variance, 0.25, 1e-9);
  EXPECT_FALSE(r.inferred);
  const ProbeReadout p = homodyne_estimate(coherent_state(40, std::polar(2.0, 0.3)).state, 0.0);
  EXPECT_NEAR(p.phase_shift, 0.3, 1e-9);
  const ProbeReadout f = homodyne_estimate(fock_state(4, 1), 0.0, 0.1);
  EXPECT_FALSE(f.phase_defined);
  EXPECT_FALSE(f.inferred);
}

TEST(Homodyne, InferenceClampsAtZero) {
  const ProbeReadout r = homodyne_estimate(coherent_state(40, std::polar(2.0, 0.25)).state, 0.0, -0.1);
  EXPECT_TRUE(r.inferred);
  EXPECT_EQ(r.inferred_n_s, 0u);
}

TEST(Discrimination, LimitsAndOracle) {
  const DiscriminationResult z = discrimination_error(0.0, 0.3, 4000, 1);
  EXPECT_EQ(z.analytic, 0.5);
  EXPECT_NEAR(z.monte_carlo, 0.5, 4 * z.standard_error);
  const DiscriminationResult big = discrimination_error(100.0, 0.5, 2000, 1);
  EXPECT_LT(big.analytic, 1e-12);
  EXPECT_EQ(big.monte_carlo, 0.0);
  const DiscriminationResult m = discrimination_error(4.0, 0.25, 200000, 42);
  EXPECT_NEAR(m.analytic, oracle::discrimination_a4_t025, 1e-15);
  EXPECT_LE(std::abs(m.monte_carlo - m.analytic), 3 * m.standard_error);
  EXPECT_THROW(discrimination_error(1.0, 0.1, 0, 1), std::invalid_argument);
}

TEST(Discrimination, DeterministicAndMonotone) {
  const DiscriminationResult a = discrimination_error(2.0, 0.4, 5000, 77);
  const DiscriminationResult b = discrimination_error(2.0, 0.4, 5000, 77);
  EXPECT_EQ(a.monte_carlo, b.monte_carlo);
  double prev = 1.0;
  double prev_se = 0.0;
  for (double alpha : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const DiscriminationResult r = discrimination_error(alpha, 0.4, 20000, 5);
    EXPECT_LT(r.analytic, prev);
    EXPECT_LE(r.monte_carlo, prev + 3 * (r.standard_error + prev_se));
    prev = r.analytic;
    prev_se = r.standard_error;
  }
}

TEST(Backaction, CoherentProducts) {
  for (double a : {1.0, 2.0, 5.0}) {
    const BackactionReport r = backaction_product(a);
    EXPECT_NEAR(r.number_variance, a * a, 1e-6);
    EXPECT_NEAR(r.product, 0.25, 1e-6);
    EXPECT_NEAR(r.independent_product, 0.25, 1e-6);
    EXPECT_FALSE(r.degenerate);
  }
  const BackactionReport r = backaction_product(2.0);
  EXPECT_NEAR(r.phase_variance, 1.0 / 16, 1e-8);
  EXPECT_TRUE(backaction_product(0.0).degenerate);
}

TEST(Dephasing, PolarizationPreservingKeepsQubit) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> chit(0, 10 * pi);
  for (int k = 0; k < 30; ++k) {
    const PolarizationQubit q = random_qubit(rng);
    const DephasingResult r = polarization_dephasing(q, 2.0, chit(rng), 1.0);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-10);
    EXPECT_NEAR(r.purity, 1.0, 1e-10);
  }
}

TEST(Dephasing, SensitiveControlFollowsEnvelope) {
  const double s = 1 / std::sqrt(2.0);
  const PolarizationQubit plus(s, s);
  const DephasingResult r = polarization_dephasing(plus, 2.0, 1.0, 1.0, true);
  EXPECT_NEAR(r.coherence, r.analytic_envelope, 1e-9);
  EXPECT_LT(r.fidelity, 0.6);
  const DephasingResult full = polarization_dephasing(plus, 2.0, 2 * pi, 1.0, true);
  EXPECT_NEAR(full.fidelity, 1.0, 1e-9);
}

TEST(Dephasing, InvariantUnderQubitRotation) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 10; ++k) {
    const PolarizationQubit q = random_qubit(rng);
    const PolUnitary u = random_pol_unitary(rng);
    const double a = polarization_dephasing(q, 1.5, 0.7, 1.0).fidelity;
    const double b = polarization_dephasing(rotate(q, u), 1.5, 0.7, 1.0).fidelity;
    EXPECT_NEAR(a, b, 1e-10);
  }
}

TEST(FullModel, NoSignalCouplingNoPhase) {
  SchemeParams p = hierarchy_params(10);
  p.xi_s = 0.0;
  const FullVsEffective r = full_vs_effective(p, PolarizationQubit::left(), FockProbe{1}, 1e6);
  EXPECT_NEAR(r.measured_phase, 0.0, 1e-12);
  EXPECT_NEAR(r.leakage, 0.0, 1e-15);
}

TEST(FullModel, AgainstHighPrecisionOracleAtRatio10) {
  const SchemeParams p = hierarchy_params(10);
  const double t = 0.1 / std::abs(chi_from_params(p));
  const FullVsEffective l = full_vs_effective(p, PolarizationQubit::left(), FockProbe{1}, t);
  EXPECT_NEAR(l.measured_phase, oracle::full_ratio10_phase_left, 1e-9);
  EXPECT_NEAR(l.leakage, oracle::full_ratio10_leak_left, 1e-9);
  EXPECT_NEAR(l.predicted_phase, 0.1, 1e-12);
  const double s = 1 / std::sqrt(2.0);
  const FullVsEffective h = full_vs_effective(p, PolarizationQubit(s, s), FockProbe{1}, t);
  EXPECT_NEAR(h.measured_phase, oracle::full_ratio10_phase_h, 1e-9);
  EXPECT_NEAR(h.leakage, oracle::full_ratio10_leak_h, 1e-9);
  const FullVsEffective r = full_vs_effective(p, PolarizationQubit::right(), FockProbe{1}, t);
  EXPECT_NEAR(r.measured_phase, l.measured_phase, 1e-12);
  EXPECT_TRUE(l.in_regime);
}

TEST(FullModel, CoherentProbeRuns) {
  const SchemeParams p = hierarchy_params(10);
  const double t = 0.1 / std::abs(chi_from_params(p));
  const FullVsEffective r = full_vs_effective(p, PolarizationQubit::left(), CoherentProbe{0.5}, t,
                                              FullModelCutoffs{2, 2, 4});
  EXPECT_GT(r.measured_phase, 0.0);
  EXPECT_LT(r.leakage, 1e-3);
}
