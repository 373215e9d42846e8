#pragma once

// Cross-Kerr QND measurement: evolution under chi n_s n_p, homodyne readout
// of the probe, number inference, discrimination error, back-action, the
// polarization-preserving phase kick, and full five-level vs effective
// dynamics.
//
// Conventions, used everywhere below:
//   evolution       exp(-iHt), so H = chi n_s n_p rotates the probe amplitude
//                   by exp(-i chi n_s t) and the signed phase is -chi n_s t;
//   quadrature      X_theta = (a e^{-i theta} + a^dagger e^{i theta}) / 2,
//                   coherent-state variance 1/4.

#include "ppqnd/extended.hpp"
#include "ppqnd/fock_core.hpp"
#include "ppqnd/polarization.hpp"
#include "ppqnd/schemes.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>

namespace ppqnd {

inline constexpr const char* evolution_convention = "exp(-iHt)";
inline constexpr const char* quadrature_convention = "X=(a e^{-i theta}+a^dag e^{i theta})/2";

/// Wraps to (-pi, pi].
inline double wrap_phase(double x) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(x, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

struct ProbeReadout {
  double phase_shift = 0.0;  // arg<a> minus the reference phase, in (-pi, pi]
  double quadrature_mean = 0.0;
  double quadrature_variance = 0.0;
  std::size_t inferred_n_s = 0;
  double lo_phase = 0.0;
  bool phase_defined = true;  // false when <a> = 0
  bool inferred = false;      // whether inferred_n_s was computed
};

/// Diagonal-Hamiltonian evolution, exact and cheap for the effective models.
inline StateVector evolve_diagonal(const Operator& h, const StateVector& psi, double t) {
  require_same_space(h.space(), psi.space(), "evolve_diagonal");
  const CMatrix& m = h.matrix();
  if ((m - CMatrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("evolve_diagonal: operator is not diagonal");
  CVector out = psi.amplitudes();
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, -m(i, i).real() * t);
  return {psi.space(), std::move(out)};
}

/// Homodyne statistics of a single-mode state. `phase_per_photon` is the
/// signed probe phase one signal photon imprints (-chi t here); when given
/// and the phase is defined, inferred_n_s = round(phase_shift /
/// phase_per_photon) clamped below at 0.
inline ProbeReadout homodyne_estimate(const DensityMatrix& probe, double lo_phase,
                                      std::optional<double> phase_per_photon = std::nullopt,
                                      double reference_phase = 0.0) {
  const HilbertSpace& sp = probe.space();
  if (sp.atom_dim() != 1 || sp.num_modes() != 1) throw std::invalid_argument("homodyne_estimate: not a single-mode state");
  const CMatrix a = annihilation_op(sp, 0).matrix();
  const CMatrix x = 0.5 * (a * std::polar(1.0, -lo_phase) + a.adjoint() * std::polar(1.0, lo_phase));
  const CMatrix& rho = probe.matrix();
  const cplx mean_a = (rho * a).trace();
  ProbeReadout r;
  r.lo_phase = lo_phase;
  r.quadrature_mean = (rho * x).trace().real();
  r.quadrature_variance = std::max(0.0, (rho * x * x).trace().real() - r.quadrature_mean * r.quadrature_mean);
  r.phase_defined = std::abs(mean_a) > 1e-12;
  if (!r.phase_defined) return r;
  r.phase_shift = wrap_phase(std::arg(mean_a) - reference_phase);
  if (phase_per_photon && *phase_per_photon != 0.0) {
    r.inferred = true;
    r.inferred_n_s = static_cast<std::size_t>(std::max(0.0, std::round(r.phase_shift / *phase_per_photon)));
  }
  return r;
}

inline ProbeReadout homodyne_estimate(const StateVector& probe, double lo_phase,
                                      std::optional<double> phase_per_photon = std::nullopt,
                                      double reference_phase = 0.0) {
  return homodyne_estimate(DensityMatrix::pure(probe.normalized()), lo_phase, phase_per_photon, reference_phase);
}

// ---------------------------------------------------------------------------
// QND evolution

struct QndEvolution {
  StateVector joint;  // modes [s, p]
  ProbeReadout readout;
  double schmidt_second = 0.0;       // second Schmidt coefficient of the joint state
  double fidelity_minus = 0.0;       // probe vs |alpha e^{-i n_s chi t}>
  double fidelity_plus = 0.0;        // probe vs |alpha e^{+i n_s chi t}>
  int matching_sign = -1;            // sign of the exponent that matches
  double signal_distribution_change = 0.0;  // max |P_t(n) - P_0(n)| of the signal
  double truncation_loss = 0.0;
};

inline QndEvolution evolve_qnd(std::size_t n_s, cplx alpha_p, double chi, double t,
                               std::optional<std::size_t> cutoff_p = std::nullopt) {
  const std::size_t cp = cutoff_p.value_or(default_cutoff(alpha_p));
  const std::size_t cs = n_s + 1;
  const Operator h = qnd_hamiltonian(chi, cs, cp);
  const HilbertSpace& sp = h.space();
  const CoherentState coh = coherent_state(cp, alpha_p);
  const StateVector psi0 = tensor_state(sp, 0, {fock_state(cs, n_s), coh.state});
  const StateVector psi = evolve_diagonal(h, psi0, t);

  QndEvolution r{psi, {}, 0, 0, 0, -1, 0, coh.truncation_loss};
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
      psi.amplitudes().data(), Eigen::Index(cs), Eigen::Index(cp));
  const CMatrix amp_m = amp;
  const Eigen::JacobiSVD<CMatrix> svd(amp_m);
  const auto sv = svd.singularValues();
  r.schmidt_second = sv.size() > 1 ? sv(1) : 0.0;

  const DensityMatrix probe = partial_trace(psi, KeepSelector{false, {1}});
  const double rot = chi * double(n_s) * t;
  r.fidelity_minus = fidelity(coherent_state(cp, alpha_p * std::polar(1.0, -rot)).state, probe);
  r.fidelity_plus = fidelity(coherent_state(cp, alpha_p * std::polar(1.0, rot)).state, probe);
  r.matching_sign = r.fidelity_minus >= r.fidelity_plus ? -1 : +1;

  const DensityMatrix signal = partial_trace(psi, KeepSelector{false, {0}});
  const DensityMatrix signal0 = partial_trace(psi0, KeepSelector{false, {0}});
  r.signal_distribution_change = (signal.matrix().diagonal() - signal0.matrix().diagonal()).cwiseAbs().maxCoeff();

  r.readout = homodyne_estimate(probe, std::arg(alpha_p), -chi * t, std::arg(alpha_p));
  return r;
}

// ---------------------------------------------------------------------------
// Discrimination of the n_s = 0 and n_s = 1 probe states

struct DiscriminationResult {
  double monte_carlo = 0.0;
  double standard_error = 0.0;
  double analytic = 0.0;
  double separation = 0.0;  // |alpha| 2 sin(theta/2)
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// splitmix64 finalizer, used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ trial);
}

/// Homodyne along the quadrature parallel to the displacement between
/// |alpha> and |alpha e^{-i theta}>, threshold at the midpoint, equal priors.
/// Each trial draws from its own generator seeded by (seed, trial), so the
/// result does not depend on evaluation order.
inline DiscriminationResult discrimination_error(double alpha, double theta, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("discrimination_error: trials must be >= 1");
  if (alpha < 0) throw std::invalid_argument("discrimination_error: alpha is a magnitude");
  DiscriminationResult r;
  r.trials = trials;
  r.seed = seed;
  r.separation = std::abs(2.0 * alpha * std::sin(0.5 * theta));
  constexpr double sigma = 0.5;
  r.analytic = 0.5 * std::erfc(r.separation / (2.0 * sigma * std::numbers::sqrt2));
  std::size_t errors = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    std::mt19937_64 rng(trial_seed(seed, k));
    const bool one = (rng() >> 63) != 0;
    std::normal_distribution<double> noise(0.0, sigma);
    // Coordinates along the measured quadrature: n_s = 0 at +d/2, n_s = 1 at -d/2.
    const double x = (one ? -0.5 : 0.5) * r.separation + noise(rng);
    const bool decide_one = x < 0.0 || (x == 0.0 && (rng() & 1));
    if (decide_one != one) ++errors;
  }
  r.monte_carlo = double(errors) / double(trials);
  r.standard_error = std::sqrt(std::max(r.monte_carlo * (1 - r.monte_carlo), 1.0 / double(trials)) / double(trials));
  return r;
}

// ---------------------------------------------------------------------------
// Back-action

struct BackactionReport {
  double number_variance = 0.0;  // probe <(dn)^2>
  double phase_variance = 0.0;   // 1 / (4 number_variance)
  double product = 0.0;
  /// Independent estimate from a simulated measurement at small theta = chi t:
  /// signal-number resolution Var(X_perp) / (|<a>|^2 theta^2) times the
  /// imposed signal phase variance -2 ln|C|, C the signal coherence.
  double measured_number_variance = 0.0;
  double imposed_phase_variance = 0.0;
  double independent_product = 0.0;
  double theta = 0.0;
  double truncation_loss = 0.0;
  bool degenerate = false;  // vacuum probe
};

inline BackactionReport backaction_product(cplx alpha_p, std::optional<std::size_t> cutoff = std::nullopt,
                                           double theta = 1e-3) {
  BackactionReport r;
  r.theta = theta;
  const std::size_t cp = cutoff.value_or(default_cutoff(alpha_p));
  const CoherentState coh = coherent_state(cp, alpha_p);
  r.truncation_loss = coh.truncation_loss;
  const Operator n = number_op(coh.state.space(), 0);
  const double mean = n.expectation(coh.state).real();
  const double mean2 = (n * n).expectation(coh.state).real();
  r.number_variance = std::max(0.0, mean2 - mean * mean);
  if (r.number_variance <= 1e-300) {
    r.degenerate = true;
    return r;
  }
  r.phase_variance = 1.0 / (4.0 * r.number_variance);
  r.product = r.number_variance * r.phase_variance;

  // Signal (|0> + |1>)/sqrt2 against the probe under chi n_s n_p, chi t = theta.
  const Operator h = qnd_hamiltonian(1.0, 2, cp);
  const StateVector plus{single_mode_space(2), CVector::Constant(2, cplx(1.0 / std::numbers::sqrt2))};
  const StateVector psi = evolve_diagonal(h, tensor_state(h.space(), 0, {plus, coh.state}), theta);
  const DensityMatrix sig = partial_trace(psi, KeepSelector{false, {0}});
  const double coherence = 2.0 * std::abs(sig.matrix()(0, 1));
  r.imposed_phase_variance = -2.0 * std::log(coherence);

  const ProbeReadout ro = homodyne_estimate(coh.state, std::arg(alpha_p) + 0.5 * std::numbers::pi);
  r.measured_number_variance = ro.quadrature_variance / (std::norm(alpha_p) * theta * theta);
  r.independent_product = r.measured_number_variance * r.imposed_phase_variance;
  return r;
}

// ---------------------------------------------------------------------------
// Polarization-preserving phase kick

struct DephasingResult {
  DensityMatrix reduced;  // signal modes [s_L, s_R], cutoffs 2 x 2
  double fidelity = 0.0;
  double purity = 0.0;
  double coherence = 0.0;           // 2 |rho_{L,R}|
  double analytic_envelope = 0.0;   // exp(-|alpha|^2 (1 - cos chi t))
  double truncation_loss = 0.0;
};

inline StateVector signal_qubit_state(const PolarizationQubit& q) {
  const HilbertSpace sp(1, {2, 2});
  CVector v = CVector::Zero(4);
  v(Eigen::Index(sp.index({0, {1, 0}}))) = q.c_l;
  v(Eigen::Index(sp.index({0, {0, 1}}))) = q.c_r;
  return {sp, std::move(v)};
}

/// Evolves the single-photon qubit together with a coherent probe under
/// chi (n_sL + n_sR) n_p, or under chi n_sL n_p when `sensitive`, and traces
/// out the probe.
inline DephasingResult polarization_dephasing(const PolarizationQubit& q, cplx alpha_p, double chi, double t,
                                              bool sensitive = false,
                                              std::optional<std::size_t> cutoff_p = std::nullopt) {
  const std::size_t cp = cutoff_p.value_or(default_cutoff(alpha_p));
  const Operator h = sensitive ? sensitive_qnd_hamiltonian(chi, 2, 2, cp) : ppqnd_hamiltonian(chi, 2, 2, cp);
  const CoherentState coh = coherent_state(cp, alpha_p);
  const HilbertSpace& sp = h.space();
  CVector v = CVector::Zero(Eigen::Index(sp.total_dim()));
  for (std::size_t k = 0; k < cp; ++k) {
    v(Eigen::Index(sp.index({0, {1, 0, k}}))) = q.c_l * coh.state[k];
    v(Eigen::Index(sp.index({0, {0, 1, k}}))) = q.c_r * coh.state[k];
  }
  const StateVector psi = evolve_diagonal(h, StateVector(sp, std::move(v)), t);
  DensityMatrix red = partial_trace(psi, KeepSelector{false, {0, 1}});
  const StateVector in = signal_qubit_state(q);
  const auto il = Eigen::Index(in.space().index({0, {1, 0}}));
  const auto ir = Eigen::Index(in.space().index({0, {0, 1}}));
  DephasingResult r{red, fidelity(in, red), red.purity(), 2.0 * std::abs(red.matrix()(il, ir)),
                    std::exp(-std::norm(alpha_p) * (1.0 - std::cos(chi * t))), coh.truncation_loss};
  return r;
}

// ---------------------------------------------------------------------------
// Full five-level model vs the effective Hamiltonian

struct FockProbe {
  std::size_t n_p = 1;
};
struct CoherentProbe {
  cplx alpha{1.0, 0.0};
};
using ProbeInput = std::variant<FockProbe, CoherentProbe>;

struct FullModelCutoffs {
  std::size_t signal_left = 2;
  std::size_t signal_right = 2;
  std::optional<std::size_t> probe;  // default: n_p + 1 or the coherent auto cutoff
};

struct FullVsEffective {
  double measured_phase = 0.0;   // signed probe phase accumulated at time t
  double predicted_phase = 0.0;  // -chi (n_sL + n_sR) n_p t, or with <n_p> for a coherent probe
  double relative_error = 0.0;
  double leakage = 0.0;          // population outside the atomic ground state
  double signal_fidelity = 0.0;  // fidelity of the reduced signal state with the input qubit
  double chi = 0.0;
  double t = 0.0;
  double min_ratio = 0.0;
  bool in_regime = false;
};

namespace detail {

inline StateVector pp_initial_state(const HilbertSpace& sp, const PolarizationQubit& q, const CVector& probe) {
  CVector v = CVector::Zero(Eigen::Index(sp.total_dim()));
  for (Eigen::Index k = 0; k < probe.size(); ++k) {
    v(Eigen::Index(sp.index({pp_level::ground, {1, 0, std::size_t(k)}}))) = q.c_l * probe(k);
    v(Eigen::Index(sp.index({pp_level::ground, {0, 1, std::size_t(k)}}))) = q.c_r * probe(k);
  }
  return {sp, std::move(v)};
}

inline double ground_population(const StateVector& psi) {
  const HilbertSpace& sp = psi.space();
  double g = 0.0;
  for (std::size_t i = 0; i < sp.total_dim(); ++i)
    if (sp.atom_level(i) == pp_level::ground) g += std::norm(psi[i]);
  return g;
}

inline DensityMatrix pp_signal_state(const StateVector& psi) {
  return partial_trace(psi, KeepSelector{false, {pp_level::signal_left, pp_level::signal_right}});
}

}  // namespace detail

/// Evolves |1> (x) (c_L|1_L> + c_R|1_R>) (x) probe under the full five-level
/// Hamiltonian. For a Fock probe |n_p> the phase is that of the overlap with
/// the initial state, referenced to the same run with n_p = 0 so that the
/// probe-independent Stark shift of the signal cancels. For a coherent probe
/// it is arg<a_p> relative to the initial amplitude.
inline FullVsEffective full_vs_effective(const SchemeParams& p, const PolarizationQubit& q, const ProbeInput& probe,
                                         double t, const FullModelCutoffs& cut = {}) {
  FullVsEffective r;
  r.t = t;
  const auto rc = regime_check(p);
  r.min_ratio = rc.min_ratio();
  r.in_regime = rc.holds();
  r.chi = (p.delta_probe != 0.0 && p.omega_d != 0.0) ? chi_from_params(p) : 0.0;

  std::size_t cp = 0;
  CVector probe_amp;
  double mean_np = 0.0;
  if (const auto* f = std::get_if<FockProbe>(&probe)) {
    cp = cut.probe.value_or(f->n_p + 1);
    if (f->n_p >= cp) throw std::invalid_argument("full_vs_effective: n_p beyond probe cutoff");
    probe_amp = fock_state(cp, f->n_p).amplitudes();
    mean_np = double(f->n_p);
  } else {
    const cplx alpha = std::get<CoherentProbe>(probe).alpha;
    cp = cut.probe.value_or(default_cutoff(alpha));
    probe_amp = coherent_state(cp, alpha).state.amplitudes();
    mean_np = std::norm(alpha);
  }
  const Operator h = build_pp_hamiltonian(p, cut.signal_left, cut.signal_right, std::max<std::size_t>(cp, 2));
  const HilbertSpace& sp = h.space();
  if (probe_amp.size() < Eigen::Index(sp.cutoff(pp_level::probe))) {
    CVector padded = CVector::Zero(Eigen::Index(sp.cutoff(pp_level::probe)));
    padded.head(probe_amp.size()) = probe_amp;
    probe_amp = padded;
  }
  const ExtendedEigensystem eig = ExtendedEigensystem::of(h);
  const StateVector psi0 = detail::pp_initial_state(sp, q, probe_amp);
  const StateVector psi = eig.evolve(psi0, t);

  r.predicted_phase = -r.chi * mean_np * t;
  r.leakage = std::max(0.0, 1.0 - detail::ground_population(psi));
  r.signal_fidelity = fidelity(signal_qubit_state(q), detail::pp_signal_state(psi));

  if (std::holds_alternative<FockProbe>(probe)) {
    CVector vac = CVector::Zero(probe_amp.size());
    vac(0) = 1.0;
    const StateVector ref0 = detail::pp_initial_state(sp, q, vac);
    const cplx with = psi0.inner(psi);
    const cplx without = ref0.inner(eig.evolve(ref0, t));
    r.measured_phase = wrap_phase(std::arg(with) - std::arg(without));
  } else {
    const CMatrix a = annihilation_op(sp, pp_level::probe).matrix();
    const cplx m0 = psi0.amplitudes().dot(a * psi0.amplitudes());
    const cplx m1 = psi.amplitudes().dot(a * psi.amplitudes());
    r.measured_phase = wrap_phase(std::arg(m1) - std::arg(m0));
  }
  // With nothing predicted (xi_s = 0) the absolute phase is reported instead.
  r.relative_error = r.predicted_phase == 0.0 ? std::abs(r.measured_phase)
                                               : std::abs(r.measured_phase - r.predicted_phase) / std::abs(r.predicted_phase);
  return r;
}

}  // namespace ppqnd
