#pragma once

// Hamiltonians of the three atomic level schemes (Lambda, N-type and the
// five-level polarization-preserving scheme), the effective cross-Kerr
// Hamiltonians, and the 5x5 single-chain block model.

#include "ppqnd/extended.hpp"
#include "ppqnd/fock_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppqnd {

/// Detunings and coupling strengths, angular-frequency units, hbar = 1.
/// A single drive amplitude and a single signal coupling are shared by both
/// circular transitions, so the equal-amplitude condition holds by construction.
struct SchemeParams {
  double delta_probe = 0.0;  // Delta: probe detuning on |3>-|4>
  double delta_two = 0.0;    // delta: one-photon detuning of signal and drive
  double omega_d = 0.0;      // drive Rabi amplitude
  double xi_s = 0.0;         // signal vacuum coupling
  double xi_p = 0.0;         // probe vacuum coupling

  void validate() const {
    auto finite = [](double x, const char* name) {
      if (!std::isfinite(x)) throw std::invalid_argument(std::string("SchemeParams: ") + name + " is not finite");
    };
    finite(delta_probe, "delta_probe");
    finite(delta_two, "delta_two");
    finite(omega_d, "omega_d");
    finite(xi_s, "xi_s");
    finite(xi_p, "xi_p");
    if (omega_d < 0) throw std::invalid_argument("SchemeParams: omega_d must be >= 0");
    if (xi_s < 0) throw std::invalid_argument("SchemeParams: xi_s must be >= 0");
    if (xi_p < 0) throw std::invalid_argument("SchemeParams: xi_p must be >= 0");
  }

  friend bool operator==(const SchemeParams&, const SchemeParams&) = default;
};

/// Whether |Delta|, |delta| >> Omega_d >> xi_p >> xi_s holds, ">>" meaning a
/// ratio of at least `threshold`.
struct RegimeCheck {
  double detuning_over_drive = 0.0;
  double drive_over_probe = 0.0;
  double probe_over_signal = 0.0;
  double threshold = 10.0;

  double min_ratio() const { return std::min({detuning_over_drive, drive_over_probe, probe_over_signal}); }
  bool holds() const { return min_ratio() >= threshold; }
};

inline RegimeCheck regime_check(const SchemeParams& p, double threshold = 10.0) {
  auto ratio = [](double num, double den) {
    return den == 0.0 ? (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : num / den;
  };
  RegimeCheck r;
  r.threshold = threshold;
  r.detuning_over_drive = ratio(std::min(std::abs(p.delta_probe), std::abs(p.delta_two)), p.omega_d);
  r.drive_over_probe = ratio(p.omega_d, p.xi_p);
  r.probe_over_signal = ratio(p.xi_p, p.xi_s);
  return r;
}

/// Uniform hierarchy with every ">>" equal to `ratio`, anchored at omega_d.
inline SchemeParams hierarchy_params(double ratio, double omega_d = 1.0) {
  SchemeParams p;
  p.omega_d = omega_d;
  p.delta_probe = p.delta_two = ratio * omega_d;
  p.xi_p = omega_d / ratio;
  p.xi_s = p.xi_p / ratio;
  return p;
}

enum class SchemeKind { Lambda, NType, PolarizationPreserving };

inline std::size_t atom_dim(SchemeKind k) {
  switch (k) {
    case SchemeKind::Lambda: return 3;
    case SchemeKind::NType: return 4;
    case SchemeKind::PolarizationPreserving: return 5;
  }
  return 0;
}

inline std::size_t mode_count(SchemeKind k) {
  switch (k) {
    case SchemeKind::Lambda: return 1;
    case SchemeKind::NType: return 2;
    case SchemeKind::PolarizationPreserving: return 3;
  }
  return 0;
}

// Level and mode indices. Physical labels |1>,|2>,|2'>,|3>,|4> map to 0..4.
namespace lambda_level {
inline constexpr std::size_t ground = 0, excited = 1, metastable = 2;
inline constexpr std::size_t signal = 0;
}  // namespace lambda_level

namespace n_level {
inline constexpr std::size_t ground = 0, excited = 1, metastable = 2, probe_excited = 3;
inline constexpr std::size_t signal = 0, probe = 1;
}  // namespace n_level

namespace pp_level {
inline constexpr std::size_t ground = 0, excited_left = 1, excited_right = 2, metastable = 3, probe_excited = 4;
inline constexpr std::size_t signal_left = 0, signal_right = 1, probe = 2;
}  // namespace pp_level

/// Optional phases of the two drive Rabi frequencies. All formulas only need
/// |Omega_d|^2, so the builders default to zero phase and a real Hamiltonian.
struct DrivePhases {
  double left = 0.0;
  double right = 0.0;
};

namespace detail {

inline void require_cutoff(std::size_t c, std::size_t min, const char* what) {
  if (c < min) throw std::invalid_argument(std::string(what) + ": cutoff must be >= " + std::to_string(min));
}

/// coupling * A|hi><lo| + h.c., with A an operator on the modes (or identity).
inline CMatrix coupling_term(const HilbertSpace& sp, std::size_t hi, std::size_t lo, cplx coupling,
                             const CMatrix* mode_op) {
  CMatrix t = atom_transition_op(sp, hi, lo).matrix();
  if (mode_op) t = (t * *mode_op).eval();
  t *= coupling;
  return t + t.adjoint();
}

}  // namespace detail

inline Operator build_lambda_hamiltonian(const SchemeParams& p, std::size_t cutoff_s) {
  using namespace lambda_level;
  p.validate();
  detail::require_cutoff(cutoff_s, 2, "build_lambda_hamiltonian");
  const HilbertSpace sp(3, {cutoff_s});
  const CMatrix a_s = annihilation_op(sp, signal).matrix();
  CMatrix h = p.delta_two * atom_transition_op(sp, excited, excited).matrix();
  h += detail::coupling_term(sp, excited, ground, p.xi_s, &a_s);
  h += detail::coupling_term(sp, excited, metastable, p.omega_d, nullptr);
  return {sp, std::move(h), true};
}

inline Operator build_n_hamiltonian(const SchemeParams& p, std::size_t cutoff_s, std::size_t cutoff_p) {
  using namespace n_level;
  p.validate();
  detail::require_cutoff(cutoff_s, 2, "build_n_hamiltonian");
  detail::require_cutoff(cutoff_p, 2, "build_n_hamiltonian");
  const HilbertSpace sp(4, {cutoff_s, cutoff_p});
  const CMatrix a_s = annihilation_op(sp, signal).matrix();
  const CMatrix a_p = annihilation_op(sp, probe).matrix();
  CMatrix h = p.delta_probe * atom_transition_op(sp, probe_excited, probe_excited).matrix();
  h += p.delta_two * atom_transition_op(sp, excited, excited).matrix();
  h += detail::coupling_term(sp, excited, ground, p.xi_s, &a_s);
  h += detail::coupling_term(sp, excited, metastable, p.omega_d, nullptr);
  h += detail::coupling_term(sp, probe_excited, metastable, p.xi_p, &a_p);
  return {sp, std::move(h), true};
}

/// Five-level scheme. The linearly polarized drive couples |3> to both |2>
/// and |2'> with one amplitude; the probe couples |3>-|4>.
inline Operator build_pp_hamiltonian(const SchemeParams& p, std::size_t cutoff_sl, std::size_t cutoff_sr,
                                     std::size_t cutoff_p, DrivePhases phases = {}) {
  using namespace pp_level;
  p.validate();
  detail::require_cutoff(cutoff_sl, 2, "build_pp_hamiltonian");
  detail::require_cutoff(cutoff_sr, 2, "build_pp_hamiltonian");
  detail::require_cutoff(cutoff_p, 2, "build_pp_hamiltonian");
  const HilbertSpace sp(5, {cutoff_sl, cutoff_sr, cutoff_p});
  const CMatrix a_l = annihilation_op(sp, signal_left).matrix();
  const CMatrix a_r = annihilation_op(sp, signal_right).matrix();
  const CMatrix a_p = annihilation_op(sp, probe).matrix();
  CMatrix h = p.delta_probe * atom_transition_op(sp, probe_excited, probe_excited).matrix();
  h += p.delta_two * (atom_transition_op(sp, excited_left, excited_left).matrix() +
                      atom_transition_op(sp, excited_right, excited_right).matrix());
  h += detail::coupling_term(sp, excited_left, ground, p.xi_s, &a_l);
  h += detail::coupling_term(sp, excited_right, ground, p.xi_s, &a_r);
  h += detail::coupling_term(sp, excited_left, metastable, std::polar(p.omega_d, phases.left), nullptr);
  h += detail::coupling_term(sp, excited_right, metastable, std::polar(p.omega_d, phases.right), nullptr);
  h += detail::coupling_term(sp, probe_excited, metastable, p.xi_p, &a_p);
  return {sp, std::move(h), true};
}

/// Total excitation number of the five-level scheme: photons in every mode
/// plus atomic weights (0, 1, 1, 1, 2) for |1>, |2>, |2'>, |3>, |4>.
inline Operator pp_excitation_number(const HilbertSpace& sp) {
  if (sp.atom_dim() != 5 || sp.num_modes() != 3)
    throw std::invalid_argument("pp_excitation_number: not a five-level, three-mode space");
  static constexpr double weight[5] = {0, 1, 1, 1, 2};
  CVector diag(static_cast<Eigen::Index>(sp.total_dim()));
  for (std::size_t idx = 0; idx < sp.total_dim(); ++idx) {
    double n = weight[sp.atom_level(idx)];
    for (std::size_t m = 0; m < 3; ++m) n += double(sp.photons(idx, m));
    diag(static_cast<Eigen::Index>(idx)) = n;
  }
  return {sp, diag.asDiagonal().toDenseMatrix(), true};
}

// ---------------------------------------------------------------------------
// 5x5 block model

using BlockMatrix5 = Eigen::Matrix<double, 5, 5>;

/// Single excitation chain |1,n_s,n_p>, |2,n_sL-1,n_p>, |2',n_sR-1,n_p>,
/// |3,n_s-1,n_p>, |4,n_s-1,n_p-1>. Real symmetric because drive phases are zero.
struct PPBlock {
  BlockMatrix5 matrix;
  /// Set when one circular component carries no photon; that row still
  /// couples to |3> through the drive, so it is kept (coupling to |1> is zero).
  bool left_empty = false;
  bool right_empty = false;
};

inline PPBlock build_pp_block_matrix(const SchemeParams& p, std::size_t n_sl, std::size_t n_sr, std::size_t n_p) {
  p.validate();
  if (n_sl + n_sr == 0) throw std::invalid_argument("build_pp_block_matrix: no signal photon (n_sL + n_sR = 0)");
  if (n_p == 0) throw std::invalid_argument("build_pp_block_matrix: n_p must be >= 1");
  const double g_l = p.xi_s * std::sqrt(double(n_sl));
  const double g_r = p.xi_s * std::sqrt(double(n_sr));
  const double g_p = p.xi_p * std::sqrt(double(n_p));
  const double w = p.omega_d;
  const double d = p.delta_two;
  PPBlock b;
  // clang-format off
  b.matrix << 0,   g_l, g_r, 0,   0,
              g_l, d,   0,   w,   0,
              g_r, 0,   d,   w,   0,
              0,   w,   w,   0,   g_p,
              0,   0,   0,   g_p, p.delta_probe;
  // clang-format on
  b.left_empty = n_sl == 0;
  b.right_empty = n_sr == 0;
  return b;
}

/// Indices in the full five-level space of the five block-model states for a
/// single signal photon (n_sL + n_sR = 1), where the basis is unambiguous.
inline std::array<std::size_t, 5> pp_block_basis(const HilbertSpace& sp, std::size_t n_sl, std::size_t n_sr,
                                                  std::size_t n_p) {
  using namespace pp_level;
  if (n_sl + n_sr != 1) throw std::invalid_argument("pp_block_basis: defined for a single signal photon");
  if (n_p == 0) throw std::invalid_argument("pp_block_basis: n_p must be >= 1");
  return {sp.index({ground, {n_sl, n_sr, n_p}}), sp.index({excited_left, {0, 0, n_p}}),
          sp.index({excited_right, {0, 0, n_p}}), sp.index({metastable, {0, 0, n_p}}),
          sp.index({probe_excited, {0, 0, n_p - 1}})};
}

// ---------------------------------------------------------------------------
// Effective Hamiltonians

inline double chi_from_params(const SchemeParams& p) {
  if (p.delta_probe == 0.0) throw std::domain_error("chi_from_params: probe detuning is zero");
  if (p.omega_d == 0.0) throw std::domain_error("chi_from_params: drive amplitude is zero");
  return -(p.xi_s * p.xi_s) * (p.xi_p * p.xi_p) / (p.delta_probe * p.omega_d * p.omega_d);
}

namespace detail {
template <class F>
Operator diagonal_operator(const HilbertSpace& sp, F&& entry) {
  CVector diag(static_cast<Eigen::Index>(sp.total_dim()));
  for (std::size_t idx = 0; idx < sp.total_dim(); ++idx) diag(static_cast<Eigen::Index>(idx)) = entry(idx);
  return {sp, diag.asDiagonal().toDenseMatrix(), true};
}
}  // namespace detail

/// chi * n_s * n_p on modes [s, p].
inline Operator qnd_hamiltonian(double chi, std::size_t cutoff_s, std::size_t cutoff_p) {
  detail::require_cutoff(cutoff_s, 1, "qnd_hamiltonian");
  detail::require_cutoff(cutoff_p, 1, "qnd_hamiltonian");
  const HilbertSpace sp(1, {cutoff_s, cutoff_p});
  return detail::diagonal_operator(sp, [&](std::size_t i) {
    return chi * double(sp.photons(i, 0)) * double(sp.photons(i, 1));
  });
}

/// chi * (n_sL + n_sR) * n_p on modes [s_L, s_R, p].
inline Operator ppqnd_hamiltonian(double chi, std::size_t cutoff_sl, std::size_t cutoff_sr, std::size_t cutoff_p) {
  detail::require_cutoff(cutoff_sl, 1, "ppqnd_hamiltonian");
  detail::require_cutoff(cutoff_sr, 1, "ppqnd_hamiltonian");
  detail::require_cutoff(cutoff_p, 1, "ppqnd_hamiltonian");
  const HilbertSpace sp(1, {cutoff_sl, cutoff_sr, cutoff_p});
  return detail::diagonal_operator(sp, [&](std::size_t i) {
    return chi * double(sp.photons(i, 0) + sp.photons(i, 1)) * double(sp.photons(i, 2));
  });
}

/// Control Hamiltonian chi * n_sL * n_p that only sees the left-circular
/// component, on the same [s_L, s_R, p] space.
inline Operator sensitive_qnd_hamiltonian(double chi, std::size_t cutoff_sl, std::size_t cutoff_sr,
                                          std::size_t cutoff_p) {
  detail::require_cutoff(cutoff_sl, 1, "sensitive_qnd_hamiltonian");
  detail::require_cutoff(cutoff_sr, 1, "sensitive_qnd_hamiltonian");
  detail::require_cutoff(cutoff_p, 1, "sensitive_qnd_hamiltonian");
  const HilbertSpace sp(1, {cutoff_sl, cutoff_sr, cutoff_p});
  return detail::diagonal_operator(sp, [&](std::size_t i) {
    return chi * double(sp.photons(i, 0)) * double(sp.photons(i, 2));
  });
}

// ---------------------------------------------------------------------------
// CPT dark state of the Lambda system

/// (Omega_d |1, n_s> - xi_s sqrt(n_s) |3, n_s - 1>) / sqrt(xi_s^2 n_s + Omega_d^2).
inline StateVector cpt_dark_state(const SchemeParams& p, std::size_t n_s, std::size_t cutoff_s) {
  using namespace lambda_level;
  p.validate();
  if (n_s == 0) throw std::invalid_argument("cpt_dark_state: n_s must be >= 1");
  if (n_s >= cutoff_s) throw std::invalid_argument("cpt_dark_state: n_s beyond cutoff");
  const HilbertSpace sp(3, {cutoff_s});
  const double norm = std::sqrt(p.xi_s * p.xi_s * double(n_s) + p.omega_d * p.omega_d);
  if (norm == 0.0) throw std::domain_error("cpt_dark_state: xi_s and omega_d both zero");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(sp.total_dim()));
  v(Eigen::Index(sp.index({ground, {n_s}}))) = p.omega_d / norm;
  v(Eigen::Index(sp.index({metastable, {n_s - 1}}))) = -p.xi_s * std::sqrt(double(n_s)) / norm;
  return {sp, std::move(v)};
}

struct DarkStateCheck {
  double eigenvalue = 0.0;  // eigenvalue of the selected eigenvector
  double overlap = 0.0;     // |<formula|eigenvector>|^2
};

/// Diagonalizes the n_s-excitation manifold of the Lambda Hamiltonian and
/// compares its zero-energy eigenvector with cpt_dark_state.
inline DarkStateCheck cpt_dark_state_check(const SchemeParams& p, std::size_t n_s) {
  const std::size_t cutoff = n_s + 1;
  const Operator h = build_lambda_hamiltonian(p, std::max<std::size_t>(cutoff, 2));
  const StateVector dark = cpt_dark_state(p, n_s, h.space().cutoff(0));
  const ExtendedEigensystem eig = ExtendedEigensystem::of(h);
  const std::size_t ground_idx = h.space().index({lambda_level::ground, {n_s}});
  for (const auto& b : eig.blocks()) {
    if (std::find(b.indices.begin(), b.indices.end(), ground_idx) == b.indices.end()) continue;
    std::size_t best = 0;
    for (std::size_t k = 1; k < b.indices.size(); ++k)
      if (abs(b.eig.values[k]) < abs(b.eig.values[best])) best = k;
    double ov = 0.0;
    for (std::size_t r = 0; r < b.indices.size(); ++r)
      ov += static_cast<double>(b.eig.vec(r, best)) * dark[b.indices[r]].real();
    return {static_cast<double>(b.eig.values[best]), ov * ov};
  }
  throw std::logic_error("cpt_dark_state_check: manifold not found");
}

// ---------------------------------------------------------------------------
// Quasidark-state energies from exact diagonalization

/// Energy of the dressed state connected to |1, n_s, n_p> in the N scheme.
inline double n_scheme_dressed_energy(const SchemeParams& p, std::size_t n_s, std::size_t n_p) {
  const Operator h = build_n_hamiltonian(p, std::max<std::size_t>(n_s + 1, 2), std::max<std::size_t>(n_p + 1, 2));
  const auto eig = ExtendedEigensystem::of(h);
  return eig.dressed_energy(h.space().index({n_level::ground, {n_s, n_p}}));
}

/// Energy of the dressed state connected to |1, n_sL, n_sR, n_p> in the full
/// five-level model.
inline double pp_dressed_energy(const SchemeParams& p, std::size_t n_sl, std::size_t n_sr, std::size_t n_p) {
  const Operator h = build_pp_hamiltonian(p, std::max<std::size_t>(n_sl + 1, 2), std::max<std::size_t>(n_sr + 1, 2),
                                          std::max<std::size_t>(n_p + 1, 2));
  const auto eig = ExtendedEigensystem::of(h);
  return eig.dressed_energy(h.space().index({pp_level::ground, {n_sl, n_sr, n_p}}));
}

/// Smallest-|lambda| eigenvalue of the 5x5 block model, in extended precision.
inline double block_small_eigenvalue(const PPBlock& b) {
  const ExtendedEigensystem eig{Eigen::MatrixXd(b.matrix)};
  const auto v = eig.values();
  return *std::min_element(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
}

/// Compares the block-model quasidark energy with the full model's dressed
/// energy for the same photon numbers. The block model leaves out the
/// opposite-polarization ground state that the drive reaches from |2'>, so
/// the two differ already for a single signal photon: for (1,0) the full
/// quasidark energy is about twice the block value.
struct BlockVsFull {
  double block_energy = 0.0;
  double full_energy = 0.0;
  double relative_difference = 0.0;
  /// Weight of |1, n_sL, n_sR, n_p> on the selected full-model eigenvector.
  /// A circularly polarized photon splits roughly evenly between two dressed
  /// states of the full model, which shows up here as a weight near 1/2.
  double full_weight = 0.0;
};

inline BlockVsFull block_vs_full(const SchemeParams& p, std::size_t n_sl, std::size_t n_sr, std::size_t n_p) {
  BlockVsFull r;
  r.block_energy = block_small_eigenvalue(build_pp_block_matrix(p, n_sl, n_sr, n_p));
  const Operator h = build_pp_hamiltonian(p, std::max<std::size_t>(n_sl + 1, 2), std::max<std::size_t>(n_sr + 1, 2),
                                          std::max<std::size_t>(n_p + 1, 2));
  const auto d = ExtendedEigensystem::of(h).dressed_state(h.space().index({pp_level::ground, {n_sl, n_sr, n_p}}));
  r.full_energy = d.energy;
  r.full_weight = d.weight;
  r.relative_difference =
      std::abs(r.block_energy - r.full_energy) / std::max(std::abs(r.full_energy), 1e-300);
  return r;
}

}  // namespace ppqnd
