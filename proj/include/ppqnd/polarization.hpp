#pragma once

// Polarization-basis algebra: single-photon polarization qubits, 2x2 mode
// unitaries, their lift to the Fock space of two modes, and Hamiltonian
// invariance checks.
//
// Convention: a PolUnitary u maps mode operators, a_i -> sum_j u_ij a_j.
// A state written in the old basis with coefficients c has coefficients
// u^dagger c in the new basis ("states carry u-conjugate").

#include "ppqnd/fock_core.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>

namespace ppqnd {

using Matrix2c = Eigen::Matrix2cd;

struct PolarizationQubit {
  cplx c_l{1.0, 0.0};
  cplx c_r{0.0, 0.0};

  PolarizationQubit() = default;
  PolarizationQubit(cplx l, cplx r) : c_l(l), c_r(r) {
    if (std::abs(std::norm(c_l) + std::norm(c_r) - 1.0) > tol::norm)
      throw std::invalid_argument("PolarizationQubit: |c_L|^2 + |c_R|^2 differs from 1");
  }

  static PolarizationQubit left() { return {1.0, 0.0}; }
  static PolarizationQubit right() { return {0.0, 1.0}; }
  /// Normalizes (l, r) before construction.
  static PolarizationQubit normalized(cplx l, cplx r) {
    const double n = std::sqrt(std::norm(l) + std::norm(r));
    if (n == 0.0) throw std::domain_error("PolarizationQubit::normalized: zero vector");
    return {l / n, r / n};
  }

  Eigen::Vector2cd vector() const { return {c_l, c_r}; }
};

struct PolUnitary {
  Matrix2c u = Matrix2c::Identity();

  PolUnitary() = default;
  explicit PolUnitary(Matrix2c m) : u(std::move(m)) {
    if ((u.adjoint() * u - Matrix2c::Identity()).cwiseAbs().maxCoeff() > tol::norm)
      throw std::invalid_argument("PolUnitary: u^dagger u differs from identity");
  }

  PolUnitary inverse() const { return PolUnitary(u.adjoint()); }
  friend PolUnitary operator*(const PolUnitary& a, const PolUnitary& b) { return PolUnitary(a.u * b.u); }
};

/// Rows (L, R), columns (H, V): a_L = (a_H + i a_V)/sqrt2, a_R = (a_H - i a_V)/sqrt2.
inline PolUnitary lr_to_hv() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix2c m;
  m << s, cplx(0, s), s, cplx(0, -s);
  return PolUnitary(m);
}

/// Coefficients of `q` in the basis defined by u.
inline Eigen::Vector2cd change_basis(const PolarizationQubit& q, const PolUnitary& u) {
  return u.u.adjoint() * q.vector();
}

/// The qubit after the optical element that realizes u on the photon.
inline PolarizationQubit rotate(const PolarizationQubit& q, const PolUnitary& u) {
  const Eigen::Vector2cd v = u.u * q.vector();
  return PolarizationQubit::normalized(v(0), v(1));
}

/// (s1, s2, s3) with |L> at s3 = +1 and (|L>+|R>)/sqrt2 at s1 = +1.
inline std::array<double, 3> stokes_vector(const PolarizationQubit& q) {
  const cplx x = std::conj(q.c_l) * q.c_r;
  return {2.0 * x.real(), 2.0 * x.imag(), std::norm(q.c_l) - std::norm(q.c_r)};
}

/// Haar-random 2x2 unitary (QR of a complex Ginibre matrix with phase fix).
inline PolUnitary random_pol_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix2c z;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) z(i, j) = cplx(g(rng), g(rng));
  const Eigen::HouseholderQR<Matrix2c> qr(z);
  Matrix2c q = qr.householderQ();
  const Matrix2c r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < 2; ++k) {
    const cplx d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return PolUnitary(q);
}

inline PolarizationQubit random_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const cplx l(g(rng), g(rng)), r(g(rng), g(rng));
  return PolarizationQubit::normalized(l, r);
}

namespace detail {

/// h = i log u on the principal branch, Hermitian since u is unitary.
/// arg() of an eigenvalue -1 may land on either side of the cut; both give
/// exp(-i h) = u, so the choice does not affect the lift.
inline Matrix2c mixing_generator(const PolUnitary& u) {
  const Eigen::ComplexSchur<Matrix2c> schur(u.u);
  const Matrix2c& q = schur.matrixU();
  const Matrix2c& t = schur.matrixT();
  Matrix2c d = Matrix2c::Zero();
  for (int k = 0; k < 2; ++k) d(k, k) = -std::arg(t(k, k));
  Matrix2c h = q * d * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

}  // namespace detail

/// Unitary U on `space` with U^dagger a_i U = sum_j u_ij a_j for the two modes.
/// Built as exp(-i G) with G = sum_kl h_kl a_k^dagger a_l and exp(-i h) = u.
/// G commutes with the total photon number of the pair, so U does too; the
/// mode-operator relation is exact on photon-number sectors that fit below
/// both cutoffs (N <= cutoff - 1).
inline Operator lift_unitary(const PolUnitary& u, const HilbertSpace& space, std::pair<std::size_t, std::size_t> modes) {
  const auto [m0, m1] = modes;
  if (m0 == m1) throw std::invalid_argument("lift_unitary: modes must differ");
  if (space.cutoff(m0) != space.cutoff(m1)) throw std::invalid_argument("lift_unitary: mode cutoffs differ");
  PolUnitary checked(u.u);
  const Matrix2c h = detail::mixing_generator(checked);
  const std::array<CMatrix, 2> a{annihilation_op(space, m0).matrix(), annihilation_op(space, m1).matrix()};
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  CMatrix g = CMatrix::Zero(n, n);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      if (h(k, l) != cplx(0)) g += h(k, l) * a[std::size_t(k)].adjoint() * a[std::size_t(l)];
  g = 0.5 * (g + g.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  CVector ph(n);
  for (Eigen::Index k = 0; k < n; ++k) ph(k) = std::polar(1.0, -es.eigenvalues()(k));
  CMatrix out = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  return {space, std::move(out)};
}

/// Basis indices whose total photon number in the two modes is at most
/// `cutoff - 1`, where lift_unitary is an exact representation of u.
inline std::vector<std::size_t> complete_sector_indices(const HilbertSpace& space,
                                                        std::pair<std::size_t, std::size_t> modes) {
  const std::size_t cmax = std::min(space.cutoff(modes.first), space.cutoff(modes.second));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < space.total_dim(); ++i)
    if (space.photons(i, modes.first) + space.photons(i, modes.second) < cmax) out.push_back(i);
  return out;
}

/// max |U H U^dagger - H| entrywise. H = chi (n_L + n_R) n_p is invariant for
/// every u because n_L + n_R is itself invariant under mode mixing.
inline double check_invariance(const Operator& h, const PolUnitary& u, std::pair<std::size_t, std::size_t> modes) {
  const Operator lift = lift_unitary(u, h.space(), modes);
  const CMatrix& U = lift.matrix();
  const CMatrix rotated = U * h.matrix() * U.adjoint();
  return (rotated - h.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace ppqnd
