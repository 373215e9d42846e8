#pragma once

// Truncated multimode Fock spaces with an optional atom factor, and the dense
// linear algebra used throughout: states, operators, eigendecomposition,
// unitary evolution, partial trace and fidelity.
//
// Conventions: hbar = 1, evolution is exp(-iHt). The basis index is row-major
// over (atom, n_0, n_1, ...) with the atom slowest and the last mode fastest.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppqnd {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double norm = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double negative_eigenvalue = 1e-10;
inline constexpr double coherent_truncation_warning = 1e-9;
}  // namespace tol

/// Label of one basis ket |atom, n_0, n_1, ...>.
struct BasisLabel {
  std::size_t atom = 0;
  std::vector<std::size_t> photons;

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

class HilbertSpace {
 public:
  HilbertSpace() : HilbertSpace(1, {}) {}

  HilbertSpace(std::size_t atom_dim, std::vector<std::size_t> mode_cutoffs)
      : atom_dim_(atom_dim), cutoffs_(std::move(mode_cutoffs)) {
    if (atom_dim_ == 0) throw std::invalid_argument("HilbertSpace: atom_dim must be >= 1");
    total_ = atom_dim_;
    for (std::size_t c : cutoffs_) {
      if (c == 0) throw std::invalid_argument("HilbertSpace: mode cutoffs must be >= 1");
      total_ *= c;
    }
  }

  std::size_t atom_dim() const { return atom_dim_; }
  const std::vector<std::size_t>& mode_cutoffs() const { return cutoffs_; }
  std::size_t num_modes() const { return cutoffs_.size(); }
  std::size_t total_dim() const { return total_; }

  std::size_t cutoff(std::size_t mode) const {
    check_mode(mode);
    return cutoffs_[mode];
  }

  /// Number of basis states sharing one value of `mode` and everything slower.
  std::size_t stride(std::size_t mode) const {
    check_mode(mode);
    std::size_t s = 1;
    for (std::size_t m = mode + 1; m < cutoffs_.size(); ++m) s *= cutoffs_[m];
    return s;
  }

  std::size_t atom_stride() const { return total_ / atom_dim_; }

  std::size_t index(const BasisLabel& label) const {
    if (label.atom >= atom_dim_) throw std::out_of_range("HilbertSpace::index: atom level out of range");
    if (label.photons.size() != cutoffs_.size())
      throw std::invalid_argument("HilbertSpace::index: wrong number of photon numbers");
    std::size_t idx = label.atom;
    for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
      if (label.photons[m] >= cutoffs_[m])
        throw std::out_of_range("HilbertSpace::index: photon number beyond cutoff");
      idx = idx * cutoffs_[m] + label.photons[m];
    }
    return idx;
  }

  BasisLabel label(std::size_t idx) const {
    if (idx >= total_) throw std::out_of_range("HilbertSpace::label: index out of range");
    BasisLabel out;
    out.photons.resize(cutoffs_.size());
    for (std::size_t m = cutoffs_.size(); m-- > 0;) {
      out.photons[m] = idx % cutoffs_[m];
      idx /= cutoffs_[m];
    }
    out.atom = idx;
    return out;
  }

  /// Photon number of `mode` in basis state `idx` without building a label.
  std::size_t photons(std::size_t idx, std::size_t mode) const {
    return (idx / stride(mode)) % cutoffs_[mode];
  }

  std::size_t atom_level(std::size_t idx) const { return idx / atom_stride(); }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
    return a.atom_dim_ == b.atom_dim_ && a.cutoffs_ == b.cutoffs_;
  }

 private:
  void check_mode(std::size_t mode) const {
    if (mode >= cutoffs_.size()) throw std::out_of_range("HilbertSpace: mode index out of range");
  }

  std::size_t atom_dim_;
  std::vector<std::size_t> cutoffs_;
  std::size_t total_ = 1;
};

/// Validating constructor taking signed sizes so that zero and negative
/// dimensions can be rejected with a message instead of wrapping.
inline HilbertSpace make_space(long long atom_dim, const std::vector<long long>& mode_cutoffs) {
  if (atom_dim < 1) throw std::invalid_argument("make_space: atom_dim must be >= 1, got " + std::to_string(atom_dim));
  std::vector<std::size_t> cut;
  cut.reserve(mode_cutoffs.size());
  for (std::size_t m = 0; m < mode_cutoffs.size(); ++m) {
    if (mode_cutoffs[m] < 1)
      throw std::invalid_argument("make_space: cutoff of mode " + std::to_string(m) + " must be >= 1, got " +
                                  std::to_string(mode_cutoffs[m]));
    cut.push_back(static_cast<std::size_t>(mode_cutoffs[m]));
  }
  return HilbertSpace(static_cast<std::size_t>(atom_dim), std::move(cut));
}

inline void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": Hilbert spaces differ");
}

class StateVector {
 public:
  StateVector(HilbertSpace space, CVector amplitudes) : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != space_.total_dim())
      throw std::invalid_argument("StateVector: amplitude count does not match space dimension");
  }

  static StateVector basis(const HilbertSpace& space, std::size_t idx) {
    if (idx >= space.total_dim()) throw std::out_of_range("StateVector::basis: index out of range");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(space.total_dim()));
    v(static_cast<Eigen::Index>(idx)) = 1.0;
    return {space, std::move(v)};
  }

  static StateVector basis(const HilbertSpace& space, const BasisLabel& label) {
    return basis(space, space.index(label));
  }

  const HilbertSpace& space() const { return space_; }
  const CVector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t idx) const { return amps_(static_cast<Eigen::Index>(idx)); }

  double norm() const { return amps_.norm(); }

  StateVector normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::domain_error("StateVector::normalized: zero vector");
    return {space_, amps_ / n};
  }

  /// <this|other>
  cplx inner(const StateVector& other) const {
    require_same_space(space_, other.space_, "StateVector::inner");
    return amps_.dot(other.amps_);
  }

 private:
  HilbertSpace space_;
  CVector amps_;
};

inline double hermitian_deviation(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_deviation: matrix not square");
  return m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

class Operator {
 public:
  Operator(HilbertSpace space, CMatrix matrix, bool hermitian = false)
      : space_(std::move(space)), m_(std::move(matrix)), hermitian_(hermitian) {
    const auto n = static_cast<Eigen::Index>(space_.total_dim());
    if (m_.rows() != n || m_.cols() != n) throw std::invalid_argument("Operator: matrix shape does not match space");
    if (hermitian_ && hermitian_deviation(m_) > tol::hermitian)
      throw std::invalid_argument("Operator: flagged Hermitian but max|M - M^dagger| exceeds 1e-12");
  }

  static Operator identity(const HilbertSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.total_dim());
    return {space, CMatrix::Identity(n, n), true};
  }

  static Operator zero(const HilbertSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.total_dim());
    return {space, CMatrix::Zero(n, n), true};
  }

  const HilbertSpace& space() const { return space_; }
  const CMatrix& matrix() const { return m_; }
  bool hermitian() const { return hermitian_; }

  Operator adjoint() const { return {space_, m_.adjoint(), hermitian_}; }

  /// Re-flag as Hermitian after checking; use on sums like A + A^dagger.
  Operator as_hermitian() const { return {space_, m_, true}; }

  StateVector apply(const StateVector& psi) const {
    require_same_space(space_, psi.space(), "Operator::apply");
    return {space_, m_ * psi.amplitudes()};
  }

  cplx expectation(const StateVector& psi) const {
    require_same_space(space_, psi.space(), "Operator::expectation");
    return psi.amplitudes().dot(m_ * psi.amplitudes());
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "Operator +");
    return {a.space_, a.m_ + b.m_, false};
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "Operator -");
    return {a.space_, a.m_ - b.m_, false};
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a.space_, b.space_, "Operator *");
    return {a.space_, a.m_ * b.m_, false};
  }
  friend Operator operator*(cplx s, const Operator& a) { return {a.space_, s * a.m_, false}; }
  friend Operator operator*(double s, const Operator& a) { return {a.space_, s * a.m_, a.hermitian_}; }

 private:
  HilbertSpace space_;
  CMatrix m_;
  bool hermitian_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

class DensityMatrix {
 public:
  DensityMatrix(HilbertSpace space, CMatrix matrix) : space_(std::move(space)), m_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(space_.total_dim());
    if (m_.rows() != n || m_.cols() != n) throw std::invalid_argument("DensityMatrix: shape does not match space");
    if (hermitian_deviation(m_) > tol::hermitian) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m_.trace() - 1.0) > tol::trace) throw std::invalid_argument("DensityMatrix: trace differs from 1");
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::negative_eigenvalue)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue below -1e-10");
  }

  static DensityMatrix pure(const StateVector& psi) {
    const CVector& v = psi.amplitudes();
    return {psi.space(), v * v.adjoint()};
  }

  const HilbertSpace& space() const { return space_; }
  const CMatrix& matrix() const { return m_; }

  double purity() const { return (m_ * m_).trace().real(); }

 private:
  HilbertSpace space_;
  CMatrix m_;
};

// ---------------------------------------------------------------------------
// Elementary operators

inline Operator annihilation_op(const HilbertSpace& space, std::size_t mode) {
  if (mode >= space.num_modes()) throw std::out_of_range("annihilation_op: mode index out of range");
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  const std::size_t stride = space.stride(mode);
  CMatrix m = CMatrix::Zero(n, n);
  for (std::size_t idx = 0; idx < space.total_dim(); ++idx) {
    const std::size_t k = space.photons(idx, mode);
    if (k > 0) m(static_cast<Eigen::Index>(idx - stride), static_cast<Eigen::Index>(idx)) = std::sqrt(double(k));
  }
  return {space, std::move(m)};
}

inline Operator creation_op(const HilbertSpace& space, std::size_t mode) {
  return annihilation_op(space, mode).adjoint();
}

inline Operator number_op(const HilbertSpace& space, std::size_t mode) {
  if (mode >= space.num_modes()) throw std::out_of_range("number_op: mode index out of range");
  CVector diag(static_cast<Eigen::Index>(space.total_dim()));
  for (std::size_t idx = 0; idx < space.total_dim(); ++idx)
    diag(static_cast<Eigen::Index>(idx)) = double(space.photons(idx, mode));
  return {space, diag.asDiagonal().toDenseMatrix(), true};
}

/// |i><j| on the atom, identity on every mode.
inline Operator atom_transition_op(const HilbertSpace& space, std::size_t i, std::size_t j) {
  if (i >= space.atom_dim() || j >= space.atom_dim())
    throw std::out_of_range("atom_transition_op: level index out of range");
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  const std::size_t block = space.atom_stride();
  CMatrix m = CMatrix::Zero(n, n);
  for (std::size_t r = 0; r < block; ++r)
    m(static_cast<Eigen::Index>(i * block + r), static_cast<Eigen::Index>(j * block + r)) = 1.0;
  return {space, std::move(m), i == j};
}

// ---------------------------------------------------------------------------
// States

/// Probe cutoff keeping truncation loss below 1e-9 for |alpha| <= 5.
inline std::size_t default_cutoff(cplx alpha) {
  const double a = std::abs(alpha);
  return static_cast<std::size_t>(std::ceil(a * a + 8.0 * a + 10.0));
}

inline HilbertSpace single_mode_space(std::size_t cutoff) { return HilbertSpace(1, {cutoff}); }

inline StateVector fock_state(std::size_t cutoff, std::size_t n) {
  if (n >= cutoff) throw std::out_of_range("fock_state: photon number beyond cutoff");
  return StateVector::basis(single_mode_space(cutoff), n);
}

struct CoherentState {
  StateVector state;
  /// 1 - sum |c_n|^2 before renormalization.
  double truncation_loss = 0.0;

  bool truncation_warning() const { return truncation_loss > tol::coherent_truncation_warning; }
};

inline CoherentState coherent_state(std::size_t cutoff, cplx alpha) {
  if (cutoff == 0) throw std::invalid_argument("coherent_state: cutoff must be >= 1");
  CVector c(static_cast<Eigen::Index>(cutoff));
  // c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), built by recurrence.
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 1; n < cutoff; ++n)
    c(static_cast<Eigen::Index>(n)) = c(static_cast<Eigen::Index>(n - 1)) * alpha / std::sqrt(double(n));
  const double kept = c.squaredNorm();
  const double loss = std::max(0.0, 1.0 - kept);
  return {StateVector(single_mode_space(cutoff), c / std::sqrt(kept)), loss};
}

/// Product |atom_level> (x) mode_states[0] (x) mode_states[1] ... on `space`.
/// Each mode state must live on a single-mode space with the matching cutoff.
inline StateVector tensor_state(const HilbertSpace& space, std::size_t atom_level,
                                const std::vector<StateVector>& mode_states) {
  if (atom_level >= space.atom_dim()) throw std::out_of_range("tensor_state: atom level out of range");
  if (mode_states.size() != space.num_modes()) throw std::invalid_argument("tensor_state: mode count mismatch");
  for (std::size_t m = 0; m < mode_states.size(); ++m) {
    const HilbertSpace& s = mode_states[m].space();
    if (s.atom_dim() != 1 || s.num_modes() != 1 || s.cutoff(0) != space.cutoff(m))
      throw std::invalid_argument("tensor_state: mode " + std::to_string(m) + " shape mismatch");
  }
  CVector v = CVector::Ones(1);
  for (const StateVector& f : mode_states) {
    const CVector& a = f.amplitudes();
    CVector next(v.size() * a.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * a.size(), a.size()) = v(i) * a;
    v = std::move(next);
  }
  CVector full = CVector::Zero(static_cast<Eigen::Index>(space.total_dim()));
  full.segment(static_cast<Eigen::Index>(atom_level * space.atom_stride()), v.size()) = v;
  return StateVector(space, std::move(full)).normalized();
}

// ---------------------------------------------------------------------------
// Eigendecomposition and evolution

struct Eigensystem {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

inline Eigensystem hermitian_eig(const Operator& op) {
  if (!op.hermitian()) throw std::invalid_argument("hermitian_eig: operator is not flagged Hermitian");
  if (hermitian_deviation(op.matrix()) > tol::hermitian)
    throw std::invalid_argument("hermitian_eig: operator is not Hermitian within 1e-12");
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(op.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// exp(-iHt) psi via the eigenbasis of H, so the result stays exact for long times.
inline StateVector evolve(const Eigensystem& eig, const HilbertSpace& space, const StateVector& psi, double t) {
  require_same_space(space, psi.space(), "evolve");
  const CVector coeffs = eig.vectors.adjoint() * psi.amplitudes();
  CVector phased(coeffs.size());
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) phased(k) = std::polar(1.0, -eig.values(k) * t) * coeffs(k);
  return {space, eig.vectors * phased};
}

inline StateVector evolve(const Operator& H, const StateVector& psi, double t) {
  require_same_space(H.space(), psi.space(), "evolve");
  return evolve(hermitian_eig(H), H.space(), psi, t);
}

// ---------------------------------------------------------------------------
// Reduced states and figures of merit

/// Subsystems retained by partial_trace. The atom factor counts as one
/// subsystem, each mode as another.
struct KeepSelector {
  bool atom = false;
  std::vector<std::size_t> modes;

  bool empty() const { return !atom && modes.empty(); }
};

inline DensityMatrix partial_trace(const DensityMatrix& rho, const KeepSelector& keep) {
  const HilbertSpace& sp = rho.space();
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty subsystem selector");
  std::vector<std::size_t> modes = keep.modes;
  std::sort(modes.begin(), modes.end());
  if (std::adjacent_find(modes.begin(), modes.end()) != modes.end())
    throw std::invalid_argument("partial_trace: duplicate mode in selector");
  for (std::size_t m : modes)
    if (m >= sp.num_modes()) throw std::out_of_range("partial_trace: mode index out of range");

  std::vector<std::size_t> kept_cutoffs;
  for (std::size_t m : modes) kept_cutoffs.push_back(sp.cutoff(m));
  const HilbertSpace out_space(keep.atom ? sp.atom_dim() : 1, kept_cutoffs);

  // Split every basis index into (kept index, traced index).
  std::vector<std::size_t> traced_modes;
  for (std::size_t m = 0; m < sp.num_modes(); ++m)
    if (!std::binary_search(modes.begin(), modes.end(), m)) traced_modes.push_back(m);
  std::vector<std::size_t> kept_idx(sp.total_dim()), traced_idx(sp.total_dim());
  std::size_t traced_dim = keep.atom ? 1 : sp.atom_dim();
  for (std::size_t m : traced_modes) traced_dim *= sp.cutoff(m);
  for (std::size_t idx = 0; idx < sp.total_dim(); ++idx) {
    const BasisLabel l = sp.label(idx);
    std::size_t k = keep.atom ? l.atom : 0;
    for (std::size_t m : modes) k = k * sp.cutoff(m) + l.photons[m];
    std::size_t t = keep.atom ? 0 : l.atom;
    for (std::size_t m : traced_modes) t = t * sp.cutoff(m) + l.photons[m];
    kept_idx[idx] = k;
    traced_idx[idx] = t;
  }

  const auto nk = static_cast<Eigen::Index>(out_space.total_dim());
  CMatrix red = CMatrix::Zero(nk, nk);
  std::vector<std::vector<std::size_t>> by_traced(traced_dim);
  for (std::size_t idx = 0; idx < sp.total_dim(); ++idx) by_traced[traced_idx[idx]].push_back(idx);
  const CMatrix& m = rho.matrix();
  for (const auto& group : by_traced)
    for (std::size_t i : group)
      for (std::size_t j : group)
        red(static_cast<Eigen::Index>(kept_idx[i]), static_cast<Eigen::Index>(kept_idx[j])) +=
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  // Symmetrize away rounding so the result passes the 1e-12 Hermiticity check.
  red = 0.5 * (red + red.adjoint()).eval();
  red /= red.trace().real();
  return {out_space, std::move(red)};
}

inline DensityMatrix partial_trace(const StateVector& psi, const KeepSelector& keep) {
  return partial_trace(DensityMatrix::pure(psi.normalized()), keep);
}

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

inline double fidelity(const StateVector& a, const StateVector& b) {
  require_same_space(a.space(), b.space(), "fidelity");
  return clamp_unit(std::norm(a.inner(b)) / (a.amplitudes().squaredNorm() * b.amplitudes().squaredNorm()));
}

inline double fidelity(const StateVector& a, const DensityMatrix& rho) {
  require_same_space(a.space(), rho.space(), "fidelity");
  const CVector& v = a.amplitudes();
  return clamp_unit(v.dot(rho.matrix() * v).real() / v.squaredNorm());
}

inline double fidelity(const DensityMatrix& rho, const StateVector& a) { return fidelity(a, rho); }

namespace detail {
inline CMatrix psd_sqrt(const CMatrix& m) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const RVector& w = es.eigenvalues();
  // Rounding noise around zero would otherwise contribute O(sqrt(eps)).
  const double floor = double(w.size()) * std::numeric_limits<double>::epsilon() * std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  const RVector s = w.unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_space(rho.space(), sigma.space(), "fidelity");
  const CMatrix sr = detail::psd_sqrt(rho.matrix());
  CMatrix inner = sr * sigma.matrix() * sr;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(inner, Eigen::EigenvaluesOnly);
  const RVector& w = es.eigenvalues();
  const double floor = double(w.size()) * std::numeric_limits<double>::epsilon() * std::max(w.cwiseAbs().maxCoeff(), 1e-300);
  const double tr = w.unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; }).sum();
  return clamp_unit(tr * tr);
}

}  // namespace ppqnd
