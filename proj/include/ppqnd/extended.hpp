#pragma once

// Extended-precision eigensolver for real symmetric matrices.
//
// The cross-Kerr shift sits 10^8 to 10^16 below the largest detuning, which
// is below what a double-precision eigensolver resolves in absolute terms.
// Matrices here are small and real, so a cyclic Jacobi sweep in 113-bit
// floating point is used, applied separately to every connected block of the
// sparsity graph (each excitation manifold of a scheme Hamiltonian is one
// block).

#include "ppqnd/fock_core.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ppqnd {

using Extended = boost::multiprecision::cpp_bin_float_quad;

template <class Real>
struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<Real> values;   // ascending
  std::vector<Real> vectors;  // row-major n x n, column k is eigenvector k

  const Real& vec(std::size_t row, std::size_t col) const { return vectors[row * n + col]; }
};

/// Cyclic Jacobi on a dense row-major symmetric matrix.
template <class Real>
SymmetricEigen<Real> jacobi_eigen(std::vector<Real> a, std::size_t n) {
  using std::abs;
  using std::sqrt;
  if (a.size() != n * n) throw std::invalid_argument("jacobi_eigen: size mismatch");
  std::vector<Real> v(n * n, Real(0));
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1;

  Real total = 0;
  for (const Real& x : a) total += x * x;
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real threshold = total * eps * eps;

  for (int sweep = 0; sweep < 100; ++sweep) {
    Real off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off <= threshold) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real apq = a[p * n + q];
        if (apq == 0) continue;
        const Real theta = (a[q * n + q] - a[p * n + p]) / (2 * apq);
        const Real t = (theta >= 0 ? Real(1) : Real(-1)) / (abs(theta) + sqrt(theta * theta + 1));
        const Real c = 1 / sqrt(t * t + 1);
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Real akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Real apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Real vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });
  SymmetricEigen<Real> out;
  out.n = n;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a[order[k] * n + order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + k] = v[r * n + order[k]];
  }
  return out;
}

/// Index sets of the connected components of the nonzero pattern of `m`.
inline std::vector<std::vector<std::size_t>> connected_blocks(const Eigen::MatrixXd& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (m(Eigen::Index(i), Eigen::Index(j)) != 0.0 || m(Eigen::Index(j), Eigen::Index(i)) != 0.0)
        parent[find(i)] = find(j);
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& g : groups)
    if (!g.empty()) out.push_back(std::move(g));
  return out;
}

/// Block-wise extended-precision eigensystem of a real symmetric matrix.
class ExtendedEigensystem {
 public:
  struct Block {
    std::vector<std::size_t> indices;
    SymmetricEigen<Extended> eig;
  };

  explicit ExtendedEigensystem(const Eigen::MatrixXd& m) : dim_(static_cast<std::size_t>(m.rows())) {
    if (m.rows() != m.cols()) throw std::invalid_argument("ExtendedEigensystem: matrix not square");
    if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("ExtendedEigensystem: matrix not exactly symmetric");
    for (auto& idx : connected_blocks(m)) {
      const std::size_t k = idx.size();
      std::vector<Extended> a(k * k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) a[r * k + c] = Extended(m(Eigen::Index(idx[r]), Eigen::Index(idx[c])));
      blocks_.push_back({std::move(idx), jacobi_eigen(std::move(a), k)});
    }
  }

  static ExtendedEigensystem of(const Operator& H) {
    if (!H.hermitian()) throw std::invalid_argument("ExtendedEigensystem: operator not flagged Hermitian");
    if (H.matrix().imag().cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("ExtendedEigensystem: operator has complex entries");
    return ExtendedEigensystem(H.matrix().real());
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// All eigenvalues, ascending, rounded to double.
  std::vector<double> values() const {
    std::vector<double> out;
    for (const auto& b : blocks_)
      for (const auto& v : b.eig.values) out.push_back(static_cast<double>(v));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Extended> values_extended() const {
    std::vector<Extended> out;
    for (const auto& b : blocks_) out.insert(out.end(), b.eig.values.begin(), b.eig.values.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  struct Dressed {
    double energy = 0.0;
    double weight = 0.0;  // |<idx|v>|^2 of the selected eigenvector
  };

  /// Eigenvector with the largest weight on basis state `idx`.
  Dressed dressed_state(std::size_t idx) const {
    for (const auto& b : blocks_) {
      const auto pos = std::find(b.indices.begin(), b.indices.end(), idx);
      if (pos == b.indices.end()) continue;
      const std::size_t r = static_cast<std::size_t>(pos - b.indices.begin());
      std::size_t best = 0;
      Extended best_w = -1;
      for (std::size_t k = 0; k < b.indices.size(); ++k) {
        const Extended w = b.eig.vec(r, k) * b.eig.vec(r, k);
        if (w > best_w) {
          best_w = w;
          best = k;
        }
      }
      return {static_cast<double>(b.eig.values[best]), static_cast<double>(best_w)};
    }
    throw std::out_of_range("dressed_state: basis index out of range");
  }

  double dressed_energy(std::size_t idx) const { return dressed_state(idx).energy; }

  /// exp(-iHt) psi. Phases are formed in extended precision so that
  /// lambda * t stays exact to ~1e-30 relative even for t ~ 1e15.
  CVector evolve(const CVector& psi, double t) const {
    if (static_cast<std::size_t>(psi.size()) != dim_) throw std::invalid_argument("evolve: dimension mismatch");
    CVector out = CVector::Zero(psi.size());
    const Extended te(t);
    for (const auto& b : blocks_) {
      const std::size_t k = b.indices.size();
      std::vector<Extended> re(k, Extended(0)), im(k, Extended(0));
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t r = 0; r < k; ++r) {
          const cplx a = psi(Eigen::Index(b.indices[r]));
          re[j] += b.eig.vec(r, j) * Extended(a.real());
          im[j] += b.eig.vec(r, j) * Extended(a.imag());
        }
        const Extended ph = -b.eig.values[j] * te;
        const Extended c = cos(ph), s = sin(ph);
        const Extended nr = re[j] * c - im[j] * s;
        const Extended ni = re[j] * s + im[j] * c;
        re[j] = nr;
        im[j] = ni;
      }
      for (std::size_t r = 0; r < k; ++r) {
        Extended sr = 0, si = 0;
        for (std::size_t j = 0; j < k; ++j) {
          sr += b.eig.vec(r, j) * re[j];
          si += b.eig.vec(r, j) * im[j];
        }
        out(Eigen::Index(b.indices[r])) = cplx(static_cast<double>(sr), static_cast<double>(si));
      }
    }
    return out;
  }

  StateVector evolve(const StateVector& psi, double t) const {
    return {psi.space(), evolve(psi.amplitudes(), t)};
  }

 private:
  std::size_t dim_;
  std::vector<Block> blocks_;
};

}  // namespace ppqnd
