#pragma once

// Quintic secular equation of the five-level block model,
//
//   -lambda^5 + a lambda^4 + b lambda^3 + c lambda^2 + d lambda + e = 0,
//
// its closed-form coefficients, an eigenvalue-based characteristic polynomial
// for comparison, root extraction, and the perturbative estimates of the
// quasidark (smallest) and largest eigenvalues.

#include "ppqnd/extended.hpp"
#include "ppqnd/schemes.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppqnd {

using ExtendedComplex = boost::multiprecision::cpp_complex_quad;

struct SecularCoefficients {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;

  std::array<double, 5> as_array() const { return {a, b, c, d, e}; }
  friend bool operator==(const SecularCoefficients&, const SecularCoefficients&) = default;
};

inline constexpr std::array<const char*, 5> secular_names{"a", "b", "c", "d", "e"};

/// Closed-form coefficients with the number operators replaced by occupations.
inline SecularCoefficients secular_coefficients(const SchemeParams& p, std::size_t n_sl, std::size_t n_sr,
                                                std::size_t n_p) {
  p.validate();
  const double D = p.delta_probe;
  const double dl = p.delta_two;
  const double w2 = p.omega_d * p.omega_d;
  const double s = p.xi_s * p.xi_s * double(n_sl + n_sr);
  const double g = p.xi_p * p.xi_p * double(n_p);
  SecularCoefficients k;
  k.a = 2 * dl + D;
  k.b = -dl * dl - 2 * dl * D + s + 2 * w2 + g;
  k.c = -(dl + D) * s + dl * dl * D - 2 * (dl + D) * w2 - 2 * dl * g;
  k.d = dl * D * (s + 2 * w2) - s * g + dl * dl * g;
  k.e = dl * s * g;
  return k;
}

/// Terms by which the exact block-matrix polynomial differs from the closed
/// form: the two signal paths interfere through |3>, contributing
/// -Omega^2 xi_s^2 (sqrt n_sL - sqrt n_sR)^2 to d and
/// +Delta Omega^2 xi_s^2 (sqrt n_sL - sqrt n_sR)^2 to e. Both vanish only for
/// n_sL = n_sR.
inline SecularCoefficients interference_terms(const SchemeParams& p, std::size_t n_sl, std::size_t n_sr) {
  const double diff = std::sqrt(double(n_sl)) - std::sqrt(double(n_sr));
  const double k = p.omega_d * p.omega_d * p.xi_s * p.xi_s * diff * diff;
  SecularCoefficients t;
  t.d = -k;
  t.e = p.delta_probe * k;
  return t;
}

inline SecularCoefficients operator+(const SecularCoefficients& x, const SecularCoefficients& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d, x.e + y.e};
}

/// Coefficients of det(H - lambda I) in the -lambda^5 + a lambda^4 + ... form,
/// from eigenvalues through elementary symmetric polynomials
/// (a = e1, b = -e2, c = e3, d = -e4, e = e5). The eigenvalues come from a
/// Jacobi sweep in 50-digit arithmetic so that e keeps full relative accuracy
/// even when the smallest eigenvalue sits 10^-24 below the largest.
inline std::array<Extended, 5> char_poly_coefficients_extended(const BlockMatrix5& h) {
  using Precise = boost::multiprecision::cpp_bin_float_50;
  if ((h - h.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("char_poly_coefficients: matrix is not symmetric");
  std::vector<Precise> a(25);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) a[std::size_t(r * 5 + c)] = Precise(h(r, c));
  const auto eig = jacobi_eigen(std::move(a), 5);
  std::array<Precise, 6> es{};
  es[0] = 1;
  for (const Precise& l : eig.values)
    for (std::size_t k = 5; k >= 1; --k) es[k] += es[k - 1] * l;
  return {Extended(es[1]), Extended(-es[2]), Extended(es[3]), Extended(-es[4]), Extended(es[5])};
}

inline SecularCoefficients char_poly_coefficients(const BlockMatrix5& h) {
  const auto k = char_poly_coefficients_extended(h);
  return {static_cast<double>(k[0]), static_cast<double>(k[1]), static_cast<double>(k[2]), static_cast<double>(k[3]),
          static_cast<double>(k[4])};
}

inline double relative_error(double approx, double exact, double floor = 1e-300) {
  return std::abs(approx - exact) / std::max(std::abs(exact), floor);
}

inline std::array<double, 5> coefficient_relative_errors(const SecularCoefficients& closed,
                                                         const SecularCoefficients& exact) {
  const auto x = closed.as_array();
  const auto y = exact.as_array();
  std::array<double, 5> out{};
  for (std::size_t i = 0; i < 5; ++i) out[i] = relative_error(x[i], y[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Perturbative estimates

struct SmallEstimate {
  double value = 0.0;
  bool valid = false;  // false when d = 0
};

/// lambda_s ~ -e/d.
inline SmallEstimate lambda_small(const SecularCoefficients& k) {
  if (k.d == 0.0) return {std::numeric_limits<double>::quiet_NaN(), false};
  return {-k.e / k.d, true};
}

/// Fully reduced form -xi_s^2 (n_sL + n_sR) xi_p^2 n_p / (Delta Omega_d^2).
inline double lambda_small_closed_form(const SchemeParams& p, std::size_t n_sl, std::size_t n_sr, std::size_t n_p) {
  return chi_from_params(p) * double(n_sl + n_sr) * double(n_p);
}

/// lambda_l ~ a = 2 delta + Delta. Only meaningful when this one root
/// dominates the trace.
inline double lambda_large(const SecularCoefficients& k) { return k.a; }

// ---------------------------------------------------------------------------
// Polynomial roots

struct PolynomialRoots {
  std::vector<double> roots;   // real parts, ascending
  double max_residual = 0.0;   // max |p(root)| / scale, scale = max|c_i/c_0| max(1,|root|)^n
  double max_imaginary = 0.0;  // max |Im root| / max(1, |root|)
  bool all_real = true;        // both of the above within 1e-8
};

namespace detail {

/// Horner evaluation of p and p' at complex z; coefficients highest first.
inline ExtendedComplex horner(const std::vector<Extended>& c, const ExtendedComplex& z, ExtendedComplex& dp) {
  ExtendedComplex p = c[0];
  dp = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    dp = dp * z + p;
    p = p * z + c[i];
  }
  return p;
}

inline Extended horner(const std::vector<Extended>& c, const Extended& x) {
  Extended p = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) p = p * x + c[i];
  return p;
}

/// Eigenvalues of the companion matrix of a monic polynomial, in double.
inline std::vector<std::complex<double>> companion_roots(const std::vector<double>& monic) {
  const std::size_t n = monic.size() - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t i = 1; i < n; ++i) comp(Eigen::Index(i), Eigen::Index(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) comp(Eigen::Index(i), Eigen::Index(n - 1)) = -monic[n - i];
  const Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

}  // namespace detail

/// All roots of sum_i coeffs[i] x^(n-i). Starting values are the companion
/// matrix eigenvalues; Aberth-Ehrlich iteration in extended complex
/// arithmetic then refines all roots together, which resolves roots many
/// orders of magnitude below the largest and keeps clustered roots apart.
inline PolynomialRoots polynomial_roots(const std::vector<Extended>& coeffs) {
  if (coeffs.size() < 2) throw std::invalid_argument("polynomial_roots: degree must be >= 1");
  if (coeffs[0] == 0) throw std::invalid_argument("polynomial_roots: leading coefficient is zero");
  const std::size_t n = coeffs.size() - 1;
  std::vector<Extended> monic(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) monic[i] = coeffs[i] / coeffs[0];

  std::vector<double> monic_d(monic.size());
  for (std::size_t i = 0; i < monic.size(); ++i) monic_d[i] = static_cast<double>(monic[i]);
  const auto start = detail::companion_roots(monic_d);
  std::vector<ExtendedComplex> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    // A small distinct imaginary offset lets coincident real starts separate.
    const double off = 1e-9 * (1.0 + std::abs(start[k])) * double(k + 1);
    z[k] = ExtendedComplex(Extended(start[k].real()), Extended(start[k].imag() + off));
  }
  const Extended tiny = std::numeric_limits<Extended>::min();
  for (int it = 0; it < 500; ++it) {
    Extended worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
      ExtendedComplex dp;
      const ExtendedComplex p = detail::horner(monic, z[k], dp);
      if (p == ExtendedComplex(0)) continue;
      ExtendedComplex s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) s += ExtendedComplex(1) / (z[k] - z[j]);
      const ExtendedComplex ratio = p / dp;
      const ExtendedComplex w = ratio / (ExtendedComplex(1) - ratio * s);
      z[k] -= w;
      const Extended rel = abs(w) / std::max(Extended(abs(z[k])), tiny);
      if (rel > worst) worst = rel;
    }
    if (worst < Extended(1e-30)) break;
  }

  PolynomialRoots out;
  double max_coeff = 0.0;
  for (const Extended& c : monic) max_coeff = std::max(max_coeff, static_cast<double>(abs(c)));
  for (const ExtendedComplex& r : z) {
    const Extended x = real(r);
    const double xd = static_cast<double>(x);
    const double scale = max_coeff * std::pow(std::max(1.0, std::abs(xd)), double(n));
    out.max_residual = std::max(out.max_residual, static_cast<double>(abs(detail::horner(monic, x))) / scale);
    out.max_imaginary = std::max(out.max_imaginary, static_cast<double>(abs(imag(r))) / std::max(1.0, std::abs(xd)));
    out.roots.push_back(xd);
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.all_real = out.max_residual <= 1e-8 && out.max_imaginary <= 1e-8;
  return out;
}

inline PolynomialRoots real_polynomial_roots(const std::vector<double>& coeffs) {
  return polynomial_roots(std::vector<Extended>(coeffs.begin(), coeffs.end()));
}

/// Roots of -lambda^5 + a lambda^4 + b lambda^3 + c lambda^2 + d lambda + e.
/// Coefficients rounded to double cannot separate roots closer than about
/// sqrt(machine epsilon) times their size; such pairs come back with a
/// nonzero max_imaginary. The extended overload avoids that rounding.
inline PolynomialRoots quintic_roots(const SecularCoefficients& k) {
  return real_polynomial_roots({-1.0, k.a, k.b, k.c, k.d, k.e});
}

inline PolynomialRoots quintic_roots(const std::array<Extended, 5>& k) {
  return polynomial_roots({Extended(-1), k[0], k[1], k[2], k[3], k[4]});
}

/// Roots of a lambda^4 + b lambda^3 + c lambda^2 + d lambda (one root is 0).
/// Diagnostic for the truncated polynomial; not used by lambda_small.
inline PolynomialRoots quartic_diagnostic_roots(const SecularCoefficients& k) {
  PolynomialRoots cubic = real_polynomial_roots({k.a, k.b, k.c, k.d});
  cubic.roots.push_back(0.0);
  std::sort(cubic.roots.begin(), cubic.roots.end());
  return cubic;
}

// ---------------------------------------------------------------------------
// Matching estimates to exact roots

/// Root with the smallest |root|; ties go to the root sharing the estimate's sign.
inline double match_smallest(const std::vector<double>& roots, double estimate) {
  double best = roots.front();
  for (double r : roots) {
    const double ar = std::abs(r), ab = std::abs(best);
    if (ar < ab || (ar == ab && std::signbit(r) == std::signbit(estimate))) best = r;
  }
  return best;
}

inline double match_largest(const std::vector<double>& roots, double estimate) {
  double best = roots.front();
  for (double r : roots) {
    const double ar = std::abs(r), ab = std::abs(best);
    if (ar > ab || (ar == ab && std::signbit(r) == std::signbit(estimate))) best = r;
  }
  return best;
}

struct ScanPoint {
  SchemeParams params;
  std::size_t n_sl = 1;
  std::size_t n_sr = 0;
  std::size_t n_p = 1;
};

struct EigenEstimate {
  ScanPoint point;
  double lambda_small = 0.0;         // -e/d
  double lambda_small_closed = 0.0;  // -xi_s^2 n_s xi_p^2 n_p / (Delta Omega^2)
  double lambda_large = 0.0;         // a
  std::array<double, 5> exact_roots{};
  double exact_small = 0.0;
  double exact_large = 0.0;
  double rel_err_small = 0.0;
  double rel_err_small_closed = 0.0;
  double rel_err_large = 0.0;
  double min_ratio = 0.0;
  bool in_regime = false;
};

inline EigenEstimate estimate_point(const ScanPoint& pt, double regime_threshold = 10.0) {
  EigenEstimate r;
  r.point = pt;
  const auto k = secular_coefficients(pt.params, pt.n_sl, pt.n_sr, pt.n_p);
  const auto block = build_pp_block_matrix(pt.params, pt.n_sl, pt.n_sr, pt.n_p);
  const auto roots = ExtendedEigensystem{Eigen::MatrixXd(block.matrix)}.values();
  std::copy(roots.begin(), roots.end(), r.exact_roots.begin());
  r.lambda_small = lambda_small(k).value;
  r.lambda_large = lambda_large(k);
  r.lambda_small_closed = (pt.params.delta_probe != 0.0 && pt.params.omega_d != 0.0)
                              ? lambda_small_closed_form(pt.params, pt.n_sl, pt.n_sr, pt.n_p)
                              : std::numeric_limits<double>::quiet_NaN();
  r.exact_small = match_smallest(roots, r.lambda_small);
  r.exact_large = match_largest(roots, r.lambda_large);
  r.rel_err_small = relative_error(r.lambda_small, r.exact_small);
  r.rel_err_small_closed = relative_error(r.lambda_small_closed, r.exact_small);
  r.rel_err_large = relative_error(r.lambda_large, r.exact_large);
  const auto rc = regime_check(pt.params, regime_threshold);
  r.min_ratio = rc.min_ratio();
  r.in_regime = rc.holds();
  return r;
}

struct RegimeScan {
  std::vector<EigenEstimate> rows;
  /// Errors of lambda_s never increase as the hierarchy ratio grows.
  bool small_error_monotone = true;
  bool large_error_monotone = true;
};

inline RegimeScan regime_scan(const std::vector<ScanPoint>& grid, double regime_threshold = 10.0) {
  if (grid.empty()) throw std::invalid_argument("regime_scan: empty grid");
  RegimeScan scan;
  for (const auto& pt : grid) scan.rows.push_back(estimate_point(pt, regime_threshold));
  std::vector<const EigenEstimate*> by_ratio;
  for (const auto& r : scan.rows) by_ratio.push_back(&r);
  std::stable_sort(by_ratio.begin(), by_ratio.end(),
                   [](const EigenEstimate* x, const EigenEstimate* y) { return x->min_ratio < y->min_ratio; });
  for (std::size_t i = 1; i < by_ratio.size(); ++i) {
    if (by_ratio[i]->min_ratio == by_ratio[i - 1]->min_ratio) continue;
    if (by_ratio[i]->rel_err_small > by_ratio[i - 1]->rel_err_small) scan.small_error_monotone = false;
    if (by_ratio[i]->rel_err_large > by_ratio[i - 1]->rel_err_large) scan.large_error_monotone = false;
  }
  return scan;
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_scan_csv(std::ostream& os, const RegimeScan& scan) {
  os << "delta_probe,delta_two,omega_d,xi_s,xi_p,n_sL,n_sR,n_p,min_ratio,"
        "lambda_s_est,lambda_s_exact,rel_err_s,lambda_l_est,lambda_l_exact,rel_err_l\n";
  for (const auto& r : scan.rows) {
    const auto& p = r.point.params;
    os << format_g17(p.delta_probe) << ',' << format_g17(p.delta_two) << ',' << format_g17(p.omega_d) << ','
       << format_g17(p.xi_s) << ',' << format_g17(p.xi_p) << ',' << r.point.n_sl << ',' << r.point.n_sr << ','
       << r.point.n_p << ',' << format_g17(r.min_ratio) << ',' << format_g17(r.lambda_small) << ','
       << format_g17(r.exact_small) << ',' << format_g17(r.rel_err_small) << ',' << format_g17(r.lambda_large)
       << ',' << format_g17(r.exact_large) << ',' << format_g17(r.rel_err_large) << '\n';
  }
}

}  // namespace ppqnd
