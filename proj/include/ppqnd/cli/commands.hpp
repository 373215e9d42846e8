#pragma once

// Subcommand drivers. Each takes the parsed config and returns a record whose
// status decides the exit code; config problems throw ConfigError.

#include "ppqnd/cli/config.hpp"
#include "ppqnd/cli/record.hpp"
#include "ppqnd/polarization.hpp"
#include "ppqnd/qnd_sim.hpp"
#include "ppqnd/secular.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace ppqnd::cli {

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> n{"secular",  "preserve",     "qnd",      "invariance",
                                          "backaction", "discriminate", "fullmodel"};
  return n;
}

namespace detail {

inline double tolerance_for(const ExperimentConfig& c, std::optional<double> env_tol, double fallback) {
  if (c.tolerance) return *c.tolerance;
  if (env_tol) return *env_tol;
  return fallback;
}

inline cplx alpha_or(const ExperimentConfig& c, double fallback) {
  return c.alpha ? c.alpha->value() : cplx(fallback, 0.0);
}

inline std::optional<std::size_t> opt_size(const std::optional<std::uint64_t>& v) {
  if (!v) return std::nullopt;
  return std::size_t(*v);
}

/// chi and t, from either (chi, t) or chi_t (then t = 1).
inline std::pair<double, double> chi_and_t(const ExperimentConfig& c) {
  if (c.chi_t) return {*c.chi_t, 1.0};
  if (c.chi && c.t) return {*c.chi, *c.t};
  if (c.chi) throw ConfigError("t", "missing required field 't'");
  if (c.t) throw ConfigError("chi", "missing required field 'chi'");
  throw ConfigError("chi_t", "missing required field 'chi_t' (or 'chi' and 't')");
}

inline PolarizationQubit make_qubit(const QubitSpec& q) {
  try {
    return PolarizationQubit(q.c_l.value(), q.c_r.value());
  } catch (const std::exception& e) {
    throw ConfigError("qubit", e.what());
  }
}

inline std::uint64_t seed_or_default(ExperimentConfig& c) {
  if (!c.seed) c.seed = 0;
  return *c.seed;
}

inline ordered array_of(const std::vector<double>& v) {
  ordered a = ordered::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace detail

inline ResultRecord cmd_secular(ExperimentConfig c, std::optional<double> env_tol) {
  ResultRecord r = start_record("secular", c);
  const SchemeParams p = scheme_params(c);
  ScanPoint pt;
  pt.params = p;
  if (c.n_s && !c.n_sl && !c.n_sr) {
    pt.n_sl = std::size_t(*c.n_s);
    pt.n_sr = 0;
  } else {
    pt.n_sl = std::size_t(c.n_sl.value_or(1));
    pt.n_sr = std::size_t(c.n_sr.value_or(0));
  }
  pt.n_p = std::size_t(c.n_p.value_or(1));
  if (pt.n_sl + pt.n_sr == 0) throw ConfigError("n_sl", "at least one signal photon is required");
  if (pt.n_p == 0) throw ConfigError("n_p", "at least one probe photon is required");
  const EigenEstimate e = estimate_point(pt, c.regime_threshold.value_or(10.0));

  const SecularCoefficients closed = secular_coefficients(p, pt.n_sl, pt.n_sr, pt.n_p);
  const SecularCoefficients exact = char_poly_coefficients(build_pp_block_matrix(p, pt.n_sl, pt.n_sr, pt.n_p).matrix);
  const SecularCoefficients fixed = closed + interference_terms(p, pt.n_sl, pt.n_sr);
  Table coeffs{"coefficients", {"name", "closed_form", "exact", "rel_err", "with_interference", "rel_err_with_interference"}, {}};
  const auto ca = closed.as_array(), ea = exact.as_array(), fa = fixed.as_array();
  double max_coeff_err = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    const double err = relative_error(ca[k], ea[k]);
    max_coeff_err = std::max(max_coeff_err, err);
    coeffs.rows.push_back({secular_names[k], ca[k], ea[k], err, fa[k], relative_error(fa[k], ea[k])});
  }
  r.tables.push_back(std::move(coeffs));

  r.tolerance = detail::tolerance_for(c, env_tol, 1e-3);
  r.add("n_sl", pt.n_sl);
  r.add("n_sr", pt.n_sr);
  r.add("n_p", pt.n_p);
  r.add("lambda_s_est", e.lambda_small);
  r.add("lambda_s_exact", e.exact_small);
  r.add("rel_err_s", e.rel_err_small);
  r.add("lambda_s_closed_form", e.lambda_small_closed);
  r.add("rel_err_s_closed_form", e.rel_err_small_closed);
  r.add("lambda_l_est", e.lambda_large);
  r.add("lambda_l_exact", e.exact_large);
  r.add("rel_err_l", e.rel_err_large);
  r.add("max_coefficient_rel_err", max_coeff_err);
  r.add("exact_roots", detail::array_of({e.exact_roots.begin(), e.exact_roots.end()}));
  r.add("min_ratio", e.min_ratio);
  r.add("in_regime", e.in_regime);
  r.status = e.rel_err_small <= r.tolerance ? Status::Pass : Status::Fail;
  return r;
}

inline ResultRecord cmd_preserve(ExperimentConfig c, std::optional<double> env_tol) {
  std::vector<PolarizationQubit> qubits;
  if (c.qubits) {
    if (c.qubits->empty()) throw ConfigError("qubits", "field 'qubits' is empty");
    for (const auto& q : *c.qubits) qubits.push_back(detail::make_qubit(q));
  } else if (c.qubit) {
    qubits.push_back(detail::make_qubit(*c.qubit));
  } else {
    const std::size_t n = std::size_t(c.random_qubits.value_or(20));
    if (n == 0) throw ConfigError("random_qubits", "field 'random_qubits' is zero");
    std::mt19937_64 rng(detail::seed_or_default(c));
    for (std::size_t k = 0; k < n; ++k) qubits.push_back(random_qubit(rng));
  }
  std::vector<double> chits;
  if (c.chi_t_values) {
    if (c.chi_t_values->empty()) throw ConfigError("chi_t_values", "field 'chi_t_values' is empty");
    chits = *c.chi_t_values;
  } else if (c.chi_t) {
    chits = {*c.chi_t};
  } else {
    chits = {0.5, 1.0, 2.0, std::numbers::pi};
  }
  const bool sensitive = c.sensitive.value_or(false);
  const cplx alpha = detail::alpha_or(c, 2.0);

  ResultRecord r = start_record("preserve", c);
  Table t{"sweep",
          {"qubit", "abs_c_l", "arg_c_l", "abs_c_r", "arg_c_r", "chi_t", "fidelity", "purity", "coherence",
           "envelope"},
          {}};
  double min_f = 1.0, min_purity = 1.0, max_loss = 0.0;
  for (std::size_t i = 0; i < qubits.size(); ++i)
    for (double chit : chits) {
      const DephasingResult d =
          polarization_dephasing(qubits[i], alpha, chit, 1.0, sensitive, detail::opt_size(c.cutoff_probe));
      min_f = std::min(min_f, d.fidelity);
      min_purity = std::min(min_purity, d.purity);
      max_loss = std::max(max_loss, d.truncation_loss);
      const auto& q = qubits[i];
      t.rows.push_back({i, std::abs(q.c_l), std::arg(q.c_l), std::abs(q.c_r), std::arg(q.c_r), chit, d.fidelity,
                        d.purity, d.coherence, d.analytic_envelope});
    }
  r.tables.push_back(std::move(t));
  r.tolerance = detail::tolerance_for(c, env_tol, 1e-8);
  r.add("hamiltonian", sensitive ? "sensitive" : "polarization_preserving");
  r.add("min_fidelity", min_f);
  r.add("min_purity", min_purity);
  r.add("max_truncation_loss", max_loss);
  r.status = sensitive ? Status::Info : (min_f >= 1.0 - r.tolerance ? Status::Pass : Status::Fail);
  return r;
}

inline ResultRecord cmd_qnd(ExperimentConfig c, std::optional<double> env_tol) {
  const auto [chi, t] = detail::chi_and_t(c);
  const std::size_t n_s = std::size_t(c.n_s.value_or(1));
  const cplx alpha = detail::alpha_or(c, 2.0);
  const QndEvolution e = evolve_qnd(n_s, alpha, chi, t, detail::opt_size(c.cutoff_probe));
  ResultRecord r = start_record("qnd", c);
  r.tolerance = detail::tolerance_for(c, env_tol, 1e-9);
  r.add("n_s", n_s);
  r.add("predicted_phase", wrap_phase(-double(n_s) * chi * t));
  r.add("phase_shift", e.readout.phase_shift);
  r.add("quadrature_mean", e.readout.quadrature_mean);
  r.add("quadrature_variance", e.readout.quadrature_variance);
  r.add("inferred", e.readout.inferred);
  r.add("inferred_n_s", e.readout.inferred_n_s);
  r.add("fidelity_minus", e.fidelity_minus);
  r.add("fidelity_plus", e.fidelity_plus);
  r.add("matching_sign", e.matching_sign);
  r.add("schmidt_second", e.schmidt_second);
  r.add("signal_distribution_change", e.signal_distribution_change);
  r.add("truncation_loss", e.truncation_loss);
  const bool ok = std::max(e.fidelity_minus, e.fidelity_plus) >= 1.0 - r.tolerance &&
                  e.signal_distribution_change <= 1e-12;
  r.status = ok ? Status::Pass : Status::Fail;
  return r;
}

inline ResultRecord cmd_invariance(ExperimentConfig c, std::optional<double> env_tol) {
  const std::size_t cs = std::size_t(c.cutoff_signal.value_or(4)), cp = std::size_t(c.cutoff_probe.value_or(4));
  if (cs < 2 || cp < 2) throw ConfigError("cutoff_signal", "cutoffs must be at least 2");
  const double chi = c.chi.value_or(1.0);
  const std::size_t n = std::size_t(c.random_unitaries.value_or(100));
  std::mt19937_64 rng(detail::seed_or_default(c));
  const Operator h = ppqnd_hamiltonian(chi, cs, cs, cp);
  const Operator control = sensitive_qnd_hamiltonian(chi, cs, cs, cp);
  constexpr std::pair<std::size_t, std::size_t> modes{0, 1};

  ResultRecord r = start_record("invariance", c);
  Table t{"unitaries", {"index", "kind", "deviation", "control_deviation"}, {}};
  double max_dev = 0.0, min_control = std::numeric_limits<double>::infinity();
  auto run = [&](std::size_t i, const char* kind, const PolUnitary& u) {
    const double d = check_invariance(h, u, modes), dc = check_invariance(control, u, modes);
    max_dev = std::max(max_dev, d);
    min_control = std::min(min_control, dc);
    t.rows.push_back({i, kind, d, dc});
  };
  run(0, "lr_to_hv", lr_to_hv());
  for (std::size_t k = 0; k < n; ++k) run(k + 1, "random", random_pol_unitary(rng));
  r.tables.push_back(std::move(t));
  r.tolerance = detail::tolerance_for(c, env_tol, 1e-10);
  r.add("max_deviation", max_dev);
  r.add("min_control_deviation", min_control);
  r.status = max_dev <= r.tolerance ? Status::Pass : Status::Fail;
  return r;
}

inline ResultRecord cmd_backaction(ExperimentConfig c, std::optional<double> env_tol) {
  const cplx alpha = detail::alpha_or(c, 2.0);
  const BackactionReport b = backaction_product(alpha, detail::opt_size(c.cutoff_probe), c.theta.value_or(1e-3));
  ResultRecord r = start_record("backaction", c);
  r.tolerance = detail::tolerance_for(c, env_tol, 1e-6);
  r.add("number_variance", b.number_variance);
  r.add("phase_variance", b.phase_variance);
  r.add("product", b.product);
  r.add("measured_number_variance", b.measured_number_variance);
  r.add("imposed_phase_variance", b.imposed_phase_variance);
  r.add("independent_product", b.independent_product);
  r.add("theta", b.theta);
  r.add("truncation_loss", b.truncation_loss);
  r.add("degenerate", b.degenerate);
  if (b.degenerate) {
    r.status = Status::Info;
  } else {
    r.status = std::abs(b.product - 0.25) <= r.tolerance ? Status::Pass : Status::Fail;
  }
  return r;
}

inline ResultRecord cmd_discriminate(ExperimentConfig c, std::optional<double> env_tol) {
  if (!c.seed) throw ConfigError("seed", "missing required field 'seed' (or --seed)");
  double theta = 0.0;
  if (c.theta) {
    theta = *c.theta;
  } else {
    const auto [chi, t] = detail::chi_and_t(c);
    theta = chi * t;
  }
  const double alpha = std::abs(detail::alpha_or(c, 2.0));
  const std::size_t trials = std::size_t(c.trials.value_or(10000));
  if (trials == 0) throw ConfigError("trials", "field 'trials' must be positive");
  const DiscriminationResult d = discrimination_error(alpha, theta, trials, *c.seed);
  ResultRecord r = start_record("discriminate", c);
  // Monte Carlo agreement is judged in standard errors.
  r.tolerance = detail::tolerance_for(c, env_tol, 5.0);
  const double z = std::abs(d.monte_carlo - d.analytic) / d.standard_error;
  r.add("alpha", alpha);
  r.add("theta", theta);
  r.add("trials", d.trials);
  r.add("seed", d.seed);
  r.add("separation", d.separation);
  r.add("monte_carlo", d.monte_carlo);
  r.add("standard_error", d.standard_error);
  r.add("analytic", d.analytic);
  r.add("z_score", z);
  r.status = z <= r.tolerance ? Status::Pass : Status::Fail;
  return r;
}

inline ResultRecord cmd_fullmodel(ExperimentConfig c, std::optional<double> env_tol) {
  const SchemeParams p = scheme_params(c);
  const PolarizationQubit q = c.qubit ? detail::make_qubit(*c.qubit) : PolarizationQubit::left();
  ProbeInput probe = FockProbe{std::size_t(c.n_p.value_or(1))};
  double mean_np = double(c.n_p.value_or(1));
  if (c.alpha && !c.n_p) {
    probe = CoherentProbe{c.alpha->value()};
    mean_np = c.alpha->magnitude * c.alpha->magnitude;
  }
  const double chi = chi_from_params(p);
  double t = 0.0;
  if (c.t) {
    t = *c.t;
  } else {
    if (chi == 0.0 || mean_np == 0.0) throw ConfigError("t", "missing required field 't' (chi or probe is zero)");
    t = c.target_phase.value_or(0.1) / (std::abs(chi) * mean_np);
  }
  FullModelCutoffs cut;
  cut.signal_left = cut.signal_right = std::size_t(c.cutoff_signal.value_or(2));
  cut.probe = detail::opt_size(c.cutoff_probe);
  const FullVsEffective f = full_vs_effective(p, q, probe, t, cut);
  ResultRecord r = start_record("fullmodel", c);
  r.tolerance = detail::tolerance_for(c, env_tol, 0.05);
  r.add("chi", f.chi);
  r.add("t", f.t);
  r.add("measured_phase", f.measured_phase);
  r.add("predicted_phase", f.predicted_phase);
  r.add("relative_error", f.relative_error);
  r.add("leakage", f.leakage);
  r.add("signal_fidelity", f.signal_fidelity);
  r.add("min_ratio", f.min_ratio);
  r.add("in_regime", f.in_regime);
  r.status = (f.relative_error <= r.tolerance && f.leakage < 1e-3) ? Status::Pass : Status::Fail;
  return r;
}

/// Dispatches by name. The returned record carries the effective config.
inline ResultRecord run_command(const std::string& name, const ExperimentConfig& c, std::optional<double> env_tol) {
  using Fn = std::function<ResultRecord(ExperimentConfig, std::optional<double>)>;
  static const std::map<std::string, Fn> table{
      {"secular", cmd_secular},       {"preserve", cmd_preserve},         {"qnd", cmd_qnd},
      {"invariance", cmd_invariance}, {"backaction", cmd_backaction},     {"discriminate", cmd_discriminate},
      {"fullmodel", cmd_fullmodel}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("", "unknown command '" + name + "'");
  return it->second(c, env_tol);
}

/// Parses PPQND_TOL-style text; throws ConfigError when it is not a positive number.
inline double parse_tolerance(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) throw ConfigError("PPQND_TOL", "PPQND_TOL must be a positive number");
  return v;
}

}  // namespace ppqnd::cli
