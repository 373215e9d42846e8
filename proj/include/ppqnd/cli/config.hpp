#pragma once

// Flat JSON experiment configuration. Complex values are [magnitude, phase]
// pairs and are kept in that form so that serialization round-trips exactly.

#include "ppqnd/schemes.hpp"

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppqnd::cli {

using json = nlohmann::json;

/// Configuration or usage problem; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what) : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct PolarPair {
  double magnitude = 0.0;
  double phase = 0.0;

  std::complex<double> value() const { return std::polar(magnitude, phase); }
  bool operator==(const PolarPair&) const = default;
};

struct QubitSpec {
  PolarPair c_l;
  PolarPair c_r;
  bool operator==(const QubitSpec&) const = default;
};

struct ExperimentConfig {
  // Scheme parameters.
  std::optional<double> delta_probe, delta_two, omega_d, xi_s, xi_p;
  std::optional<double> regime_threshold;
  // Photon numbers and probe amplitude.
  std::optional<std::uint64_t> n_sl, n_sr, n_p, n_s;
  std::optional<PolarPair> alpha;
  // Time: either chi and t, or chi_t; theta for discrimination.
  std::optional<double> chi, t, chi_t, theta, target_phase;
  std::optional<std::vector<double>> chi_t_values;
  // Polarization qubits.
  std::optional<QubitSpec> qubit;
  std::optional<std::vector<QubitSpec>> qubits;
  std::optional<std::uint64_t> random_qubits, random_unitaries;
  // Cutoff overrides.
  std::optional<std::uint64_t> cutoff_signal, cutoff_probe;
  // Monte Carlo.
  std::optional<std::uint64_t> trials, seed;
  std::optional<double> tolerance;
  std::optional<bool> sensitive;
  // Output.
  std::optional<std::string> out, format;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(key, "field '" + key + "' must be a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (v.is_number_unsigned()) return v.get<std::uint64_t>();
      if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return std::uint64_t(v.get<std::int64_t>());
      throw ConfigError(key, "field '" + key + "' must be a non-negative integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(key, "field '" + key + "' must be true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(key, "field '" + key + "' must be a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, PolarPair>) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(key, "field '" + key + "' must be a [magnitude, phase] pair");
      return PolarPair{v[0].get<double>(), v[1].get<double>()};
    } else if constexpr (std::is_same_v<T, QubitSpec>) {
      if (!v.is_array() || v.size() != 2)
        throw ConfigError(key, "field '" + key + "' must be [[|c_L|, arg c_L], [|c_R|, arg c_R]]");
      return QubitSpec{get_as<PolarPair>(v[0], key), get_as<PolarPair>(v[1], key)};
    } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<QubitSpec>>) {
      if (!v.is_array()) throw ConfigError(key, "field '" + key + "' must be a list");
      T out;
      for (const auto& e : v) out.push_back(get_as<typename T::value_type>(e, key));
      return out;
    }
  } catch (const json::exception& e) {
    throw ConfigError(key, "field '" + key + "': " + e.what());
  }
}

inline json to_json_value(double x) { return x; }
inline json to_json_value(std::uint64_t x) { return x; }
inline json to_json_value(bool x) { return x; }
inline json to_json_value(const std::string& x) { return x; }
inline json to_json_value(const PolarPair& x) { return json::array({x.magnitude, x.phase}); }
inline json to_json_value(const QubitSpec& x) { return json::array({to_json_value(x.c_l), to_json_value(x.c_r)}); }
template <class T>
json to_json_value(const std::vector<T>& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(to_json_value(x));
  return a;
}

// Applies f(name, member) to every field in a fixed order.
template <class C, class F>
void for_each_field(C& c, F&& f) {
  f("delta_probe", c.delta_probe);
  f("delta_two", c.delta_two);
  f("omega_d", c.omega_d);
  f("xi_s", c.xi_s);
  f("xi_p", c.xi_p);
  f("regime_threshold", c.regime_threshold);
  f("n_sl", c.n_sl);
  f("n_sr", c.n_sr);
  f("n_p", c.n_p);
  f("n_s", c.n_s);
  f("alpha", c.alpha);
  f("chi", c.chi);
  f("t", c.t);
  f("chi_t", c.chi_t);
  f("theta", c.theta);
  f("target_phase", c.target_phase);
  f("chi_t_values", c.chi_t_values);
  f("qubit", c.qubit);
  f("qubits", c.qubits);
  f("random_qubits", c.random_qubits);
  f("random_unitaries", c.random_unitaries);
  f("cutoff_signal", c.cutoff_signal);
  f("cutoff_probe", c.cutoff_probe);
  f("trials", c.trials);
  f("seed", c.seed);
  f("tolerance", c.tolerance);
  f("sensitive", c.sensitive);
  f("out", c.out);
  f("format", c.format);
}

}  // namespace detail

inline const std::vector<std::string>& scheme_fields() {
  static const std::vector<std::string> f{"delta_probe", "delta_two", "omega_d", "xi_s", "xi_p"};
  return f;
}

/// Scheme parameters, all five required; re-validated.
inline SchemeParams scheme_params(const ExperimentConfig& c) {
  const std::optional<double>* v[] = {&c.delta_probe, &c.delta_two, &c.omega_d, &c.xi_s, &c.xi_p};
  for (std::size_t k = 0; k < 5; ++k)
    if (!v[k]->has_value()) throw ConfigError(scheme_fields()[k], "missing required field '" + scheme_fields()[k] + "'");
  SchemeParams p{*c.delta_probe, *c.delta_two, *c.omega_d, *c.xi_s, *c.xi_p};
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError("scheme", e.what());
  }
  return p;
}

inline void validate(const ExperimentConfig& c) {
  const bool any_scheme = c.delta_probe || c.delta_two || c.omega_d || c.xi_s || c.xi_p;
  if (any_scheme) scheme_params(c);
  if (c.format && *c.format != "json" && *c.format != "csv")
    throw ConfigError("format", "field 'format' must be \"json\" or \"csv\"");
  if (c.tolerance && !(*c.tolerance > 0.0)) throw ConfigError("tolerance", "field 'tolerance' must be positive");
  if (c.alpha && c.alpha->magnitude < 0.0) throw ConfigError("alpha", "field 'alpha' has negative magnitude");
  auto check_qubit = [](const QubitSpec& q, const char* key) {
    const double n = q.c_l.magnitude * q.c_l.magnitude + q.c_r.magnitude * q.c_r.magnitude;
    if (q.c_l.magnitude < 0.0 || q.c_r.magnitude < 0.0 || std::abs(n - 1.0) > 1e-12)
      throw ConfigError(key, std::string("field '") + key + "' is not a normalized qubit");
  };
  if (c.qubit) check_qubit(*c.qubit, "qubit");
  if (c.qubits)
    for (const auto& q : *c.qubits) check_qubit(q, "qubits");
  if (c.chi_t && (c.chi || c.t)) throw ConfigError("chi_t", "give either 'chi_t' or 'chi' and 't', not both");
}

inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  ExperimentConfig c;
  std::size_t known = 0;
  detail::for_each_field(c, [&](const char* name, auto& member) {
    using T = typename std::decay_t<decltype(member)>::value_type;
    if (auto it = j.find(name); it != j.end()) {
      member = detail::get_as<T>(*it, name);
      ++known;
    }
  });
  if (known != j.size()) {
    ExperimentConfig probe;
    for (const auto& [key, value] : j.items()) {
      bool found = false;
      detail::for_each_field(probe, [&](const char* name, auto&) { found = found || key == name; });
      if (!found) throw ConfigError(key, "unknown field '" + key + "'");
    }
  }
  validate(c);
  return c;
}

/// Parses JSON text; syntax errors report line and column.
inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  return parse_config(j);
}

inline json to_json(const ExperimentConfig& c) {
  json j = json::object();
  detail::for_each_field(c, [&](const char* name, const auto& member) {
    if (member) j[name] = detail::to_json_value(*member);
  });
  return j;
}

}  // namespace ppqnd::cli
