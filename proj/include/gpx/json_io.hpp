#pragma once

// JSON (de)serialization of process specs and run results. Infinite values
// are written as null.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpx/asymptotics.hpp"
#include "gpx/audit.hpp"
#include "gpx/classifier.hpp"
#include "gpx/errors.hpp"
#include "gpx/monte_carlo.hpp"
#include "gpx/pickands.hpp"
#include "gpx/process_model.hpp"

namespace gpx {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Reading

/// Parses text; syntax errors become SpecViolation with line and column.
inline json parse_json_text(const std::string& text, const std::string& source = "config") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SpecViolation(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecViolation(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

/// Typed access with the field path in every diagnostic.
class FieldReader {
 public:
  FieldReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  double number(const std::string& key) const {
    const json& v = need(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::uint64_t integer(const std::string& key) const {
    const json& v = need(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::string string(const std::string& key) const {
    const json& v = need(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) fail(key, "expected true or false");
    return j_.at(key).get<bool>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = need(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  FieldReader object(const std::string& key) const {
    const json& v = need(key);
    if (!v.is_object()) fail(key, "expected an object");
    return {v, field(key)};
  }

  const json& raw(const std::string& key) const { return need(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  /// Rejects keys outside `allowed` (catches typos in parameter names).
  void only(std::initializer_list<const char*> allowed) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail(it.key(), "unknown field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : field(key);
    throw SpecViolation("config field '" + where + "': " + msg);
  }

 private:
  const json& need(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "missing");
    return j_.at(key);
  }

  const json& j_;
  std::string path_;
};

namespace detail {

inline SideParams side_params(const FieldReader& r, VarianceForm form) {
  SideParams p;
  p.coeff = r.number("C", 1.0);
  p.exponent = r.number("beta");
  if (form == VarianceForm::power_log) p.log_power = r.number("k", 1.0);
  return p;
}

inline VarianceProfile variance_from_json(const FieldReader& r) {
  const std::string form = r.string("form");
  if (form == "constant") {
    r.only({"form"});
    return VarianceProfile::constant();
  }
  if (form == "tabulated") {
    r.only({"form", "t", "sigma2"});
    const auto t = r.numbers("t"), s2 = r.numbers("sigma2");
    try {
      return VarianceProfile::tabulated(t, s2);
    } catch (const SpecViolation& e) {
      r.fail("t", e.what());
    }
  }
  VarianceForm f;
  if (form == "power") f = VarianceForm::power;
  else if (form == "power_log") f = VarianceForm::power_log;
  else if (form == "exp_gentle") f = VarianceForm::exp_gentle;
  else r.fail("form", "unknown variance form '" + form + "'");
  VarianceProfile v;
  v.form = f;
  if (r.has("plus") || r.has("minus")) {
    r.only({"form", "plus", "minus"});
    for (const char* key : {"plus", "minus"}) r.object(key).only({"C", "beta", "k"});
    v.plus = side_params(r.object("plus"), f);
    v.minus = side_params(r.object("minus"), f);
  } else {
    r.only({"form", "C", "beta", "k"});
    v.plus = v.minus = side_params(r, f);
  }
  return v;
}

inline CorrelationProfile correlation_from_json(const FieldReader& r) {
  const std::string form = r.string("form");
  if (form == "tabulated") {
    r.only({"form", "lag", "rho", "alpha"});
    const auto lag = r.numbers("lag"), rho = r.numbers("rho");
    const double alpha = r.number("alpha");
    try {
      return CorrelationProfile::tabulated(lag, rho, alpha);
    } catch (const SpecViolation& e) {
      r.fail("lag", e.what());
    }
  }
  const double C = r.number("C", 1.0), alpha = r.number("alpha");
  if (form == "power_exp") {
    r.only({"form", "C", "alpha"});
    return CorrelationProfile::power_exp(C, alpha);
  }
  if (form == "fbm_type") {
    r.only({"form", "C", "alpha"});
    return CorrelationProfile::fbm_type(C, alpha);
  }
  if (form == "power_log_corrected") {
    r.only({"form", "C", "alpha", "k"});
    return CorrelationProfile::power_log_corrected(C, alpha, r.number("k"));
  }
  r.fail("form", "unknown correlation form '" + form + "'");
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json side_json(const SideParams& p, VarianceForm f) {
  json j{{"C", p.coeff}, {"beta", p.exponent}};
  if (f == VarianceForm::power_log) j["k"] = p.log_power;
  return j;
}

}  // namespace detail

/// ProcessSpec from its JSON object; validated.
inline ProcessSpec spec_from_json(const json& j, const std::string& path = "spec") {
  const FieldReader r(j, path);
  r.only({"name", "S", "variance", "correlation"});
  ProcessSpec spec;
  spec.name = r.string("name", "unnamed");
  spec.S = r.number("S");
  spec.variance = detail::variance_from_json(r.object("variance"));
  spec.correlation = detail::correlation_from_json(r.object("correlation"));
  try {
    validate(spec);
  } catch (const SpecViolation& e) {
    throw SpecViolation("config field '" + path + "': " + e.what());
  }
  return spec;
}

inline json to_json(const ProcessSpec& spec) {
  json v{{"form", to_string(spec.variance.form)}};
  const auto& var = spec.variance;
  switch (var.form) {
    case VarianceForm::constant: break;
    case VarianceForm::tabulated:
      v["t"] = var.table.xs();
      v["sigma2"] = var.table.ys();
      break;
    default:
      v["plus"] = detail::side_json(var.plus, var.form);
      v["minus"] = detail::side_json(var.minus, var.form);
  }
  const auto& cor = spec.correlation;
  json c{{"form", to_string(cor.form)}, {"alpha", cor.alpha}};
  if (cor.form == CorrelationForm::tabulated) {
    c["lag"] = cor.table.xs();
    c["rho"] = cor.table.ys();
  } else {
    c["C"] = cor.coeff;
  }
  if (cor.form == CorrelationForm::power_log_corrected) c["k"] = cor.log_power;
  return json{{"name", spec.name}, {"S", spec.S}, {"variance", v}, {"correlation", c}};
}

inline Domain domain_from_string(const std::string& s) {
  if (s == "both") return Domain::both;
  if (s == "plus") return Domain::plus;
  if (s == "minus") return Domain::minus;
  throw SpecViolation("unknown domain '" + s + "' (expected both, plus or minus)");
}

// ---------------------------------------------------------------------------
// Results

inline json to_json(const H1Limit& h) {
  return json{{"value", detail::number_or_null(h.value)},
              {"symbolic", h.symbolic},
              {"u_schedule", h.u_schedule},
              {"sequence", h.sequence},
              {"diagnostic", h.diagnostic}};
}

inline json to_json(const CaseLabel& c) {
  return json{{"left", to_string(c.left)},
              {"right", to_string(c.right)},
              {"case", c.combined()},
              {"b_minus", c.b_minus ? json(*c.b_minus) : json(nullptr)},
              {"b_plus", c.b_plus ? json(*c.b_plus) : json(nullptr)}};
}

inline json to_json(const InformativeInterval& b) {
  return json{{"T_minus", b.T_minus},     {"T_plus", b.T_plus},
              {"A", b.A},                 {"u", b.u},
              {"threshold", b.threshold}, {"clamped_minus", b.clamped_minus},
              {"clamped_plus", b.clamped_plus}};
}

inline json to_json(const AuditReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", detail::number_or_null(c.measured)},
                      {"detail", c.detail}});
  return json{{"all_passed", r.all_passed()}, {"grid_size", r.grid_size}, {"jitter_used", r.jitter_used},
              {"checks", checks}};
}

inline json to_json(const PickandsEstimate& e) {
  json per_T = json::array();
  for (const auto& p : e.per_T)
    per_T.push_back({{"T", p.T}, {"value", p.value}, {"std_error", p.std_error}, {"grid_step", p.grid_step},
                     {"paths", p.paths}});
  return json{{"kind", to_string(e.kind)},
              {"alpha", e.alpha},
              {"b_plus", detail::number_or_null(e.b_plus)},
              {"b_minus", detail::number_or_null(e.b_minus)},
              {"value", e.value},
              {"std_error", e.std_error},
              {"provenance", to_string(e.provenance)},
              {"estimator", to_string(e.estimator)},
              {"paths", e.paths},
              {"seed", e.seed},
              {"grid_step", e.grid_step},
              {"T_schedule", e.T_schedule},
              {"per_T", per_T},
              {"fit_slope", e.fit_slope},
              {"fit_residuals", e.fit_residuals},
              {"refinement_delta", e.refinement_delta},
              {"refinement_std_error", e.refinement_std_error},
              {"refinement_flagged", e.refinement_flagged},
              {"extrapolation_warning", e.extrapolation_warning},
              {"notes", e.notes}};
}

inline json to_json(const AsymptoticResult& r) {
  json ing = json::object();
  for (const auto& [k, v] : r.ingredients)
    ing[k] = {{"value", detail::number_or_null(v.value)}, {"provenance", to_string(v.provenance)}};
  return json{{"u", r.u},
              {"formula", to_string(r.formula)},
              {"case", r.case_label},
              {"domain", to_string(r.domain)},
              {"value", r.value},
              {"log_value", r.log_value},
              {"ingredients", ing},
              {"notes", r.notes}};
}

inline json to_json(const MCEstimate& e) {
  return json{{"u", e.u},
              {"p_hat", e.p_hat},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"hits", e.hits},
              {"n_paths", e.n_paths},
              {"grid_points", e.grid_points},
              {"seed", e.seed},
              {"sampler", to_string(e.sampler)},
              {"domain", to_string(e.domain)},
              {"p_hat_coarse", e.p_hat_coarse},
              {"refinement_delta", e.refinement_delta},
              {"warnings", e.warnings}};
}

inline json to_json(const ValidationTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"u", r.mc.u},
                    {"mc", to_json(r.mc)},
                    {"asymptotic", to_json(r.asymptotic)},
                    {"ratio", detail::number_or_null(r.ratio)}});
  return json{{"rows", rows},
              {"trend_toward_one", t.trend_toward_one},
              {"net_toward_one", t.net_toward_one},
              {"notes", t.notes}};
}

inline json to_json(const ConstantsBundle& k) {
  json j = json::object();
  if (k.H) j["H"] = to_json(*k.H);
  if (k.P) j["P"] = to_json(*k.P);
  if (k.P_plus) j["P_plus"] = to_json(*k.P_plus);
  if (k.P_minus) j["P_minus"] = to_json(*k.P_minus);
  return j;
}

}  // namespace gpx
