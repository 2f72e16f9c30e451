// gpx: command-line front end (classify, audit, pickands, asymptotic, mc,
// validate). Exit status 0 on success, 1 on invalid input, 2 on numerical
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpx/gpx.hpp"

namespace fs = std::filesystem;
using namespace gpx;

namespace {

struct Options {
  std::string config_path;
  std::vector<double> u;
  std::size_t paths = 0;
  std::size_t grid = 0;
  std::uint64_t seed = 1;
  std::string domain = "both";
  double A = 4.0;
  std::size_t audit_grid = 256;
  std::string output;
  std::string format;

  // pickands
  double alpha = 1.0;
  std::vector<double> T_schedule;
  double grid_step = 0.0;
  std::string constant = "H";
  double b_plus = std::numeric_limits<double>::infinity();
  double b_minus = std::numeric_limits<double>::infinity();
  std::string estimator = "shift";
};

// Values from the config file, overridden by flags given on the command line.
struct Resolved {
  json config = json::object();
  std::optional<ProcessSpec> spec;
  std::vector<double> u;
  std::size_t paths = 0;
  std::size_t grid = 0;
  std::uint64_t seed = 1;
  Domain domain = Domain::both;
  double A = 4.0;
  ConstantPolicy policy;
  std::string output;
  std::string format;
};

std::vector<double> u_list(const FieldReader& r) {
  const json& v = r.raw("u");
  if (v.is_number()) return {v.get<double>()};
  return r.numbers("u");
}

ConstantPolicy policy_from_json(const FieldReader& r) {
  ConstantPolicy p;
  r.only({"paths", "seed", "H_schedule", "P_schedule", "grid_step", "prefer_closed_form"});
  p.n_paths = r.integer("paths", p.n_paths);
  p.seed = r.integer("seed", p.seed);
  if (r.has("H_schedule")) p.H_schedule = r.numbers("H_schedule");
  if (r.has("P_schedule")) p.P_schedule = r.numbers("P_schedule");
  p.grid_step = r.number("grid_step", p.grid_step);
  p.prefer_closed_form = r.boolean("prefer_closed_form", p.prefer_closed_form);
  return p;
}

json policy_json(const ConstantPolicy& p) {
  return json{{"paths", p.n_paths},         {"seed", p.seed},
              {"H_schedule", p.H_schedule}, {"P_schedule", p.P_schedule},
              {"grid_step", p.grid_step},   {"prefer_closed_form", p.prefer_closed_form}};
}

Resolved resolve(const std::string& command, const Options& o, const CLI::App& sub, bool need_spec) {
  Resolved r;
  if (!o.config_path.empty()) {
    const json doc = read_json_file(o.config_path);
    const FieldReader top(doc, "");
    if (doc.contains("variance")) {
      r.spec = spec_from_json(doc, "<root>");
    } else {
      top.only({"spec", "spec_file", "u", "paths", "grid", "seed", "domain", "A", "constants", "output"});
      if (top.has("spec")) {
        r.spec = spec_from_json(top.raw("spec"), "spec");
      } else if (top.has("spec_file")) {
        fs::path p = top.string("spec_file");
        if (p.is_relative()) p = fs::path(o.config_path).parent_path() / p;
        r.spec = spec_from_json(read_json_file(p.string()), p.string());
      }
      if (top.has("u")) r.u = u_list(top);
      r.paths = top.integer("paths", 0);
      r.grid = top.integer("grid", 0);
      r.seed = top.integer("seed", 1);
      if (top.has("domain")) {
        try {
          r.domain = domain_from_string(top.string("domain"));
        } catch (const SpecViolation& e) {
          top.fail("domain", e.what());
        }
      }
      r.A = top.number("A", 4.0);
      if (top.has("constants")) r.policy = policy_from_json(top.object("constants"));
      if (top.has("output")) {
        const FieldReader out = top.object("output");
        out.only({"path", "format"});
        r.output = out.string("path", "");
        r.format = out.string("format", "");
      }
    }
  }
  auto given = [&](const char* name) { return sub.get_option_no_throw(name) && sub.count(name) > 0; };
  if (given("--u")) r.u = o.u;
  if (given("--paths")) r.paths = o.paths;
  if (given("--grid")) r.grid = o.grid;
  if (given("--seed")) r.seed = o.seed;
  if (given("--domain")) r.domain = domain_from_string(o.domain);
  if (given("--A")) r.A = o.A;
  if (given("--output")) r.output = o.output;
  if (given("--format")) r.format = o.format;
  if (need_spec && !r.spec) throw SpecViolation("a process spec is required (--config with 'spec' or 'spec_file')");
  for (double u : r.u)
    if (!std::isfinite(u)) throw SpecViolation("u values must be finite");

  r.config = json{{"command", command}};
  if (r.spec) r.config["spec"] = to_json(*r.spec);
  if (!r.u.empty()) r.config["u"] = r.u;
  r.config["domain"] = to_string(r.domain);
  return r;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw SpecViolation("cannot write " + path);
    out << text;
  }
  fs::rename(tmp, target);
}

std::string format_or(const Resolved& r, const char* fallback) {
  const std::string f = r.format.empty() ? fallback : r.format;
  if (f != "json" && f != "csv") throw SpecViolation("format must be csv or json");
  return f;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run_classify(const Resolved& r) {
  const ProcessSpec& spec = *r.spec;
  json out{{"config", r.config}};
  if (spec.stationary()) {
    out["classification"] = {{"left", "S"}, {"right", "S"}, {"case", "stationary"}};
  } else {
    const CaseLabel label = classify(spec);
    out["classification"] = to_json(label);
    out["h1_plus"] = to_json(h1_limit(spec, Side::plus, 1.0));
    out["h1_minus"] = to_json(h1_limit(spec, Side::minus, -1.0));
    json B = json::array();
    for (double u : r.u) B.push_back(to_json(informative_interval(spec, u, r.A)));
    if (!r.u.empty()) out["informative_interval"] = B;
  }
  if (format_or(r, "json") != "json") throw SpecViolation("classify writes json only");
  emit(dump(out), r.output);
  return 0;
}

int run_audit(const Resolved& r, std::size_t grid) {
  if (grid < 16) throw SpecViolation("audit grid size must be >= 16");
  json cfg = r.config;
  cfg["grid_size"] = grid;
  const AuditReport rep = audit_assumptions(*r.spec, grid);
  if (format_or(r, "json") != "json") throw SpecViolation("audit writes json only");
  emit(dump(json{{"config", cfg}, {"audit", to_json(rep)}}), r.output);
  return 0;
}

int run_pickands(const Options& o, const CLI::App& sub) {
  PickandsOptions opt;
  if (o.estimator == "crude") opt.estimator = Estimator::crude;
  else if (o.estimator != "shift") throw SpecViolation("estimator must be shift or crude");
  const std::size_t paths = o.paths ? o.paths : 20000;
  const std::uint64_t seed = sub.count("--seed") ? o.seed : 1;
  const Domain domain = domain_from_string(o.domain);
  PickandsEstimate est;
  std::vector<double> sched = o.T_schedule;
  if (o.constant == "H") {
    if (sched.empty()) sched = {4.0, 8.0, 16.0};
    const double step = o.grid_step > 0.0 ? o.grid_step : default_grid_step(o.alpha, sched.back());
    est = estimate_H_alpha(o.alpha, sched, step, paths, seed, opt);
  } else if (o.constant == "P") {
    if (sched.empty()) sched = {2.0, 4.0, 8.0};
    const double step = o.grid_step > 0.0 ? o.grid_step : default_grid_step(o.alpha, 1.0);
    est = estimate_P_alpha(o.alpha, o.b_plus, o.b_minus, sched, step, paths, seed, domain, opt);
  } else {
    throw SpecViolation("constant must be H or P");
  }
  json cfg{{"command", "pickands"}, {"alpha", o.alpha},       {"constant", o.constant},
           {"T_schedule", sched},   {"grid_step", est.grid_step}, {"paths", paths},
           {"seed", seed},          {"estimator", o.estimator}};
  if (o.constant == "P") {
    cfg["b_plus"] = detail::number_or_null(o.b_plus);
    cfg["b_minus"] = detail::number_or_null(o.b_minus);
    cfg["domain"] = to_string(domain);
  }
  const std::string fmt = o.format.empty() ? "json" : o.format;
  if (fmt == "json") {
    json out{{"config", cfg}, {"estimate", to_json(est)}};
    if (o.constant == "H")
      if (auto v = known_H_alpha(o.alpha)) out["known_value"] = *v;
    if (o.constant == "P")
      if (auto v = known_P_alpha(o.alpha, o.b_plus, o.b_minus, domain)) out["known_value"] = *v;
    emit(dump(out), o.output);
  } else if (fmt == "csv") {
    std::ostringstream os;
    os << "# generated " << utc_timestamp() << "; config=" << cfg.dump() << "\n";
    os << "T,value,std_error,grid_step,paths\n";
    for (const auto& p : est.per_T)
      os << format_g17(p.T) << "," << format_g17(p.value) << "," << format_g17(p.std_error) << ","
         << format_g17(p.grid_step) << "," << p.paths << "\n";
    emit(os.str(), o.output);
  } else {
    throw SpecViolation("format must be csv or json");
  }
  return 0;
}

int run_asymptotic(Resolved& r) {
  if (r.u.empty()) throw SpecViolation("asymptotic needs at least one u (--u)");
  const ProcessSpec& spec = *r.spec;
  AsymptoticOptions aopt;
  aopt.A = r.A;
  const ConstantsBundle k = resolve_constants(spec, r.domain, r.policy);
  json cfg = r.config;
  cfg["A"] = r.A;
  cfg["constants"] = policy_json(r.policy);
  std::vector<AsymptoticResult> res;
  for (double u : r.u) res.push_back(evaluate(spec, u, k, r.domain, aopt));
  const std::string fmt = format_or(r, "json");
  if (fmt == "json") {
    json rows = json::array();
    for (const auto& a : res) rows.push_back(to_json(a));
    emit(dump(json{{"config", cfg}, {"constants", to_json(k)}, {"results", rows}}), r.output);
  } else {
    std::ostringstream os;
    os << "# generated " << utc_timestamp() << "; config=" << cfg.dump() << "\n";
    os << "u,formula,case,value,log_value\n";
    for (const auto& a : res)
      os << format_g17(a.u) << "," << to_string(a.formula) << "," << a.case_label << "," << format_g17(a.value)
         << "," << format_g17(a.log_value) << "\n";
    emit(os.str(), r.output);
  }
  return 0;
}

std::size_t mc_grid_points(const Resolved& r) {
  return r.grid ? r.grid : default_grid_points(r.spec->alpha());
}

int run_mc(Resolved& r) {
  if (r.u.empty()) throw SpecViolation("mc needs at least one u (--u)");
  const std::size_t paths = r.paths ? r.paths : 100000;
  const std::size_t grid = mc_grid_points(r);
  json cfg = r.config;
  cfg["paths"] = paths;
  cfg["grid"] = grid;
  cfg["seed"] = r.seed;
  const auto est = estimate_exceedance_schedule(*r.spec, r.u, grid, paths, r.seed, r.domain);
  const std::string fmt = format_or(r, "csv");
  if (fmt == "csv") {
    std::ostringstream os;
    write_csv(os, est, cfg);
    emit(os.str(), r.output);
  } else {
    json rows = json::array();
    for (const auto& e : est) rows.push_back(to_json(e));
    emit(dump(json{{"config", cfg}, {"estimates", rows}}), r.output);
  }
  for (const auto& e : est)
    for (const auto& w : e.warnings) std::cerr << "warning: u = " << e.u << ": " << w << "\n";
  return 0;
}

int run_validate(Resolved& r) {
  if (r.u.empty()) throw SpecViolation("validate needs a u schedule (--u)");
  McParams mc;
  mc.n_paths = r.paths ? r.paths : 100000;
  mc.grid_points = mc_grid_points(r);
  mc.seed = r.seed;
  mc.domain = r.domain;
  AsymptoticOptions aopt;
  aopt.A = r.A;
  const ConstantsBundle k = resolve_constants(*r.spec, r.domain, r.policy);
  json cfg = r.config;
  cfg["paths"] = mc.n_paths;
  cfg["grid"] = mc.grid_points;
  cfg["seed"] = mc.seed;
  cfg["A"] = r.A;
  cfg["constants"] = policy_json(r.policy);
  const ValidationTable table = validate(*r.spec, r.u, k, mc, aopt);
  const std::string fmt = format_or(r, "csv");
  if (fmt == "csv") {
    std::ostringstream os;
    write_csv(os, table, cfg);
    emit(os.str(), r.output);
  } else {
    emit(dump(json{{"config", cfg}, {"constants", to_json(k)}, {"validation", to_json(table)}}), r.output);
  }
  for (const auto& n : table.notes) std::cerr << "warning: " << n << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extremes of Gaussian processes with a unique variance maximum"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* s, bool spec, bool u) {
    if (spec) s->add_option("--config", o.config_path, "JSON config (spec inline, via spec_file, or a bare spec)");
    if (u) s->add_option("--u", o.u, "level(s) u")->delimiter(',');
    s->add_option("--output,-o", o.output, "output file (default: stdout)");
    s->add_option("--format", o.format, "csv or json");
  };

  auto* c_classify = app.add_subcommand("classify", "S/T/P classification of both sides");
  add_common(c_classify, true, true);
  c_classify->add_option("--A", o.A, "informative-set exponent");

  auto* c_audit = app.add_subcommand("audit", "numerical audit of the model assumptions");
  add_common(c_audit, true, false);
  c_audit->add_option("--grid-size", o.audit_grid, "audit grid size");

  auto* c_pick = app.add_subcommand("pickands", "Monte Carlo Pickands-type constants");
  add_common(c_pick, false, false);
  c_pick->add_option("--alpha", o.alpha, "index alpha in (0, 2]")->required();
  c_pick->add_option("--T-schedule", o.T_schedule, "horizons")->delimiter(',');
  c_pick->add_option("--grid-step", o.grid_step, "grid step (default depends on alpha)");
  c_pick->add_option("--paths", o.paths, "paths per horizon");
  c_pick->add_option("--seed", o.seed, "seed");
  c_pick->add_option("--constant", o.constant, "H or P");
  c_pick->add_option("--b-plus", o.b_plus, "drift coefficient on the right (P only)");
  c_pick->add_option("--b-minus", o.b_minus, "drift coefficient on the left (P only)");
  c_pick->add_option("--domain", o.domain, "both (P_alpha), plus or minus (P_alpha^+)");
  c_pick->add_option("--estimator", o.estimator, "shift or crude");

  auto* c_asym = app.add_subcommand("asymptotic", "asymptotic exceedance probabilities");
  add_common(c_asym, true, true);
  c_asym->add_option("--domain", o.domain, "both, plus or minus");
  c_asym->add_option("--A", o.A, "truncation exponent");

  auto* c_mc = app.add_subcommand("mc", "Monte Carlo exceedance probabilities");
  add_common(c_mc, true, true);
  c_mc->add_option("--paths", o.paths, "number of paths");
  c_mc->add_option("--grid", o.grid, "grid cells on the domain");
  c_mc->add_option("--seed", o.seed, "seed");
  c_mc->add_option("--domain", o.domain, "both, plus or minus");

  auto* c_val = app.add_subcommand("validate", "Monte Carlo against the asymptotic formula");
  add_common(c_val, true, true);
  c_val->add_option("--paths", o.paths, "number of paths");
  c_val->add_option("--grid", o.grid, "grid cells on the domain");
  c_val->add_option("--seed", o.seed, "seed");
  c_val->add_option("--domain", o.domain, "both, plus or minus");
  c_val->add_option("--A", o.A, "truncation exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_pick->parsed()) return run_pickands(o, *c_pick);
    if (c_classify->parsed()) {
      auto r = resolve("classify", o, *c_classify, true);
      return run_classify(r);
    }
    if (c_audit->parsed()) {
      auto r = resolve("audit", o, *c_audit, true);
      return run_audit(r, o.audit_grid);
    }
    if (c_asym->parsed()) {
      auto r = resolve("asymptotic", o, *c_asym, true);
      return run_asymptotic(r);
    }
    if (c_mc->parsed()) {
      auto r = resolve("mc", o, *c_mc, true);
      return run_mc(r);
    }
    if (c_val->parsed()) {
      auto r = resolve("validate", o, *c_val, true);
      return run_validate(r);
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const SpecViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const RangeError& e) {
    std::cerr << "range error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
