#include "qig/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qig/applications.hpp"
#include "qig/httesting.hpp"
#include "qig/io.hpp"
#include "qig/qdivergences.hpp"
#include "qig/qmetrics.hpp"

namespace qig::cli {

namespace {

using io::Json;

const std::map<std::string, std::string>& grammar() {
  static const std::map<std::string, std::string> g = {
      {"classical-div", "classical-div --kind {tv|kl|hellinger:<a>|renyi:<a>|f:<name>} --p FILE --q FILE"},
      {"quantum-div",
       "quantum-div --kind {trace|fidelity|affinity|relent|tsallis:<a>|renyi:<a>} --rho FILE --sigma FILE"},
      {"metric", "metric --g {qfi|rld|wyd:<a>|km} --family FILE --theta LIST"},
      {"chernoff", "chernoff [--classical] --rho/--p FILE --sigma/--q FILE"},
      {"ht", "ht --rho FILE --sigma FILE --n INT --priors a,b [--simulate TRIALS --seed INT]"},
      {"audit", "audit [--classical] --rho/--p FILE --sigma/--q FILE"},
      {"estimate-bound", "estimate-bound --family FILE --theta X --nu INT"},
      {"speed-limit", "speed-limit --trajectory FILE --g {qfi|wyd:0.5} --steps INT"},
      {"thermo", "thermo --hamiltonian FILE --beta X [--perturbation FILE] --lambda X [--final FILE]"},
  };
  return g;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size()) invalid(what + ": '" + text + "' is not a number");
    return x;
  } catch (const std::logic_error&) {
    invalid(what + ": '" + text + "' is not a number");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) invalid(what + ": empty list");
  return out;
}

// "name:<alpha>" -> alpha
std::optional<double> suffix_parameter(const std::string& kind, const std::string& prefix) {
  if (kind.rfind(prefix + ":", 0) != 0) return std::nullopt;
  return parse_number(kind.substr(prefix.size() + 1), "--kind " + prefix);
}

// A report, plus an optional table of equal-length columns for --csv.
struct Report {
  Json json;
  std::vector<std::pair<std::string, Json>> table;
};

std::string csv_cell(const Json& x) {
  if (x.is_number_float()) {
    const double v = x.get<double>();
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  if (x.is_string()) return x.get<std::string>();
  if (x.is_null()) return "";
  return x.dump();
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, Json>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else {
    rows.emplace_back(prefix, j);
  }
}

std::string to_csv(const Report& r) {
  std::ostringstream os;
  if (!r.table.empty()) {
    for (std::size_t c = 0; c < r.table.size(); ++c) os << (c ? "," : "") << r.table[c].first;
    os << "\n";
    const std::size_t rows = r.table.front().second.size();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < r.table.size(); ++c) os << (c ? "," : "") << csv_cell(r.table[c].second[i]);
      os << "\n";
    }
    return os.str();
  }
  std::vector<std::pair<std::string, Json>> rows;
  flatten(r.json, "", rows);
  os << "key,value\n";
  for (const auto& [k, v] : rows) os << k << "," << csv_cell(v) << "\n";
  return os.str();
}

Json interval_json(const Interval& i) { return Json::array({i.low, i.high}); }

Json checks_json(const InequalityReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass}});
  }
  return checks;
}

struct Options {
  bool csv = false;
  bool require_finite = false;
  std::string out_file;

  std::string kind, p, q, rho, sigma, g = "qfi", family, theta, priors = "0.5,0.5", trajectory;
  std::string hamiltonian, perturbation, final_state;
  bool classical = false;
  int n = 1;
  int nu = 1;
  int steps = 201;
  std::uint64_t simulate = 0;
  std::uint64_t seed = 1;
  double beta = 1.0;
  double lambda = 0.05;
};

ProbDist load_probdist(const std::string& path) { return io::parse_probdist(io::read_json_file(path)); }
DensityMatrix load_density(const std::string& path) { return io::parse_density(io::read_json_file(path)); }

void need(const std::string& value, const std::string& flag) {
  if (value.empty()) invalid(flag + " is required");
}

Report classical_div(const Options& o) {
  need(o.p, "--p");
  need(o.q, "--q");
  const ProbDist p = load_probdist(o.p);
  const ProbDist q = load_probdist(o.q);
  if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "--p and --q have different lengths");
  double value = 0.0;
  if (o.kind == "tv") {
    value = tv_distance(p, q);
  } else if (o.kind == "kl") {
    value = kl_divergence(p, q);
  } else if (auto a = suffix_parameter(o.kind, "hellinger")) {
    value = hellinger_divergence(p, q, *a);
  } else if (auto b = suffix_parameter(o.kind, "renyi")) {
    value = renyi_divergence(p, q, *b);
  } else if (o.kind.rfind("f:", 0) == 0) {
    value = f_divergence(p, q, generators::parse(o.kind.substr(2)));
  } else {
    invalid("--kind: unknown classical divergence '" + o.kind + "'");
  }
  return {Json{{"kind", o.kind}, {"value", value}}, {}};
}

Report quantum_div(const Options& o) {
  need(o.rho, "--rho");
  need(o.sigma, "--sigma");
  const DensityMatrix rho = load_density(o.rho);
  const DensityMatrix sigma = load_density(o.sigma);
  if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "--rho and --sigma differ in dimension");
  double value = 0.0;
  if (o.kind == "trace") {
    value = trace_distance(rho, sigma);
  } else if (o.kind == "fidelity") {
    value = fidelity(rho, sigma);
  } else if (o.kind == "affinity") {
    value = affinity(rho, sigma);
  } else if (o.kind == "relent") {
    value = q_relative_entropy(rho, sigma);
  } else if (o.kind == "bures") {
    value = bures_distance(rho, sigma);
  } else if (auto a = suffix_parameter(o.kind, "tsallis")) {
    value = tsallis(rho, sigma, *a);
  } else if (auto b = suffix_parameter(o.kind, "renyi")) {
    value = q_renyi(rho, sigma, *b);
  } else {
    invalid("--kind: unknown quantum divergence '" + o.kind + "'");
  }
  return {Json{{"kind", o.kind}, {"value", value}}, {}};
}

Report metric(const Options& o) {
  need(o.family, "--family");
  need(o.theta, "--theta");
  const GFunction g = gfunctions::parse(o.g);
  const io::FamilySpec spec = io::parse_family(io::read_json_file(o.family));
  const std::vector<double> theta = parse_list(o.theta, "--theta");
  const auto k = static_cast<std::size_t>(spec.family.parameters);
  if (theta.size() % k != 0) {
    invalid("--theta: list length must be a multiple of the parameter count " + std::to_string(k));
  }
  Report r;
  Json points = Json::array();
  std::vector<Json> columns(k + k * k, Json::array());
  Json divergent_column = Json::array();
  for (std::size_t start = 0; start < theta.size(); start += k) {
    Vector phi(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) phi(static_cast<Eigen::Index>(i)) = theta[start + i];
    const MetricResult m = g_metric(spec.family, phi, g);
    points.push_back({{"theta", io::to_json(phi)},
                      {"metric", io::to_json(m.matrix)},
                      {"classical_part", io::to_json(m.classical_part)},
                      {"quantum_part", io::to_json(m.quantum_part)},
                      {"divergent", m.divergent}});
    for (std::size_t i = 0; i < k; ++i) columns[i].push_back(phi(static_cast<Eigen::Index>(i)));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        columns[k + i * k + j].push_back(m.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
    divergent_column.push_back(m.divergent);
  }
  r.json = {{"g", g.name}, {"points", points}};
  for (std::size_t i = 0; i < k; ++i) r.table.emplace_back("theta_" + std::to_string(i), columns[i]);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      r.table.emplace_back("g_" + std::to_string(i) + std::to_string(j), columns[k + i * k + j]);
    }
  }
  r.table.emplace_back("divergent", divergent_column);
  return r;
}

Report chernoff_cmd(const Options& o) {
  ChernoffResult c;
  if (o.classical) {
    need(o.p, "--p");
    need(o.q, "--q");
    const ProbDist p = load_probdist(o.p);
    const ProbDist q = load_probdist(o.q);
    if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "--p and --q have different lengths");
    c = chernoff(p, q);
  } else {
    need(o.rho, "--rho");
    need(o.sigma, "--sigma");
    const DensityMatrix rho = load_density(o.rho);
    const DensityMatrix sigma = load_density(o.sigma);
    if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "--rho and --sigma differ in dimension");
    c = q_chernoff(rho, sigma);
  }
  return {Json{{"xi", c.bound}, {"alpha_star", c.alpha_star}, {"C", c.information + 0.0}}, {}};
}

Report ht(const Options& o) {
  need(o.rho, "--rho");
  need(o.sigma, "--sigma");
  if (o.n < 1) invalid("--n must be >= 1");
  const std::vector<double> priors = parse_list(o.priors, "--priors");
  if (priors.size() != 2) invalid("--priors takes exactly two numbers a,b");
  if (priors[0] < 0.0 || priors[1] < 0.0 || std::abs(priors[0] + priors[1] - 1.0) > 1e-9) {
    invalid("--priors must be non-negative and sum to 1");
  }
  const DensityMatrix rho = load_density(o.rho);
  const DensityMatrix sigma = load_density(o.sigma);
  if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "--rho and --sigma differ in dimension");
  const NCopyResult nc = ncopy_discrimination(rho, sigma, priors[0], priors[1], o.n);

  Report r;
  Json ns = Json::array(), errors = Json::array(), rates = Json::array(), bounds = Json::array();
  for (std::size_t i = 0; i < nc.n.size(); ++i) {
    ns.push_back(nc.n[i]);
    errors.push_back(nc.errors[i]);
    rates.push_back(nc.rates[i]);
    bounds.push_back(nc.chernoff_bounds[i]);
  }
  r.json = {{"priors", Json::array({priors[0], priors[1]})},
            {"n", ns},
            {"error", errors},
            {"rate", rates},
            {"chernoff_bound", bounds},
            {"bounds_hold", nc.bounds_hold},
            {"exponent", nc.exponent},
            {"chernoff_information", nc.chernoff_information}};
  r.table = {{"n", ns}, {"error", errors}, {"rate", rates}, {"chernoff_bound", bounds}};

  if (o.simulate > 0) {
    const DensityMatrix rn = tensor_power(rho, o.n);
    const DensityMatrix sn = tensor_power(sigma, o.n);
    const Povm povm = helstrom_povm(rn, sn, priors[0], priors[1]);
    const SimulationResult s = simulate_ht(rn, sn, povm, priors[0], priors[1], o.simulate, o.seed);
    r.json["simulation"] = {{"n", o.n},
                            {"trials", s.trials},
                            {"seed", o.seed},
                            {"rho_trials", s.rho_trials},
                            {"sigma_trials", s.sigma_trials},
                            {"type_one", s.type_one},
                            {"type_two", s.type_two},
                            {"type_one_ci", interval_json(s.type_one_ci)},
                            {"type_two_ci", interval_json(s.type_two_ci)},
                            {"average_error", s.average_error},
                            {"average_error_ci", interval_json(s.average_error_ci)},
                            {"analytic_error", s.analytic_error},
                            {"analytic_inside_ci", s.average_error_ci.contains(s.analytic_error)}};
  }
  return r;
}

Report audit(const Options& o) {
  InequalityReport report;
  if (o.classical) {
    need(o.p, "--p");
    need(o.q, "--q");
    const ProbDist p = load_probdist(o.p);
    const ProbDist q = load_probdist(o.q);
    if (p.size() != q.size()) throw Error(ErrorCode::LengthMismatch, "--p and --q have different lengths");
    report = audit_classical(p, q);
  } else {
    need(o.rho, "--rho");
    need(o.sigma, "--sigma");
    const DensityMatrix rho = load_density(o.rho);
    const DensityMatrix sigma = load_density(o.sigma);
    if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "--rho and --sigma differ in dimension");
    report = audit_quantum(rho, sigma);
  }
  Report r;
  r.json = {{"classical", o.classical}, {"all_pass", report.all_pass()}, {"checks", checks_json(report)}};
  Json names = Json::array(), lhs = Json::array(), rhs = Json::array(), slack = Json::array(),
       pass = Json::array();
  for (const auto& c : report.checks) {
    names.push_back(c.name);
    lhs.push_back(c.lhs);
    rhs.push_back(c.rhs);
    slack.push_back(c.slack);
    pass.push_back(c.pass);
  }
  r.table = {{"name", names}, {"lhs", lhs}, {"rhs", rhs}, {"slack", slack}, {"pass", pass}};
  return r;
}

Report estimate_bound(const Options& o) {
  need(o.family, "--family");
  need(o.theta, "--theta");
  const io::FamilySpec spec = io::parse_family(io::read_json_file(o.family));
  const double theta = parse_number(o.theta, "--theta");
  const CramerRaoResult cr = cramer_rao(spec.family, theta, o.nu);
  return {Json{{"theta", theta}, {"nu", o.nu}, {"qfi", cr.information}, {"bound", cr.bound}}, {}};
}

Report speed_limit_cmd(const Options& o) {
  need(o.trajectory, "--trajectory");
  const io::FamilySpec spec = io::parse_family(io::read_json_file(o.trajectory));
  if (!spec.tau) invalid("--trajectory: the file must give \"tau\"");
  const SpeedLimitResult s = speed_limit(spec.family, *spec.tau, gfunctions::parse(o.g), o.steps);
  Report r;
  Json times(s.times), speeds(s.speeds);
  r.json = {{"g", o.g},
            {"tau", s.tau},
            {"steps", o.steps},
            {"path_length", s.path_length},
            {"geodesic_length", s.geodesic_length},
            {"mean_speed", s.mean_speed},
            {"tau_min", s.tau_min},
            {"pass", s.pass},
            {"times", times},
            {"speeds", speeds}};
  r.table = {{"t", times}, {"speed", speeds}};
  return r;
}

Report thermo(const Options& o) {
  need(o.hamiltonian, "--hamiltonian");
  ThermalSpec spec;
  spec.hamiltonian = io::parse_hermitian(io::read_json_file(o.hamiltonian));
  spec.beta = o.beta;
  if (!o.perturbation.empty()) spec.perturbation = io::parse_hermitian(io::read_json_file(o.perturbation));
  validate(spec);
  const KmPerturbationResult k = km_perturbation(spec, o.lambda);
  const DensityMatrix final_state =
      o.final_state.empty() ? perturbed_thermal_state(spec, o.lambda) : load_density(o.final_state);
  const ClausiusReport c = clausius_report(spec, final_state);
  const Json residual_ratio = std::isnan(k.residual_ratio) ? Json(nullptr) : Json(k.residual_ratio);
  return {Json{{"beta", spec.beta},
               {"lambda", k.lambda},
               {"thermal_state", io::to_json(thermal_state(spec).matrix())},
               {"km_information", k.km_information},
               {"leading_deviation", k.leading_deviation},
               {"exact_deviation", k.exact_deviation},
               {"relative_entropy_lambda", k.relative_entropy},
               {"residual", k.residual},
               {"residual_half", k.residual_half},
               {"residual_ratio", residual_ratio},
               {"clausius",
                {{"final", o.final_state.empty() ? "perturbed" : "file"},
                 {"relative_entropy", c.relative_entropy},
                 {"beta_delta_energy", c.beta_delta_energy},
                 {"delta_entropy", c.delta_entropy},
                 {"free_energy_difference", c.free_energy_difference},
                 {"slack", c.slack},
                 {"identity_residual", c.identity_residual},
                 {"finite", c.finite},
                 {"clausius_holds", c.clausius_holds}}}},
          {}};
}

void print_error(std::ostream& out, const std::string& code, const std::string& message,
                 const std::string& usage = {}) {
  Json e = {{"code", code}, {"message", message}};
  if (!usage.empty()) e["usage"] = usage;
  out << io::dump(Json{{"error", e}}) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Quantum and classical information geometry toolkit", "qig"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--csv", o.csv, "Emit CSV tables instead of JSON");
  app.add_option("--out", o.out_file, "Write the report to FILE");
  app.add_flag("--require-finite", o.require_finite, "Exit 3 when the report contains +inf");

  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->footer(grammar().at(name));
    return s;
  };

  CLI::App* cdiv = sub("classical-div", "Classical distance or divergence");
  cdiv->add_option("--kind", o.kind)->required();
  cdiv->add_option("--p", o.p)->required();
  cdiv->add_option("--q", o.q)->required();

  CLI::App* qdiv = sub("quantum-div", "Quantum distance or divergence");
  qdiv->add_option("--kind", o.kind)->required();
  qdiv->add_option("--rho", o.rho)->required();
  qdiv->add_option("--sigma", o.sigma)->required();

  CLI::App* met = sub("metric", "g-metric of a state family");
  met->add_option("--g", o.g)->required();
  met->add_option("--family", o.family)->required();
  met->add_option("--theta", o.theta)->required();

  CLI::App* chf = sub("chernoff", "Chernoff bound, optimal alpha and information");
  chf->add_flag("--classical", o.classical);
  chf->add_option("--rho", o.rho);
  chf->add_option("--sigma", o.sigma);
  chf->add_option("--p", o.p);
  chf->add_option("--q", o.q);

  CLI::App* htc = sub("ht", "Exact n-copy discrimination, optional simulation");
  htc->add_option("--rho", o.rho)->required();
  htc->add_option("--sigma", o.sigma)->required();
  htc->add_option("--n", o.n)->required();
  htc->add_option("--priors", o.priors);
  htc->add_option("--simulate", o.simulate);
  htc->add_option("--seed", o.seed);

  CLI::App* aud = sub("audit", "Inequality audit");
  aud->add_flag("--classical", o.classical);
  aud->add_option("--rho", o.rho);
  aud->add_option("--sigma", o.sigma);
  aud->add_option("--p", o.p);
  aud->add_option("--q", o.q);

  CLI::App* est = sub("estimate-bound", "Quantum Cramer-Rao bound");
  est->add_option("--family", o.family)->required();
  est->add_option("--theta", o.theta)->required();
  est->add_option("--nu", o.nu)->required();

  CLI::App* spl = sub("speed-limit", "Metric speed limit of a trajectory");
  spl->add_option("--trajectory", o.trajectory)->required();
  spl->add_option("--g", o.g)->required();
  spl->add_option("--steps", o.steps);

  CLI::App* thm = sub("thermo", "Clausius report and KM perturbation");
  thm->add_option("--hamiltonian", o.hamiltonian)->required();
  thm->add_option("--beta", o.beta)->required();
  thm->add_option("--perturbation", o.perturbation);
  thm->add_option("--lambda", o.lambda);
  thm->add_option("--final", o.final_state);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string usage;
    for (const CLI::App* s : app.get_subcommands()) usage = grammar().at(s->get_name());
    if (usage.empty()) {
      for (const auto& [name, line] : grammar()) usage += (usage.empty() ? "" : " | ") + line;
    }
    print_error(out, "UsageError", e.what(), usage);
    return kExitInvalid;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Report report;
  try {
    if (name == "classical-div") report = classical_div(o);
    else if (name == "quantum-div") report = quantum_div(o);
    else if (name == "metric") report = metric(o);
    else if (name == "chernoff") report = chernoff_cmd(o);
    else if (name == "ht") report = ht(o);
    else if (name == "audit") report = audit(o);
    else if (name == "estimate-bound") report = estimate_bound(o);
    else if (name == "speed-limit") report = speed_limit_cmd(o);
    else report = thermo(o);
  } catch (const Error& e) {
    print_error(out, to_string(e.code()), e.what(), grammar().at(name));
    return kExitInvalid;
  } catch (const std::exception& e) {
    print_error(out, "InternalError", e.what());
    err << "qig: " << e.what() << "\n";
    return kExitInvalid;
  }

  const std::string text = o.csv ? to_csv(report) : io::dump(report.json) + "\n";
  if (o.out_file.empty()) {
    out << text;
  } else {
    std::ofstream file(o.out_file);
    if (!file) {
      print_error(out, "InvalidInput", "cannot write '" + o.out_file + "'");
      return kExitInvalid;
    }
    file << text;
  }
  if (o.require_finite && io::contains_infinity(report.json)) {
    err << "qig: report contains +inf and --require-finite is set\n";
    return kExitInfinite;
  }
  return kExitOk;
}

}  // namespace qig::cli
