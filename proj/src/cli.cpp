#include "qkb/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "qkb/bounds.hpp"
#include "qkb/topology.hpp"
#include "qkb/verifier.hpp"

namespace qkb::cli {
namespace {

[[noreturn]] void bad_instance(const std::string& what) {
  throw Error(ErrorKind::InvalidInstance, what);
}

std::vector<double> number_list(const Json& j, const char* what) {
  if (!j.is_array()) bad_instance(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

CMatrix parse_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) bad_instance("matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      bad_instance("matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      const Json& e = row[static_cast<std::size_t>(k)];
      if (e.is_array()) {
        if (e.size() != 2) bad_instance("complex entries are [re, im] pairs");
        m(i, k) = {number_from_json(e[0]), number_from_json(e[1])};
      } else {
        m(i, k) = number_from_json(e);
      }
    }
  }
  return m;
}

ThermalModel parse_thermal(const Json& t) {
  if (!t.is_object()) bad_instance("thermal descriptor must be an object");
  ThermalModel m;
  if (t.contains("preset")) {
    const auto name = t.at("preset").get<std::string>();
    if (name == "two_level") {
      m.levels = two_level_levels();
    } else if (name == "two_spin") {
      m.levels = two_spin_levels();
    } else if (name == "spin_bath") {
      if (!t.contains("M")) bad_instance("spin_bath preset needs M");
      m.levels = spin_bath_levels(t.at("M").get<unsigned>());
    } else {
      bad_instance("unknown thermal preset \"" + name + "\"");
    }
    if (!t.contains("lambda")) bad_instance("thermal preset needs lambda");
    m.beta = number_from_json(t.at("lambda"));
  } else {
    m.levels.energies = number_list(t.at("energies"), "energies");
    if (t.contains("multiplicities")) {
      m.levels.multiplicities = t.at("multiplicities").get<std::vector<std::uint64_t>>();
    } else {
      m.levels.multiplicities.assign(m.levels.energies.size(), 1);
    }
    if (t.contains("beta")) {
      m.beta = number_from_json(t.at("beta"));
    } else if (t.contains("temperature")) {
      const double temp = number_from_json(t.at("temperature"));
      if (std::isnan(temp) || temp < 0.0)
        throw Error(ErrorKind::NonPositiveTemperature, "temperature must be >= 0");
      m.beta = temp == 0.0 ? kZeroTemperature : 1.0 / temp;
    } else {
      bad_instance("thermal descriptor needs beta or temperature");
    }
  }
  if (std::isnan(m.beta) || m.beta < 0.0)
    throw Error(ErrorKind::NonPositiveTemperature, "beta must be >= 0");
  return m;
}

Party parse_party(const Json& j, const char* who) {
  if (!j.is_object()) bad_instance(std::string(who) + " must be an object");
  const int kinds = static_cast<int>(j.contains("spectrum")) + j.contains("thermal") +
                    j.contains("density_matrix");
  if (kinds != 1)
    bad_instance(std::string(who) + " needs exactly one of spectrum, thermal, density_matrix");
  if (j.contains("spectrum")) return {make_spectrum(number_list(j.at("spectrum"), "spectrum")), {}};
  if (j.contains("density_matrix"))
    return {make_spectrum(hermitian_eigenvalues(parse_matrix(j.at("density_matrix")))), {}};
  ThermalModel m = parse_thermal(j.at("thermal"));
  return {thermal_spectrum(m), std::move(m)};
}

ObservableSpectrum parse_observable(const Json& j) {
  if (j.is_string()) return observable_preset(j.get<std::string>());
  if (!j.is_object()) bad_instance("observable must be an object or a preset name");
  if (j.contains("preset")) return observable_preset(j.at("preset").get<std::string>());
  if (j.contains("eigenvalues"))
    return ObservableSpectrum::from_eigenvalues(number_list(j.at("eigenvalues"), "eigenvalues"));
  if (j.contains("matrix"))
    return ObservableSpectrum::from_eigenvalues(hermitian_eigenvalues(parse_matrix(j.at("matrix"))));
  return ObservableSpectrum(number_list(j.at("distinct"), "distinct"),
                            j.at("multiplicities").get<std::vector<std::size_t>>());
}

struct Options {
  std::string instance;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 0;
  std::size_t restarts = 32;
  double lambda_s = 1.0;
  unsigned spins = 10;
  std::string grid;
  std::string obs = "Pi1";
  double grad_tol = 1e-8;
  std::size_t max_iter = 5000;
  double step = 0.0;
  std::size_t haar_samples = 0;
  std::string trace_dir;
  bool with_verifier = false;
};

std::vector<double> parse_grid(const std::string& spec, double a, double b, std::size_t n) {
  if (!spec.empty()) {
    std::istringstream is(spec);
    char c1 = 0;
    char c2 = 0;
    long long count = 0;
    if (!(is >> a >> c1 >> b >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 ||
        !is.eof()) {
      throw Error(ErrorKind::InvalidArgument, "--lambda-c-grid expects a:b:n with n >= 1");
    }
    n = static_cast<std::size_t>(count);
  }
  return uniform_grid(a, b, n);
}

Json meta(const std::string& command, const Options& opt, int argc, const char* const* argv) {
  Json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = opt.seed;
  Json args = Json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  m["argv"] = args;
  return m;
}

void require_json(const Options& opt, const std::string& command) {
  if (opt.format != "json")
    throw Error(ErrorKind::InvalidArgument, command + " only supports --format json");
}

Json bounds_command(const Options& opt) {
  const Instance inst = load_instance(opt.instance);
  const auto& sys = inst.system.spectrum;
  const auto& ctrl = inst.controller.spectrum;
  Json j;
  j["bounds"] = to_json(compute_bounds(sys, ctrl, inst.observable));
  j["band_structure"] = to_json(band_structure(sys, ctrl, inst.observable));
  j["classes"] = {{"system", std::string(to_string(classify(sys)))},
                  {"controller", std::string(to_string(classify(ctrl)))}};
  j["hartley_entropy"] = {{"system", number_json(hartley_entropy(sys))},
                          {"controller", number_json(hartley_entropy(ctrl))}};
  j["min_pure_controller_dim"] = min_pure_controller_dim(sys, inst.observable);
  return j;
}

Json topology_command(const Options& opt) {
  const Instance inst = load_instance(opt.instance);
  const auto& sys = inst.system.spectrum;
  const auto& ctrl = inst.controller.spectrum;
  Json reports = Json::array();
  const StateClass sc = classify(sys);
  const StateClass cc = classify(ctrl);
  if (sc != StateClass::MixedDegenerate && cc != StateClass::MixedDegenerate)
    reports.push_back(to_json(topology_from_table(sc, cc, sys.dim(), ctrl.dim(), inst.observable)));
  if (sys.dim() * ctrl.dim() <= kMaxEnumerationDim) {
    TopologyReport brute;
    brute.sys_class = sc;
    brute.ctrl_class = cc;
    brute.source = TopologySource::BruteForce;
    brute.n_critical = Rational(count_critical_values_bruteforce(sys, ctrl, inst.observable));
    if (!reports.empty()) brute.d_max = topology_from_table(sc, cc, sys.dim(), ctrl.dim(), inst.observable).d_max;
    Json b = to_json(brute);
    if (reports.empty()) b.erase("d_max");
    reports.push_back(b);
  }
  Json j;
  j["reports"] = reports;
  return j;
}

Json thermal_check_command(const Options& opt) {
  const Instance inst = load_instance(opt.instance);
  if (!inst.system.thermal || !inst.controller.thermal)
    bad_instance("thermal-check needs thermal descriptors for system and controller");
  const ThermalModel& s = *inst.system.thermal;
  const ThermalModel& c = *inst.controller.thermal;
  const double t_s = s.beta == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / s.beta;
  const double t_c = c.beta == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / c.beta;
  const bool frequency = thermal_surpass(s.levels, t_s, c.levels, t_c, inst.observable);
  const SurpassResult spectral =
      surpass_ckb(inst.system.spectrum, inst.controller.spectrum, inst.observable);
  Json j;
  j["frequency_form"] = frequency;
  j["spectral_form"] = spectral.upper;
  j["agree"] = frequency == spectral.upper;
  j["bandwidth_thermal"] = number_json(thermal_bandwidth(c.levels, t_c));
  j["bandwidth_spectral"] =
      number_json(band_structure(inst.system.spectrum, inst.controller.spectrum, inst.observable).bandwidth);
  return j;
}

Json verify_command(const Options& opt, std::string* trace_note) {
  const Instance inst = load_instance(opt.instance);
  const CompositeSpectra comp = composite(inst.system.spectrum, inst.controller.spectrum, inst.observable);
  const HermitianPair hp = make_hermitian_pair(comp);
  CertifyConfig cfg;
  cfg.restarts = opt.restarts;
  cfg.seed = opt.seed;
  cfg.ascent.grad_tol = opt.grad_tol;
  cfg.ascent.max_iter = opt.max_iter;
  cfg.ascent.step = opt.step;
  cfg.haar_samples = opt.haar_samples;
  cfg.threads = threads_from_env();
  cfg.keep_traces = !opt.trace_dir.empty();
  const Certificate cert = certify_bounds(hp, cfg);

  auto rng = child_rng(opt.seed, std::numeric_limits<std::uint64_t>::max());
  const GradientCheck gc = gradient_check(hp, haar_unitary(static_cast<std::size_t>(hp.dim()), rng));

  if (cfg.keep_traces) {
    std::filesystem::create_directories(opt.trace_dir);
    for (std::size_t k = 0; k < cert.ascent_traces.size(); ++k) {
      std::ofstream(std::filesystem::path(opt.trace_dir) / ("ascent_" + std::to_string(k) + ".csv"))
          << trace_csv(cert.ascent_traces[k]);
      std::ofstream(std::filesystem::path(opt.trace_dir) / ("descent_" + std::to_string(k) + ".csv"))
          << trace_csv(cert.descent_traces[k]);
    }
    *trace_note = opt.trace_dir;
  }
  Json j;
  j["dim"] = hp.dim();
  j["certificate"] = to_json(cert);
  j["gradient_check"] = {{"analytic", number_json(gc.analytic)},
                         {"finite_difference", number_json(gc.finite_difference)},
                         {"relative_error", number_json(gc.relative_error)},
                         {"pass", gc.relative_error <= 1e-4}};
  return j;
}

Json oracle_command(const Options& opt, bool* all_pass) {
  const Instance inst = load_instance(opt.instance);
  const auto& sys = inst.system.spectrum;
  const auto& ctrl = inst.controller.spectrum;
  const auto& obs = inst.observable;
  const std::size_t n = sys.dim() * ctrl.dim();
  if (n > kMaxEnumerationDim) {
    std::ostringstream os;
    os << "composite dimension " << n << " exceeds " << kMaxEnumerationDim;
    throw Error(ErrorKind::TooLarge, os.str());
  }
  const CompositeSpectra comp = composite(sys, ctrl, obs);
  const std::vector<double> crit = critical_values(sys, ctrl, obs);
  const YieldRange kin = kinematic_bounds(comp);
  const YieldRange classical = ckb(sys, obs);
  const SurpassResult product = surpass_ckb(sys, ctrl, obs);
  const SurpassResult bandwidth = surpass_ckb_bandwidth(sys, ctrl, obs);
  const ReachResult reach = reach_qkb(sys, ctrl, obs);

  Json checks = Json::array();
  *all_pass = true;
  auto add = [&](const std::string& name, bool pass, Json detail) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
    *all_pass = *all_pass && pass;
  };

  add("extremes_are_enumerated_critical_values",
      std::abs(crit.back() - kin.max) <= 1e-12 && std::abs(crit.front() - kin.min) <= 1e-12,
      {{"enumerated_max", number_json(crit.back())}, {"enumerated_min", number_json(crit.front())}});
  add("surpass_upper", product.upper == (kin.max > classical.max + 1e-12),
      {{"predicate", product.upper}, {"kin_max", number_json(kin.max)}, {"ckb_max", number_json(classical.max)}});
  add("surpass_lower", product.lower == (kin.min < classical.min - 1e-12),
      {{"predicate", product.lower}, {"kin_min", number_json(kin.min)}, {"ckb_min", number_json(classical.min)}});
  add("surpass_forms_agree", product.upper == bandwidth.upper && product.lower == bandwidth.lower,
      {{"bandwidth_upper", bandwidth.upper}, {"bandwidth_lower", bandwidth.lower}});
  add("reach_upper", reach.upper == (std::abs(kin.max - obs.highest()) <= 1e-12),
      {{"predicate", reach.upper}});
  add("reach_lower", reach.lower == (std::abs(kin.min - obs.lowest()) <= 1e-12),
      {{"predicate", reach.lower}});
  const auto sigma0 = sigma0_permutation(sys, ctrl, comp);
  add("sigma0_equals_ckb", std::abs(critical_value(comp, sigma0) - classical.max) <= 1e-12,
      {{"j_sigma0", number_json(critical_value(comp, sigma0))}});

  const StateClass sc = classify(sys);
  const StateClass cc = classify(ctrl);
  Json table_json = nullptr;
  if (sc != StateClass::MixedDegenerate && cc != StateClass::MixedDegenerate) {
    const TopologyReport table = topology_from_table(sc, cc, sys.dim(), ctrl.dim(), obs);
    table_json = to_json(table);
    // The table counts submanifolds for generic spectra; coincident sums in
    // the instance would make the enumeration smaller, so only compare when
    // the closed form is in its domain.
    if (table.n_critical && table.formula_domain_ok && !table.n_critical_multiset) {
      add("table_count_matches_enumeration", *table.n_critical == Rational(crit.size()),
          {{"table", rational_json(*table.n_critical)}, {"enumerated", crit.size()}});
    }
  }

  Json j;
  j["dim"] = n;
  j["critical_value_count"] = crit.size();
  j["table"] = table_json;
  if (opt.with_verifier) {
    CertifyConfig cfg;
    cfg.restarts = opt.restarts;
    cfg.seed = opt.seed;
    cfg.threads = threads_from_env();
    const Certificate cert = certify_bounds(make_hermitian_pair(comp), cfg);
    add("verifier_certificate", cert.certificate, to_json(cert));
  }
  j["checks"] = checks;
  j["all_pass"] = *all_pass;
  return j;
}

void emit(const std::string& text, const Options& opt, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(opt.out);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open --out file " + opt.out);
  f << text;
}

}  // namespace

ObservableSpectrum observable_preset(std::string_view name) {
  if (name == "sigma_z") return sigma_z();
  if (name == "Pi0") return projector_pi0();
  if (name == "Pi1") return projector_pi1();
  bad_instance("unknown observable preset \"" + std::string(name) + "\"");
}

Instance parse_instance(const Json& j) {
  if (!j.is_object()) bad_instance("instance must be a JSON object");
  for (const char* key : {"system", "controller", "observable"})
    if (!j.contains(key)) bad_instance(std::string("missing \"") + key + "\"");
  return Instance{parse_party(j.at("system"), "system"),
                  parse_party(j.at("controller"), "controller"),
                  parse_observable(j.at("observable"))};
}

Instance load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) bad_instance("cannot read instance file " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    bad_instance(std::string("malformed JSON: ") + e.what());
  }
  return parse_instance(j);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinematic bounds on quantum control yields with quantum controllers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--out", opt.out, "Write the report to this file");
  };
  auto with_instance = [&](CLI::App* sub) {
    sub->add_option("--instance", opt.instance, "Instance JSON file")->required();
  };

  auto* bounds = app.add_subcommand("bounds", "Classical, kinematic and quantum bounds with predicates");
  auto* topo = app.add_subcommand("topology", "Landscape topology from the closed forms and enumeration");
  auto* tcheck = app.add_subcommand("thermal-check", "Frequency-form surpass condition for Gibbs states");
  auto* fig3 = app.add_subcommand("figure3", "Two-level plant with a spin-bath controller");
  auto* fig4 = app.add_subcommand("figure4", "Two-spin plant with a spin-bath controller");
  auto* verify = app.add_subcommand("verify", "Certify the bounds by optimization over U(N)");
  auto* oracle = app.add_subcommand("oracle", "Cross-check closed forms against exact enumeration");
  for (auto* sub : {bounds, topo, tcheck, fig3, fig4, verify, oracle}) common(sub);
  for (auto* sub : {bounds, topo, tcheck, verify, oracle}) with_instance(sub);
  for (auto* sub : {fig3, fig4}) {
    sub->add_option("--lambda-s", opt.lambda_s, "Plant parameter hbar omega_s / k_B T_s");
    sub->add_option("--M", opt.spins, "Number of controller spins")->check(CLI::Range(1u, 62u));
    sub->add_option("--lambda-c-grid", opt.grid, "Controller grid a:b:n");
  }
  fig4->add_option("--obs", opt.obs, "Target projector")->check(CLI::IsMember({"Pi0", "Pi1"}));
  for (auto* sub : {verify, oracle}) sub->add_option("--restarts", opt.restarts, "Haar restarts")->check(CLI::PositiveNumber);
  verify->add_option("--grad-tol", opt.grad_tol, "Gradient norm tolerance");
  verify->add_option("--max-iter", opt.max_iter, "Iteration cap per run");
  verify->add_option("--step", opt.step, "Initial step (0 = 0.1/||Theta||_F)");
  verify->add_option("--haar-samples", opt.haar_samples, "Extra Haar samples checked against the bounds");
  verify->add_option("--trace-dir", opt.trace_dir, "Write per-run iter,yield,grad_norm CSV files here");
  oracle->add_flag("--with-verifier", opt.with_verifier, "Also run the optimization certificate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();

  try {
    if (command == "figure3" || command == "figure4") {
      std::vector<CurvePoint> points;
      if (command == "figure3") {
        points = figure3_curve(opt.lambda_s, opt.spins, parse_grid(opt.grid, 0.0, 2.0, 400));
      } else {
        const Projector which = opt.obs == "Pi0" ? Projector::Pi0 : Projector::Pi1;
        points = figure4_curve(opt.lambda_s, opt.spins, which, parse_grid(opt.grid, 0.0, 1.0, 400));
      }
      if (opt.format == "csv") {
        emit(curve_csv(points), opt, out);
      } else {
        Json j;
        j["meta"] = meta(command, opt, argc, argv);
        j["points"] = to_json(std::span<const CurvePoint>(points));
        emit(j.dump(2) + "\n", opt, out);
      }
      return 0;
    }

    require_json(opt, command);
    Json body;
    std::string trace_note;
    bool all_pass = true;
    if (command == "bounds") body = bounds_command(opt);
    else if (command == "topology") body = topology_command(opt);
    else if (command == "thermal-check") body = thermal_check_command(opt);
    else if (command == "verify") body = verify_command(opt, &trace_note);
    else if (command == "oracle") body = oracle_command(opt, &all_pass);

    Json j;
    j["meta"] = meta(command, opt, argc, argv);
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    emit(j.dump(2) + "\n", opt, out);
    if (command == "verify" && !body["certificate"]["certificate"].get<bool>()) return 1;
    return all_pass ? 0 : 1;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "InvalidInstance: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qkb::cli
