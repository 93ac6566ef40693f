#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "cli_support.hpp"
#include "jspec/error.hpp"
#include "jspec/littlewood_paley.hpp"
#include "jspec/semigroups.hpp"
#include "jspec/spaces_verify.hpp"
#include "jspec/spectral_ops.hpp"
#include "jspec/version.hpp"
#include "selftest.hpp"

using namespace jspec;
using namespace jspec::cli;

namespace {

struct Options {
  // shared
  double alpha = 0.0, beta = 0.0;
  double gamma = 0.5;
  int k = 1, r = 1;
  std::string p = "const:2";
  int order = 2048;
  std::uint64_t seed = 20240611;
  std::string out;
  std::string config;
  int threads = 0;
  // eval / kernel
  std::string phi, lambda, heat, poisson, multiplier;
  int grid = 256;
  std::string kind = "heat";
  double t = 0.5;
  // coeffs
  std::string function = "gauss:1.5:0.3";
  int nmax = 32;
  // riesz / gfunc / norms
  int mode = -1;
  int degree = 16;
  bool adjoint = false;
  std::string path = "spectral";
  int per_profile = 20;
  // multiplier
  std::string name = "imaginary_power";
  double eps = 1e-3;
  int ell = 4;
  int s = 0;
  std::string signs;
  int mihlin = 0;
  // verify
  std::string theorem;
  std::string degrees = "8,16,32,64";
  int fine_order = 4096;
  int identity_degree = 16;
  // selftest
  bool quick = false;
};

void add_system(CLI::App* sub, Options& o) {
  sub->add_option("--alpha", o.alpha, "Jacobi alpha (>= -1/2)");
  sub->add_option("--beta", o.beta, "Jacobi beta (>= -1/2)");
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output path (CSV; a .json twin is written next to it)");
  sub->add_option("--config", o.config, "JSON file of option values; explicit flags override it");
  sub->add_option("--threads", o.threads, "worker threads (default: JS_THREADS or all cores)");
}

void add_seed(CLI::App* sub, Options& o) { sub->add_option("--seed", o.seed, "suite seed"); }

void add_quadrature(CLI::App* sub, Options& o) {
  sub->add_option("--order", o.order, "quadrature order")->check(CLI::PositiveNumber);
}

void add_suite(CLI::App* sub, Options& o) {
  sub->add_option("--mode", o.mode, "use the single mode phi_n instead of a random function");
  sub->add_option("--degree", o.degree, "degree of the random test function")->check(CLI::NonNegativeNumber);
  add_seed(sub, o);
}

RunMetadata metadata_for(const CLI::App* sub, const Options& o) {
  RunMetadata meta;
  meta.command = sub->get_name();
  meta.seed = o.seed;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "out" || name == "config" || name == "threads") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      value = opt->get_expected_min() == 0 ? "true" : (res.empty() ? "" : res.back());
    } else {
      value = opt->get_expected_min() == 0 ? "false" : opt->get_default_str();
    }
    meta.config[name] = value;
  }
  if (!o.theorem.empty()) meta.config["theorem"] = o.theorem;
  return meta;
}

std::string json_path(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return csv.substr(0, dot) + ".json";
  return csv + ".json";
}

void emit(const Table& t, const RunMetadata& meta, const Options& o) {
  if (o.out.empty()) {
    std::cout << table_csv(t, meta);
    return;
  }
  write_files({{o.out, table_csv(t, meta)}, {json_path(o.out), table_json(t, meta)}});
  for (const auto& n : t.notes) std::cout << n << "\n";
  std::cout << "wrote " << o.out << " and " << json_path(o.out) << "\n";
}

int as_index(double x, const std::string& what) {
  if (!(x >= 0.0) || x != std::floor(x) || x > 1e6) throw std::invalid_argument(what + " must be a nonnegative integer");
  return static_cast<int>(x);
}

std::vector<double> midpoint_grid(int n) {
  std::vector<double> th(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) th[i] = (i + 0.5) * std::numbers::pi / n;
  return th;
}

Table kernel_table(const KernelMatrix& m, const std::string& label) {
  Table t;
  t.header.push_back("theta");
  for (double th : m.thetas) t.header.push_back(fmt(th));
  for (std::size_t i = 0; i < m.thetas.size(); ++i) {
    std::vector<std::string> row{fmt(m.thetas[i])};
    for (std::size_t j = 0; j < m.thetas.size(); ++j) row.push_back(fmt(m.values(i, j)));
    t.add_row(std::move(row));
  }
  const double sym = m.symmetry_error();
  t.notes.push_back("kernel: " + label + " t=" + fmt(m.t));
  t.notes.push_back("symmetry_error: " + fmt(sym) + (sym <= 1e-12 ? " PASS" : " FAIL"));
  if (m.truncation > 0) t.notes.push_back("truncation: " + std::to_string(m.truncation));
  if (m.tail_estimate > 0.0)
    t.notes.push_back("tail_estimate: " + fmt(m.tail_estimate) + (m.tail_ok ? " PASS" : " FAIL"));
  return t;
}

KernelMatrix build_kernel(const std::string& kind, const JacobiParams& p, double t, const std::vector<double>& th) {
  if (!(t > 0.0)) throw DomainError("kernel time must be positive");
  if (kind == "heat") return heat_kernel(p, t, th);
  if (kind == "poisson") return poisson_kernel_series(p, t, th);
  if (kind == "poisson-sub") return poisson_kernel_subordinated(p, t, th);
  throw std::invalid_argument("unknown kernel kind '" + kind + "' (expected heat, poisson or poisson-sub)");
}

MultiplierArgs multiplier_args(const Options& o) {
  MultiplierArgs a;
  a.gamma = o.gamma;
  a.k = o.k;
  a.r = o.r;
  a.eps = o.eps;
  a.ell = o.ell;
  a.s = o.s;
  a.signs = parse_int_list(o.signs);
  for (int s : a.signs)
    if (s != 1 && s != -1) throw std::invalid_argument("--signs entries must be 1 or -1");
  return a;
}

Table multiplier_values(const MultiplierSpec& m, const JacobiParams& p, int nmax) {
  Table t;
  t.header = {"n", "lambda", "re", "im"};
  for (int n = 0; n <= nmax; ++n) {
    const double lam = p.eigenvalue(n);
    const cplx v = m(lam);
    t.add_row({std::to_string(n), fmt(lam), fmt(v.real()), fmt(v.imag())});
  }
  t.notes.push_back("multiplier: " + m.name);
  return t;
}

SpectralFunction test_function(const JacobiParams& p, const Options& o) {
  if (o.mode >= 0) return SpectralFunction::mode(p, o.mode);
  SuiteConfig cfg;
  cfg.seed = o.seed;
  cfg.per_profile = 1;
  cfg.single_mode_max = -1;
  return TestSuite::build(p, o.degree, cfg).entries.front().f;
}

std::function<double(double)> named_function(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](std::size_t i) { return keyed_value(parts.at(i), "x"); };
  const std::string head = parts.empty() ? "" : parts[0];
  if (head == "gauss" && parts.size() == 3) {
    const double c = num(1), w = num(2);
    return [c, w](double x) { return std::exp(-0.5 * (x - c) * (x - c) / (w * w)); };
  }
  if (head == "step" && parts.size() == 2) {
    const double c = num(1);
    return [c](double x) { return x < c ? 1.0 : 0.0; };
  }
  if (head == "abs" && parts.size() == 2) {
    const double c = num(1);
    return [c](double x) { return std::abs(x - c); };
  }
  if (head == "cospow" && parts.size() == 2) {
    const double m = num(1);
    return [m](double x) { return std::pow(std::cos(x), m); };
  }
  if (head == "one" && parts.size() == 1) return [](double) { return 1.0; };
  throw std::invalid_argument("unknown function '" + spec +
                              "' (expected gauss:C:W, step:C, abs:C, cospow:M or one)");
}

// --- subcommands ---------------------------------------------------------------------

int cmd_eval(const CLI::App* sub, const Options& o) {
  const JacobiParams p(o.alpha, o.beta);
  const int chosen = !o.phi.empty() + !o.lambda.empty() + !o.heat.empty() + !o.poisson.empty() + !o.multiplier.empty();
  if (chosen != 1)
    throw std::invalid_argument("eval needs exactly one of --phi, --lambda, --heat-kernel, --poisson-kernel, --multiplier");
  if (o.grid < 1) throw std::invalid_argument("--grid must be positive");
  const auto th = midpoint_grid(o.grid);
  Table t;
  if (!o.phi.empty()) {
    const int n = as_index(keyed_value(o.phi, "n"), "--phi n");
    t.header = {"theta", "phi"};
    for (double x : th) t.add_row({fmt(x), fmt(eval_phi(p, n, x))});
    t.notes.push_back("phi: n=" + std::to_string(n) + " lambda=" + fmt(p.eigenvalue(n)));
  } else if (!o.lambda.empty()) {
    const int n_max = as_index(keyed_value(o.lambda, "n"), "--lambda n");
    t.header = {"n", "lambda"};
    for (int n = 0; n <= n_max; ++n) t.add_row({std::to_string(n), fmt(p.eigenvalue(n))});
  } else if (!o.heat.empty()) {
    t = kernel_table(build_kernel("heat", p, keyed_value(o.heat, "t"), th), "heat");
  } else if (!o.poisson.empty()) {
    t = kernel_table(build_kernel("poisson", p, keyed_value(o.poisson, "t"), th), "poisson");
  } else {
    t = multiplier_values(multiplier_library(o.multiplier, p, multiplier_args(o)), p, o.nmax);
  }
  emit(t, metadata_for(sub, o), o);
  return kExitOk;
}

int cmd_coeffs(const CLI::App* sub, const Options& o) {
  const JacobiParams p(o.alpha, o.beta);
  const auto quad = build_quadrature(o.order);
  const auto f = GridFunction::sample_real(quad, named_function(o.function));
  const auto c = coefficients(f, p, o.nmax);
  Table t;
  t.header = {"n", "lambda", "re", "im"};
  double energy = 0.0;
  for (int n = 0; n <= o.nmax; ++n) {
    t.add_row({std::to_string(n), fmt(p.eigenvalue(n)), fmt(c.coeff(n).real()), fmt(c.coeff(n).imag())});
    energy += std::norm(c.coeff(n));
  }
  t.notes.push_back("function: " + o.function);
  t.notes.push_back("l2_norm_grid: " + fmt(f.l2_norm()));
  t.notes.push_back("l2_norm_coefficients: " + fmt(std::sqrt(energy)));
  emit(t, metadata_for(sub, o), o);
  return kExitOk;
}

int cmd_kernel(const CLI::App* sub, const Options& o) {
  const JacobiParams p(o.alpha, o.beta);
  if (o.grid < 1) throw std::invalid_argument("--grid must be positive");
  emit(kernel_table(build_kernel(o.kind, p, o.t, midpoint_grid(o.grid)), o.kind), metadata_for(sub, o), o);
  return kExitOk;
}

int cmd_riesz(const CLI::App* sub, const Options& o) {
  const JacobiParams base(o.alpha, o.beta);
  if (o.k < 1) throw std::invalid_argument("--k must be >= 1");
  if (!base.fractional_ok()) throw DomainError("Riesz transforms need alpha + beta != -1");
  const JacobiParams in_params = o.adjoint ? base.raised(o.k) : base;
  const auto f = test_function(in_params, o);
  const auto g = o.adjoint ? riesz_adjoint(f, o.k) : riesz(f, o.k);
  Table t;
  t.header = {"n", "re_in", "im_in", "re_out", "im_out"};
  for (int n = 0; n <= std::max(f.degree(), g.degree()); ++n)
    t.add_row({std::to_string(n), fmt(f.coeff(n).real()), fmt(f.coeff(n).imag()), fmt(g.coeff(n).real()),
               fmt(g.coeff(n).imag())});
  t.notes.push_back(std::string("transform: ") + (o.adjoint ? "R^{k,*}" : "R^k") + " k=" + std::to_string(o.k));
  t.notes.push_back("input_system: alpha=" + fmt(in_params.alpha()) + " beta=" + fmt(in_params.beta()));
  t.notes.push_back("output_system: alpha=" + fmt(g.params().alpha()) + " beta=" + fmt(g.params().beta()));
  if (!o.adjoint && o.k <= 3) {
    MultiplierArgs args;
    args.k = o.k;
    const auto back = apply_multiplier(riesz_adjoint(g, o.k), multiplier_library("eqT10", base, args));
    const auto expect = f.map([&](int n, cplx c) { return n < o.k ? cplx(0.0) : c; });
    const double err = back.max_coeff_diff(expect);
    t.notes.push_back("inversion_residual: " + fmt(err) + (err <= 1e-9 ? " PASS" : " FAIL"));
  }
  emit(t, metadata_for(sub, o), o);
  return kExitOk;
}

int cmd_multiplier(const CLI::App* sub, const Options& o) {
  const JacobiParams p(o.alpha, o.beta);
  const auto m = multiplier_library(o.name, p, multiplier_args(o));
  Table t;
  if (o.mihlin > 0) {
    t.header = {"ell", "sup_x_ell_derivative"};
    for (const auto& row : mihlin_check(m, o.mihlin)) t.add_row({std::to_string(row.ell), fmt(row.sup)});
    t.notes.push_back("multiplier: " + m.name);
    t.notes.push_back("mihlin_grid: [1e-4, 1e6] log-spaced, 400 points per decade");
  } else {
    t = multiplier_values(m, p, o.nmax);
  }
  emit(t, metadata_for(sub, o), o);
  return kExitOk;
}

int cmd_gfunc(const CLI::App* sub, const Options& o) {
  const JacobiParams p(o.alpha, o.beta);
  if (o.path != "spectral" && o.path != "quadrature")
    throw std::invalid_argument("--path must be spectral or quadrature");
  const auto quad = build_quadrature(o.order);
  const auto f = test_function(p, o);
  const auto g = o.k == 0 ? g_fractional(f, o.gamma, quad, std::nullopt,
                                         o.path == "spectral" ? FractionalPath::spectral : FractionalPath::quadrature)
                          : g_function(f, o.gamma, o.k, quad);
  Table t;
  t.header = {"theta", "g"};
  for (int i = 0; i < quad->size(); ++i) t.add_row({fmt(quad->nodes()[i]), fmt(g.values.values()[i].real())});
  t.notes.push_back(o.k == 0 ? "square_function: g^gamma gamma=" + fmt(o.gamma)
                             : "square_function: g^{gamma,k} gamma=" + fmt(o.gamma) + " k=" + std::to_string(o.k));
  t.notes.push_back("tail_bound: " + fmt(g.tail_bound) + (g.tail_ok ? " PASS" : " FAIL"));
  const double ratio = std::pow(g.values.l2_norm() / f.l2_norm(), 2);
  t.notes.push_back("l2_ratio_squared: " + fmt(ratio));
  if (o.k == 0) t.notes.push_back("isometry_constant: " + fmt(std::tgamma(2 * o.gamma) / std::pow(2.0, 2 * o.gamma)));
  emit(t, metadata_for(sub, o), o);
  return kExitOk;
}

int cmd_norms(const CLI::App* sub, const Options& o) {
  const JacobiParams p(o.alpha, o.beta);
  const auto expo = ExponentFunction::parse(o.p);
  const auto quad = build_quadrature(o.order);
  SuiteConfig cfg;
  cfg.seed = o.seed;
  cfg.per_profile = o.per_profile;
  const auto suite = TestSuite::build(p, o.degree, cfg);
  Table t;
  t.header = {"function_id", "Lp", "W_k", "H_gamma", "T_gamma_k", "F_gamma"};
  std::vector<std::vector<std::string>> rows(suite.entries.size());
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < suite.entries.size(); ++i) {
    try {
      const auto& e = suite.entries[i];
      rows[i] = {e.id,
                 fmt(luxemburg_norm(synthesize(e.f, quad), expo)),
                 fmt(sobolev_norm_W(e.f, o.k, expo, quad)),
                 fmt(potential_norm_H(e.f, o.gamma, expo, quad)),
                 fmt(tl_norm_T(e.f, o.gamma, o.k, expo, quad)),
                 fmt(tl_norm_F(e.f, o.gamma, expo, quad))};
    } catch (const std::exception& ex) {
#pragma omp critical
      if (error.empty()) error = ex.what();
    }
  }
  if (!error.empty()) throw DomainError(error);
  t.rows = std::move(rows);
  t.notes.push_back("exponent: " + expo.name());
  emit(t, metadata_for(sub, o), o);
  return kExitOk;
}

nlohmann::ordered_json window_json(const WindowCheck& w) {
  nlohmann::ordered_json j;
  j["ratio"] = w.theorem;
  for (const auto& [deg, win] : w.by_degree)
    j["by_degree"][std::to_string(deg)] = {{"r_min", win.r_min}, {"r_max", win.r_max}, {"spread", win.spread()}};
  j["worst_spread"] = w.worst_spread;
  j["degree_drift"] = w.degree_drift;
  j["order_drift"] = w.order_drift;
  j["policy"] = "spread < 100 and endpoint drift < 10% (policy threshold; no equivalence constants are estimated)";
  j["pass"] = w.pass;
  return j;
}

std::string window_line(const WindowCheck& w) {
  std::ostringstream os;
  os << w.theorem << " window: worst_spread=" << fmt(w.worst_spread) << " degree_drift=" << fmt(w.degree_drift)
     << " order_drift=" << fmt(w.order_drift) << (w.pass ? " PASS" : " BREACH");
  return os.str();
}

int cmd_verify(const CLI::App* sub, const Options& o) {
  const JacobiParams params(o.alpha, o.beta);
  const auto expo = ExponentFunction::parse(o.p);
  StabilityConfig cfg;
  cfg.degrees = parse_int_list(o.degrees);
  if (cfg.degrees.empty()) throw std::invalid_argument("--degrees must list at least one degree");
  cfg.order = o.order;
  cfg.fine_order = o.fine_order;
  cfg.compare_degree_hi = cfg.degrees.back();
  cfg.compare_degree_lo = cfg.degrees.size() > 1 ? cfg.degrees[cfg.degrees.size() - 2] : cfg.degrees.back();
  cfg.k1 = o.k;
  cfg.gamma2 = o.gamma;
  cfg.k2 = o.k;
  cfg.gamma3 = o.gamma;
  cfg.suite.seed = o.seed;
  cfg.suite.per_profile = o.per_profile;

  const std::string& th = o.theorem;
  if (th == "theorem1" && o.k < 1) throw std::invalid_argument("theorem1 needs --k >= 1");
  if (th == "theorem2" && !(o.gamma > 0.0 && o.gamma < o.k)) throw std::invalid_argument("theorem2 needs 0 < gamma < k");
  if ((th == "theorem3" || th == "theoremZ") && !(o.gamma > 0.0)) throw std::invalid_argument(th + " needs gamma > 0");
  if (th == "theoremZ" && !(o.gamma < o.r)) throw std::invalid_argument("theoremZ needs 0 < gamma < r");
  if ((th == "theoremZ" || th == "theorem2") && !params.fractional_ok())
    throw DomainError(th + " needs negative powers: alpha + beta != -1");

  const auto quad = build_quadrature(o.order);
  SuiteConfig id_cfg = cfg.suite;
  const auto id_suite = TestSuite::build(params, o.identity_degree, id_cfg);

  std::vector<NormReport> rows;
  std::vector<WindowCheck> windows;
  nlohmann::ordered_json identities = nlohmann::ordered_json::object();
  std::vector<std::string> lines;
  bool identities_ok = true;
  auto identity = [&](const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    identities_ok = identities_ok && ok;
    identities[name] = {{"value", value}, {"tolerance", tol}, {"pass", ok}};
    std::ostringstream os;
    os << name << ": " << fmt(value) << " (tol " << tol << ")" << (ok ? " PASS" : " FAIL");
    lines.push_back(os.str());
  };

  if (th == "theorem1") {
    if (params.fractional_ok()) {
      for (int k = 1; k <= std::min(o.k, 3); ++k) {
        MultiplierArgs args;
        args.k = k;
        const auto m = multiplier_library("eqT10", params, args);
        double worst = 0.0;
        for (const auto& e : id_suite.entries) {
          const auto back = apply_multiplier(riesz_adjoint(riesz(e.f, k), k), m);
          worst = std::max(worst, back.max_coeff_diff(e.f.map([&](int n, cplx c) { return n < k ? cplx(0.0) : c; })));
        }
        identity("inversion_k" + std::to_string(k), worst, 1e-9);
      }
    }
    windows.push_back(window_check("H/W", params, expo, cfg, &rows));
  } else if (th == "theorem2") {
    const auto rep = verify_theorem2(id_suite, o.gamma, o.k, expo, quad, true);
    identity("key_relation", rep.mechanism_error, 1e-6);
    windows.push_back(window_check("H/T", params, expo, cfg, &rows));
  } else if (th == "theorem3") {
    const auto rep = verify_theorem3(id_suite, o.gamma, expo, quad, 10, o.seed);
    identity("signed_windows", rep.w0_error, 1e-12);
    identity("reconstruction", rep.reconstruction_error, 1e-12);
    windows.push_back(window_check("H/F", params, expo, cfg, &rows));
  } else if (th == "theoremZ") {
    const auto rep = verify_theoremZ(id_suite, o.gamma, o.r, expo, quad);
    rows = rep.rows;
    identity("spectral_residual", rep.spectral_residual, 1e-12);
    identity("extrapolated_residual", rep.extrapolated_residual, 1e-4);
    lines.push_back("C_gamma_r: " + fmt(C_gamma_r(o.gamma, o.r)));
  } else if (th == "stability") {
    auto rep = stability_study(params, expo, cfg);
    rows = std::move(rep.rows);
    windows = std::move(rep.checks);
  } else {
    throw std::invalid_argument("unknown theorem '" + th + "' (expected theorem1, theorem2, theorem3, theoremZ, stability)");
  }

  bool windows_ok = true;
  nlohmann::ordered_json wj = nlohmann::ordered_json::array();
  for (const auto& w : windows) {
    windows_ok = windows_ok && w.pass;
    wj.push_back(window_json(w));
    lines.push_back(window_line(w));
  }

  const RunMetadata meta = metadata_for(sub, o);
  std::string csv = metadata_comment(meta);
  for (const auto& l : lines) csv += "# " + l + "\n";
  csv += reports_csv(rows);
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::parse(metadata_json(meta));
  j["identities"] = identities;
  j["windows"] = wj;
  j["rows"] = nlohmann::ordered_json::parse(reports_json(rows));
  const std::string prefix = o.out.empty() ? th : o.out;
  write_files({{prefix + ".csv", csv}, {prefix + ".json", j.dump(2) + "\n"}});

  for (const auto& l : lines) std::cout << l << "\n";
  std::cout << "wrote " << prefix << ".csv and " << prefix << ".json (" << rows.size() << " rows)\n";
  if (!identities_ok) {
    std::cerr << "identity failure: an exact identity exceeded its tolerance\n";
    return kExitIdentity;
  }
  if (!windows_ok) {
    std::cerr << "ratio-window breach: flagged for review (policy threshold)\n";
    return kExitWindow;
  }
  return kExitOk;
}

int cmd_selftest(const CLI::App* sub, const Options& o) {
  bool ok = true;
  const Table t = run_selftest(o.quick, o.seed, ok);
  const RunMetadata meta = metadata_for(sub, o);
  if (o.out.empty()) {
    std::cout << table_csv(t, meta);
  } else {
    write_files({{o.out, table_csv(t, meta)}, {json_path(o.out), table_json(t, meta)}});
    for (const auto& row : t.rows) std::cout << row[4] << "  " << row[0] << " [" << row[1] << "] " << row[2] << "\n";
  }
  return ok ? kExitOk : kExitIdentity;
}

void configure_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("JS_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        throw std::invalid_argument("JS_THREADS must be a positive integer");
      }
      if (threads <= 0) throw std::invalid_argument("JS_THREADS must be a positive integer");
    }
  }
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Jacobi spectral calculus: evaluation, operators and norm-equivalence harness"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  auto* eval = app.add_subcommand("eval", "evaluate phi_n, lambda_n, kernels or multipliers");
  add_system(eval, o);
  eval->add_option("--phi", o.phi, "n=N: phi_n on the grid");
  eval->add_option("--lambda", o.lambda, "n=N: eigenvalues lambda_0..lambda_N");
  eval->add_option("--heat-kernel", o.heat, "t=T: heat kernel matrix");
  eval->add_option("--poisson-kernel", o.poisson, "t=T: Poisson kernel matrix");
  eval->add_option("--multiplier", o.multiplier, "library name: m(lambda_n) table");
  eval->add_option("--grid", o.grid, "number of midpoint nodes on (0, pi)");
  eval->add_option("--nmax", o.nmax, "highest mode for tables");
  eval->add_option("--gamma", o.gamma, "multiplier gamma");
  eval->add_option("--k", o.k, "multiplier k");
  add_output(eval, o);

  auto* coeffs = app.add_subcommand("coeffs", "expansion coefficients of a named function");
  add_system(coeffs, o);
  add_quadrature(coeffs, o);
  coeffs->add_option("--function", o.function, "gauss:C:W, step:C, abs:C, cospow:M or one");
  coeffs->add_option("--nmax", o.nmax, "highest coefficient (order >= 16 nmax)");
  add_output(coeffs, o);

  auto* kernel = app.add_subcommand("kernel", "heat / Poisson kernel matrices");
  add_system(kernel, o);
  kernel->add_option("--kind", o.kind, "heat, poisson or poisson-sub");
  kernel->add_option("--t", o.t, "time");
  kernel->add_option("--grid", o.grid, "number of midpoint nodes on (0, pi)");
  add_output(kernel, o);

  auto* riesz_cmd = app.add_subcommand("riesz", "Riesz transform R^k or its adjoint in coefficient space");
  add_system(riesz_cmd, o);
  riesz_cmd->add_option("--k", o.k, "order");
  riesz_cmd->add_flag("--adjoint", o.adjoint, "apply R^{k,*} to a function of the raised system");
  add_suite(riesz_cmd, o);
  add_output(riesz_cmd, o);

  auto* mult = app.add_subcommand("multiplier", "multiplier library values or Mihlin table");
  add_system(mult, o);
  mult->add_option("--name", o.name, "eqT10, Y, Meps, Heps, meps_ell, M_ell, R_ell, Rfrac, imaginary_power, ...");
  mult->add_option("--gamma", o.gamma, "gamma");
  mult->add_option("--k", o.k, "k");
  mult->add_option("--r", o.r, "r");
  mult->add_option("--eps", o.eps, "epsilon");
  mult->add_option("--ell", o.ell, "ell");
  mult->add_option("--s", o.s, "residue class for the wide-bump sums");
  mult->add_option("--signs", o.signs, "comma-separated +-1 signs");
  mult->add_option("--nmax", o.nmax, "highest mode for the value table");
  mult->add_option("--mihlin", o.mihlin, "print sup |x^l m^(l)| for l <= L instead of values");
  add_output(mult, o);

  auto* gfunc = app.add_subcommand("gfunc", "Littlewood-Paley square functions on the quadrature grid");
  add_system(gfunc, o);
  gfunc->add_option("--gamma", o.gamma, "gamma");
  gfunc->add_option("--k", o.k, "time derivative order (0: fractional g^gamma)");
  gfunc->add_option("--path", o.path, "spectral or quadrature (fractional only)");
  add_quadrature(gfunc, o);
  add_suite(gfunc, o);
  add_output(gfunc, o);

  auto* norms = app.add_subcommand("norms", "W, H, T and F norms over a seeded suite");
  add_system(norms, o);
  norms->add_option("--gamma", o.gamma, "gamma");
  norms->add_option("--k", o.k, "k");
  norms->add_option("--p", o.p, "exponent: const:P, twovalued:P1:P2, sin, linear, logsmooth");
  norms->add_option("--degree", o.degree, "suite degree");
  norms->add_option("--per-profile", o.per_profile, "random functions per decay profile");
  add_quadrature(norms, o);
  add_seed(norms, o);
  add_output(norms, o);

  auto* verify = app.add_subcommand("verify", "theorem harness; exit 2 on identity failure, 3 on window breach");
  verify->add_option("theorem", o.theorem, "theorem1, theorem2, theorem3, theoremZ or stability")->required();
  add_system(verify, o);
  verify->add_option("--gamma", o.gamma, "gamma");
  verify->add_option("--k", o.k, "k");
  verify->add_option("--r", o.r, "r (theoremZ)");
  verify->add_option("--p", o.p, "exponent: const:P, twovalued:P1:P2, sin, linear, logsmooth");
  verify->add_option("--degrees", o.degrees, "comma-separated suite degrees");
  verify->add_option("--fine-order", o.fine_order, "second quadrature order (<= 0 skips)");
  verify->add_option("--identity-degree", o.identity_degree, "suite degree for the exact identities");
  verify->add_option("--per-profile", o.per_profile, "random functions per decay profile");
  add_quadrature(verify, o);
  add_seed(verify, o);
  verify->add_option("--out", o.out, "output prefix (default: the theorem name)");
  verify->add_option("--config", o.config, "JSON file of option values; explicit flags override it");
  verify->add_option("--threads", o.threads, "worker threads (default: JS_THREADS or all cores)");

  auto* selftest = app.add_subcommand("selftest", "invariant matrix");
  selftest->add_flag("--quick", o.quick, "reduced orders and suites");
  add_seed(selftest, o);
  add_output(selftest, o);

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    configure_threads(o.threads);
    if (eval->parsed()) return cmd_eval(eval, o);
    if (coeffs->parsed()) return cmd_coeffs(coeffs, o);
    if (kernel->parsed()) return cmd_kernel(kernel, o);
    if (riesz_cmd->parsed()) return cmd_riesz(riesz_cmd, o);
    if (mult->parsed()) return cmd_multiplier(mult, o);
    if (gfunc->parsed()) return cmd_gfunc(gfunc, o);
    if (norms->parsed()) return cmd_norms(norms, o);
    if (verify->parsed()) return cmd_verify(verify, o);
    if (selftest->parsed()) return cmd_selftest(selftest, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
