#include "jspec/spaces_verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jspec/error.hpp"

namespace jspec {

namespace {

constexpr double kRatioFloor = 1e-12;

// Uniform on [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double lux(const SpectralFunction& f, const ExponentFunction& p, const QuadratureRef& quad) {
  if (f.is_zero()) return 0.0;
  return luxemburg_norm(synthesize(f, quad), p);
}

// Evaluate fn over the suite in parallel, one slot per entry; the first exception is rethrown.
template <class Fn>
void for_each_entry(const TestSuite& suite, Fn&& fn) {
  const int n = static_cast<int>(suite.entries.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i, suite.entries[i]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

NormReport make_row(const std::string& theorem, const TestSuite& suite, const SuiteEntry& e, const ExponentFunction& p,
                    const QuadratureRef& quad, double gamma, int k) {
  NormReport r;
  r.theorem = theorem;
  r.function_id = e.id;
  r.alpha = suite.params.alpha();
  r.beta = suite.params.beta();
  r.gamma = gamma;
  r.k = k;
  r.p_spec = p.name();
  r.degree = suite.degree;
  r.order = quad->order();
  return r;
}

void set_ratio(NormReport& r, const std::string& num, const std::string& den) {
  const double a = r.norms.at(num);
  const double b = r.norms.at(den);
  r.has_ratio = a > kRatioFloor && b > kRatioFloor;
  r.ratio = r.has_ratio ? a / b : 0.0;
}

double coefficient_residual(const SpectralFunction& a, const SpectralFunction& b) {
  const double scale = b.l2_norm();
  return scale > 0.0 ? (a - b).l2_norm() / scale : (a - b).l2_norm();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// --- norms ---------------------------------------------------------------------------

double sobolev_norm_W(const SpectralFunction& f, int k, const ExponentFunction& p, const QuadratureRef& quad) {
  if (k < 0) throw DomainError("Sobolev order must be nonnegative");
  double acc = lux(f, p, quad);
  for (int l = 1; l <= k; ++l) acc += lux(apply_ladder(f, l), p, quad);
  return acc;
}

double potential_norm_H(const SpectralFunction& f, double gamma, const ExponentFunction& p, const QuadratureRef& quad) {
  if (!f.params().fractional_ok()) throw DomainError("potential norm needs alpha + beta != -1");
  return lux(pos_power(f, gamma), p, quad);
}

double tl_norm_T(const SpectralFunction& f, double gamma, int k, const ExponentFunction& p, const QuadratureRef& quad) {
  const auto g = g_function(f, gamma, k, quad);
  return lux(f, p, quad) + (f.is_zero() ? 0.0 : luxemburg_norm(g.values, p));
}

double tl_norm_F(const SpectralFunction& f, double gamma, const ExponentFunction& p, const QuadratureRef& quad,
                 int j_max, const BumpFunction& bump) {
  if (f.is_zero()) return 0.0;
  const int j = j_max < 0 ? tl_min_j_max(f) : j_max;
  return luxemburg_norm(tl_quadratic(f, gamma, j, quad, bump), p);
}

// --- suites --------------------------------------------------------------------------

TestSuite TestSuite::build(const JacobiParams& params, int degree, const SuiteConfig& config) {
  if (!params.fractional_ok()) throw DomainError("suites need alpha + beta != -1");
  if (degree < 0) throw DomainError("degree must be nonnegative");
  TestSuite s{params, degree, config.seed, {}};
  // one stream per (degree, profile) so suites at different degrees are independent but reproducible
  for (std::size_t d = 0; d < config.decays.size(); ++d) {
    std::mt19937_64 rng(config.seed ^ (static_cast<std::uint64_t>(degree) << 20) ^ (d << 8));
    for (int i = 0; i < config.per_profile; ++i) {
      std::vector<cplx> c(degree + 1);
      for (int n = 0; n <= degree; ++n) {
        const double re = 2.0 * uniform01(rng) - 1.0;
        const double im = 2.0 * uniform01(rng) - 1.0;
        c[n] = cplx(re, im) * std::pow(params.eigenvalue(n), -config.decays[d]);
      }
      std::ostringstream id;
      id << "rand-d" << degree << "-s" << config.decays[d] << "-" << i;
      s.entries.push_back({id.str(), "random", SpectralFunction(params, std::move(c))});
    }
  }
  for (int n = 0; n <= config.single_mode_max; ++n)
    s.entries.push_back({"mode-" + std::to_string(n), "mode", SpectralFunction::mode(params, n)});
  return s;
}

// --- reports -------------------------------------------------------------------------

RatioWindow ratio_window(const std::vector<NormReport>& reports) {
  std::vector<double> r;
  for (const auto& x : reports)
    if (x.has_ratio) r.push_back(x.ratio);
  RatioWindow w;
  w.count = static_cast<int>(r.size());
  if (r.empty()) return w;
  std::sort(r.begin(), r.end());
  w.r_min = r.front();
  w.r_max = r.back();
  w.median = r.size() % 2 ? r[r.size() / 2] : 0.5 * (r[r.size() / 2 - 1] + r[r.size() / 2]);
  return w;
}

std::vector<NormReport> verify_theorem1(const TestSuite& suite, int k, const ExponentFunction& p,
                                        const QuadratureRef& quad) {
  if (k < 1) throw DomainError("H/W comparison needs k >= 1");
  std::vector<NormReport> rows(suite.entries.size());
  for_each_entry(suite, [&](int i, const SuiteEntry& e) {
    NormReport r = make_row("H/W", suite, e, p, quad, 0.5 * k, k);
    r.norms["H"] = potential_norm_H(e.f, 0.5 * k, p, quad);
    r.norms["W"] = sobolev_norm_W(e.f, k, p, quad);
    set_ratio(r, "H", "W");
    rows[i] = std::move(r);
  });
  return rows;
}

TheoremZReport verify_theoremZ(const TestSuite& suite, double gamma, int r, const ExponentFunction& p,
                               const QuadratureRef& quad) {
  if (!(gamma > 0.0) || !(gamma < r)) throw DomainError("positive-power check needs 0 < gamma < r");
  TheoremZReport rep;
  rep.rows.resize(suite.entries.size());
  std::vector<double> spectral(suite.entries.size(), 0.0);
  for_each_entry(suite, [&](int i, const SuiteEntry& e) {
    const double eps0 = 0.1 / suite.params.eigenvalue(std::max(e.f.degree(), 0));
    const SpectralFunction up = I_eps_extrapolated(e.f, gamma, r, eps0);
    const SpectralFunction down = neg_power(e.f, gamma);
    NormReport row = make_row("Z", suite, e, p, quad, gamma, r);
    row.norms["forward"] = coefficient_residual(neg_power(up, gamma), e.f);
    row.norms["backward"] = coefficient_residual(I_eps_extrapolated(down, gamma, r, eps0), e.f);
    const GridFunction diff = synthesize(neg_power(up, gamma) - e.f, quad);
    const double fp = lux(e.f, p, quad);
    row.norms["forward_p"] = fp > 0.0 ? luxemburg_norm(diff, p) / fp : 0.0;
    spectral[i] = std::max(coefficient_residual(neg_power(pos_power(e.f, gamma), gamma), e.f),
                           coefficient_residual(pos_power(down, gamma), e.f));
    rep.rows[i] = std::move(row);
  });
  for (std::size_t i = 0; i < spectral.size(); ++i) {
    rep.spectral_residual = std::max(rep.spectral_residual, spectral[i]);
    rep.extrapolated_residual =
        std::max({rep.extrapolated_residual, rep.rows[i].norms["forward"], rep.rows[i].norms["backward"]});
  }
  return rep;
}

Theorem2Report verify_theorem2(const TestSuite& suite, double gamma, int k, const ExponentFunction& p,
                               const QuadratureRef& quad, bool diagnostics) {
  if (k < 1 || !(gamma > 0.0) || !(gamma < k)) throw DomainError("H/T comparison needs 0 < gamma < k");
  Theorem2Report rep;
  rep.rows.resize(suite.entries.size());
  rep.k_rows.resize(suite.entries.size());
  std::vector<double> mech(suite.entries.size(), 0.0);
  if (!diagnostics) rep.k_rows.clear();
  for_each_entry(suite, [&](int i, const SuiteEntry& e) {
    NormReport r = make_row("H/T", suite, e, p, quad, gamma, k);
    const double base = lux(e.f, p, quad);
    const auto gk = g_function(e.f, gamma, k, quad);
    r.norms["H"] = potential_norm_H(e.f, 0.5 * gamma, p, quad);
    r.norms["T"] = base + luxemburg_norm(gk.values, p);
    set_ratio(r, "H", "T");
    if (!diagnostics) {
      rep.rows[i] = std::move(r);
      return;
    }
    const auto gk1 = g_function(e.f, gamma, k + 1, quad);
    NormReport rk = make_row("T_k/T_k+1", suite, e, p, quad, gamma, k);
    rk.norms["T_k"] = r.norms["T"];
    rk.norms["T_k+1"] = base + luxemburg_norm(gk1.values, p);
    set_ratio(rk, "T_k", "T_k+1");

    // g^{k−γ}(f) against g^{γ,k}(L^{−γ/2} f)
    const auto lhs = g_fractional(e.f, k - gamma, quad).values;
    const auto rhs = g_function(neg_power(e.f, 0.5 * gamma), gamma, k, quad).values;
    const double scale = std::max(lhs.sup_norm(), kRatioFloor);
    mech[i] = lhs.max_abs_diff(rhs) / scale;
    rep.rows[i] = std::move(r);
    rep.k_rows[i] = std::move(rk);
  });
  for (double m : mech) rep.mechanism_error = std::max(rep.mechanism_error, m);
  return rep;
}

double w0_identity_error(const SpectralFunction& f, double gamma, const std::vector<int>& signs) {
  if (signs.empty()) throw DomainError("need at least one sign");
  const int ell = static_cast<int>(signs.size()) - 1;
  SpectralFunction lhs(f.params());
  for (int j = 0; j <= ell; ++j) lhs += (signs[j] * std::pow(2.0, j * gamma)) * dyadic_window(f, j);

  MultiplierArgs args;
  args.gamma = gamma;
  args.signs = signs;
  const MultiplierSpec m = multiplier_library("meps_ell", f.params(), args);
  const JacobiParams& p = f.params();
  const SpectralFunction rhs =
      apply_multiplier(f.map([&](int n, cplx c) { return std::pow(p.eigenvalue(n) + 1.0, gamma) * c; }), m);
  double scale = 0.0;
  for (int n = 0; n <= lhs.degree(); ++n) scale = std::max(scale, std::abs(lhs.coeff(n)));
  return lhs.max_coeff_diff(rhs) / std::max(scale, 1e-300);
}

Theorem3Report verify_theorem3(const TestSuite& suite, double gamma, const ExponentFunction& p,
                               const QuadratureRef& quad, int sign_vectors, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw DomainError("H/F comparison needs gamma > 0");
  Theorem3Report rep;
  rep.sign_vectors = sign_vectors;
  rep.rows.resize(suite.entries.size());
  std::vector<double> recon(suite.entries.size(), 0.0);
  for_each_entry(suite, [&](int i, const SuiteEntry& e) {
    NormReport r = make_row("H/F", suite, e, p, quad, gamma, 0);
    r.norms["H"] = potential_norm_H(e.f, gamma, p, quad);
    r.norms["F"] = tl_norm_F(e.f, gamma, p, quad);
    set_ratio(r, "H", "F");
    rep.rows[i] = std::move(r);

    // the part of f living on λ_n >= 1 is rebuilt exactly by the j >= 1 blocks
    const JacobiParams& params = e.f.params();
    const SpectralFunction hi = e.f.map([&](int n, cplx c) { return params.eigenvalue(n) >= 1.0 ? c : cplx(0.0); });
    SpectralFunction sum(params);
    for (int j = 1; j <= tl_min_j_max(hi); ++j) sum += phi_block(hi, j);
    recon[i] = hi.is_zero() ? 0.0 : coefficient_residual(sum, hi);
  });
  for (double x : recon) rep.reconstruction_error = std::max(rep.reconstruction_error, x);

  std::mt19937_64 rng(seed);
  for (const auto& e : suite.entries) {
    if (e.kind != "random") continue;
    const int ell = tl_min_j_max(e.f);
    for (int v = 0; v < sign_vectors; ++v) {
      std::vector<int> signs(ell + 1);
      for (int& s : signs) s = (rng() >> 63) ? 1 : -1;
      rep.w0_error = std::max(rep.w0_error, w0_identity_error(e.f, gamma, signs));
    }
  }
  return rep;
}

// --- stability -----------------------------------------------------------------------

bool StabilityReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const WindowCheck& c) { return c.pass; });
}

namespace {

double drift(const RatioWindow& a, const RatioWindow& b) {
  return std::max(std::abs(b.r_min - a.r_min) / a.r_min, std::abs(b.r_max - a.r_max) / a.r_max);
}

std::vector<NormReport> rows_for(const std::string& theorem, const TestSuite& suite, const ExponentFunction& p,
                                 const QuadratureRef& quad, const StabilityConfig& cfg) {
  if (theorem == "H/W") return verify_theorem1(suite, cfg.k1, p, quad);
  if (theorem == "H/T") return verify_theorem2(suite, cfg.gamma2, cfg.k2, p, quad, false).rows;
  return verify_theorem3(suite, cfg.gamma3, p, quad, 0).rows;
}

}  // namespace

WindowCheck window_check(const std::string& theorem, const JacobiParams& params, const ExponentFunction& p,
                         const StabilityConfig& cfg, std::vector<NormReport>* rows) {
  if (theorem != "H/W" && theorem != "H/T" && theorem != "H/F") throw DomainError("unknown ratio '" + theorem + "'");
  if (std::find(cfg.degrees.begin(), cfg.degrees.end(), cfg.compare_degree_lo) == cfg.degrees.end() ||
      std::find(cfg.degrees.begin(), cfg.degrees.end(), cfg.compare_degree_hi) == cfg.degrees.end())
    throw DomainError("compared degrees must be among the studied degrees");
  const QuadratureRef coarse = build_quadrature(cfg.order);
  WindowCheck chk;
  chk.theorem = theorem;
  for (int d : cfg.degrees) {
    const TestSuite suite = TestSuite::build(params, d, cfg.suite);
    auto r = rows_for(theorem, suite, p, coarse, cfg);
    chk.by_degree[d] = ratio_window(r);
    chk.worst_spread = std::max(chk.worst_spread, chk.by_degree[d].spread());
    if (rows) rows->insert(rows->end(), r.begin(), r.end());
  }
  chk.coarse_order = chk.by_degree[cfg.compare_degree_hi];
  chk.degree_drift = drift(chk.by_degree[cfg.compare_degree_lo], chk.by_degree[cfg.compare_degree_hi]);
  if (cfg.fine_order > 0) {
    const TestSuite hi = TestSuite::build(params, cfg.compare_degree_hi, cfg.suite);
    auto r = rows_for(theorem, hi, p, build_quadrature(cfg.fine_order), cfg);
    chk.fine_order = ratio_window(r);
    chk.order_drift = drift(chk.coarse_order, chk.fine_order);
    if (rows) rows->insert(rows->end(), r.begin(), r.end());
  }
  chk.pass = chk.worst_spread < cfg.max_spread && chk.degree_drift < cfg.max_drift && chk.order_drift < cfg.max_drift;
  return chk;
}

StabilityReport stability_study(const JacobiParams& params, const ExponentFunction& p, const StabilityConfig& cfg) {
  StabilityReport rep;
  rep.p_spec = p.name();
  for (const std::string theorem : {"H/W", "H/T", "H/F"}) rep.checks.push_back(window_check(theorem, params, p, cfg, &rep.rows));
  return rep;
}

// --- output --------------------------------------------------------------------------

std::string reports_csv(const std::vector<NormReport>& rows) {
  std::set<std::string> names;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.norms) names.insert(k);
  std::ostringstream out;
  out << "theorem,function_id,alpha,beta,gamma,k,p_spec,degree,order";
  for (const auto& n : names) out << ",norm_" << n;
  out << ",ratio\n";
  for (const auto& r : rows) {
    out << r.theorem << ',' << r.function_id << ',' << fmt(r.alpha) << ',' << fmt(r.beta) << ',' << fmt(r.gamma) << ','
        << r.k << ',' << r.p_spec << ',' << r.degree << ',' << r.order;
    for (const auto& n : names) {
      out << ',';
      if (auto it = r.norms.find(n); it != r.norms.end()) out << fmt(it->second);
    }
    out << ',';
    if (r.has_ratio) out << fmt(r.ratio);
    out << '\n';
  }
  return out.str();
}

std::string reports_json(const std::vector<NormReport>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["theorem"] = r.theorem;
    j["function_id"] = r.function_id;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["gamma"] = r.gamma;
    j["k"] = r.k;
    j["p_spec"] = r.p_spec;
    j["degree"] = r.degree;
    j["order"] = r.order;
    j["norms"] = r.norms;
    j["ratio"] = r.has_ratio ? nlohmann::json(r.ratio) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace jspec
