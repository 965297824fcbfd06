// ============================================================================
// subgauss: optimal sub-Gaussian variance proxy of a finite discrete law
// ============================================================================
// Subcommands name a distribution family; global flags pick the method and
// optional curve export.  Output is a single JSON object on stdout with a
// fixed key order so identical invocations are byte-identical.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "subgauss/characterizer.hpp"
#include "subgauss/closed_forms.hpp"
#include "subgauss/distribution.hpp"
#include "subgauss/kernels.hpp"
#include "subgauss/oracle.hpp"

namespace {

using subgauss::DiscreteDistribution;
using subgauss::ProxyResult;
using subgauss::SolverConfig;

bool debug_enabled() {
  const char* v = std::getenv("SUBGAUSS_LOG");
  return v != nullptr && std::strcmp(v, "debug") == 0;
}

void debug_log(const char* fmt, double a, double b) {
  if (debug_enabled()) {
    std::fprintf(stderr, "[subgauss] ");
    std::fprintf(stderr, fmt, a, b);
    std::fprintf(stderr, "\n");
  }
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ----------------------------------------------------------------------------
// Distribution request: one record covering every subcommand / spec file form.
// ----------------------------------------------------------------------------
struct Request {
  std::string kind;  // bernoulli | binomial | three-mass | uniform | discrete
  double p = 0.5;
  int n = 1;
  double p1 = 0.0, p2 = 0.0, a = 1.0;
  int N = 1;
  double ua = 1.0, ub = 0.0;
  std::vector<double> atoms, weights;
};

std::vector<double> parse_csv_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    while (end != nullptr && *end == ' ') ++end;
    if (tok.empty() || end == tok.c_str() || *end != '\0' || !std::isfinite(v))
      throw std::invalid_argument(std::string(what) + ": expected comma-separated finite numbers");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int checked_int_field(double v, const char* what) {
  if (v != std::floor(v) || v < 1.0 || v > 2.0e9)
    throw std::invalid_argument(std::string("spec file: '") + what +
                                "' must be a positive integer");
  return static_cast<int>(v);
}

Request parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("spec file not readable: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("spec file parse error: ") + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("spec file: top level must be a JSON object");

  const auto need_num = [&j](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number())
      throw std::invalid_argument(std::string("spec file: missing numeric field '") +
                                  key + "'");
    return j[key].get<double>();
  };
  const auto opt_num = [&j, &need_num](const char* key, double dflt) -> double {
    return j.contains(key) ? need_num(key) : dflt;
  };

  Request rq;
  if (j.contains("kind")) {
    if (!j["kind"].is_string())
      throw std::invalid_argument("spec file: 'kind' must be a string");
    rq.kind = j["kind"].get<std::string>();
    if (rq.kind == "bernoulli") {
      rq.p = need_num("p");
      return rq;
    }
    if (rq.kind == "binomial") {
      rq.n = checked_int_field(need_num("n"), "n");
      rq.p = need_num("p");
      return rq;
    }
    if (rq.kind == "three-mass") {
      rq.p1 = need_num("p1");
      rq.p2 = need_num("p2");
      rq.a = opt_num("a", 1.0);
      return rq;
    }
    if (rq.kind == "uniform") {
      rq.N = checked_int_field(j.contains("N") ? need_num("N") : need_num("n"), "N");
      rq.ua = opt_num("a", 1.0);
      rq.ub = opt_num("b", 0.0);
      return rq;
    }
    if (rq.kind != "discrete")
      throw std::invalid_argument("spec file: unknown kind '" + rq.kind + "'");
  }

  rq.kind = "discrete";
  if (!j.contains("atoms") || !j.contains("weights") || !j["atoms"].is_array() ||
      !j["weights"].is_array())
    throw std::invalid_argument(
        "spec file: expected 'atoms' and 'weights' arrays, or a recognized 'kind'");
  for (const auto& v : j["atoms"]) {
    if (!v.is_number())
      throw std::invalid_argument("spec file: atoms must all be numbers");
    rq.atoms.push_back(v.get<double>());
  }
  for (const auto& v : j["weights"]) {
    if (!v.is_number())
      throw std::invalid_argument("spec file: weights must all be numbers");
    rq.weights.push_back(v.get<double>());
  }
  return rq;
}

void validate_request(const Request& rq) {
  if (rq.kind == "bernoulli" || rq.kind == "binomial") {
    if (!std::isfinite(rq.p) || !(rq.p > 0.0 && rq.p < 1.0))
      throw std::invalid_argument("p must lie in (0, 1)");
    if (rq.kind == "binomial" && rq.n < 1)
      throw std::invalid_argument("n must be >= 1");
  } else if (rq.kind == "three-mass") {
    if (!std::isfinite(rq.p1) || !std::isfinite(rq.p2) || !(rq.p1 > 0.0) ||
        !(rq.p2 > 0.0) || rq.p1 + rq.p2 > 1.0 + 1e-15)
      throw std::invalid_argument("need p1 > 0, p2 > 0, p1 + p2 <= 1");
    if (!std::isfinite(rq.a) || !(rq.a > 0.0))
      throw std::invalid_argument("scale a must be positive and finite");
  } else if (rq.kind == "uniform") {
    if (rq.N < 1) throw std::invalid_argument("n must be >= 1");
    if (!std::isfinite(rq.ua) || rq.ua == 0.0 || !std::isfinite(rq.ub))
      throw std::invalid_argument("need finite a != 0 and finite b");
  } else if (rq.kind == "discrete") {
    if (rq.atoms.empty() || rq.atoms.size() != rq.weights.size())
      throw std::invalid_argument("atoms and weights must have the same nonzero length");
  }
}

DiscreteDistribution build_distribution(const Request& rq) {
  if (rq.kind == "bernoulli")
    return subgauss::new_discrete({0.0, 1.0}, {1.0 - rq.p, rq.p});
  if (rq.kind == "binomial") {
    std::vector<double> atoms(rq.n + 1), w(rq.n + 1);
    const double lp = std::log(rq.p), lq = std::log1p(-rq.p);
    const double lgn = std::lgamma(rq.n + 1.0);
    for (int k = 0; k <= rq.n; ++k) {
      atoms[k] = k;
      w[k] = std::exp(lgn - std::lgamma(k + 1.0) - std::lgamma(rq.n - k + 1.0) +
                      k * lp + (rq.n - k) * lq);
    }
    return subgauss::new_discrete(std::move(atoms), std::move(w));
  }
  if (rq.kind == "three-mass")
    return subgauss::new_discrete({-rq.a, 0.0, rq.a},
                                  {rq.p1, 1.0 - rq.p1 - rq.p2, rq.p2});
  if (rq.kind == "uniform") {
    std::vector<double> atoms(rq.N), w(rq.N, 1.0 / rq.N);
    for (int j = 0; j < rq.N; ++j) atoms[j] = rq.ub + rq.ua * (j + 1);
    return subgauss::new_discrete(std::move(atoms), std::move(w));
  }
  return subgauss::new_discrete(rq.atoms, rq.weights);
}

ProxyResult wrap_value(double sigma2_opt, double var, std::string method) {
  ProxyResult out;
  out.sigma2_opt = sigma2_opt;
  out.variance = var;
  out.strict = sigma2_opt <= var * (1.0 + subgauss::kStrictSlack);
  out.method = std::move(method);
  return out;
}

// Recognize families hiding inside a raw atom/weight list so `auto` can use
// their closed forms.
std::optional<ProxyResult> closed_form_for_discrete(const DiscreteDistribution& d,
                                                    const SolverConfig& scfg) {
  const std::size_t n = d.size();
  if (n < 2) return std::nullopt;
  const double range = d.x_max() - d.x_min();
  if (n == 2)
    return wrap_value(range * range * subgauss::bernoulli_proxy(d.weights[1]),
                      subgauss::variance(d), "closed-form-bernoulli");

  const double step = range / static_cast<double>(n - 1);
  bool equally_spaced = true;
  for (std::size_t i = 1; i + 1 < n && equally_spaced; ++i)
    equally_spaced = std::fabs(d.atoms[i] - (d.atoms.front() + step * i)) <= 1e-12 * range;
  if (!equally_spaced) return std::nullopt;

  bool equal_weights = true;
  for (const double w : d.weights)
    equal_weights = equal_weights && std::fabs(w - 1.0 / n) <= 1e-12;
  if (equal_weights)
    return subgauss::discrete_uniform_proxy(static_cast<int>(n), step,
                                            d.atoms.front() - step);

  if (n == 3) {
    // Centering at the middle atom leaves lambda, variance, and the proxy
    // unchanged, so the three-mass solution applies directly.
    return subgauss::asymmetric_three_mass_proxy(
        {d.weights[0], d.weights[2], 0.5 * range}, scfg);
  }
  return std::nullopt;
}

std::optional<ProxyResult> closed_form_result(
    const Request& rq, const std::optional<DiscreteDistribution>& d,
    const SolverConfig& scfg) {
  if (rq.kind == "bernoulli")
    return wrap_value(subgauss::bernoulli_proxy(rq.p), rq.p * (1.0 - rq.p),
                      "closed-form-bernoulli");
  if (rq.kind == "binomial")
    return wrap_value(subgauss::binomial_proxy(rq.n, rq.p),
                      rq.n * rq.p * (1.0 - rq.p), "closed-form-binomial");
  if (rq.kind == "three-mass")
    return subgauss::asymmetric_three_mass_proxy({rq.p1, rq.p2, rq.a}, scfg);
  if (rq.kind == "uniform")
    return subgauss::discrete_uniform_proxy(rq.N, rq.ua, rq.ub);
  return closed_form_for_discrete(*d, scfg);
}

// ----------------------------------------------------------------------------
// Output writers
// ----------------------------------------------------------------------------
std::string to_json(const ProxyResult& r) {
  std::string s;
  s.reserve(512);
  s += "{\"sigma2_opt\":";
  s += fmt_double(r.sigma2_opt);
  s += ",\"variance\":";
  s += fmt_double(r.variance);
  s += ",\"strict\":";
  s += r.strict ? "true" : "false";
  s += ",\"method\":\"";
  s += r.method;
  s += "\",\"candidates\":[";
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const auto& c = r.candidates[i];
    if (i) s += ',';
    s += "{\"lambda\":";
    s += fmt_double(c.lambda_c);
    s += ",\"s\":";
    s += fmt_double(c.s_c);
    s += ",\"local_min\":";
    s += c.is_local_min ? "true" : "false";
    s += '}';
  }
  s += "],\"diagnostics\":{\"window_lo\":";
  s += fmt_double(r.diagnostics.window_lo);
  s += ",\"window_hi\":";
  s += fmt_double(r.diagnostics.window_hi);
  s += ",\"scan_samples\":";
  s += std::to_string(r.diagnostics.scan_samples);
  s += ",\"brackets_examined\":";
  s += std::to_string(r.diagnostics.brackets_examined);
  s += ",\"brent_iterations\":";
  s += std::to_string(r.diagnostics.brent_iterations);
  s += ",\"window_doublings\":";
  s += std::to_string(r.diagnostics.window_doublings);
  s += ",\"tangential_roots\":";
  s += std::to_string(r.diagnostics.tangential_points.size());
  s += ",\"backend\":\"";
  s += r.diagnostics.backend;
  s += "\"}}";
  return s;
}

void write_curve_csv(const std::string& path, const std::vector<subgauss::CurveRow>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::invalid_argument("cannot open curve output file: " + path);
  std::fputs("lambda,g,g1,g2,h\n", f);
  for (const auto& row : rows)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", row.lambda, row.g, row.g1,
                 row.g2, row.h);
  std::fclose(f);
}

double resolve_curve_sigma2(const std::string& text, double opt_value) {
  if (text == "opt") return opt_value;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !std::isfinite(v) || v < 0.0)
    throw std::invalid_argument("--sigma2 must be 'opt' or a nonnegative number");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal sub-Gaussian variance proxy for finite discrete distributions"};
  app.require_subcommand(1);

  std::string method = "auto";
  bool json_flag = true;
  std::string curve_path, sigma2_spec = "opt";
  double lambda_min = 0.0, lambda_max = 0.0;
  int samples = 512;
  double tol = -1.0;

  app.add_option("--method", method, "Solution method")
      ->check(CLI::IsMember({"auto", "closed-form", "general", "oracle"}));
  app.add_flag("--json", json_flag, "Emit JSON on stdout (default)");
  auto* opt_curve = app.add_option("--curve", curve_path,
                                   "Write a lambda,g,g1,g2,h CSV to this path");
  auto* opt_lmin = app.add_option("--lambda-min", lambda_min, "Curve lower end");
  auto* opt_lmax = app.add_option("--lambda-max", lambda_max, "Curve upper end");
  app.add_option("--samples", samples, "Curve row count")->check(CLI::PositiveNumber);
  app.add_option("--sigma2", sigma2_spec, "Curve proxy value: 'opt' or a number");
  app.add_option("--tol", tol, "Primary tolerance of the selected method")
      ->check(CLI::PositiveNumber);
  opt_curve->needs(opt_lmin)->needs(opt_lmax);

  Request rq;
  std::string spec_path;

  auto* sc_bern = app.add_subcommand("bernoulli", "Bernoulli(p) on {0, 1}");
  sc_bern->add_option("--p", rq.p, "Success probability")->required();

  auto* sc_binom = app.add_subcommand("binomial", "Binomial(n, p) on {0..n}");
  sc_binom->add_option("--n", rq.n, "Trial count")->required();
  sc_binom->add_option("--p", rq.p, "Success probability")->required();

  auto* sc_three = app.add_subcommand("three-mass", "Masses {p1, 1-p1-p2, p2} on {-a, 0, a}");
  sc_three->add_option("--p1", rq.p1, "Mass at -a")->required();
  sc_three->add_option("--p2", rq.p2, "Mass at +a")->required();
  sc_three->add_option("--a", rq.a, "Scale (default 1)");

  auto* sc_unif = app.add_subcommand("uniform", "Uniform on n equally spaced atoms");
  sc_unif->add_option("--n", rq.N, "Atom count")->required();
  sc_unif->add_option("--a", rq.ua, "Spacing (default 1)");
  sc_unif->add_option("--b", rq.ub, "Offset (default 0)");

  auto* sc_disc = app.add_subcommand("discrete", "Arbitrary finite support");
  std::string atoms_text, weights_text;
  auto* opt_atoms = sc_disc->add_option("--atoms", atoms_text, "Comma-separated atom values");
  auto* opt_weights = sc_disc->add_option("--weights", weights_text, "Comma-separated weights");
  auto* opt_spec = sc_disc->add_option("--spec", spec_path, "JSON spec file");
  opt_spec->excludes(opt_atoms)->excludes(opt_weights);

  for (CLI::App* sc : {sc_bern, sc_binom, sc_three, sc_unif, sc_disc})
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sc_bern->parsed()) rq.kind = "bernoulli";
    if (sc_binom->parsed()) rq.kind = "binomial";
    if (sc_three->parsed()) rq.kind = "three-mass";
    if (sc_unif->parsed()) rq.kind = "uniform";
    if (sc_disc->parsed()) {
      if (!spec_path.empty()) {
        rq = parse_spec_file(spec_path);
      } else {
        rq.kind = "discrete";
        if (atoms_text.empty() || weights_text.empty())
          throw std::invalid_argument("discrete requires --atoms and --weights, or --spec");
        rq.atoms = parse_csv_doubles(atoms_text, "--atoms");
        rq.weights = parse_csv_doubles(weights_text, "--weights");
      }
    }
    validate_request(rq);

    SolverConfig scfg;
    if (tol > 0.0) scfg.brent_rel_tol = tol;

    // The distribution object is built lazily: pure closed forms never need
    // it, and for a huge uniform law materializing the atoms would dwarf the
    // actual computation.
    std::optional<DiscreteDistribution> dist;
    const auto ensure_dist = [&]() -> const DiscreteDistribution& {
      if (!dist) dist = build_distribution(rq);
      return *dist;
    };

    ProxyResult result;
    if (method == "oracle") {
      const DiscreteDistribution& d = ensure_dist();
      subgauss::GridConfig gc;
      result.method = "oracle";
      result.sigma2_opt =
          subgauss::bisect_optimal_proxy(d, tol > 0.0 ? tol : 1e-6, gc);
      result.variance = d.size() > 1 ? subgauss::variance(d) : 0.0;
      result.strict =
          result.sigma2_opt <= result.variance * (1.0 + subgauss::kStrictSlack);
      if (d.size() > 1) subgauss::search_window(d, &result.diagnostics);
      result.diagnostics.backend = subgauss::kernels::backend_name(gc.backend);
    } else if (method == "general") {
      result = subgauss::optimal_proxy_general(ensure_dist(), scfg);
    } else {
      if (rq.kind == "discrete") ensure_dist();
      std::optional<ProxyResult> cf = closed_form_result(rq, dist, scfg);
      if (cf) {
        result = std::move(*cf);
      } else if (method == "closed-form") {
        throw std::invalid_argument("no closed form is available for this distribution");
      } else {
        result = subgauss::optimal_proxy_general(ensure_dist(), scfg);
      }
    }
    debug_log("sigma2_opt = %.17g  variance = %.17g", result.sigma2_opt,
              result.variance);

    if (json_flag) {
      const std::string out = to_json(result);
      std::fwrite(out.data(), 1, out.size(), stdout);
      std::fputc('\n', stdout);
    }

    if (!curve_path.empty()) {
      const double s2 = resolve_curve_sigma2(sigma2_spec, result.sigma2_opt);
      write_curve_csv(curve_path,
                      subgauss::export_curve(ensure_dist(), s2, lambda_min,
                                             lambda_max, samples, scfg.backend));
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const subgauss::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
