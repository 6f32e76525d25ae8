#include "twisted/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "twisted/asymptotics.hpp"
#include "twisted/eigenbasis.hpp"
#include "twisted/errors.hpp"
#include "twisted/moments.hpp"
#include "twisted/opnorm.hpp"
#include "twisted/projection.hpp"
#include "twisted/quadrature.hpp"
#include "twisted/serialization.hpp"

namespace twisted {

namespace {

enum class Kind { Int, Real, Str, IntList };

struct OptDef {
  std::string name;
  Kind kind;
  Json def;
  std::string help;
};

const std::vector<OptDef>& global_options() {
  static const std::vector<OptDef> opts = {
      {"format", Kind::Str, "json", "output format: json or csv"},
      {"seed", Kind::Int, 1, "random seed"},
      {"threads", Kind::Int, 1, "worker threads for sweeps and tables"},
      {"radial-nodes", Kind::Int, 8, "Gauss-Legendre nodes per radial panel"},
      {"panel-width", Kind::Real, 1.0, "radial panel width"},
      {"angular-nodes", Kind::Int, 32, "angular nodes per circle"},
      {"tail-mult", Kind::Real, 3.0, "tail radius multiplier"},
      {"target", Kind::Real, 1e-8, "target relative error of quadrature"},
      {"max-doublings", Kind::Int, 4, "resolution doublings before giving up"},
  };
  return opts;
}

const std::map<std::string, std::vector<OptDef>>& command_options() {
  static const std::map<std::string, std::vector<OptDef>> opts = {
      {"eigen",
       {{"n", Kind::Int, 1, "complex dimension"},
        {"alpha", Kind::IntList, Json::array(), "multi-index alpha, comma separated"},
        {"beta", Kind::IntList, Json::array(), "multi-index beta, comma separated"},
        {"radial-k", Kind::Int, -1, "emit the radial eigenfunction f_k instead"}}},
      {"norms",
       {{"input", Kind::Str, "", "GaussianFn JSON file"},
        {"p", Kind::Str, "2", "exponent (rational or decimal)"},
        {"ball-radius", Kind::Real, 0.0, "integrate over a ball of this radius (0: full space)"},
        {"ball-center", Kind::Str, "", "ball center as re,im pairs per coordinate"}}},
      {"project",
       {{"input", Kind::Str, "", "GaussianFn JSON file"},
        {"k", Kind::Int, -1, "also return the projection onto level k"}}},
      {"opnorm",
       {{"n", Kind::Int, 1, "complex dimension"},
        {"k", Kind::Int, 0, "level, lambda^2 = n + 2k"},
        {"p", Kind::Str, "4", "exponent"},
        {"method", Kind::Str, "all", "infty | zbar | radial | power | all"},
        {"B", Kind::Int, 0, "|beta| truncation for power iteration"},
        {"tol", Kind::Real, 1e-9, "power iteration stopping tolerance"},
        {"max-iter", Kind::Int, 1000, "power iteration budget"},
        {"restarts", Kind::Int, 5, "random restarts"}}},
      {"sweep",
       {{"candidate", Kind::Str, "zbar", "zbar | radial | twoinfty | power"},
        {"d", Kind::Int, 2, "real dimension (even)"},
        {"p", Kind::Str, "4", "exponent"},
        {"k", Kind::Str, "1:1024:dyadic", "level range kmin:kmax[:dyadic]"},
        {"regressor", Kind::Str, "log-k", "log-k | log-lambda"},
        {"B", Kind::Int, 2, "|beta| truncation for power iteration"},
        {"tol", Kind::Real, 1e-9, "power iteration stopping tolerance"},
        {"max-iter", Kind::Int, 1000, "power iteration budget"},
        {"restarts", Kind::Int, 5, "random restarts"}}},
      {"dispersive",
       {{"d", Kind::Int, 2, "real dimension (even)"},
        {"ks", Kind::IntList, Json::array({4, 8, 16, 32, 64}), "levels, comma separated"},
        {"outer-factor", Kind::Real, 2.0, "outer ball radius in units of lambda"}}},
      {"heisenberg",
       {{"input", Kind::Str, "", "GaussianFn JSON file (default: an eigenfunction from alpha, beta)"},
        {"alpha", Kind::IntList, Json::array({2}), "multi-index alpha"},
        {"beta", Kind::IntList, Json::array({1}), "multi-index beta"},
        {"m", Kind::IntList, Json::array({4, 9}), "scale factors (perfect squares)"},
        {"p", Kind::IntList, Json::array({4, 6}), "even exponents"}}},
      {"selftest", {}},
  };
  return opts;
}

const char* const kDescriptions[][2] = {
    {"eigen", "emit eigenfunction coefficients"},
    {"norms", "exact and quadrature Lp norms of a GaussianFn"},
    {"project", "eigen-expansion and spectral projection of a GaussianFn"},
    {"opnorm", "2->p operator norm estimates at one level"},
    {"sweep", "candidate sweep over dyadic levels with a log-log fit"},
    {"dispersive", "local dispersive ratio table"},
    {"heisenberg", "exact dilation-law verification"},
    {"selftest", "closed-form oracle suite"},
};

long long parse_int(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(what + ": not an integer: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(s);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

// Flag text or config value -> canonical JSON for the option kind.
Json normalize(const OptDef& def, const Json& v) {
  const std::string what = "option '" + def.name + "'";
  switch (def.kind) {
    case Kind::Int:
      if (v.is_number_integer()) return v;
      if (v.is_string()) return parse_int(v.get<std::string>(), what);
      break;
    case Kind::Real:
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return parse_real(v.get<std::string>());
      break;
    case Kind::Str:
      if (v.is_string()) return v;
      if (v.is_number()) return v.dump();
      break;
    case Kind::IntList: {
      Json out = Json::array();
      if (v.is_array()) {
        for (const auto& x : v) out.push_back(normalize({def.name, Kind::Int, 0, ""}, x));
        return out;
      }
      if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (!s.empty()) {
          for (const auto& part : split(s, ',')) out.push_back(parse_int(part, what));
        }
        return out;
      }
      break;
    }
  }
  throw ValidationError(what + " has the wrong type");
}

struct Context {
  std::string command;
  Json config;  // resolved parameters, embedded in every output
  std::string output = "-";
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  long long i(const char* key) const { return config.at(key).get<long long>(); }
  double r(const char* key) const { return config.at(key).get<double>(); }
  std::string s(const char* key) const { return config.at(key).get<std::string>(); }
  std::vector<int> list(const char* key) const { return config.at(key).get<std::vector<int>>(); }
  bool csv() const { return s("format") == "csv"; }

  QuadSpec quad() const {
    QuadSpec q;
    q.radial_nodes = static_cast<int>(i("radial-nodes"));
    q.panel_width = r("panel-width");
    q.angular_nodes = static_cast<int>(i("angular-nodes"));
    q.tail_radius_multiplier = r("tail-mult");
    q.target_rel_err = r("target");
    q.max_doublings = static_cast<int>(i("max-doublings"));
    q.validate();
    return q;
  }

  int threads() const {
    const long long t = i("threads");
    if (t < 1 || t > 256) throw ValidationError("threads must be between 1 and 256");
    return static_cast<int>(t);
  }

  std::uint64_t seed() const {
    const long long v = i("seed");
    if (v < 0) throw ValidationError("seed must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }

  std::string hash() const { return fnv1a_hex(config.dump()); }
};

// Writes through --output or the caller's stream.
class Sink {
public:
  explicit Sink(const Context& ctx) {
    if (ctx.output == "-" || ctx.output.empty()) {
      stream_ = ctx.out;
    } else {
      file_ = std::make_unique<std::ofstream>(ctx.output);
      if (!*file_) throw ValidationError("cannot write '" + ctx.output + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void emit_json(const Context& ctx, Json result) {
  Json doc;
  doc["command"] = ctx.command;
  doc["config"] = ctx.config;
  doc["config_hash"] = ctx.hash();
  doc["result"] = std::move(result);
  Sink sink(ctx);
  *sink << doc.dump(2) << '\n';
}

void emit_csv(const Context& ctx, CsvTable table, const std::vector<std::string>& summary = {}) {
  std::vector<std::string> comments = {"command: " + ctx.command, "config: " + ctx.config.dump(),
                                       "config_hash: " + ctx.hash()};
  comments.insert(comments.end(), summary.begin(), summary.end());
  table.comments = std::move(comments);
  Sink sink(ctx);
  table.write(*sink);
}

void report_error(std::ostream& err, const char* kind, const std::string& message, const Json& extra = Json::object()) {
  Json e{{"error", kind}, {"message", message}};
  for (const auto& [k, v] : extra.items()) e[k] = v;
  err << e.dump() << '\n';
}

std::size_t dim_from_d(long long d) {
  if (d < 2 || d % 2 != 0) throw ValidationError("d must be even and >= 2");
  return static_cast<std::size_t>(d / 2);
}

std::size_t dim_from_n(long long n) {
  if (n < 1 || n > 16) throw ValidationError("n must be between 1 and 16");
  return static_cast<std::size_t>(n);
}

std::string join_index(const MultiIndex& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? ";" : "") + std::to_string(m[i]);
  return s;
}

CsvTable terms_table(const GaussianFn& g) {
  CsvTable t;
  t.header = {"a", "b", "re", "im"};
  for (const auto& [m, c] : g.poly().terms()) {
    t.rows.push_back({join_index(m.z_part()), join_index(m.zbar_part()), rational_to_string(c.re), rational_to_string(c.im)});
  }
  return t;
}

GaussianFn input_function(const Context& ctx) {
  const std::string path = ctx.s("input");
  if (path.empty()) throw ValidationError("--input is required");
  return gaussian_from_json(read_json_file(path));
}

// ---- subcommands ----

int run_eigen(const Context& ctx) {
  const std::size_t n = dim_from_n(ctx.i("n"));
  const long long radial_k = ctx.i("radial-k");
  Json result;
  GaussianFn fn;
  std::vector<std::string> summary;
  if (radial_k >= 0) {
    if (radial_k > 200) throw ValidationError("radial-k too large for exact construction");
    const int k = static_cast<int>(radial_k);
    fn = build_radial(n, k);
    const auto cf = radial_closed_forms(n, k);
    result["radial_k"] = k;
    result["eigenvalue"] = static_cast<long long>(n) + 2 * k;
    result["value_at_origin"] = to_json(cf.value_at_zero);
    result["l2_norm_sq"] = to_json(cf.norm_sq);
  } else {
    const auto a = ctx.list("alpha");
    const auto b = ctx.list("beta");
    if (a.size() != n || b.size() != n) throw ValidationError("--alpha and --beta need n entries each");
    const EigenLabel label{MultiIndex(a), MultiIndex(b)};
    if (label.alpha.order() + label.beta.order() > 120) throw ValidationError("label too large for exact construction");
    const Eigenfunction f = build_eigenfunction(label);
    fn = f.fn;
    result["label"] = to_json(label);
    result["eigenvalue"] = f.eigenvalue;
    result["value_at_origin"] = rational_to_string(mpq_class(eigen_value_at_origin(label)));
    result["l2_norm_sq"] = to_json(exact_l2_norm_sq(label));
  }
  if (ctx.csv()) {
    for (const auto& [k, v] : result.items()) summary.push_back(k + ": " + v.dump());
    emit_csv(ctx, terms_table(fn), summary);
  } else {
    result["function"] = to_json(fn);
    emit_json(ctx, result);
  }
  return kExitOk;
}

int run_norms(const Context& ctx) {
  const GaussianFn g = input_function(ctx);
  const double p = parse_real(ctx.s("p"));
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("p must be finite and >= 1");
  Domain dom = Domain::full_space();
  const double radius = ctx.r("ball-radius");
  if (radius < 0) throw ValidationError("ball radius must be nonnegative");
  if (radius > 0) {
    Point center;
    const std::string c = ctx.s("ball-center");
    if (!c.empty()) {
      const auto parts = split(c, ',');
      if (parts.size() != 2 * g.dim()) throw ValidationError("ball center needs re,im for every coordinate");
      for (std::size_t j = 0; j < g.dim(); ++j) center.emplace_back(parse_real(parts[2 * j]), parse_real(parts[2 * j + 1]));
    }
    dom = Domain::ball(center, radius);
  }
  Json result;
  result["p"] = ctx.s("p");
  const bool even = std::floor(p) == p && static_cast<long long>(p) % 2 == 0;
  double exact_d = std::nan("");
  if (even && dom.kind == Domain::Kind::FullSpace) {
    const ExactValue ex = lp_norm_exact_even(g, static_cast<int>(p));
    result["exact_power"] = to_json(ex);
    exact_d = ex.to_double();
    result["exact_power_value"] = exact_d;
  } else {
    result["exact_power"] = nullptr;
  }
  const QuadResult q = lp_power_numeric(make_evaluator(g), p, dom, ctx.quad());
  result["numeric_power"] = q.value;
  result["numeric_rel_err"] = q.rel_err;
  result["doublings"] = q.doublings;
  if (!std::isnan(exact_d)) result["rel_diff"] = exact_d == 0 ? std::abs(q.value) : std::abs(q.value - exact_d) / exact_d;
  if (ctx.csv()) {
    CsvTable t;
    t.header = {"p", "exact_rational", "exact_pi_power", "exact_value", "numeric", "rel_err"};
    const bool has = !result["exact_power"].is_null();
    t.rows.push_back({ctx.s("p"), has ? result["exact_power"]["rational"].get<std::string>() : "",
                      has ? std::to_string(result["exact_power"]["pi_power"].get<int>()) : "",
                      has ? format_real(exact_d) : "", format_real(q.value), format_real(q.rel_err)});
    emit_csv(ctx, t);
  } else {
    emit_json(ctx, result);
  }
  return kExitOk;
}

int run_project(const Context& ctx) {
  const GaussianFn g = input_function(ctx);
  const EigenExpansion e = expand(g);
  const long long k = ctx.i("k");
  Json result;
  result["expansion"] = to_json(e);
  result["l2_norm_sq"] = to_json(e.l2_norm_sq());
  if (k >= 0) result["projection"] = to_json(project(g, static_cast<int>(k)));
  if (ctx.csv()) {
    CsvTable t;
    t.header = {"alpha", "beta", "level", "re", "im"};
    for (const auto& [label, c] : e.entries) {
      t.rows.push_back({join_index(label.alpha), join_index(label.beta), std::to_string(label.level()),
                        rational_to_string(c.re), rational_to_string(c.im)});
    }
    emit_csv(ctx, t, {"l2_norm_sq: " + result["l2_norm_sq"].dump()});
  } else {
    emit_json(ctx, result);
  }
  return kExitOk;
}

PowerIterationOptions power_options(const Context& ctx) {
  PowerIterationOptions o;
  o.B = static_cast<int>(ctx.i("B"));
  o.tol = ctx.r("tol");
  o.max_iter = static_cast<int>(ctx.i("max-iter"));
  o.random_restarts = static_cast<int>(ctx.i("restarts"));
  o.seed = ctx.seed();
  o.grid = ctx.quad();
  return o;
}

int run_opnorm(const Context& ctx) {
  const std::size_t n = dim_from_n(ctx.i("n"));
  const long long k = ctx.i("k");
  if (k < 0 || k > 1000000) throw ValidationError("k must be in [0, 1e6]");
  const double p = parse_real(ctx.s("p"));
  const std::string method = ctx.s("method");
  if (method != "all" && method != "infty" && method != "zbar" && method != "radial" && method != "power") {
    throw ValidationError("unknown method '" + method + "'");
  }
  const int kk = static_cast<int>(k);
  std::vector<NormEstimate> rows;
  if (method == "all" || method == "infty") rows.push_back(norm_2_to_infty(n, kk));
  if (method == "all" || method == "zbar") rows.push_back(candidate_ratio_zbar(n, kk, p));
  if (method == "all" || method == "radial") rows.push_back(candidate_ratio_radial(n, kk, p, ctx.quad()));
  if (method == "power" || (method == "all" && p > 2.0 && !std::isinf(p))) {
    rows.push_back(norm_2_to_p_lower_power(n, kk, p, power_options(ctx)));
  }
  const ExponentTheory th = theory_exponents(static_cast<int>(2 * n), std::max(p, 2.0));
  bool converged = true;
  for (const auto& e : rows) converged = converged && e.converged;
  if (ctx.csv()) {
    CsvTable t;
    t.header = norm_estimate_header();
    for (const auto& e : rows) t.rows.push_back(norm_estimate_fields(e));
    emit_csv(ctx, t, {"rho: " + format_real(th.rho), "lambda: " + format_real(std::sqrt(double(n) + 2.0 * kk))});
  } else {
    Json est = Json::array();
    for (const auto& e : rows) est.push_back(to_json(e));
    emit_json(ctx, {{"estimates", est}, {"lambda", std::sqrt(double(n) + 2.0 * kk)}, {"rho", th.rho}});
  }
  if (!converged) {
    report_error(*ctx.err, "non_convergence", "power iteration stopped before reaching its tolerance",
                 {{"last_value_log", rows.back().value_log}});
    return kExitNonConvergence;
  }
  return kExitOk;
}

int run_sweep(const Context& ctx) {
  SweepOptions o;
  o.candidate = candidate_from_string(ctx.s("candidate"));
  o.n = dim_from_d(ctx.i("d"));
  o.p = parse_real(ctx.s("p"));
  const auto range = split(ctx.s("k"), ':');
  if (range.size() < 2 || range.size() > 3 || (range.size() == 3 && range[2] != "dyadic")) {
    throw ValidationError("--k must look like kmin:kmax or kmin:kmax:dyadic");
  }
  const long long kmin = parse_int(range[0], "k range");
  const long long kmax = parse_int(range[1], "k range");
  if (kmax > 100000000) throw ValidationError("k range too large");
  o.k_min = static_cast<int>(kmin);
  o.k_max = static_cast<int>(kmax);
  o.regressor = regressor_from_string(ctx.s("regressor"));
  o.spec = ctx.quad();
  o.power = power_options(ctx);
  o.threads = ctx.threads();
  if (o.candidate != Candidate::TwoToInfty && !(o.p >= 1.0)) throw ValidationError("p must be >= 1");
  const FitResult fit = sweep_fit(o);
  const double p_theory = o.candidate == Candidate::TwoToInfty ? std::numeric_limits<double>::infinity() : o.p;
  const ExponentTheory th = theory_exponents(static_cast<int>(2 * o.n), std::max(p_theory, 2.0));
  bool all_ok = true;
  for (const auto& r : fit.rows) all_ok = all_ok && r.ok;
  if (ctx.csv()) {
    CsvTable t;
    t.header = norm_estimate_header();
    t.header.insert(t.header.end(), {"log_lambda", "fit", "ok"});
    for (const auto& r : fit.rows) {
      auto cells = norm_estimate_fields(r.estimate);
      cells[0] = std::to_string(o.n);
      cells[1] = std::to_string(r.k);
      cells.push_back(format_real(std::log(r.lambda)));
      cells.push_back(format_real(fit.intercept + fit.slope * fit.regressor_value(r)));
      cells.push_back(r.ok ? "1" : "0");
      t.rows.push_back(std::move(cells));
    }
    emit_csv(ctx, t,
             {"slope: " + format_real(fit.slope), "intercept: " + format_real(fit.intercept),
              "residual: " + format_real(fit.residual), "regressor: " + to_string(fit.regressor),
              "rho: " + format_real(th.rho)});
  } else {
    Json rows = Json::array();
    for (const auto& r : fit.rows) {
      Json j = to_json(r.estimate);
      j["n"] = o.n;
      j["k"] = r.k;
      j["lambda"] = r.lambda;
      j["ok"] = r.ok;
      if (!r.ok) j["error"] = r.error;
      rows.push_back(j);
    }
    emit_json(ctx, {{"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"residual", fit.residual},
                    {"regressor", to_string(fit.regressor)},
                    {"theory", {{"rho", th.rho}, {"sigma", th.sigma}, {"p_critical", th.p_critical}}},
                    {"rows", rows}});
  }
  if (!all_ok) {
    report_error(*ctx.err, "non_convergence", "some sweep rows did not converge and were left out of the fit");
    return kExitNonConvergence;
  }
  return kExitOk;
}

int run_dispersive(const Context& ctx) {
  DispersiveOptions o;
  o.n = dim_from_d(ctx.i("d"));
  o.ks = ctx.list("ks");
  o.outer_factor = ctx.r("outer-factor");
  o.seed = ctx.seed();
  o.spec = ctx.quad();
  o.threads = ctx.threads();
  const DispersiveResult res = dispersive_check(o);
  bool all_ok = true;
  for (const auto& r : res.rows) all_ok = all_ok && r.ok;
  if (ctx.csv()) {
    CsvTable t;
    t.header = {"family", "k", "lambda", "center", "ratio", "ok"};
    for (const auto& r : res.rows) {
      std::string c;
      for (std::size_t j = 0; j < r.center.size(); ++j) {
        c += (j ? ";" : "") + format_real(r.center[j].real()) + ";" + format_real(r.center[j].imag());
      }
      t.rows.push_back({r.family, std::to_string(r.k), format_real(r.lambda), c, format_real(r.ratio), r.ok ? "1" : "0"});
    }
    emit_csv(ctx, t, {"sup: " + format_real(res.sup), "log_sup_slope: " + format_real(res.log_sup_slope)});
  } else {
    Json rows = Json::array();
    for (const auto& r : res.rows) {
      Json c = Json::array();
      for (const auto& z : r.center) c.push_back({z.real(), z.imag()});
      Json j{{"family", r.family}, {"k", r.k}, {"lambda", r.lambda}, {"center", c}, {"ratio", r.ratio}, {"ok", r.ok}};
      if (!r.ok) j["error"] = r.error;
      rows.push_back(j);
    }
    Json sup = Json::array();
    for (const auto& [k, s] : res.sup_by_k) sup.push_back({{"k", k}, {"sup", s}});
    emit_json(ctx, {{"sup", res.sup}, {"log_sup_slope", res.log_sup_slope}, {"sup_by_k", sup}, {"rows", rows}});
  }
  if (!all_ok) {
    report_error(*ctx.err, "non_convergence", "some dispersive rows did not converge");
    return kExitNonConvergence;
  }
  return kExitOk;
}

int run_heisenberg(const Context& ctx) {
  GaussianFn g;
  if (!ctx.s("input").empty()) {
    g = input_function(ctx);
  } else {
    const auto a = ctx.list("alpha");
    const auto b = ctx.list("beta");
    if (a.size() != b.size() || a.empty()) throw ValidationError("--alpha and --beta need the same nonzero length");
    g = build_eigenfunction(EigenLabel(MultiIndex(a), MultiIndex(b))).fn;
  }
  std::vector<long> ms;
  for (int m : ctx.list("m")) ms.push_back(m);
  const auto rows = heisenberg_check(g, ms, ctx.list("p"));
  bool all = true;
  for (const auto& r : rows) all = all && r.equal;
  if (ctx.csv()) {
    CsvTable t;
    t.header = {"m", "p", "observed", "expected", "equal"};
    for (const auto& r : rows) {
      t.rows.push_back({std::to_string(r.m), std::to_string(r.p), r.observed.to_string(), r.expected.to_string(),
                        r.equal ? "1" : "0"});
    }
    emit_csv(ctx, t, {std::string("all_equal: ") + (all ? "true" : "false")});
  } else {
    Json out = Json::array();
    for (const auto& r : rows) {
      const double d = static_cast<double>(g.dim()) * 2;
      out.push_back({{"m", r.m},
                     {"p", r.p},
                     {"sigma", theory_exponents(static_cast<int>(d), r.p).sigma},
                     {"observed", to_json(r.observed)},
                     {"expected", to_json(r.expected)},
                     {"equal", r.equal}});
    }
    emit_json(ctx, {{"all_equal", all}, {"rows", out}});
  }
  return kExitOk;
}

// ---- selftest ----

GaussianFn small_random(std::mt19937_64& rng, std::size_t n, int max_degree) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3), terms(1, 5), deg(0, max_degree);
  std::uniform_int_distribution<std::size_t> slot(0, 2 * n - 1);
  CPoly p(n);
  const int count = terms(rng);
  for (int t = 0; t < count; ++t) {
    Monomial m(n);
    const int d = deg(rng);
    for (int i = 0; i < d; ++i) {
      const std::size_t s = slot(rng);
      if (s < n) {
        ++m.z_exp(s);
      } else {
        ++m.zbar_exp(s - n);
      }
    }
    mpq_class re(num(rng), den(rng)), im(num(rng), den(rng));
    re.canonicalize();
    im.canonicalize();
    p.add_term(m, ComplexRational(re, im));
  }
  return GaussianFn(std::move(p));
}

int run_selftest(const Context& ctx) {
  std::vector<std::pair<std::string, std::function<bool()>>> checks;
  checks.emplace_back("gamma formula for zbar^k norms", [] {
    for (std::size_t n = 1; n <= 2; ++n) {
      for (int k = 0; k <= 6; ++k) {
        MultiIndex a(n);
        a[0] = k;
        const GaussianFn g(CPoly::monomial(a, MultiIndex(n)));
        for (int p : {2, 4, 6}) {
          mpz_class f;
          mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k * p / 2));
          const ExactValue expected = ExactValue(mpq_class(2, p), 1).pow(static_cast<int>(n)) *
                                      ExactValue(mpq_class(2, p)).pow(k * p / 2) * ExactValue(mpq_class(f));
          if (!(lp_norm_exact_even(g, p) == expected)) return false;
        }
      }
    }
    return true;
  });
  checks.emplace_back("eigenfunction norms orthogonality and eigenvalues", [] {
    for (std::size_t n = 1; n <= 2; ++n) {
      std::vector<Eigenfunction> fs;
      for (int s = 0; s <= 2; ++s) {
        for (const auto& a : compositions(n, s)) {
          for (int t = 0; t <= 2; ++t) {
            for (const auto& b : compositions(n, t)) fs.push_back(build_eigenfunction(EigenLabel(a, b)));
          }
        }
      }
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (!(apply_L(fs[i].fn) == fs[i].fn * ComplexRational{fs[i].eigenvalue})) return false;
        for (std::size_t j = i; j < fs.size(); ++j) {
          const ExactComplex ip = inner_exact(fs[i].fn, fs[j].fn);
          if (i == j ? !(ip.real() == exact_l2_norm_sq(fs[i].label)) : !ip.is_zero()) return false;
        }
      }
    }
    return true;
  });
  checks.emplace_back("ladder commutator [D D*] = 4", [] {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
      const GaussianFn g = small_random(rng, 2, 4);
      for (std::size_t j = 1; j <= 2; ++j) {
        const GaussianFn c = ladder_lower(ladder_adjoint(g, j), j) - ladder_adjoint(ladder_lower(g, j), j);
        if (!(c == g * ComplexRational{4})) return false;
      }
    }
    return true;
  });
  checks.emplace_back("radial closed forms", [] {
    for (std::size_t n = 1; n <= 3; ++n) {
      for (int k = 0; k <= 5; ++k) {
        const GaussianFn f = build_radial(n, k);
        const auto cf = radial_closed_forms(n, k);
        if (!(inner_exact(f, f).real() == cf.norm_sq)) return false;
        if (!(ExactValue(f.poly().coeff(Monomial(n)).re) == cf.value_at_zero)) return false;
        if (!(ExactValue(cf.value_at_zero.rational() * cf.value_at_zero.rational()) / cf.norm_sq ==
              kernel_diag_origin(n, k))) {
          return false;
        }
      }
    }
    return true;
  });
  checks.emplace_back("projection algebra", [] {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 8; ++t) {
      const std::size_t n = 1 + t % 2;
      const GaussianFn g = small_random(rng, n, 5), h = small_random(rng, n, 5);
      GaussianFn sum = GaussianFn::zero(n);
      for (int k = 0; k <= std::max(0, g.degree()); ++k) {
        const GaussianFn pk = project(g, k);
        if (!(project(pk, k) == pk)) return false;
        if (!(inner_exact(pk, h) == inner_exact(g, project(h, k)))) return false;
        sum += pk;
      }
      if (!(sum == g)) return false;
    }
    return true;
  });
  checks.emplace_back("dilation law", [] {
    const GaussianFn g = build_eigenfunction(EigenLabel(MultiIndex{1, 1}, MultiIndex{0, 2})).fn;
    for (const auto& r : heisenberg_check(g, {4, 9}, {4, 6})) {
      if (!r.equal) return false;
    }
    return true;
  });
  checks.emplace_back("quadrature against exact norms", [] {
    const GaussianFn g(CPoly::z(1, 0));
    const double exact = std::pow(std::numbers::pi / 4, 0.25);
    const double q = lp_norm_numeric(make_evaluator(g), 4.0, Domain::full_space(), QuadSpec{}).value;
    if (std::abs(q - exact) / exact > 1e-8) return false;
    MultiIndex a(2);
    a[0] = 3;
    const Evaluator u = make_evaluator(GaussianFn(CPoly::monomial(a, MultiIndex(2))));
    QuadSpec s;
    s.target_rel_err = 1e-10;
    const double c = lp_norm_numeric(u, 10.0 / 3.0, Domain::full_space(), s).value;
    const double f = lp_norm_numeric(u, 10.0 / 3.0, Domain::full_space(), s.doubled()).value;
    return std::abs(c - f) / f < 1e-6;
  });
  checks.emplace_back("candidate ratios against exact moments", [] {
    for (int k = 0; k <= 6; ++k) {
      const GaussianFn g(CPoly::monomial(MultiIndex{k}, MultiIndex{0}));
      const double exact = lp_norm_exact_even(g, 4).log() / 4 - 0.5 * inner_exact(g, g).real().log();
      if (std::abs(candidate_ratio_zbar(1, k, 4.0).value_log - exact) > 1e-12) return false;
      const GaussianFn f = build_radial(1, k);
      const double rexact = lp_norm_exact_even(f, 4).log() / 4 - 0.5 * inner_exact(f, f).real().log();
      if (std::abs(candidate_ratio_radial(1, k, 4.0, QuadSpec{}).value_log - rexact) > 1e-8) return false;
    }
    return true;
  });

  CsvTable t;
  t.header = {"check", "status"};
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    std::string note;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      note = std::string(": ") + e.what();
    }
    if (!ok) ++failed;
    t.rows.push_back({name, ok ? "PASS" : "FAIL" + note});
  }
  if (ctx.csv()) {
    emit_csv(ctx, t, {"failed: " + std::to_string(failed)});
  } else {
    Json rows = Json::array();
    for (const auto& r : t.rows) rows.push_back({{"check", r[0]}, {"status", r[1]}});
    emit_json(ctx, {{"checks", rows}, {"failed", failed}});
  }
  if (failed) {
    report_error(*ctx.err, "selftest", std::to_string(failed) + " check(s) failed");
    return kExitValidation;
  }
  return kExitOk;
}

const std::map<std::string, std::function<int(const Context&)>>& runners() {
  static const std::map<std::string, std::function<int(const Context&)>> r = {
      {"eigen", run_eigen},       {"norms", run_norms},     {"project", run_project},
      {"opnorm", run_opnorm},     {"sweep", run_sweep},     {"dispersive", run_dispersive},
      {"heisenberg", run_heisenberg}, {"selftest", run_selftest},
  };
  return r;
}

void merge_section(Json& config, const Json& section, const std::map<std::string, const OptDef*>& known,
                   const std::string& where) {
  if (!section.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, value] : section.items()) {
    if (command_options().count(key)) continue;  // another subcommand's section
    const auto it = known.find(key);
    if (it == known.end()) throw ValidationError("unknown key '" + key + "' in " + where);
    config[key] = normalize(*it->second, value);
  }
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral projections of the twisted Laplacian: exact and numerical tools", "twisted"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  std::string config_path;
  std::string output_path = "-";
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> given;
  std::map<std::string, CLI::App*> subs;

  for (const auto& [name, help] : kDescriptions) {
    CLI::App* sub = app.add_subcommand(name, help);
    subs[name] = sub;
    sub->add_option("--config", config_path, "JSON config file (defaults < file < flags)");
    sub->add_option("--output,-o", output_path, "output file, - for stdout");
    auto add = [&](const OptDef& d) {
      given[name][d.name] = sub->add_option("--" + d.name, raw[name][d.name], d.help);
    };
    for (const auto& d : global_options()) add(d);
    for (const auto& d : command_options().at(name)) add(d);
  }

  std::vector<const char*> argv{"twisted"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }

  Context ctx;
  ctx.command = command;
  ctx.output = output_path;
  ctx.out = &out;
  ctx.err = &err;
  try {
    std::map<std::string, const OptDef*> known;
    for (const auto& d : global_options()) known[d.name] = &d;
    for (const auto& d : command_options().at(command)) known[d.name] = &d;

    Json config = Json::object();
    for (const auto& d : global_options()) config[d.name] = d.def;
    for (const auto& d : command_options().at(command)) config[d.name] = d.def;
    if (command == "sweep" || command == "dispersive") config["format"] = "csv";  // tables by default
    if (!config_path.empty()) {
      const Json file = read_json_file(config_path);
      merge_section(config, file, known, "config file");
      if (file.contains(command)) merge_section(config, file.at(command), known, "config section '" + command + "'");
    }
    for (const auto& [key, opt] : given[command]) {
      if (opt->count() > 0) config[key] = normalize(*known.at(key), raw[command][key]);
    }
    const std::string format = config.at("format").get<std::string>();
    if (format != "json" && format != "csv") throw ValidationError("format must be json or csv");
    ctx.config = std::move(config);
    ctx.threads();
    return runners().at(command)(ctx);
  } catch (const ValidationError& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const ConvergenceError& e) {
    report_error(err, "non_convergence", e.what(),
                 {{"last_value", e.last_value()}, {"last_rel_err", e.last_rel_err()}});
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  }
}

}  // namespace twisted
