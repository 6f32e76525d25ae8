#include "twisted/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "twisted/errors.hpp"

namespace twisted {

namespace {

// Field access with ValidationError instead of json exceptions.
const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ValidationError(std::string("field '") + key + "' must be a rational string");
}

long long int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be an integer");
  return v.get<long long>();
}

MultiIndex index_field(const Json& j, const char* key, std::size_t n) {
  const Json& v = field(j, key);
  if (!v.is_array() || v.size() != n) {
    throw ValidationError(std::string("field '") + key + "' must be an array of length " + std::to_string(n));
  }
  std::vector<int> e;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ValidationError(std::string("field '") + key + "' must hold integers");
    e.push_back(x.get<int>());
  }
  return MultiIndex(std::move(e));
}

Json index_json(const MultiIndex& m) {
  Json a = Json::array();
  for (int e : m.entries()) a.push_back(e);
  return a;
}

std::size_t dim_field(const Json& j) {
  const long long n = int_field(j, "n");
  if (n < 1 || n > 64) throw ValidationError("n must be between 1 and 64");
  return static_cast<std::size_t>(n);
}

}  // namespace

Json to_json(const GaussianFn& g) {
  Json j;
  j["n"] = g.dim();
  j["t"] = rational_to_string(g.width());
  Json terms = Json::array();
  for (const auto& [m, c] : g.poly().terms()) {
    terms.push_back({{"a", index_json(m.z_part())},
                     {"b", index_json(m.zbar_part())},
                     {"re", rational_to_string(c.re)},
                     {"im", rational_to_string(c.im)}});
  }
  j["terms"] = terms;
  return j;
}

GaussianFn gaussian_from_json(const Json& j) {
  const std::size_t n = dim_field(j);
  const mpq_class t = j.contains("t") ? rational_from_string(string_field(j, "t")) : mpq_class(1);
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) throw ValidationError("field 'terms' must be an array");
  CPoly p(n);
  for (const auto& term : terms) {
    const MultiIndex a = index_field(term, "a", n);
    const MultiIndex b = index_field(term, "b", n);
    Monomial m(n);
    for (std::size_t i = 0; i < n; ++i) {
      m.z_exp(i) = a[i];
      m.zbar_exp(i) = b[i];
    }
    const mpq_class re = rational_from_string(string_field(term, "re"));
    const mpq_class im = term.contains("im") ? rational_from_string(string_field(term, "im")) : mpq_class(0);
    p.add_term(m, ComplexRational(re, im));
  }
  return GaussianFn(std::move(p), t);
}

Json to_json(const EigenLabel& l) {
  return {{"alpha", index_json(l.alpha)}, {"beta", index_json(l.beta)}, {"n", l.dim()}};
}

EigenLabel label_from_json(const Json& j) {
  const std::size_t n = dim_field(j);
  return EigenLabel(index_field(j, "alpha", n), index_field(j, "beta", n));
}

Json to_json(const ExactValue& v) {
  return {{"rational", rational_to_string(v.rational())}, {"pi_power", v.pi_power()}};
}

ExactValue exact_value_from_json(const Json& j) {
  return ExactValue(rational_from_string(string_field(j, "rational")), static_cast<int>(int_field(j, "pi_power")));
}

Json to_json(const EigenExpansion& e) {
  Json entries = Json::array();
  for (const auto& [label, c] : e.entries) {
    entries.push_back({{"label", to_json(label)}, {"re", rational_to_string(c.re)}, {"im", rational_to_string(c.im)}});
  }
  return {{"n", e.n}, {"entries", entries}};
}

EigenExpansion expansion_from_json(const Json& j) {
  EigenExpansion e;
  e.n = dim_field(j);
  const Json& entries = field(j, "entries");
  if (!entries.is_array()) throw ValidationError("field 'entries' must be an array");
  for (const auto& x : entries) {
    EigenLabel l = label_from_json(field(x, "label"));
    if (l.dim() != e.n) throw ValidationError("label dimension differs from expansion dimension");
    e.entries.emplace_back(std::move(l), ComplexRational(rational_from_string(string_field(x, "re")),
                                                         rational_from_string(string_field(x, "im"))));
  }
  return e;
}

Json to_json(const QuadSpec& s) {
  return {{"radial_nodes", s.radial_nodes},
          {"panel_width", s.panel_width},
          {"angular_nodes", s.angular_nodes},
          {"tail_radius_multiplier", s.tail_radius_multiplier},
          {"target_rel_err", s.target_rel_err},
          {"max_doublings", s.max_doublings}};
}

Json to_json(const NormEstimate& e) {
  Json j{{"n", e.n},
         {"k", e.k},
         {"p", format_real(e.p)},
         {"B", e.B},
         {"kind", to_string(e.kind)},
         {"value_log", e.value_log},
         {"iterations", e.iterations},
         {"tolerance", e.tolerance},
         {"seed", e.seed},
         {"converged", e.converged}};
  if (!e.objective_trace.empty()) j["objective_trace"] = e.objective_trace;
  return j;
}

NormEstimate norm_estimate_from_json(const Json& j) {
  NormEstimate e;
  e.n = dim_field(j);
  e.k = static_cast<int>(int_field(j, "k"));
  e.p = parse_real(string_field(j, "p"));
  e.B = static_cast<int>(int_field(j, "B"));
  e.kind = kind_from_string(string_field(j, "kind"));
  const Json& v = field(j, "value_log");
  if (!v.is_number()) throw ValidationError("field 'value_log' must be a number");
  e.value_log = v.get<double>();
  e.iterations = static_cast<int>(int_field(j, "iterations"));
  if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tolerance")) e.tolerance = j.at("tolerance").get<double>();
  if (j.contains("converged")) e.converged = j.at("converged").get<bool>();
  if (j.contains("objective_trace")) e.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  return e;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

double parse_real(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Infinity") return std::numeric_limits<double>::infinity();
  if (s.find('/') != std::string::npos) {
    const mpq_class q = rational_from_string(s);
    // both parts exact in double: one correctly rounded division
    if (abs(q.get_num()) < (mpz_class(1) << 53) && q.get_den() < (mpz_class(1) << 53)) {
      return q.get_num().get_d() / q.get_den().get_d();
    }
    return q.get_d();
  }
  double x = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(x)) {
    throw ValidationError("not a number: '" + s + "'");
  }
  return x;
}

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void CsvTable::write(std::ostream& out) const {
  for (const auto& c : comments) out << "# " << c << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

CsvTable CsvTable::read(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    if (!have_header) {
      t.header = split(line);
      have_header = true;
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size()) throw ValidationError("CSV row has the wrong number of fields");
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw ValidationError("CSV has no header");
  return t;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError("CSV has no column '" + name + "'");
}

std::vector<std::string> norm_estimate_header() {
  return {"n", "k", "p", "B", "kind", "value_log", "iterations", "seed"};
}

std::vector<std::string> norm_estimate_fields(const NormEstimate& e) {
  return {std::to_string(e.n),        std::to_string(e.k),          format_real(e.p),
          std::to_string(e.B),        to_string(e.kind),            format_real(e.value_log),
          std::to_string(e.iterations), std::to_string(e.seed)};
}

NormEstimate norm_estimate_from_fields(const CsvTable& t, const std::vector<std::string>& row) {
  auto get = [&](const char* name) { return row.at(t.column(name)); };
  auto to_int = [](const std::string& s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("not an integer: '" + s + "'");
    return v;
  };
  NormEstimate e;
  e.n = static_cast<std::size_t>(to_int(get("n")));
  e.k = static_cast<int>(to_int(get("k")));
  e.p = parse_real(get("p"));
  e.B = static_cast<int>(to_int(get("B")));
  e.kind = kind_from_string(get("kind"));
  e.value_log = parse_real(get("value_log"));
  e.iterations = static_cast<int>(to_int(get("iterations")));
  e.seed = static_cast<std::uint64_t>(to_int(get("seed")));
  return e;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace twisted
