#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "twisted/asymptotics.hpp"
#include "twisted/eigenbasis.hpp"
#include "twisted/exact_value.hpp"
#include "twisted/gaussian_fn.hpp"
#include "twisted/opnorm.hpp"
#include "twisted/projection.hpp"
#include "twisted/quadrature.hpp"

namespace twisted {

using Json = nlohmann::ordered_json;

// Exact objects. Rationals travel as strings "p/q"; parsers throw ValidationError on bad input.
//   GaussianFn:     {"n", "t", "terms": [{"a": [z exps], "b": [zbar exps], "re", "im"}]}
//   EigenLabel:     {"alpha", "beta", "n"}
//   ExactValue:     {"rational", "pi_power"}
//   EigenExpansion: {"n", "entries": [{"label", "re", "im"}]}
Json to_json(const GaussianFn& g);
GaussianFn gaussian_from_json(const Json& j);
Json to_json(const EigenLabel& l);
EigenLabel label_from_json(const Json& j);
Json to_json(const ExactValue& v);
ExactValue exact_value_from_json(const Json& j);
Json to_json(const EigenExpansion& e);
EigenExpansion expansion_from_json(const Json& j);
Json to_json(const QuadSpec& s);
Json to_json(const NormEstimate& e);
NormEstimate norm_estimate_from_json(const Json& j);

/// Parses a JSON document, mapping parse errors to ValidationError.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

/// "p/q", "p", decimals, "inf"; throws ValidationError.
double parse_real(const std::string& s);
/// Shortest round-trip decimal, "inf" for infinity.
std::string format_real(double x);

/// Minimal CSV: comma separated, no quoting (fields never contain commas). Lines starting
/// with '#' are comments and hold metadata.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
  static CsvTable read(std::istream& in);
  /// Column index by name; throws ValidationError.
  std::size_t column(const std::string& name) const;
};

/// n,k,p,B,kind,value_log,iterations,seed
std::vector<std::string> norm_estimate_header();
std::vector<std::string> norm_estimate_fields(const NormEstimate& e);
NormEstimate norm_estimate_from_fields(const CsvTable& t, const std::vector<std::string>& row);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace twisted
