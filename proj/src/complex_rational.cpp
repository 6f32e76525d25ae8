#include "twisted/complex_rational.hpp"

#include "twisted/errors.hpp"

namespace twisted {

ComplexRational ComplexRational::operator/(const ComplexRational& o) const {
  const mpq_class den = o.norm();
  if (sgn(den) == 0) throw ValidationError("division by zero");
  ComplexRational num = *this * o.conj();
  num.re /= den;
  num.im /= den;
  return num;
}

std::string rational_to_string(const mpq_class& q) {
  // mpq_class::get_str already omits "/1" for integers.
  return q.get_str();
}

mpq_class rational_from_string(const std::string& s) {
  if (s.empty()) throw ValidationError("empty rational string");
  const auto slash = s.find('/');
  auto valid_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i) {
      if (t[i] < '0' || t[i] > '9') return false;
    }
    return true;
  };
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) throw ValidationError("malformed rational: " + s);
  mpz_class p(num[0] == '+' ? num.substr(1) : num);
  mpz_class q(den[0] == '+' ? den.substr(1) : den);
  if (sgn(q) == 0) throw ValidationError("zero denominator: " + s);
  mpq_class out(p, q);
  out.canonicalize();
  return out;
}

}  // namespace twisted
