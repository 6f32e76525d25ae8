#include "twisted/exact_value.hpp"

#include <cmath>
#include <numbers>

#include "twisted/errors.hpp"

namespace twisted {

ExactValue::ExactValue(mpq_class rational, int pi_power)
    : rational_(std::move(rational)), pi_power_(pi_power) {
  rational_.canonicalize();
  if (sgn(rational_) == 0) pi_power_ = 0;
}

ExactValue& ExactValue::operator*=(const ExactValue& o) {
  *this = ExactValue(rational_ * o.rational_, pi_power_ + o.pi_power_);
  return *this;
}

ExactValue& ExactValue::operator/=(const ExactValue& o) {
  if (o.is_zero()) throw ValidationError("division by zero ExactValue");
  *this = ExactValue(rational_ / o.rational_, pi_power_ - o.pi_power_);
  return *this;
}

ExactValue operator+(const ExactValue& a, const ExactValue& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.pi_power_ != b.pi_power_) {
    throw ValidationError("cannot add ExactValues with different powers of pi");
  }
  return ExactValue(a.rational_ + b.rational_, a.pi_power_);
}

ExactValue ExactValue::pow(int e) const {
  if (e < 0) {
    if (is_zero()) throw ValidationError("zero to a negative power");
    return ExactValue(mpq_class(1) / rational_, -pi_power_).pow(-e);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), rational_.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), rational_.get_den_mpz_t(), static_cast<unsigned long>(e));
  return ExactValue(mpq_class(num, den), pi_power_ * e);
}

namespace {

double log_mpz(const mpz_class& z) {
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(std::abs(mant)) + static_cast<double>(exp2) * std::numbers::ln2;
}

}  // namespace

double log_rational(const mpq_class& q) {
  if (sgn(q) <= 0) throw ValidationError("log of a nonpositive rational");
  return log_mpz(q.get_num()) - log_mpz(q.get_den());
}

double ExactValue::log() const {
  return log_rational(rational_) + pi_power_ * std::log(std::numbers::pi);
}

double ExactValue::to_double() const {
  if (is_zero()) return 0.0;
  const double mag = std::exp(log_rational(abs(rational_)) + pi_power_ * std::log(std::numbers::pi));
  return sgn(rational_) < 0 ? -mag : mag;
}

std::string ExactValue::to_string() const {
  std::string out = rational_to_string(rational_);
  if (pi_power_ != 0) out += "*pi^" + std::to_string(pi_power_);
  return out;
}

}  // namespace twisted
