#include "twisted/multi_index.hpp"

#include <numeric>
#include <sstream>

#include "twisted/errors.hpp"

namespace twisted {

MultiIndex::MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw ValidationError("multi-index entries must be nonnegative");
  }
}

int MultiIndex::order() const noexcept {
  return std::accumulate(entries_.begin(), entries_.end(), 0);
}

mpz_class MultiIndex::factorial() const {
  mpz_class result = 1;
  mpz_class f;
  for (int e : entries_) {
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(e));
    result *= f;
  }
  return result;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.size() != size()) throw ValidationError("multi-index length mismatch");
  MultiIndex out = *this;
  for (std::size_t j = 0; j < size(); ++j) out.entries_[j] += other.entries_[j];
  return out;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < entries_.size(); ++j) os << (j ? "," : "") << entries_[j];
  os << ')';
  return os.str();
}

mpz_class multinomial(const MultiIndex& alpha) {
  mpz_class total;
  mpz_fac_ui(total.get_mpz_t(), static_cast<unsigned long>(alpha.order()));
  return total / alpha.factorial();
}

mpz_class binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

namespace {

void compose(std::size_t pos, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    compose(pos + 1, remaining - e, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> compositions(std::size_t n, int order) {
  if (n == 0) throw ValidationError("dimension must be positive");
  if (order < 0) return {};
  std::vector<MultiIndex> out;
  std::vector<int> cur(n, 0);
  compose(0, order, cur, out);
  return out;
}

}  // namespace twisted
