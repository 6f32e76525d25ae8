#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace twisted {

/// A tuple of nonnegative integers (alpha in N^n).
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : entries_(n, 0) {}
  MultiIndex(std::initializer_list<int> entries);
  explicit MultiIndex(std::vector<int> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  int operator[](std::size_t j) const { return entries_[j]; }
  int& operator[](std::size_t j) { return entries_[j]; }
  std::span<const int> entries() const noexcept { return entries_; }

  /// |alpha| = sum of entries.
  int order() const noexcept;

  /// alpha! = prod alpha_j!, exact.
  mpz_class factorial() const;

  MultiIndex operator+(const MultiIndex& other) const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

  std::string to_string() const;

private:
  std::vector<int> entries_;
};

/// Multinomial coefficient binom(|alpha|; alpha_1, ..., alpha_n).
mpz_class multinomial(const MultiIndex& alpha);

/// binom(n, k) as an exact integer; zero for k < 0 or k > n.
mpz_class binomial(long n, long k);

/// All alpha in N^n with |alpha| = order, in reverse-lexicographic order
/// (first coordinate largest first), e.g. n=2, order=2: (2,0), (1,1), (0,2).
std::vector<MultiIndex> compositions(std::size_t n, int order);

}  // namespace twisted
