#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace wcells {

using Integer = boost::multiprecision::cpp_int;

// deg 0
inline constexpr int kNegInfDegree = std::numeric_limits<int>::min();

// Element of Z[q, q^-1]; terms sorted by exponent, no zero coefficients.
class Laurent {
public:
  using Term = std::pair<int, Integer>;

  Laurent() = default;
  Laurent(long long c);  // NOLINT(google-explicit-constructor): integers embed as constants
  static Laurent monomial(int exp, Integer coef = 1);
  static Laurent q(int exp) { return monomial(exp); }
  static Laurent xi(long long L);  // q^L - q^-L
  static Laurent from_terms(std::vector<Term> terms);

  bool is_zero() const { return terms_.empty(); }
  int degree() const { return terms_.empty() ? kNegInfDegree : terms_.back().first; }
  int low_degree() const { return terms_.empty() ? std::numeric_limits<int>::max() : terms_.front().first; }
  Integer coeff(int exp) const;
  const Integer& leading() const { return terms_.back().second; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_monomial() const { return terms_.size() == 1; }

  Laurent bar() const;
  Laurent negative_part() const;  // exponents < 0
  Laurent shifted(int k) const;   // q^k * this

  Laurent& operator+=(const Laurent& o);
  Laurent& operator-=(const Laurent& o);
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }
  // this += a * b without materializing a * b
  void add_product(const Laurent& a, const Laurent& b);

  friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
  friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }
  friend Laurent operator*(const Laurent& a, const Laurent& b);
  friend Laurent operator-(Laurent a);
  bool operator==(const Laurent& o) const = default;

  std::string str() const;  // "q^-3 + 2q^2 - 1"

private:
  std::vector<Term> terms_;
};

// Arithmetic on degrees with deg 0 = -infinity absorbing under addition.
inline int degree_add(int a, int b) { return (a == kNegInfDegree || b == kNegInfDegree) ? kNegInfDegree : a + b; }

}  // namespace wcells
