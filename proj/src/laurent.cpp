#include "wcells/laurent.hpp"

#include <algorithm>
#include <stdexcept>

namespace wcells {

namespace {

int add_exp(int a, int b) {
  int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Laurent exponent overflow");
  return r;
}

// out = a + sign * shift(b, k) * c, all sorted
void merge_scaled(const std::vector<Laurent::Term>& a, const std::vector<Laurent::Term>& b, int k,
                  const Integer& c, std::vector<Laurent::Term>& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < add_exp(j->first, k))) {
      out.push_back(*i++);
    } else {
      const int e = add_exp(j->first, k);
      Integer v = j->second * c;
      if (i != a.end() && i->first == e) {
        v += i->second;
        ++i;
      }
      ++j;
      if (v != 0) out.emplace_back(e, std::move(v));
    }
  }
}

}  // namespace

Laurent::Laurent(long long c) {
  if (c != 0) terms_.emplace_back(0, Integer(c));
}

Laurent Laurent::monomial(int exp, Integer coef) {
  Laurent p;
  if (coef != 0) p.terms_.emplace_back(exp, std::move(coef));
  return p;
}

Laurent Laurent::xi(long long L) {
  Laurent p;
  if (L <= 0) throw std::invalid_argument("xi needs a positive weight");
  const int e = static_cast<int>(L);
  p.terms_.emplace_back(-e, Integer(-1));
  p.terms_.emplace_back(e, Integer(1));
  return p;
}

Laurent Laurent::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
  Laurent p;
  for (auto& [e, c] : terms) {
    if (!p.terms_.empty() && p.terms_.back().first == e)
      p.terms_.back().second += c;
    else
      p.terms_.emplace_back(e, std::move(c));
    if (p.terms_.back().second == 0) p.terms_.pop_back();
  }
  return p;
}

Integer Laurent::coeff(int exp) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                             [](const Term& t, int e) { return t.first < e; });
  return (it != terms_.end() && it->first == exp) ? it->second : Integer(0);
}

Laurent Laurent::bar() const {
  Laurent p;
  p.terms_.reserve(terms_.size());
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) p.terms_.emplace_back(-it->first, it->second);
  return p;
}

Laurent Laurent::negative_part() const {
  Laurent p;
  for (const auto& t : terms_) {
    if (t.first >= 0) break;
    p.terms_.push_back(t);
  }
  return p;
}

Laurent Laurent::shifted(int k) const {
  Laurent p = *this;
  for (auto& t : p.terms_) t.first = add_exp(t.first, k);
  return p;
}

Laurent& Laurent::operator+=(const Laurent& o) {
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  merge_scaled(terms_, o.terms_, 0, Integer(1), out);
  terms_ = std::move(out);
  return *this;
}

Laurent& Laurent::operator-=(const Laurent& o) {
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  merge_scaled(terms_, o.terms_, 0, Integer(-1), out);
  terms_ = std::move(out);
  return *this;
}

void Laurent::add_product(const Laurent& a, const Laurent& b) {
  if (&a == this || &b == this) {
    *this += a * b;
    return;
  }
  const Laurent& small = a.terms_.size() <= b.terms_.size() ? a : b;
  const Laurent& big = &small == &a ? b : a;
  std::vector<Term> out;
  for (const auto& [e, c] : small.terms_) {
    merge_scaled(terms_, big.terms_, e, c, out);
    terms_.swap(out);
  }
}

Laurent operator*(const Laurent& a, const Laurent& b) {
  Laurent p;
  p.add_product(a, b);
  return p;
}

Laurent operator-(Laurent a) {
  for (auto& t : a.terms_) t.second = -t.second;
  return a;
}

std::string Laurent::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    const bool neg = c < 0;
    const Integer mag = neg ? Integer(-c) : c;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (e == 0 || mag != 1) out += mag.str();
    if (e != 0) out += e == 1 ? "q" : "q^" + std::to_string(e);
  }
  return out;
}

}  // namespace wcells
