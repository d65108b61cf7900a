#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wcells/cells.hpp"

namespace wcells {

using Rational = boost::multiprecision::cpp_rational;
std::string to_string(const Rational& x);  // "3/2", "4", "-1/3"

// alpha*a + beta*b + gamma*c over (a, b, c) = (L(r), L(s), L(t)).
struct LinearForm {
  Rational alpha, beta, gamma;

  Rational eval(const Rational& a, const Rational& b, const Rational& c) const { return alpha * a + beta * b + gamma * c; }
  LinearForm operator-(const LinearForm& o) const { return {alpha - o.alpha, beta - o.beta, gamma - o.gamma}; }
  bool is_zero() const { return alpha == 0 && beta == 0 && gamma == 0; }
  // Coprime integer coefficients, first nonzero one positive (same zero set).
  LinearForm normalized() const;
  std::string str() const;  // "2a + 2b - c"
  bool operator==(const LinearForm&) const = default;
};

// Sign pattern (sign(a-b), sign(c-b)) deciding which light*w_J elements exist.
struct Chamber {
  int ab = 0;
  int cb = 0;
  static Chamber at(const Rational& a, const Rational& b, const Rational& c);
  std::string str() const;  // "a>b, c<b"
  bool operator==(const Chamber&) const = default;
};

// Bonds of the family m_rt = 2; m_st may be odd only when the chamber has c = b.
struct Bonds {
  int m_rs;
  int m_st;
  CoxeterSystem system() const { return {2, m_rs, m_st}; }
};

// Exact a' form; throws UndefinedInChamber when the symbol is absent there.
LinearForm aprime_form(const DSymbol& d, Bonds bonds, Chamber chamber);

// Symbols of D present at the chamber (all of them when a = b = c is not forced).
std::vector<DSymbol> chamber_symbols(Bonds bonds, Chamber chamber);

// Integer weights proportional to (a, b, c).
Weights scaled_weights(const Rational& a, const Rational& b, const Rational& c);

// D_N grouped by a' for the given integer weights. Throws NotDimensionTwo.
std::map<long long, std::vector<DSymbol>> d_levels(const CoxeterSystem& sys, const Weights& L);

// Values of a/b (with b = c, m_rs = 2m, m_st = k) where two elements of D share a'
// and lie in one two-sided cell.
std::vector<Rational> critical_values_1d(int m, int k);

struct Point2 {
  Rational x, y;  // (a/b, c/b)
  bool operator<(const Point2& o) const { return x < o.x || (x == o.x && y < o.y); }
  bool operator==(const Point2&) const = default;
};

// One chamber segment of a locus a'(d1) = a'(d2) in the (a/b, c/b) quadrant.
struct CriticalLocus {
  DSymbol d1, d2;
  LinearForm form;  // normalized a'(d1) - a'(d2), zero on the locus
  Point2 from;                     // start, possibly on an axis
  std::optional<Point2> to;        // nullopt for a ray
  Point2 sample;                   // interior point the verdict was computed at
  std::string chamber;             // sign constraints valid on the open segment
  CellVerdict verdict = CellVerdict::same;
  std::string rule;                // matching theorem case for `different`
  bool critical() const { return verdict == CellVerdict::same; }
};

// Loci for m_rs = 2m, m_st = 2n, split into segments at a = b, c = b and a + c = N.
std::vector<CriticalLocus> critical_lines_2d(int m, int n);

struct TriplePoint {
  Point2 at;
  long long level = 0;  // N with b = 1 scaled to integers, see `weights`
  Weights weights{1, 1, 1};
  std::vector<DSymbol> members;
};

// Points of the quadrant where some D_N has at least three elements.
std::vector<TriplePoint> triple_points(int m, int n);

enum class ExportFormat { svg, csv, json };
ExportFormat parse_export_format(std::string_view name);
std::string render_arrangement(const std::vector<CriticalLocus>& loci, const std::vector<TriplePoint>& points,
                               ExportFormat format);
void export_arrangement(const std::vector<CriticalLocus>& loci, const std::vector<TriplePoint>& points,
                        ExportFormat format, const std::filesystem::path& path);
// Inverse of the JSON rendering.
std::vector<CriticalLocus> loci_from_json(const std::string& text);

}  // namespace wcells
