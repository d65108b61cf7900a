#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wcells/coxeter.hpp"

namespace wcells {

// Candidate distinguished element: w_J, or light*w_J for a pair J with even finite bond.
struct DSymbol {
  GenSet J;
  std::optional<Gen> light;

  static DSymbol longest(GenSet J) { return {J, std::nullopt}; }
  static DSymbol light_longest(Gen light, GenSet J) { return {J, light}; }
  static DSymbol parse(std::string_view text);  // "e", "r", "rt", "w_rs", "sw_st", ...
  bool is_gen(Gen g) const { return !light && J == GenSet{g}; }
  DSymbol mirrored() const;  // r <-> t
  std::string str() const;
  auto operator<=>(const DSymbol& o) const { return key() <=> o.key(); }
  bool operator==(const DSymbol& o) const { return key() == o.key(); }

private:
  std::pair<int, int> key() const { return {J.bits(), light ? 1 + index(*light) : 0}; }
};

// All candidate symbols present for (sys, L), in a fixed order. Throws NotDimensionTwo.
std::vector<DSymbol> d_symbols(const CoxeterSystem& sys, const Weights& L);
// Predicted a-value a'(d); nullopt when the symbol is not in D for (sys, L).
std::optional<long long> aprime(const DSymbol& d, const CoxeterSystem& sys, const Weights& L);

// m_rt = 2, 1/m_rs + 1/m_st < 1/2 and at least one of m_rs, m_st finite.
bool in_hyperbolic_family(const CoxeterSystem& sys);

enum class CellVerdict { same, different };
std::string_view verdict_name(CellVerdict v);

// Two-sided cell relation of d1, d2 in D_N by the theorem's if-and-only-if list.
// `rule` receives a description of the matching case when the verdict is `different`.
CellVerdict classify_pair(const DSymbol& d1, const DSymbol& d2, const CoxeterSystem& sys, const Weights& L,
                          std::string* rule = nullptr);

struct DElement {
  DSymbol symbol;
  Element elem;
  long long aprime = 0;
};

struct Decomposition {
  Element b, d, y;
};

struct LengthReport {
  bool pass = true;
  std::size_t pairs_checked = 0;
  std::size_t pairs_beyond_horizon = 0;
  std::optional<std::pair<Element, Element>> counterexample;  // (b, y)
};

// The combinatorial cell machinery: D, a', Omega_N, U_d, B_d and the right-cell decomposition.
// All a-values here are predictions computed from factor containment alone.
class Cells {
public:
  Cells(const CoxeterGroup& W, Weights L);

  const CoxeterGroup& group() const { return W_; }
  const Weights& weights() const { return L_; }
  const std::vector<DElement>& d_set() const { return d_; }
  std::map<long long, std::vector<DElement>> d_levels() const;
  const DElement* find(Element d) const;
  const DElement& element(const DSymbol& s) const;  // throws NotInD

  // max a'(d) over distinguished factors d of w
  long long a_pred(Element w) const { return a_pred_[w.id]; }

  bool in_u(const DElement& d, Element y) const;
  bool in_b(const DElement& d, Element x) const;
  std::vector<Element> u_set(Element d, int R) const;
  std::vector<Element> b_set(Element d, int R) const;

  // Exhaustive search; throws NonUniqueDecomposition if the triple is not unique or missing.
  Decomposition decompose(Element w) const;
  LengthReport length_additivity_check(Element d, int R) const;

  CellVerdict two_sided_classifier(Element d1, Element d2, std::string* rule = nullptr) const;
  // Some w in Omega_N with w = d1.x = y.d2 within the horizon, if one exists.
  std::optional<Element> connect_witness(Element d1, Element d2) const;

  // One row per w in ball(R): word,length,a_pred,d,b,y,cell_id. cell_id numbers the right
  // cells b.d.U_d in order of first appearance.
  std::string cell_table_csv(int R) const;

private:
  const DElement& require(Element d) const;

  const CoxeterGroup& W_;
  Weights L_;
  std::vector<DElement> d_;
  std::vector<long long> a_pred_;
};

}  // namespace wcells
