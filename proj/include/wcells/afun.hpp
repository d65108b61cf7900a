#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wcells/cells.hpp"
#include "wcells/hecke.hpp"

namespace wcells {

// C_x C_y in C-coordinates for every x, y in ball(R). Needs 2R <= horizon unless W is finite
// and fits in the ball.
class HProducts {
public:
  HProducts(const HeckeAlgebra& H, int R);

  const HeckeAlgebra& algebra() const { return H_; }
  const CoxeterGroup& group() const { return H_.group(); }
  int radius() const { return R_; }
  const std::vector<Element>& ball() const { return ball_; }
  bool in_ball(Element x) const { return group().length(x) <= R_; }
  const HeckeElt& product(Element x, Element y) const;
  Laurent h(Element x, Element y, Element z) const { return product(x, y).coeff(z); }

private:
  const HeckeAlgebra& H_;
  int R_;
  std::vector<Element> ball_;
  std::vector<std::uint32_t> pos_;         // element id -> ball index
  std::vector<std::vector<HeckeElt>> by_y_;  // [y][x]
};

// max deg h_{x,y,w} over x, y in ball(R) with one maximizing pair.
struct ABall {
  int value = kNegInfDegree;
  std::pair<Element, Element> witness;
};
ABall a_ball(const HProducts& P, Element w);
// a_ball(w, r) for r = 0..R, read off one table.
std::vector<ABall> a_ball_by_radius(const HProducts& P, Element w);

struct DeltaN {
  int delta = 0;
  long long n = 0;
};
// p_{e,w} = n_w q^{-Delta(w)} + lower terms
DeltaN delta_n(const HeckeAlgebra& H, Element w);

// gamma_{x,y,z}: coefficient of q^{a(z)} in h_{x,y,z^-1}.
long long gamma_coeff(const HProducts& P, Element x, Element y, Element z, long long a_of_z);

// Source of a-values: predicted (Cells::a_pred) or exact on a finite group.
struct ASource {
  std::string name;
  std::function<long long(Element)> value;
  explicit operator bool() const { return static_cast<bool>(value); }
};
ASource predicted_a(const Cells& cells);
// a(w) = max deg h_{x,y,w} over the whole group; throws NotApplicableSystem unless W is finite
// and P covers it.
ASource exact_a(const HProducts& P);

struct AProfile {
  Element element;
  ABall a_ball;
  std::optional<long long> a_pred;
  DeltaN dn;
};
AProfile a_profile(const HProducts& P, const Cells* cells, Element w);

// {z in ball(R) : a(z) = Delta(z)}
std::vector<Element> distinguished_ball(const HeckeAlgebra& H, int R, const ASource& a);

enum class Flavor { left, right, two_sided };
std::string_view flavor_name(Flavor f);
Flavor parse_flavor(std::string_view name);

// Edge w -> y when C_y occurs in C_s C_w (left), C_w C_s (right) or either (two-sided),
// both ends in ball(R); y is then below w in the preorder.
struct CellGraph {
  Flavor flavor = Flavor::left;
  int radius = 0;
  std::vector<Element> vertices;
  std::vector<std::vector<std::uint32_t>> out;  // indices into vertices
  std::vector<std::uint32_t> component;         // SCC id per vertex, in discovery order
  std::size_t components = 0;

  std::optional<std::uint32_t> index_of(Element w) const;
  bool same_component(Element a, Element b) const;
  // Reflexive-transitive closure: below[i][j] iff vertices[j] is reachable from vertices[i],
  // for the first `sources` vertices (all by default).
  std::vector<std::vector<bool>> reachability(std::size_t sources = SIZE_MAX) const;
  std::vector<std::vector<Element>> component_members() const;
};
CellGraph cell_graph(const HeckeAlgebra& H, int R, Flavor flavor);

// Predicted right cells b.d.U_d met inside ball(R), checked against the right-flavor SCCs.
struct RightCellComparison {
  std::size_t predicted_cells = 0;
  std::size_t certified = 0;  // all members of the predicted cell in one SCC
  std::size_t split = 0;      // not refuted: paths may leave the ball
  std::size_t mixed = 0;      // an SCC meets two predicted cells: contradicts the prediction
};
RightCellComparison compare_right_cells(const CellGraph& right, const Cells& cells);

struct PReport {
  int k = 0;
  std::string statement;
  int radius = 0;
  bool pass = true;
  std::size_t instances = 0;
  std::optional<std::string> counterexample;
  std::vector<std::string> caveats;
};
nlohmann::ordered_json to_json(const PReport& r);

// Instance checks of P1..P15 with quantifiers restricted to ball(R). Preorder paths may pass
// through ball(reach), reach >= R; a path found there is a certificate in W. The default reach
// is horizon - 1, or R when ball(R) is the whole finite group.
class PChecker {
public:
  // Throws UnsupportedWithoutPrediction when `a` is empty.
  PChecker(const HeckeAlgebra& H, int R, ASource a, std::optional<int> reach = std::nullopt);
  PReport check(int k) const;
  const HProducts& products() const { return P_; }
  int reach() const { return reach_; }

private:
  using Info = std::pair<long long, DeltaN>;  // (a, Delta and n)
  const Info& info(Element z) const;
  long long gamma(Element x, Element y, Element z) const;
  bool in_d(Element z) const;

  PReport p1() const;
  PReport p2() const;
  PReport p3() const;
  PReport p4() const;
  PReport p5() const;
  PReport p6() const;
  PReport p7() const;
  PReport p8() const;
  PReport p9_11(int k, const CellGraph& g) const;
  PReport p12() const;
  PReport p13() const;
  PReport p14() const;
  PReport p15() const;

  const HeckeAlgebra& H_;
  int R_;
  int reach_;
  ASource a_;
  HProducts P_;
  CellGraph left_, right_, two_;
  mutable std::vector<std::optional<Info>> info_;
};

PReport check_P(const HeckeAlgebra& H, int k, int R, const ASource& a, std::optional<int> reach = std::nullopt);

}  // namespace wcells
