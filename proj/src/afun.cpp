#include "wcells/afun.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "wcells/error.hpp"

namespace wcells {

namespace {

bool covers_finite_group(const CoxeterGroup& W, int R) {
  return W.system().finite() && W.ball_size(R) == W.size() && W.ball_size(W.horizon()) == W.size();
}

long long to_ll(const Integer& c) { return c.convert_to<long long>(); }

std::string pair_name(const CoxeterGroup& W, Element x, Element y) { return "(" + W.name(x) + ", " + W.name(y) + ")"; }

}  // namespace

HProducts::HProducts(const HeckeAlgebra& H, int R) : H_(H), R_(R) {
  const CoxeterGroup& W = H.group();
  if (2 * R > W.horizon() && !covers_finite_group(W, R))
    throw Error(Errc::HorizonExceeded, "products over ball(" + std::to_string(R) + ") need horizon " +
                                           std::to_string(2 * R) + ", have " + std::to_string(W.horizon()));
  ball_ = W.ball(R);
  pos_.assign(W.size(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t i = 0; i < ball_.size(); ++i) pos_[ball_[i].id] = static_cast<std::uint32_t>(i);
  by_y_.reserve(ball_.size());
  for (Element y : ball_) by_y_.push_back(H.c_products_column(ball_, y));
}

const HeckeElt& HProducts::product(Element x, Element y) const {
  if (!in_ball(x) || !in_ball(y))
    throw Error(Errc::HorizonExceeded, "C_x C_y requested outside ball(" + std::to_string(R_) + ")");
  return by_y_[pos_[y.id]][pos_[x.id]];
}

ABall a_ball(const HProducts& P, Element w) { return a_ball_by_radius(P, w).back(); }

std::vector<ABall> a_ball_by_radius(const HProducts& P, Element w) {
  const CoxeterGroup& W = P.group();
  std::vector<ABall> best(P.radius() + 1);
  for (Element x : P.ball())
    for (Element y : P.ball()) {
      const int d = P.h(x, y, w).degree();
      auto& slot = best[std::max(W.length(x), W.length(y))];
      if (d > slot.value) slot = {d, {x, y}};
    }
  for (std::size_t r = 1; r < best.size(); ++r)
    if (best[r - 1].value >= best[r].value) best[r] = best[r - 1];
  return best;
}

DeltaN delta_n(const HeckeAlgebra& H, Element w) {
  const Laurent p = H.kl_poly(CoxeterGroup::identity(), w);
  return {-p.degree(), to_ll(p.leading())};
}

long long gamma_coeff(const HProducts& P, Element x, Element y, Element z, long long a_of_z) {
  return to_ll(P.h(x, y, P.group().inverse(z)).coeff(static_cast<int>(a_of_z)));
}

ASource predicted_a(const Cells& cells) {
  return {"a_pred", [&cells](Element w) { return cells.a_pred(w); }};
}

ASource exact_a(const HProducts& P) {
  const CoxeterGroup& W = P.group();
  if (!covers_finite_group(W, P.radius()))
    throw Error(Errc::NotApplicableSystem, "exact a-values need a finite group covered by the product table");
  auto a = std::make_shared<std::vector<long long>>(W.size(), 0);
  for (Element x : P.ball())
    for (Element y : P.ball())
      for (const auto& [z, c] : P.product(x, y).coords()) (*a)[z.id] = std::max<long long>((*a)[z.id], c.degree());
  return {"exact", [a](Element w) { return (*a)[w.id]; }};
}

AProfile a_profile(const HProducts& P, const Cells* cells, Element w) {
  AProfile out{w, a_ball(P, w), std::nullopt, delta_n(P.algebra(), w)};
  if (cells) out.a_pred = cells->a_pred(w);
  return out;
}

std::vector<Element> distinguished_ball(const HeckeAlgebra& H, int R, const ASource& a) {
  if (!a) throw Error(Errc::UnsupportedWithoutPrediction, "no a-value source");
  std::vector<Element> out;
  for (Element z : H.group().ball(R))
    if (a.value(z) == delta_n(H, z).delta) out.push_back(z);
  return out;
}

std::string_view flavor_name(Flavor f) {
  switch (f) {
    case Flavor::left: return "left";
    case Flavor::right: return "right";
    case Flavor::two_sided: return "twosided";
  }
  return "";
}

Flavor parse_flavor(std::string_view name) {
  if (name == "left") return Flavor::left;
  if (name == "right") return Flavor::right;
  if (name == "twosided" || name == "two-sided") return Flavor::two_sided;
  throw Error(Errc::Usage, "unknown cell flavor '" + std::string(name) + "'");
}

std::optional<std::uint32_t> CellGraph::index_of(Element w) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), w);
  if (it == vertices.end() || *it != w) return std::nullopt;
  return static_cast<std::uint32_t>(it - vertices.begin());
}

bool CellGraph::same_component(Element a, Element b) const {
  const auto i = index_of(a), j = index_of(b);
  return i && j && component[*i] == component[*j];
}

std::vector<std::vector<bool>> CellGraph::reachability(std::size_t sources) const {
  const std::size_t n = vertices.size();
  std::vector<std::vector<bool>> below(std::min(sources, n), std::vector<bool>(n, false));
  for (std::size_t i = 0; i < below.size(); ++i) {
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(i)};
    below[i][i] = true;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto u : out[v])
        if (!below[i][u]) {
          below[i][u] = true;
          stack.push_back(u);
        }
    }
  }
  return below;
}

std::vector<std::vector<Element>> CellGraph::component_members() const {
  std::vector<std::vector<Element>> out(components);
  for (std::size_t i = 0; i < vertices.size(); ++i) out[component[i]].push_back(vertices[i]);
  return out;
}

CellGraph cell_graph(const HeckeAlgebra& H, int R, Flavor flavor) {
  const CoxeterGroup& W = H.group();
  if (R >= W.horizon() && !covers_finite_group(W, R))
    throw Error(Errc::HorizonExceeded, "cell graph over ball(" + std::to_string(R) + ") needs horizon > R");
  CellGraph g;
  g.flavor = flavor;
  g.radius = R;
  g.vertices = W.ball(R);
  const std::size_t n = g.vertices.size();
  g.out.resize(n);
  auto add_edge = [&](std::size_t from, Element to) {
    if (W.length(to) > R) return;
    const auto j = *g.index_of(to);
    if (j != from) g.out[from].push_back(j);
  };
  const auto gens = W.system().generators().members();
  for (std::size_t i = 0; i < n; ++i) {
    const Element w = g.vertices[i];
    for (Gen s : gens) {
      if (flavor != Flavor::right)
        for (const auto& [y, c] : H.c_gen_product(s, w).coords()) add_edge(i, y);
      // C_w C_s is the image of C_s C_{w^-1} under C_x -> C_{x^-1}
      if (flavor != Flavor::left)
        for (const auto& [y, c] : H.c_gen_product(s, W.inverse(w)).coords()) add_edge(i, W.inverse(y));
    }
    std::sort(g.out[i].begin(), g.out[i].end());
    g.out[i].erase(std::unique(g.out[i].begin(), g.out[i].end()), g.out[i].end());
  }

  // Tarjan, iterative
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> order(n, kUnset), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  g.component.assign(n, kUnset);
  std::uint32_t counter = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (order[root] != kUnset) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> frames{{root, 0}};
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < g.out[v].size()) {
        const auto u = g.out[v][next++];
        if (order[u] == kUnset) {
          order[u] = low[u] = counter++;
          stack.push_back(u);
          on_stack[u] = true;
          frames.emplace_back(u, 0);
        } else if (on_stack[u]) {
          low[v] = std::min(low[v], order[u]);
        }
        continue;
      }
      if (low[v] == order[v]) {
        std::uint32_t u;
        do {
          u = stack.back();
          stack.pop_back();
          on_stack[u] = false;
          g.component[u] = static_cast<std::uint32_t>(g.components);
        } while (u != v);
        ++g.components;
      }
      const auto done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }
  return g;
}

RightCellComparison compare_right_cells(const CellGraph& right, const Cells& cells) {
  if (right.flavor != Flavor::right) throw Error(Errc::Usage, "comparison needs the right-flavor graph");
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> predicted;  // (b, d) -> vertices
  std::vector<std::pair<std::uint32_t, std::uint32_t>> key_of(right.vertices.size());
  for (std::uint32_t i = 0; i < right.vertices.size(); ++i) {
    const auto dec = cells.decompose(right.vertices[i]);
    key_of[i] = {dec.b.id, dec.d.id};
    predicted[key_of[i]].push_back(i);
  }
  RightCellComparison out;
  out.predicted_cells = predicted.size();
  for (const auto& [key, members] : predicted) {
    const bool one = std::all_of(members.begin(), members.end(),
                                 [&](auto i) { return right.component[i] == right.component[members.front()]; });
    ++(one ? out.certified : out.split);
  }
  std::map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>> first_key;
  std::vector<bool> counted(right.components, false);
  for (std::uint32_t i = 0; i < right.vertices.size(); ++i) {
    auto [it, fresh] = first_key.emplace(right.component[i], key_of[i]);
    if (!fresh && it->second != key_of[i] && !counted[right.component[i]]) {
      counted[right.component[i]] = true;
      ++out.mixed;
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const PReport& r) {
  nlohmann::ordered_json j{{"statement", r.statement},
                           {"radius", r.radius},
                           {"result", r.pass ? "pass" : "fail"},
                           {"instances", r.instances}};
  if (r.counterexample) j["counterexample"] = *r.counterexample;
  j["caveats"] = r.caveats;
  return j;
}

// ---------------------------------------------------------------------------------------------

namespace {

int default_reach(const CoxeterGroup& W, int R, std::optional<int> reach) {
  if (reach) {
    if (*reach < R) throw Error(Errc::Usage, "preorder reach must be at least the radius");
    return *reach;
  }
  return covers_finite_group(W, R) ? R : std::max(R, W.horizon() - 1);
}

}  // namespace

PChecker::PChecker(const HeckeAlgebra& H, int R, ASource a, std::optional<int> reach)
    : H_(H),
      R_(R),
      reach_(default_reach(H.group(), R, reach)),
      a_(a ? std::move(a) : throw Error(Errc::UnsupportedWithoutPrediction, "check_P needs an a-value source")),
      P_(H, R),
      left_(cell_graph(H, reach_, Flavor::left)),
      right_(cell_graph(H, reach_, Flavor::right)),
      two_(cell_graph(H, reach_, Flavor::two_sided)),
      info_(H.group().size()) {}

const PChecker::Info& PChecker::info(Element z) const {
  auto& slot = info_[z.id];
  if (!slot) slot = Info{a_.value(z), delta_n(H_, z)};
  return *slot;
}

bool PChecker::in_d(Element z) const {
  const auto& [a, dn] = info(z);
  return a == dn.delta;
}

long long PChecker::gamma(Element x, Element y, Element z) const { return gamma_coeff(P_, x, y, z, info(z).first); }

namespace {

PReport start(int k, const char* statement, int R, const ASource& a) {
  PReport r;
  r.k = k;
  r.statement = statement;
  r.radius = R;
  r.caveats.push_back("a-values from " + a.name);
  return r;
}

void refute(PReport& r, std::string why) {
  if (!r.pass) return;
  r.pass = false;
  r.counterexample = std::move(why);
}

std::string preorder_caveat(int reach) {
  return "preorders are reachability through ball(" + std::to_string(reach) + "); longer paths are not seen";
}

}  // namespace

PReport PChecker::check(int k) const {
  switch (k) {
    case 1: return p1();
    case 2: return p2();
    case 3: return p3();
    case 4: return p4();
    case 5: return p5();
    case 6: return p6();
    case 7: return p7();
    case 8: return p8();
    case 9: return p9_11(9, left_);
    case 10: return p9_11(10, right_);
    case 11: return p9_11(11, two_);
    case 12: return p12();
    case 13: return p13();
    case 14: return p14();
    case 15: return p15();
    default: throw Error(Errc::Usage, "no statement P" + std::to_string(k));
  }
}

PReport PChecker::p1() const {
  auto r = start(1, "P1: a(w) <= Delta(w)", R_, a_);
  const auto& W = H_.group();
  for (Element w : P_.ball()) {
    ++r.instances;
    const auto& [a, dn] = info(w);
    if (a > dn.delta)
      refute(r, W.name(w) + ": a = " + std::to_string(a) + " > Delta = " + std::to_string(dn.delta));
  }
  return r;
}

PReport PChecker::p2() const {
  auto r = start(2, "P2: z in D, gamma_{x,y,z} != 0 implies x = y^-1", R_, a_);
  const auto& W = H_.group();
  for (Element x : P_.ball())
    for (Element y : P_.ball())
      for (const auto& [zi, c] : P_.product(x, y).coords()) {
        const Element z = W.inverse(zi);
        if (!P_.in_ball(z) || !in_d(z)) continue;
        ++r.instances;
        if (c.coeff(static_cast<int>(info(z).first)) != 0 && x != W.inverse(y))
          refute(r, "z = " + W.name(z) + ", (x, y) = " + pair_name(W, x, y));
      }
  return r;
}

PReport PChecker::p3() const {
  auto r = start(3, "P3: for each y a unique z in D with gamma_{y^-1,y,z} != 0", R_, a_);
  r.caveats.push_back("z ranges over the support of C_{y^-1} C_y, which contains every candidate");
  const auto& W = H_.group();
  for (Element y : P_.ball()) {
    ++r.instances;
    std::vector<Element> found;
    for (const auto& [zi, c] : P_.product(W.inverse(y), y).coords()) {
      const Element z = W.inverse(zi);
      if (in_d(z) && c.coeff(static_cast<int>(info(z).first)) != 0) found.push_back(z);
    }
    if (found.size() != 1) refute(r, "y = " + W.name(y) + ": " + std::to_string(found.size()) + " such z");
  }
  return r;
}

PReport PChecker::p4() const {
  auto r = start(4, "P4: w' <=_LR w implies a(w') >= a(w)", R_, a_);
  r.caveats.push_back(preorder_caveat(reach_));
  // ball(R) is a prefix of the vertex list
  const std::size_t n = P_.ball().size();
  const auto below = two_.reachability(n);
  const auto& V = two_.vertices;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!below[i][j]) continue;
      ++r.instances;
      if (info(V[j]).first < info(V[i]).first)
        refute(r, "w = " + H_.group().name(V[i]) + ", w' = " + H_.group().name(V[j]));
    }
  return r;
}

PReport PChecker::p5() const {
  auto r = start(5, "P5: z in D, gamma_{y^-1,y,z} != 0 implies gamma = n_z = +-1", R_, a_);
  const auto& W = H_.group();
  for (Element y : P_.ball())
    for (const auto& [zi, c] : P_.product(W.inverse(y), y).coords()) {
      const Element z = W.inverse(zi);
      if (!in_d(z)) continue;
      const auto& [a, dn] = info(z);
      const Integer g = c.coeff(static_cast<int>(a));
      if (g == 0) continue;
      ++r.instances;
      if (g != dn.n || (dn.n != 1 && dn.n != -1))
        refute(r, "y = " + W.name(y) + ", z = " + W.name(z) + ": gamma = " + g.str() + ", n_z = " + std::to_string(dn.n));
    }
  return r;
}

PReport PChecker::p6() const {
  auto r = start(6, "P6: z in D implies z^2 = e", R_, a_);
  const auto& W = H_.group();
  for (Element z : P_.ball()) {
    if (!in_d(z)) continue;
    ++r.instances;
    if (W.mul(z, z) != CoxeterGroup::identity()) refute(r, "z = " + W.name(z));
  }
  return r;
}

PReport PChecker::p7() const {
  auto r = start(7, "P7: gamma_{x,y,z} = gamma_{y,z,x} = gamma_{z,x,y}", R_, a_);
  const auto& W = H_.group();
  for (Element x : P_.ball())
    for (Element y : P_.ball())
      for (Element z : P_.ball()) {
        ++r.instances;
        const long long g1 = gamma(x, y, z), g2 = gamma(y, z, x), g3 = gamma(z, x, y);
        if (g1 != g2 || g2 != g3)
          refute(r, "(x, y, z) = (" + W.name(x) + ", " + W.name(y) + ", " + W.name(z) + "): " + std::to_string(g1) +
                        ", " + std::to_string(g2) + ", " + std::to_string(g3));
      }
  return r;
}

PReport PChecker::p8() const {
  auto r = start(8, "P8: gamma_{x,y,z} != 0 implies x ~L y^-1, y ~L z^-1, z ~L x^-1", R_, a_);
  r.caveats.push_back(preorder_caveat(reach_));
  const auto& W = H_.group();
  for (Element x : P_.ball())
    for (Element y : P_.ball())
      for (const auto& [zi, c] : P_.product(x, y).coords()) {
        const Element z = W.inverse(zi);
        if (!P_.in_ball(z) || c.coeff(static_cast<int>(info(z).first)) == 0) continue;
        ++r.instances;
        if (!left_.same_component(x, W.inverse(y)) || !left_.same_component(y, W.inverse(z)) ||
            !left_.same_component(z, W.inverse(x)))
          refute(r, "(x, y, z) = (" + W.name(x) + ", " + W.name(y) + ", " + W.name(z) + ")");
      }
  return r;
}

PReport PChecker::p9_11(int k, const CellGraph& g) const {
  static const char* kText[] = {"P9: w' <=_L w and a(w') = a(w) imply w' ~L w",
                                "P10: w' <=_R w and a(w') = a(w) imply w' ~R w",
                                "P11: w' <=_LR w and a(w') = a(w) imply w' ~LR w"};
  auto r = start(k, kText[k - 9], R_, a_);
  r.caveats.push_back(preorder_caveat(reach_));
  const std::size_t n = P_.ball().size();
  const auto below = g.reachability(n);
  const auto& V = g.vertices;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!below[i][j] || info(V[i]).first != info(V[j]).first) continue;
      ++r.instances;
      if (!below[j][i]) refute(r, "w = " + H_.group().name(V[i]) + ", w' = " + H_.group().name(V[j]));
    }
  return r;
}

PReport PChecker::p12() const {
  auto r = start(12, "P12: a-value of y in W_I equals that in W", R_, a_);
  const auto& W = H_.group();
  const auto& sys = W.system();
  const GenSet all = sys.generators();
  for (std::uint8_t bits = 1; bits < 8; ++bits) {
    const GenSet I = GenSet::from_bits(bits);
    if (!I.subset_of(all) || I == all) continue;
    if (!sys.finite_parabolic(I)) {
      r.caveats.push_back("W_" + I.str() + " is infinite and was skipped");
      continue;
    }
    const CoxeterSystem sub = sys.parabolic(I);
    const CoxeterGroup WI(sub, W.length(W.longest_element(I)));
    const HeckeAlgebra HI(WI, H_.weights());
    const HProducts PI(HI, WI.horizon());
    const ASource aI = exact_a(PI);
    for (Element y : WI.ball(WI.horizon())) {
      const Element in_w = W.normal_form(WI.word(y));
      if (!P_.in_ball(in_w)) continue;
      ++r.instances;
      if (aI.value(y) != info(in_w).first)
        refute(r, "y = " + W.name(in_w) + " in W_" + I.str() + ": " + std::to_string(aI.value(y)) + " vs " +
                      std::to_string(info(in_w).first));
    }
  }
  return r;
}

PReport PChecker::p13() const {
  auto r = start(13, "P13: each left cell has a unique z in D, with gamma_{y^-1,y,z} != 0 on the cell", R_, a_);
  r.caveats.push_back("left cells meeting ball(" + std::to_string(R_) + ") are SCCs through ball(" +
                      std::to_string(reach_) + ") and may be pieces of larger cells");
  const auto& W = H_.group();
  for (const auto& cell : left_.component_members()) {
    if (!P_.in_ball(cell.front())) continue;  // members are in id order, shortest first
    ++r.instances;
    std::vector<Element> ds;
    for (Element z : cell)
      if (in_d(z)) ds.push_back(z);
    if (ds.size() != 1) {
      refute(r, "cell of " + W.name(cell.front()) + " (" + std::to_string(cell.size()) + " elements) has " +
                    std::to_string(ds.size()) + " elements of D");
      continue;
    }
    for (Element y : cell)
      if (P_.in_ball(y) && gamma(W.inverse(y), y, ds.front()) == 0)
        refute(r, "y = " + W.name(y) + ", z = " + W.name(ds.front()) + ": gamma = 0");
  }
  return r;
}

PReport PChecker::p14() const {
  auto r = start(14, "P14: w ~LR w^-1", R_, a_);
  r.caveats.push_back(preorder_caveat(reach_));
  const auto& W = H_.group();
  for (Element w : P_.ball()) {
    ++r.instances;
    if (!two_.same_component(w, W.inverse(w))) refute(r, "w = " + W.name(w));
  }
  return r;
}

namespace {

// Element of A (x)_Z A as exponent pairs.
using Tensor = std::map<std::pair<int, int>, Integer>;

void add_tensor(Tensor& t, const Laurent& a, const Laurent& b) {
  for (const auto& [i, ci] : a.terms())
    for (const auto& [j, cj] : b.terms()) {
      auto& slot = t[{i, j}];
      slot += ci * cj;
      if (slot == 0) t.erase({i, j});
    }
}

}  // namespace

PReport PChecker::p15() const {
  auto r = start(15, "P15: sum_z h_{w,x,z} (x) h_{z,w',y} = sum_z h_{w,z,y} (x) h_{x,w',z} when a(x) = a(y)", R_, a_);
  const auto& W = H_.group();
  // every z with a nonzero term lies in the support of C_w C_x or C_x C_w', hence in ball(2 R15)
  const bool whole = covers_finite_group(W, R_);
  const int R15 = whole ? R_ : R_ / 2;
  if (!whole) r.caveats.push_back("w, w', x, y restricted to ball(" + std::to_string(R15) + "); sums over z are complete");
  const auto small = W.ball(R15);
  for (Element x : small)
    for (Element y : small) {
      if (info(x).first != info(y).first) continue;
      for (Element w : small)
        for (Element w2 : small) {
          ++r.instances;
          Tensor lhs, rhs;
          for (const auto& [z, c] : P_.product(w, x).coords()) add_tensor(lhs, c, P_.h(z, w2, y));
          for (const auto& [z, c] : P_.product(x, w2).coords()) add_tensor(rhs, P_.h(w, z, y), c);
          if (lhs != rhs)
            refute(r, "w = " + W.name(w) + ", w' = " + W.name(w2) + ", x = " + W.name(x) + ", y = " + W.name(y));
        }
    }
  return r;
}

PReport check_P(const HeckeAlgebra& H, int k, int R, const ASource& a, std::optional<int> reach) {
  return PChecker(H, R, a, reach).check(k);
}

}  // namespace wcells
