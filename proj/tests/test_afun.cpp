#include <gtest/gtest.h>

#include <array>
#include <set>

#include "wcells/afun.hpp"
#include "wcells/error.hpp"

using namespace wcells;

namespace {

struct Fixture {
  CoxeterGroup W;
  HeckeAlgebra H;
  Fixture(CoxeterSystem sys, Weights L, int horizon) : W(sys, horizon), H(W, L) {}
  Element operator()(const char* w) const { return W.normal_form(w); }
};

// r, s, t act on 1..4 as (12), (23), (34) in the A3 system.
std::array<int, 4> permutation(const std::string& word) {
  std::array<int, 4> p{1, 2, 3, 4};
  for (char c : word) {
    const int i = c == 'r' ? 0 : c == 's' ? 1 : 2;
    std::swap(p[i], p[i + 1]);
  }
  return p;
}

// a(w) = sum (i-1) lambda_i for the Robinson-Schensted shape lambda of w.
long long rs_a_value(const std::array<int, 4>& p) {
  std::vector<std::vector<int>> rows;
  for (int x : p) {
    for (auto& row : rows) {
      auto it = std::upper_bound(row.begin(), row.end(), x);
      if (it == row.end()) {
        row.push_back(x);
        x = 0;
        break;
      }
      std::swap(*it, x);
    }
    if (x) rows.push_back({x});
  }
  long long a = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) a += static_cast<long long>(i * rows[i].size());
  return a;
}

}  // namespace

TEST(ABall, IdentityAndGenerators) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 6);
  const HProducts P(f.H, 3);
  const auto e = a_ball(P, f("e"));
  EXPECT_EQ(e.value, 0);
  EXPECT_EQ(e.witness, std::make_pair(f("e"), f("e")));
  for (auto [g, L] : {std::pair{"r", 5}, {"s", 1}, {"t", 1}}) {
    const auto a = a_ball(P, f(g));
    EXPECT_EQ(a.value, L) << g;
    EXPECT_EQ(a.witness, std::make_pair(f(g), f(g))) << g;
  }
}

TEST(ABall, MonotoneAndInverseSymmetric) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 8);
  const HProducts P(f.H, 4);
  for (Element w : f.W.ball(4)) {
    const auto by_r = a_ball_by_radius(P, w);
    for (std::size_t r = 1; r < by_r.size(); ++r) EXPECT_GE(by_r[r].value, by_r[r - 1].value);
    EXPECT_EQ(by_r.back().value, a_ball(P, f.W.inverse(w)).value) << f.W.name(w);
  }
}

TEST(ABall, LongestElementOfA3) {
  Fixture f(CoxeterSystem(2, 3, 3), Weights::uniform(), 6);
  const HProducts P(f.H, 6);
  EXPECT_EQ(a_ball(P, f.W.longest_element(GenSet::all())).value, 6);
}

TEST(ABall, HorizonGuard) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 6);
  try {
    HProducts P(f.H, 4);
    FAIL() << "expected HorizonExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::HorizonExceeded);
  }
}

TEST(DeltaN, SmallElements) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 6);
  EXPECT_EQ(delta_n(f.H, f("e")).delta, 0);
  EXPECT_EQ(delta_n(f.H, f("e")).n, 1);
  EXPECT_EQ(delta_n(f.H, f("r")).delta, 5);
  EXPECT_EQ(delta_n(f.H, f("s")).delta, 1);
  EXPECT_EQ(delta_n(f.H, f("s")).n, 1);

  Fixture g(CoxeterSystem(2, 3, 3), Weights::uniform(), 6);
  EXPECT_EQ(delta_n(g.H, g("rsr")).delta, 3);
  EXPECT_EQ(delta_n(g.H, g("rsr")).n, 1);
}

TEST(Gamma, SmallCases) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 6);
  const HProducts P(f.H, 3);
  EXPECT_EQ(gamma_coeff(P, f("s"), f("s"), f("s"), 1), 1);
  EXPECT_EQ(gamma_coeff(P, f("r"), f("r"), f("r"), 5), 1);
  EXPECT_EQ(gamma_coeff(P, f("s"), f("s"), f("e"), 0), 0);
  for (Element y : P.ball())
    for (Element z : P.ball())
      EXPECT_EQ(gamma_coeff(P, f("e"), y, z, 0), z == f.W.inverse(y) ? 1 : 0);
}

TEST(Distinguished, FourFiveFixture) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 10);
  const Cells C(f.W, Weights(5, 1, 1));
  const auto D = distinguished_ball(f.H, 5, predicted_a(C));
  const std::set<Element> got(D.begin(), D.end());
  for (const char* z : {"e", "r", "s", "t", "rsr", "rt", "ststs"}) EXPECT_TRUE(got.count(f(z))) << z;
  for (Element z : D) EXPECT_EQ(f.W.mul(z, z), f("e")) << f.W.name(z);
  EXPECT_THROW(distinguished_ball(f.H, 5, ASource{}), Error);
}

TEST(ExactA, SymmetricGroupMatchesShapes) {
  Fixture f(CoxeterSystem(2, 3, 3), Weights::uniform(), 6);
  const HProducts P(f.H, 6);
  const ASource a = exact_a(P);
  std::multiset<long long> values;
  for (Element w : f.W.ball(6)) {
    EXPECT_EQ(a.value(w), rs_a_value(permutation(f.W.word(w)))) << f.W.name(w);
    values.insert(a.value(w));
  }
  EXPECT_EQ(f.W.size(), 24u);
  EXPECT_EQ(std::set<long long>(values.begin(), values.end()), (std::set<long long>{0, 1, 2, 3, 6}));
  EXPECT_EQ(values.count(1), 9u);
  EXPECT_EQ(values.count(2), 4u);
  EXPECT_EQ(values.count(3), 9u);
}

TEST(ExactA, RefusesInfiniteGroup) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 6);
  const HProducts P(f.H, 3);
  try {
    exact_a(P);
    FAIL() << "expected NotApplicableSystem";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotApplicableSystem);
  }
}

TEST(CellGraph, TinyAndFixtureComponents) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 12);
  const auto g0 = cell_graph(f.H, 0, Flavor::left);
  EXPECT_EQ(g0.vertices.size(), 1u);
  EXPECT_EQ(g0.components, 1u);

  const auto right = cell_graph(f.H, 5, Flavor::right);
  EXPECT_TRUE(right.same_component(f("s"), f("st")));
  EXPECT_FALSE(right.same_component(f("e"), f("s")));
  const auto left = cell_graph(f.H, 5, Flavor::left);
  EXPECT_TRUE(left.same_component(f("s"), f("ts")));

  // {w_st} is a two-sided cell on its own
  const Cells C(f.W, Weights(5, 1, 1));
  const auto two = cell_graph(f.H, 6, Flavor::two_sided);
  const Element wst = f("ststs");
  for (Element w : two.vertices)
    if (w != wst && C.a_pred(w) == 5) EXPECT_FALSE(two.same_component(w, wst)) << f.W.name(w);

  const auto cmp = compare_right_cells(right, C);
  EXPECT_EQ(cmp.mixed, 0u);
  EXPECT_GT(cmp.certified, 0u);
  EXPECT_EQ(cmp.certified + cmp.split, cmp.predicted_cells);
  EXPECT_EQ(parse_flavor(flavor_name(Flavor::two_sided)), Flavor::two_sided);
}

TEST(CheckP, ExamplesOnFixtureAndA3) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1), 12);
  const Cells C(f.W, Weights(5, 1, 1));
  const auto p6 = check_P(f.H, 6, 6, predicted_a(C));
  EXPECT_TRUE(p6.pass) << to_json(p6).dump();
  EXPECT_GT(p6.instances, 5u);

  Fixture g(CoxeterSystem(2, 3, 3), Weights::uniform(), 6);
  const HProducts P(g.H, 6);
  const PChecker checker(g.H, 6, exact_a(P));
  for (int k = 1; k <= 15; ++k) {
    const auto rep = checker.check(k);
    EXPECT_TRUE(rep.pass) << to_json(rep).dump();
    EXPECT_GT(rep.instances, 0u) << k;
  }
  EXPECT_THROW(checker.check(16), Error);
  try {
    PChecker(g.H, 6, ASource{});
    FAIL() << "expected UnsupportedWithoutPrediction";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedWithoutPrediction);
  }
}

TEST(CheckP, DetectsWrongAValues) {
  Fixture g(CoxeterSystem(2, 3, 3), Weights::uniform(), 6);
  // a = Delta + 1 breaks P1
  const ASource bad{"bad", [&](Element w) { return static_cast<long long>(delta_n(g.H, w).delta) + 1; }};
  const auto rep = check_P(g.H, 1, 6, bad);
  EXPECT_FALSE(rep.pass);
  ASSERT_TRUE(rep.counterexample);
}
