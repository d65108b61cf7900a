#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "wcells/cells.hpp"
#include "wcells/error.hpp"

using namespace wcells;

namespace {

using Levels = std::map<long long, std::set<std::string>>;

Levels levels_by_name(const Cells& C) {
  Levels out;
  for (const auto& [n, ds] : C.d_levels())
    for (const auto& d : ds) out[n].insert(C.group().name(d.elem));
  return out;
}

// Brute-force prediction straight from the definition of Omega_N.
long long a_pred_oracle(const Cells& C, Element w) {
  long long best = 0;
  for (const auto& d : C.d_set())
    if (C.group().contains_factor(w, d.elem)) best = std::max(best, d.aprime);
  return best;
}

struct Fixture {
  CoxeterGroup W;
  Cells C;
  Fixture(CoxeterSystem sys, Weights L, int horizon = 12) : W(sys, horizon), C(W, L) {}
  Element operator()(const char* w) const { return W.normal_form(w); }
};

}  // namespace

TEST(DSymbol, ParseAndPrint) {
  for (const char* s : {"e", "r", "s", "t", "rt", "w_rs", "w_st", "sw_rs", "rw_rs", "sw_st", "tw_st"})
    EXPECT_EQ(DSymbol::parse(s).str(), s);
  EXPECT_EQ(DSymbol::parse("sw_rs").mirrored().str(), "sw_st");
  EXPECT_EQ(DSymbol::parse("rw_rs").mirrored().str(), "tw_st");
  EXPECT_EQ(DSymbol::parse("rt").mirrored().str(), "rt");
  EXPECT_THROW(DSymbol::parse("tw_rs"), Error);
  EXPECT_THROW(DSymbol::parse("rs"), Error);
}

TEST(DSet, ExampleLevelsInFourFiveSystem) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1));
  Levels expected{{0, {"e"}}, {1, {"s", "t"}}, {5, {"r", "ststs"}}, {6, {"rt"}}, {9, {"rsr"}}, {12, {"rsrs"}}};
  EXPECT_EQ(levels_by_name(f.C), expected);
}

TEST(DSet, LevelsInFourSixSystem) {
  Fixture d(CoxeterSystem(2, 4, 6), Weights(2, 1, 1));
  Levels expected{{0, {"e"}}, {1, {"s", "t"}}, {2, {"r"}}, {3, {"rt", "rsr"}}, {6, {"rsrs", "ststst"}}};
  EXPECT_EQ(levels_by_name(d.C), expected);

  // a'(rt) = 22 = a'(tstst): the point (14,1,8) lies on that locus as well
  Fixture f(CoxeterSystem(2, 4, 6), Weights(14, 1, 8));
  Levels got = levels_by_name(f.C);
  Levels expected_f{{0, {"e"}},       {1, {"s"}},           {8, {"t"}},     {14, {"r"}},
                    {22, {"rt", "tstst"}}, {27, {"rsr", "ststst"}}, {30, {"rsrs"}}};
  EXPECT_EQ(got, expected_f);
}

TEST(DSet, EqualWeightsSevenThreeSystem) {
  Fixture f(CoxeterSystem(2, 7, 3), Weights::uniform());
  Levels expected{{0, {"e"}}, {1, {"r", "s", "t"}}, {2, {"rt"}}, {3, {"sts"}}, {7, {"rsrsrsr"}}};
  EXPECT_EQ(levels_by_name(f.C), expected);
}

TEST(DSet, InvariantsAndErrors) {
  EXPECT_THROW(d_symbols(CoxeterSystem(2, 3, 3), Weights::uniform()), Error);
  try {
    d_symbols(CoxeterSystem(2, 3, 4), Weights::uniform());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotDimensionTwo);
  }
  // no sw entry for odd bonds or equal weights
  for (const auto& s : d_symbols(CoxeterSystem(2, 7, 3), Weights(1, 1, 1))) EXPECT_FALSE(s.light);
  for (const auto& s : d_symbols(CoxeterSystem(2, 8, 3), Weights(2, 1, 1)))
    if (s.light) EXPECT_EQ(s.str(), "sw_rs");
  // a'(sw_st) = L(t) + (m/2 - 1)(L(t) - L(s))
  EXPECT_EQ(aprime(DSymbol::parse("sw_st"), CoxeterSystem(2, 4, 6), Weights(14, 1, 8)), 8 + 2 * 7);
  EXPECT_EQ(aprime(DSymbol::parse("tw_st"), CoxeterSystem(2, 4, 6), Weights(14, 1, 8)), std::nullopt);
  // w_J and a'(w_J) = L(w_J)
  Fixture f(CoxeterSystem(2, 4, 6), Weights(3, 2, 1));
  for (const auto& d : f.C.d_set()) {
    if (!d.symbol.light) {
      EXPECT_EQ(d.elem, f.W.longest_element(d.symbol.J));
      EXPECT_EQ(d.aprime, f.W.weight(d.elem, f.C.weights()));
    }
  }
}

TEST(APred, MatchesFactorContainment) {
  for (auto [sys, L] : {std::pair{CoxeterSystem(2, 4, 5), Weights(5, 1, 1)},
                        std::pair{CoxeterSystem(2, 4, 6), Weights(2, 1, 1)},
                        std::pair{CoxeterSystem(2, 4, 6), Weights(14, 1, 8)},
                        std::pair{CoxeterSystem(2, 7, 3), Weights(1, 1, 1)},
                        std::pair{CoxeterSystem(2, kInfinity, 3), Weights(1, 2, 2)}}) {
    Fixture f(sys, L, 9);
    for (auto w : f.W.ball(9)) ASSERT_EQ(f.C.a_pred(w), a_pred_oracle(f.C, w)) << sys.label() << " " << f.W.name(w);
    for (const auto& d : f.C.d_set()) EXPECT_EQ(f.C.a_pred(d.elem), d.aprime);
  }
}

TEST(APred, Examples) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1));
  EXPECT_EQ(f.C.a_pred(f("e")), 0);
  EXPECT_EQ(f.C.a_pred(f("rt")), 6);
  EXPECT_EQ(f.C.a_pred(f("st")), 1);
  EXPECT_EQ(f.C.a_pred(f("sr")), 5);
}

TEST(USet, Examples) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1));
  const auto wst = f("ststs");
  EXPECT_EQ(f.C.u_set(wst, 5), std::vector<Element>{f.W.identity()});
  EXPECT_EQ(f.C.b_set(wst, 5), std::vector<Element>{f.W.identity()});
  auto us = f.C.u_set(f("s"), 2);
  std::set<Element> u(us.begin(), us.end());
  for (const char* y : {"e", "t", "ts"}) EXPECT_TRUE(u.count(f(y))) << y;
  EXPECT_FALSE(u.count(f("r")));
  for (const auto& d : f.C.d_set()) EXPECT_TRUE(f.C.in_u(d, f.W.identity())) << d.symbol.str();
  EXPECT_THROW(f.C.u_set(f("st"), 2), Error);
}

TEST(USet, MatchesDefinition) {
  Fixture f(CoxeterSystem(2, 4, 6), Weights(2, 1, 1));
  for (const auto& d : f.C.d_set()) {
    const auto us = f.C.u_set(d.elem, 4);
    std::set<Element> u(us.begin(), us.end());
    for (auto y : f.W.ball(4)) {
      const bool member = f.W.length(f.W.mul(d.elem, y)) == f.W.length(d.elem) + f.W.length(y) &&
                          a_pred_oracle(f.C, f.W.mul(d.elem, y)) == d.aprime;
      EXPECT_EQ(u.count(y) == 1, member);
    }
    // B_d by enumerating every split x.d = w.v of the product
    const auto bs = f.C.b_set(d.elem, 4);
    std::set<Element> b(bs.begin(), bs.end());
    for (auto x : f.W.ball(4)) {
      bool member = u.count(f.W.inverse(x)) == 1;
      const auto xd = f.W.mul(x, d.elem);
      for (auto v : f.W.ball(f.W.length(xd)))
        if (member && v != f.W.identity() && f.W.is_weak_suffix(xd, v))
          member = a_pred_oracle(f.C, f.W.mul(xd, f.W.inverse(v))) < d.aprime;
      EXPECT_EQ(b.count(x) == 1, member) << d.symbol.str() << " " << f.W.name(x);
    }
  }
}

TEST(Decompose, Examples) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1));
  auto check = [&](const char* w, const char* b, const char* d, const char* y) {
    auto t = f.C.decompose(f(w));
    EXPECT_EQ(f.W.name(t.b), b);
    EXPECT_EQ(f.W.name(t.d), d);
    EXPECT_EQ(f.W.name(t.y), y);
  };
  check("e", "e", "e", "e");
  check("st", "e", "s", "t");
  check("rsr", "e", "rsr", "e");
  EXPECT_THROW(Fixture(CoxeterSystem(2, 4, 4), Weights::uniform()).C.decompose(f.W.identity()), Error);
}

TEST(Decompose, TotalAndUniqueOnBall) {
  for (auto [sys, L] : {std::pair{CoxeterSystem(2, 4, 5), Weights(5, 1, 1)},
                        std::pair{CoxeterSystem(2, 4, 6), Weights(2, 1, 1)},
                        std::pair{CoxeterSystem(2, 7, 3), Weights(1, 1, 1)},
                        std::pair{CoxeterSystem(2, 4, 6), Weights(14, 1, 8)}}) {
    Fixture f(sys, L, 7);
    for (auto w : f.W.ball(7)) {
      Decomposition t;
      ASSERT_NO_THROW(t = f.C.decompose(w)) << sys.label() << " " << f.W.name(w);
      EXPECT_EQ(f.W.mul(f.W.mul(t.b, t.d), t.y), w);
      EXPECT_EQ(f.W.length(t.b) + f.W.length(t.d) + f.W.length(t.y), f.W.length(w));
      EXPECT_EQ(f.C.find(t.d)->aprime, f.C.a_pred(w));
    }
  }
}

TEST(LengthAdditivity, Examples) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1));
  auto e = f.C.length_additivity_check(f.W.identity(), 4);
  EXPECT_TRUE(e.pass);
  EXPECT_EQ(e.pairs_checked, 1u);
  EXPECT_TRUE(f.C.length_additivity_check(f("rt"), 4).pass);
  Fixture g(CoxeterSystem(2, 4, 6), Weights(2, 1, 1));
  auto r = g.C.length_additivity_check(g("rsr"), 4);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.pairs_checked, 1u);
}

TEST(Classifier, TheoremCases) {
  const CoxeterSystem s245(2, 4, 5), s246(2, 4, 6);
  // {w_rs, t}: a'(w_rs) = 2a+2b = c
  EXPECT_EQ(classify_pair(DSymbol::parse("w_rs"), DSymbol::parse("t"), s246, Weights(1, 1, 4)),
            CellVerdict::different);
  EXPECT_EQ(classify_pair(DSymbol::parse("r"), DSymbol::parse("t"), s246, Weights(1, 2, 1)), CellVerdict::different);
  EXPECT_EQ(classify_pair(DSymbol::parse("r"), DSymbol::parse("t"), s246, Weights(2, 1, 2)), CellVerdict::same);
  // {w_rs, w_st} at (2,4,6): 2a+2b = 3b+3c
  std::string rule;
  EXPECT_EQ(classify_pair(DSymbol::parse("w_rs"), DSymbol::parse("w_st"), CoxeterSystem(2, 4, 6), Weights(2, 1, 1),
                          &rule),
            CellVerdict::same);
  EXPECT_TRUE(rule.empty());
  // mirror of case (1)
  EXPECT_EQ(classify_pair(DSymbol::parse("r"), DSymbol::parse("w_st"), s245,
                          Weights(5, 1, 1), &rule),
            CellVerdict::different);
  EXPECT_NE(rule.find("exchanged"), std::string::npos);
  // case (6) needs m_st = 3; rw_rs at (2,8,3), a<b: a' = 4b - 3a; rt: a + c = a + b
  EXPECT_EQ(classify_pair(DSymbol::parse("rw_rs"), DSymbol::parse("rt"), CoxeterSystem(2, 8, 3), Weights(3, 4, 4)),
            CellVerdict::different);
  EXPECT_THROW(classify_pair(DSymbol::parse("r"), DSymbol::parse("t"), s246, Weights(1, 1, 2)), Error);
  EXPECT_THROW(classify_pair(DSymbol::parse("r"), DSymbol::parse("t"), CoxeterSystem(2, 4, 4), Weights(1, 1, 1)),
               Error);
}

TEST(Classifier, ConnectWitnessForSameVerdicts) {
  Fixture f(CoxeterSystem(2, 4, 6), Weights(2, 1, 1), 14);
  for (const auto& [n, ds] : f.C.d_levels())
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = i + 1; j < ds.size(); ++j) {
        std::string rule;
        const auto v = f.C.two_sided_classifier(ds[i].elem, ds[j].elem, &rule);
        const auto w = f.C.connect_witness(ds[i].elem, ds[j].elem);
        if (v == CellVerdict::same) EXPECT_TRUE(w.has_value()) << ds[i].symbol.str() << "," << ds[j].symbol.str();
        else EXPECT_FALSE(rule.empty());
      }
}

TEST(CellTable, CsvRows) {
  Fixture f(CoxeterSystem(2, 4, 5), Weights(5, 1, 1));
  const std::string csv = f.C.cell_table_csv(3);
  std::vector<std::string> lines;
  std::stringstream in(csv);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), f.W.ball_size(3) + 1);
  EXPECT_EQ(lines[0], "word,length,a_pred,d,b,y,cell_id");
  EXPECT_EQ(lines[1], "e,0,0,e,e,e,0");
  EXPECT_NE(std::find_if(lines.begin(), lines.end(), [](const std::string& l) { return l.rfind("rsr,3,9,rsr,e,e,", 0) == 0; }),
            lines.end());
}
