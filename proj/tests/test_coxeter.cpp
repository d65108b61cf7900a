#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "wcells/coxeter.hpp"
#include "wcells/error.hpp"

using namespace wcells;

namespace {

oracle::Bonds bonds_of(const CoxeterSystem& sys) {
  auto m = [](int v) { return v == kInfinity ? 0 : v; };
  return {m(sys.m_rt()), m(sys.m_rs()), m(sys.m_st())};
}

std::string random_word(std::mt19937& rng, int len) {
  std::string w;
  for (int i = 0; i < len; ++i) w += "rst"[rng() % 3];
  return w;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Usage;
}

const std::vector<std::string> kSystems{"2,4,5", "2,4,6", "2,3,3", "2,7,3", "2,inf,3", "2,8,3", "3,3,3", "inf,inf,inf"};

}  // namespace

TEST(NormalForm, Examples) {
  CoxeterGroup W(CoxeterSystem(2, 3, 5), 8);
  EXPECT_EQ(W.name(W.normal_form("rr")), "e");
  EXPECT_EQ(W.name(W.normal_form("tr")), "rt");
  EXPECT_EQ(W.name(W.normal_form("srs")), "rsr");
  CoxeterGroup W4(CoxeterSystem(2, 4, 5), 8);
  EXPECT_EQ(W4.name(W4.normal_form("srs")), "srs");
}

TEST(NormalForm, Errors) {
  CoxeterGroup W(CoxeterSystem(2, 4, 5), 3);
  EXPECT_EQ(code_of([&] { W.normal_form("rx"); }), Errc::UnknownGenerator);
  EXPECT_EQ(code_of([&] { W.normal_form("rsrs"); }), Errc::HorizonExceeded);
  EXPECT_EQ(W.name(W.normal_form("rsrr")), "rs");
  CoxeterGroup rank2(CoxeterSystem(2, 4, 5).parabolic({Gen::r, Gen::s}), 6);
  EXPECT_EQ(code_of([&] { rank2.normal_form("rt"); }), Errc::UnknownGenerator);
}

TEST(NormalForm, AgreesWithBraidOracleOnRandomWords) {
  std::mt19937 rng(7);
  for (const auto& spec : kSystems) {
    auto sys = CoxeterSystem::parse(spec);
    CoxeterGroup W(sys, 12);
    for (int trial = 0; trial < 150; ++trial) {
      auto w = random_word(rng, 1 + static_cast<int>(rng() % 10));
      const auto expected = oracle::normal_form(w, bonds_of(sys));
      const auto x = W.normal_form(w);
      EXPECT_EQ(W.word(x), expected) << spec << " " << w;
      EXPECT_EQ(W.normal_form(W.word(x)), x) << "idempotent";
    }
  }
}

TEST(NormalForm, ConstantOnBraidOrbits) {
  auto sys = CoxeterSystem(2, 4, 5);
  CoxeterGroup W(sys, 10);
  for (auto x : W.ball(7))
    for (const auto& v : oracle::braid_orbit(W.word(x), bonds_of(sys))) EXPECT_EQ(W.normal_form(v), x);
}

TEST(Mult, ExamplesAndInverse) {
  CoxeterGroup W(CoxeterSystem(2, 4, 5), 10);
  const auto rs = W.normal_form("rs");
  EXPECT_EQ(W.mul(W.identity(), rs), rs);
  EXPECT_EQ(W.mul(rs, W.normal_form("sr")), W.identity());
  EXPECT_EQ(W.name(W.mul(W.normal_form("rsr"), W.normal_form("r"))), "rs");
  for (auto x : W.ball(5)) {
    EXPECT_EQ(W.mul(x, W.inverse(x)), W.identity());
    for (auto y : W.ball(3)) {
      const auto xy = W.mul(x, y);
      const bool reduced = oracle::normal_form(W.word(x) + W.word(y), bonds_of(W.system())).size() ==
                           W.word(x).size() + W.word(y).size();
      EXPECT_LE(W.length(xy), W.length(x) + W.length(y));
      EXPECT_EQ(W.length(xy) == W.length(x) + W.length(y), reduced);
      EXPECT_EQ(W.reduced_product(x, y), reduced);
    }
  }
}

TEST(Weight, Examples) {
  CoxeterGroup W(CoxeterSystem(2, 4, 5), 8);
  EXPECT_EQ(W.length(W.identity()), 0);
  EXPECT_EQ(W.weight(W.normal_form("rsr"), Weights(5, 1, 1)), 11);
  CoxeterGroup W6(CoxeterSystem(2, 4, 6), 8);
  EXPECT_EQ(W6.weight(W6.normal_form("ststst"), Weights(2, 1, 1)), 6);
}

TEST(Weight, OddBondsForceEqualWeights) {
  EXPECT_NO_THROW(Weights(5, 1, 1).validate(CoxeterSystem(2, 4, 5)));
  EXPECT_EQ(code_of([] { Weights(1, 2, 1).validate(CoxeterSystem(2, 4, 5)); }), Errc::InvalidWeights);
  EXPECT_EQ(code_of([] { Weights(0, 1, 1).validate(CoxeterSystem(2, 4, 6)); }), Errc::InvalidWeights);
}

TEST(Descents, ExamplesAndOracle) {
  auto sys = CoxeterSystem(2, 4, 5);
  CoxeterGroup W(sys, 10);
  EXPECT_TRUE(W.left_descents(W.identity()).empty());
  EXPECT_EQ(W.left_descents(W.normal_form("rst")), (GenSet{Gen::r}));
  EXPECT_EQ(W.right_descents(W.normal_form("rst")), (GenSet{Gen::t}));
  for (auto x : W.ball(6))
    for (Gen g : kAllGens) {
      const auto& w = W.word(x);
      const bool right = oracle::normal_form(w + to_char(g), bonds_of(sys)).size() < w.size();
      const bool left = oracle::normal_form(to_char(g) + w, bonds_of(sys)).size() < w.size();
      EXPECT_EQ(W.right_descents(x).contains(g), right) << w;
      EXPECT_EQ(W.left_descents(x).contains(g), left) << w;
      const int d = W.length(W.rmul(x, g)) - W.length(x);
      EXPECT_TRUE(d == 1 || d == -1);
    }
}

TEST(Bruhat, ExamplesAndSubwordOracle) {
  auto sys = CoxeterSystem(2, 4, 5);
  CoxeterGroup W(sys, 10);
  EXPECT_TRUE(W.bruhat_leq(W.identity(), W.normal_form("rsts")));
  EXPECT_TRUE(W.bruhat_leq(W.normal_form("rt"), W.normal_form("rst")));
  EXPECT_FALSE(W.bruhat_leq(W.normal_form("sts"), W.normal_form("st")));
  for (auto w : W.ball(6)) {
    const auto& word = W.word(w);
    std::set<std::string> below;
    for (unsigned mask = 0; mask < (1u << word.size()); ++mask) {
      std::string sub;
      for (std::size_t i = 0; i < word.size(); ++i)
        if (mask & (1u << i)) sub += word[i];
      below.insert(oracle::normal_form(sub, bonds_of(sys)));
    }
    for (auto x : W.ball(6)) EXPECT_EQ(W.bruhat_leq(x, w), below.count(W.word(x)) > 0) << W.name(x) << " <= " << word;
  }
}

TEST(Bruhat, DihedralChains) {
  // In a dihedral group x <= w iff l(x) < l(w) or x = w.
  CoxeterGroup W(CoxeterSystem(2, 7, 3).parabolic({Gen::r, Gen::s}), 10);
  for (auto x : W.ball(7))
    for (auto w : W.ball(7)) EXPECT_EQ(W.bruhat_leq(x, w), x == w || W.length(x) < W.length(w));
}

TEST(WeakPrefixes, Examples) {
  CoxeterGroup W(CoxeterSystem(2, 4, 5), 14);
  auto names = [&](Element w) {
    std::vector<std::string> out;
    for (auto x : W.weak_prefixes(w)) out.push_back(W.name(x));
    return out;
  };
  EXPECT_EQ(names(W.identity()), (std::vector<std::string>{"e"}));
  EXPECT_EQ(names(W.normal_form("rst")), (std::vector<std::string>{"e", "r", "rs", "rst"}));
  EXPECT_EQ(names(W.normal_form("rt")), (std::vector<std::string>{"e", "r", "t", "rt"}));
  for (auto w : W.ball(7)) {
    auto pre = W.weak_prefixes(w);
    EXPECT_GE(pre.size(), static_cast<std::size_t>(W.length(w) + 1));
    for (auto x : W.ball(7)) {
      const bool is = W.length(x) + W.length(W.mul(W.inverse(x), w)) == W.length(w);
      EXPECT_EQ(std::binary_search(pre.begin(), pre.end(), x), is);
      EXPECT_EQ(W.is_weak_prefix(w, x), is);
    }
  }
}

TEST(ContainsFactor, Examples) {
  CoxeterGroup W(CoxeterSystem(2, 4, 5), 10);
  const auto rst = W.normal_form("rst");
  EXPECT_TRUE(W.contains_factor(rst, W.identity()));
  EXPECT_FALSE(W.contains_factor(rst, W.normal_form("rt")));
  CoxeterGroup W6(CoxeterSystem(2, 4, 6), 8);
  EXPECT_TRUE(W6.contains_factor(W6.normal_form("ststst"), W6.normal_form("sts")));
  // brute force: w = x.d.y over all x, y in a small ball
  for (auto w : W.ball(6))
    for (auto d : W.ball(3)) {
      bool found = false;
      for (auto x : W.ball(6))
        if (W.reduced_product(x, d) && W.length(x) + W.length(d) <= W.length(w)) {
          const auto xd = W.mul(x, d);
          if (W.is_weak_prefix(w, xd)) found = true;
        }
      EXPECT_EQ(W.contains_factor(w, d), found) << W.name(w) << " " << W.name(d);
    }
}

TEST(LongestElement, Examples) {
  CoxeterGroup W(CoxeterSystem(2, 4, 5), 10);
  EXPECT_EQ(W.name(W.longest_element({Gen::s, Gen::t})), "ststs");
  EXPECT_EQ(W.name(W.longest_element({Gen::r, Gen::s})), "rsrs");
  EXPECT_EQ(W.name(W.longest_element({Gen::r, Gen::t})), "rt");
  CoxeterGroup Winf(CoxeterSystem(2, kInfinity, 3), 10);
  EXPECT_EQ(code_of([&] { Winf.longest_element({Gen::r, Gen::s}); }), Errc::InfiniteParabolic);
  EXPECT_EQ(code_of([&] { W.longest_element(GenSet::all()); }), Errc::InfiniteParabolic);
  CoxeterGroup A3(CoxeterSystem(2, 3, 3), 10);
  EXPECT_EQ(A3.length(A3.longest_element(GenSet::all())), 6);
}

TEST(Ball, ExamplesAndOrders) {
  CoxeterGroup W(CoxeterSystem(2, 4, 5), 8);
  auto names = [&](int R) {
    std::vector<std::string> out;
    for (auto x : W.ball(R)) out.push_back(W.name(x));
    return out;
  };
  EXPECT_EQ(names(0), (std::vector<std::string>{"e"}));
  EXPECT_EQ(names(1), (std::vector<std::string>{"e", "r", "s", "t"}));
  EXPECT_EQ(names(2), (std::vector<std::string>{"e", "r", "s", "t", "rs", "rt", "sr", "st", "ts"}));
  EXPECT_EQ(code_of([&] { W.ball(9); }), Errc::HorizonExceeded);
  EXPECT_EQ(CoxeterGroup(CoxeterSystem(2, 3, 3), 16).ball(16).size(), 24u);
  EXPECT_EQ(CoxeterGroup(CoxeterSystem(2, 3, 4), 16).ball(16).size(), 48u);
  EXPECT_EQ(CoxeterGroup(CoxeterSystem(2, 3, 5), 16).ball(16).size(), 120u);
  EXPECT_EQ(CoxeterGroup(CoxeterSystem(2, 2, 2), 16).ball(16).size(), 8u);
  EXPECT_EQ(CoxeterGroup(CoxeterSystem(2, 6, 5).parabolic({Gen::r, Gen::s}), 16).ball(16).size(), 12u);
}

TEST(Ball, CountsMatchOracleEnumeration) {
  for (const auto& spec : kSystems) {
    auto sys = CoxeterSystem::parse(spec);
    CoxeterGroup W(sys, 8);
    std::set<std::string> all{""};
    std::set<std::string> layer{""};
    for (int n = 0; n < 6; ++n) {
      std::set<std::string> next;
      for (const auto& w : layer)
        for (char c : {'r', 's', 't'}) next.insert(oracle::normal_form(w + c, bonds_of(sys)));
      for (const auto& w : next) all.insert(w);
      layer = std::move(next);
    }
    ASSERT_EQ(W.ball(6).size(), all.size()) << spec;
    auto ball = W.ball(6);
    for (std::size_t i = 1; i < ball.size(); ++i) {
      const auto &a = W.word(ball[i - 1]), &b = W.word(ball[i]);
      EXPECT_TRUE(a.size() < b.size() || (a.size() == b.size() && a < b));
    }
  }
}
