#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "wcells/error.hpp"
#include "wcells/params.hpp"

using namespace wcells;

namespace {

DSymbol sym(const char* s) { return DSymbol::parse(s); }

std::set<std::string> names(const std::vector<DSymbol>& ds) {
  std::set<std::string> out;
  for (const auto& d : ds) out.insert(d.str());
  return out;
}

}  // namespace

TEST(LinearForms, Examples) {
  const Bonds b45{4, 5}, b46{4, 6};
  EXPECT_EQ(aprime_form(sym("r"), b45, {1, 0}), (LinearForm{1, 0, 0}));
  EXPECT_EQ(aprime_form(sym("sw_rs"), b45, {1, 0}), (LinearForm{2, -1, 0}));
  EXPECT_EQ(aprime_form(sym("sw_rs"), b45, {1, 0}).eval(5, 1, 1), 9);
  EXPECT_EQ(aprime_form(sym("w_st"), b46, {0, 0}), (LinearForm{0, 3, 3}));
  EXPECT_EQ(aprime_form(sym("w_st"), b45, {1, 0}), (LinearForm{0, 3, 2}));
  try {
    aprime_form(sym("sw_rs"), b45, {-1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UndefinedInChamber);
  }
  EXPECT_THROW(aprime_form(sym("w_st"), b45, {0, 1}), Error);
  EXPECT_EQ((LinearForm{2, -4, Rational(6, 4)}).normalized(), (LinearForm{4, -8, 3}));
  EXPECT_EQ((LinearForm{-1, 0, 1}).normalized(), (LinearForm{1, 0, -1}));
  EXPECT_EQ((LinearForm{2, 2, -1}).str(), "2a + 2b - c");
  EXPECT_EQ((LinearForm{-1, Rational(1, 2), 0}).str(), "-a + 1/2b");
}

TEST(LinearForms, AgreeWithNumericAPrime) {
  std::mt19937 rng(5);
  for (auto [mrs, mst] : {std::pair{4, 6}, std::pair{6, 8}, std::pair{4, 5}, std::pair{8, 3}, std::pair{10, 4}}) {
    const Bonds bonds{mrs, mst};
    for (int i = 0; i < 60; ++i) {
      long long a = 1 + rng() % 9, b = 1 + rng() % 9, c = 1 + rng() % 9;
      if (mst % 2 == 1) c = b;
      const Weights L(a, b, c);
      const Chamber ch = Chamber::at(a, b, c);
      const auto present = chamber_symbols(bonds, ch);
      EXPECT_EQ(names(present), names(d_symbols(bonds.system(), L)));
      for (const auto& d : present) EXPECT_EQ(aprime_form(d, bonds, ch).eval(a, b, c), *aprime(d, bonds.system(), L));
    }
  }
}

TEST(DLevels, SevenThreeEqualWeights) {
  auto levels = d_levels(CoxeterSystem(2, 7, 3), Weights::uniform());
  std::map<long long, std::set<std::string>> got;
  for (const auto& [n, ds] : levels) got[n] = names(ds);
  std::map<long long, std::set<std::string>> expected{
      {0, {"e"}}, {1, {"r", "s", "t"}}, {2, {"rt"}}, {3, {"w_st"}}, {7, {"w_rs"}}};
  EXPECT_EQ(got, expected);
  EXPECT_THROW(d_levels(CoxeterSystem(2, 3, 3), Weights::uniform()), Error);
}

TEST(CriticalValues, OneParameterExamples) {
  using R = Rational;
  EXPECT_EQ(critical_values_1d(2, 5), (std::vector<R>{R(1, 2), 1, R(3, 2), 2, 3, 4}));
  EXPECT_EQ(critical_values_1d(4, 3), (std::vector<R>{R(1, 3), 1, R(4, 3), R(3, 2), 2}));
  EXPECT_EQ(critical_values_1d(3, 4), (std::vector<R>{R(1, 3), R(2, 3), 1, R(3, 2), 2, 3}));
}

TEST(CriticalValues, WithinClosedFormCandidates) {
  // candidate values solved by hand from the seven a'-coincidences that can be critical
  for (auto [m, k] : {std::pair{2, 5}, std::pair{4, 3}, std::pair{3, 4}, std::pair{3, 5}, std::pair{5, 6}}) {
    std::set<Rational> cand{1, Rational(m - k, m - 1), Rational(m + k - 1, m), Rational(k - m, m),
                            Rational(m, m - 1), Rational(k - 1)};
    if (k != 3) cand.insert(Rational(m - 1, m));
    for (const auto& x : critical_values_1d(m, k)) EXPECT_TRUE(cand.count(x)) << m << "," << k << ": " << to_string(x);
  }
}

TEST(CriticalLines, TwoThreeExamples) {
  const auto loci = critical_lines_2d(2, 3);
  ASSERT_FALSE(loci.empty());
  bool saw_rt_wrs = false, saw_r_t = false, saw_wrs_t = false;
  for (const auto& l : loci) {
    const auto pair = std::set<std::string>{l.d1.str(), l.d2.str()};
    if (pair == std::set<std::string>{"rt", "w_rs"}) {
      saw_rt_wrs = true;
      EXPECT_EQ(l.form, (LinearForm{1, 2, -1}));  // c = a + 2b
      EXPECT_TRUE(l.critical());
    }
    if (pair == std::set<std::string>{"r", "t"} && l.sample.x < 1) {
      saw_r_t = true;
      EXPECT_FALSE(l.critical());
    }
    if (pair == std::set<std::string>{"w_rs", "t"}) {
      saw_wrs_t = true;
      EXPECT_FALSE(l.critical());
    }
    // the sample really is a coincidence of predicted a-values
    const Weights L = scaled_weights(l.sample.x, 1, l.sample.y);
    const CoxeterSystem sys(2, 4, 6);
    EXPECT_EQ(aprime(l.d1, sys, L), aprime(l.d2, sys, L));
    EXPECT_EQ(l.form.eval(l.sample.x, 1, l.sample.y), 0);
  }
  EXPECT_TRUE(saw_rt_wrs && saw_r_t && saw_wrs_t);
}

TEST(TriplePoints, TwoThree) {
  const auto pts = triple_points(2, 3);
  std::map<Point2, std::set<std::string>> got;
  for (const auto& p : pts) got[p.at] = names(p.members);
  // closed forms with m = 2, n = 3
  const long long m = 2, n = 3;
  using R = Rational;
  std::map<Point2, std::set<std::string>> expected{
      {{1, 1}, {"r", "s", "t"}},
      {{R((m - 1) * (n - 1), m * n - m + 1), R(m * n, m * n - m + 1)}, {"rw_rs", "rt", "sw_st"}},
      {{R((m - 1) * n, m * n - 1), R(m * (n - 1), m * n - 1)}, {"rw_rs", "rt", "tw_st"}},
      {{R(m * (n - 1), m * n - m - n), R((m - 1) * n, m * n - m - n)}, {"sw_rs", "rt", "sw_st"}},
      {{R(m * n, m * n - n + 1), R((m - 1) * (n - 1), m * n - n + 1)}, {"sw_rs", "rt", "tw_st"}}};
  EXPECT_EQ(got, expected);
  for (Point2 named : {Point2{R(2, 5), R(6, 5)}, Point2{R(3, 5), R(4, 5)}, Point2{R(3, 2), R(1, 2)}, Point2{4, 3}})
    EXPECT_TRUE(got.count(named)) << to_string(named.x) << "," << to_string(named.y);
  for (const auto& p : pts) EXPECT_LE(p.members.size(), 3u);
}

TEST(Export, FormatsAndRoundTrip) {
  const auto empty = render_arrangement({}, {}, ExportFormat::svg);
  EXPECT_EQ(empty.rfind("<svg", 0), 0u);
  EXPECT_NE(empty.find("</svg>"), std::string::npos);
  EXPECT_EQ(render_arrangement({}, {}, ExportFormat::csv), "d1,d2,alpha,beta,gamma,chamber,critical\n");

  const auto loci = critical_lines_2d(2, 3);
  const auto pts = triple_points(2, 3);
  const auto csv = render_arrangement(loci, pts, ExportFormat::csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(loci.size() + 1));
  const auto json = render_arrangement(loci, pts, ExportFormat::json);
  const auto back = loci_from_json(json);
  EXPECT_EQ(render_arrangement(back, pts, ExportFormat::json), json);
  EXPECT_EQ(render_arrangement(loci, pts, ExportFormat::svg), render_arrangement(loci, pts, ExportFormat::svg));
  EXPECT_THROW(loci_from_json("{}"), Error);
  EXPECT_THROW(parse_export_format("png"), Error);

  const auto path = std::filesystem::temp_directory_path() / "wcells_arrangement.csv";
  export_arrangement(loci, pts, ExportFormat::csv, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, csv);
  std::filesystem::remove(path);
  EXPECT_THROW(export_arrangement(loci, pts, ExportFormat::csv, "/nonexistent/dir/x.csv"), Error);
}
