#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace wcells {

// Property sweeps over a weighted dihedral group W_I, I = {s, t}, m = m_st (kInfinity allowed).
// Monomial statements track xi_s, xi_t as formal variables; degree statements use the
// numeric weights (L(s), L(t)).
struct DihedralReport {
  std::string lemma;
  int m = 0;
  long long Ls = 1, Lt = 1;
  bool pass = true;
  bool vacuous = false;  // weight hypotheses unmet, nothing to check
  std::size_t cases_checked = 0;
  std::string counterexample;
};

nlohmann::ordered_json to_json(const DihedralReport& r);

// fuvw, infinite2, fuvw2, infinite1, plusdeg, degfp, degfp-cor, degfp2, aaa, Fuv, degnfp,
// degnfp2, bbb-part1, bbb-part2, bbb-part3.
std::vector<std::string> dihedral_lemma_ids();
// Whether m meets the lemma's bond hypothesis (weight hypotheses are checked inside).
bool dihedral_applies(std::string_view lemma_id, int m);

// Exhaustive over W_I for finite m, over the length <= 12 window for m = infinity.
// Throws UnsupportedLemma for an unknown id or a bond outside the lemma's hypothesis and
// InvalidWeights when an odd m carries unequal weights.
DihedralReport dihedral_sweep(int m, long long Ls, long long Lt, std::string_view lemma_id);

struct DihedralCase {
  int m = 0;
  long long Ls = 1, Lt = 1;
  std::string lemma;
};
// Every applicable lemma for m in {2..8, infinity} and weights in {1,2,3}^2; odd m only with
// equal weights.
std::vector<DihedralCase> dihedral_grid();
std::vector<DihedralReport> dihedral_sweep_all();

}  // namespace wcells
