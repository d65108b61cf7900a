#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "wcells/cells.hpp"
#include "wcells/hecke.hpp"

namespace wcells {

// The truncated algebra H_{<=N}: H modulo the span of C_z with a_pred(z) > N.
class Quotient {
public:
  Quotient(const HeckeAlgebra& H, const Cells& cells, long long N);

  const HeckeAlgebra& algebra() const { return H_; }
  const Cells& cells() const { return cells_; }
  long long level() const { return N_; }
  bool over(Element w) const { return cells_.a_pred(w) > N_; }

  // Rewrites T_z for over-level z as T_z - C_z, highest first; result supported on W_{<=N}.
  HeckeElt nt_reduce(HeckeElt h) const;
  HeckeElt product(Element x, Element y) const;  // NT_x NT_y
  HeckeElt product(Element x, Element w, Element y) const;
  Laurent nf_const(Element x, Element y, Element z) const { return product(x, y).coeff(z); }

private:
  const HeckeAlgebra& H_;
  const Cells& cells_;
  long long N_;
};

struct BoundReport {
  bool pass = true;
  long long level = 0;
  int radius = 0;
  std::size_t pairs_checked = 0;
  std::size_t equality_cases = 0;
  std::optional<std::pair<Element, Element>> witness;         // first pair attaining N
  std::optional<std::pair<Element, Element>> counterexample;
  std::string reason;
};

// deg NT_x NT_y <= N on ball(R) x ball(R) restricted to W_{<=N}, equality only inside Omega_{>=N}.
BoundReport check_bound(const Quotient& Q, int R);

struct StrictReport {
  bool pass = true;
  long long level = 0;
  int radius = 0;
  std::size_t triples_checked = 0;
  std::size_t strict_checked = 0;
  std::optional<std::tuple<Element, Element, Element>> counterexample;  // (x, w, y)
  std::string reason;
};

// deg NT_x NT_w NT_y <= -deg p_{w,d} for w <= d, x in U_d^-1, y in U_d (both within ball R),
// strictly when w < d and one of x in B_d, y in B_d^-1, l(w) >= 2 holds.
StrictReport check_strict(const Quotient& Q, Element d, int R);

nlohmann::ordered_json to_json(const BoundReport& r, const CoxeterGroup& W);
nlohmann::ordered_json to_json(const StrictReport& r, const CoxeterGroup& W);

// Expansion identities for products T_x T_w T_y with w in a rank-two parabolic subgroup.
struct ExpansionParams {
  CoxeterSystem system{2, 4, 5};
  std::optional<Weights> weights;  // default: generic weights allowed by the bonds
  bool mirrored = false;            // r <-> t exchanged
  bool transposed = false;          // (y^-1, w^-1, x^-1)
  std::map<std::string, std::string> bindings;  // fixed free elements, e.g. {"x'", "e"}
  int pool_length = 4;
  int max_samples = 32;
};

struct ExpansionFailure {
  std::string sample;
  std::string reason;
};

struct ExpansionReport {
  std::string case_id;
  ExpansionParams params;
  Weights weights{1, 1, 1};
  std::size_t samples_run = 0;
  std::vector<ExpansionFailure> failures;
  bool pass() const { return samples_run > 0 && failures.empty(); }
};

nlohmann::ordered_json to_json(const ExpansionReport& r);

// Case ids such as "reduced0(1)", "reduced(4)3", "reduced2(8)17" or "est(1)";
// circled digits are accepted for the subcase.
std::vector<std::string> expansion_case_ids();
// Systems each case is checked on by default.
std::vector<CoxeterSystem> expansion_default_systems(std::string_view case_id);

// Throws NotApplicableSystem when the bonds miss the case's requirements and
// ConstraintUnsatisfiable when no pool element meets its descent conditions.
ExpansionReport verify_expansion(std::string_view case_id, const ExpansionParams& params);

// Every case on its default systems in all four mirror/transpose variants.
std::vector<ExpansionReport> verify_all_expansions(int max_samples = 32);

}  // namespace wcells
