#include "wcells/cells.hpp"

#include <algorithm>
#include <unordered_map>

#include "wcells/error.hpp"

namespace wcells {

namespace {

Gen mirror(Gen g) { return g == Gen::r ? Gen::t : (g == Gen::t ? Gen::r : Gen::s); }

GenSet mirror(GenSet J) {
  GenSet out;
  for (Gen g : J.members()) out.insert(mirror(g));
  return out;
}

std::string pair_letters(GenSet J) {
  std::string out;
  for (Gen g : J.members()) out += to_char(g);
  return out;
}

GenSet parse_letters(std::string_view text) {
  GenSet J;
  for (char c : text) {
    auto g = gen_from_char(c);
    if (!g || J.contains(*g)) throw Error(Errc::NotInD, "bad distinguished symbol '" + std::string(text) + "'");
    J.insert(*g);
  }
  return J;
}

// L(w_J) for |J| <= 2 with W_J finite.
long long longest_weight(GenSet J, const CoxeterSystem& sys, const Weights& L) {
  auto g = J.members();
  if (g.empty()) return 0;
  if (g.size() == 1) return L[g[0]];
  const long long m = sys.m(g[0], g[1]);
  if (m % 2 == 0) return m / 2 * (L[g[0]] + L[g[1]]);
  return m * L[g[0]];  // odd bond forces equal weights
}

}  // namespace

DSymbol DSymbol::parse(std::string_view text) {
  if (text == "e") return longest({});
  if (auto pos = text.find("w_"); pos != std::string_view::npos) {
    const GenSet J = parse_letters(text.substr(pos + 2));
    if (J.size() != 2) throw Error(Errc::NotInD, "bad distinguished symbol '" + std::string(text) + "'");
    if (pos == 0) return longest(J);
    const GenSet light = parse_letters(text.substr(0, pos));
    if (light.size() != 1 || !light.subset_of(J))
      throw Error(Errc::NotInD, "bad distinguished symbol '" + std::string(text) + "'");
    return light_longest(light.members()[0], J);
  }
  const GenSet J = parse_letters(text);
  if (J.empty() || J.size() > 2 || (J.size() == 2 && J != GenSet{Gen::r, Gen::t}))
    throw Error(Errc::NotInD, "bad distinguished symbol '" + std::string(text) + "'");
  return longest(J);
}

DSymbol DSymbol::mirrored() const {
  DSymbol out{mirror(J), std::nullopt};
  if (light) out.light = mirror(*light);
  return out;
}

std::string DSymbol::str() const {
  if (J.empty()) return "e";
  if (J.size() == 1) return pair_letters(J);
  // rt names w_rt; the family of interest has m_rt = 2
  if (!light && J == GenSet{Gen::r, Gen::t}) return "rt";
  return (light ? std::string(1, to_char(*light)) : std::string()) + "w_" + pair_letters(J);
}

std::vector<DSymbol> d_symbols(const CoxeterSystem& sys, const Weights& L) {
  const GenSet S = sys.generators();
  if (S.size() == 3 && sys.finite_parabolic(S))
    throw Error(Errc::NotDimensionTwo, "W_{r,s,t} is finite for system " + sys.label());
  std::vector<DSymbol> out{DSymbol::longest({})};
  for (Gen g : S.members()) out.push_back(DSymbol::longest({g}));
  for (auto [x, y] : {std::pair{Gen::r, Gen::s}, std::pair{Gen::r, Gen::t}, std::pair{Gen::s, Gen::t}}) {
    const GenSet J{x, y};
    if (!J.subset_of(S) || !sys.finite_parabolic(J)) continue;
    out.push_back(DSymbol::longest(J));
  }
  for (auto [x, y] : {std::pair{Gen::r, Gen::s}, std::pair{Gen::r, Gen::t}, std::pair{Gen::s, Gen::t}}) {
    const GenSet J{x, y};
    const int m = sys.m(x, y);
    if (!J.subset_of(S) || m == kInfinity || m < 4 || L[x] == L[y]) continue;
    out.push_back(DSymbol::light_longest(L[x] < L[y] ? x : y, J));
  }
  return out;
}

std::optional<long long> aprime(const DSymbol& d, const CoxeterSystem& sys, const Weights& L) {
  auto all = d_symbols(sys, L);
  if (std::find(all.begin(), all.end(), d) == all.end()) return std::nullopt;
  if (!d.light) return longest_weight(d.J, sys, L);
  const Gen s = *d.light;
  const Gen t = (d.J.members()[0] == s) ? d.J.members()[1] : d.J.members()[0];
  const long long m = sys.m(s, t);
  return L[t] + (m / 2 - 1) * (L[t] - L[s]);
}

bool in_hyperbolic_family(const CoxeterSystem& sys) {
  if (sys.generators() != GenSet::all() || sys.m_rt() != 2) return false;
  const long long p = sys.m_rs(), q = sys.m_st();
  if (p == kInfinity && q == kInfinity) return false;
  if (p == kInfinity) return q > 2;
  if (q == kInfinity) return p > 2;
  return 2 * (p + q) < p * q;
}

std::string_view verdict_name(CellVerdict v) { return v == CellVerdict::same ? "same" : "different"; }

namespace {

// One orientation of the theorem's case list; the caller also tries the r <-> t mirror.
std::optional<std::string> different_case(const DSymbol& d1, const DSymbol& d2, const CoxeterSystem& sys,
                                          const Weights& L, long long N) {
  const long long a = L[Gen::r], b = L[Gen::s], c = L[Gen::t];
  const GenSet rs{Gen::r, Gen::s}, st{Gen::s, Gen::t};
  const auto w_rs = DSymbol::longest(rs), rt = DSymbol::longest({Gen::r, Gen::t});
  const auto r = DSymbol::longest({Gen::r}), t = DSymbol::longest({Gen::t});
  const auto sw_rs = DSymbol::light_longest(Gen::s, rs), rw_rs = DSymbol::light_longest(Gen::r, rs);
  const auto sw_st = DSymbol::light_longest(Gen::s, st), tw_st = DSymbol::light_longest(Gen::t, st);
  auto is = [&](const DSymbol& x, const DSymbol& y) { return (d1 == x && d2 == y) || (d1 == y && d2 == x); };
  if (is(w_rs, t)) return "(1) {w_rs,t}";
  if (is(r, t) && b > a) return "(2) {r,t} with b>a";
  if (is(sw_rs, t) && a > b) return "(3) {sw_rs,t} with a>b";
  if (is(sw_rs, tw_st) && a > b && b > c && a + c > N) return "(4) {sw_rs,tw_st} with a>b>c, a+c>N";
  if (is(sw_rs, sw_st) && a > b && b < c && a + c > N) return "(5) {sw_rs,sw_st} with a>b<c, a+c>N";
  if (is(rw_rs, rt) && a < b && sys.m_st() == 3) return "(6) {rw_rs,rt} with a<b, m_st=3";
  return std::nullopt;
}

}  // namespace

CellVerdict classify_pair(const DSymbol& d1, const DSymbol& d2, const CoxeterSystem& sys, const Weights& L,
                          std::string* rule) {
  if (!in_hyperbolic_family(sys))
    throw Error(Errc::NotApplicableSystem, "system " + sys.label() + " is outside the hyperbolic family");
  const auto a1 = aprime(d1, sys, L), a2 = aprime(d2, sys, L);
  if (!a1 || !a2) throw Error(Errc::NotInD, (a1 ? d2 : d1).str() + " is not in D");
  if (*a1 != *a2)
    throw Error(Errc::UnequalAValues, d1.str() + " has a'=" + std::to_string(*a1) + ", " + d2.str() +
                                          " has a'=" + std::to_string(*a2));
  auto hit = different_case(d1, d2, sys, L, *a1);
  if (!hit) {
    hit = different_case(d1.mirrored(), d2.mirrored(), sys.mirrored(), L.mirrored(), *a1);
    if (hit) *hit += " (r,t exchanged)";
  }
  if (rule) *rule = hit.value_or("");
  return hit ? CellVerdict::different : CellVerdict::same;
}

Cells::Cells(const CoxeterGroup& W, Weights L) : W_(W), L_(L) {
  L_.validate(W.system());
  for (const auto& sym : d_symbols(W.system(), L_)) {
    Element e = W.longest_element(sym.J);
    if (sym.light) e = W.lmul(*sym.light, e);
    d_.push_back({sym, e, *aprime(sym, W.system(), L_)});
  }
  std::unordered_map<std::uint32_t, long long> own;
  for (const auto& d : d_) own[d.elem.id] = d.aprime;
  // a factor of w is w itself or a factor of ws / sw for a descent s
  a_pred_.assign(W.size(), 0);
  for (std::uint32_t id = 0; id < W.size(); ++id) {
    const Element w{id};
    long long best = own.count(id) ? own[id] : 0;
    for (Gen s : W.right_descents(w).members()) best = std::max(best, a_pred_[W.rmul(w, s).id]);
    for (Gen s : W.left_descents(w).members()) best = std::max(best, a_pred_[W.lmul(s, w).id]);
    a_pred_[id] = best;
  }
}

std::map<long long, std::vector<DElement>> Cells::d_levels() const {
  std::map<long long, std::vector<DElement>> out;
  for (const auto& d : d_) out[d.aprime].push_back(d);
  for (auto& [n, ds] : out)
    std::sort(ds.begin(), ds.end(), [](const DElement& x, const DElement& y) { return x.elem < y.elem; });
  return out;
}

const DElement* Cells::find(Element d) const {
  for (const auto& x : d_)
    if (x.elem == d) return &x;
  return nullptr;
}

const DElement& Cells::element(const DSymbol& s) const {
  for (const auto& x : d_)
    if (x.symbol == s) return x;
  throw Error(Errc::NotInD, s.str() + " is not in D for " + W_.system().label() + " / " + L_.label());
}

const DElement& Cells::require(Element d) const {
  if (const auto* x = find(d)) return *x;
  throw Error(Errc::NotInD, W_.name(d) + " is not in D for " + W_.system().label() + " / " + L_.label());
}

bool Cells::in_u(const DElement& d, Element y) const {
  return W_.reduced_product(d.elem, y) && a_pred(W_.mul(d.elem, y)) == d.aprime;
}

bool Cells::in_b(const DElement& d, Element x) const {
  if (!in_u(d, W_.inverse(x))) return false;
  const Element xd = W_.mul(x, d.elem);
  // xd = w.v with v != e  <=>  w = xd.p with p a nontrivial weak prefix of (xd)^-1
  for (Element p : W_.weak_prefixes(W_.inverse(xd)))
    if (p != W_.identity() && a_pred(W_.mul(xd, p)) >= d.aprime) return false;
  return true;
}

std::vector<Element> Cells::u_set(Element d, int R) const {
  const auto& dd = require(d);
  std::vector<Element> out;
  for (Element y : W_.ball(R))
    if (in_u(dd, y)) out.push_back(y);
  return out;
}

std::vector<Element> Cells::b_set(Element d, int R) const {
  const auto& dd = require(d);
  std::vector<Element> out;
  for (Element x : W_.ball(R))
    if (in_b(dd, x)) out.push_back(x);
  return out;
}

Decomposition Cells::decompose(Element w) const {
  if (!in_hyperbolic_family(W_.system()))
    throw Error(Errc::NotApplicableSystem, "decomposition is only established for the hyperbolic family");
  const long long N = a_pred(w);
  std::vector<Decomposition> found;
  const auto prefixes = W_.weak_prefixes(w);
  for (const auto& d : d_) {
    if (d.aprime != N) continue;
    for (Element b : prefixes) {
      const Element rest = W_.mul(W_.inverse(b), w);
      if (!W_.is_weak_prefix(rest, d.elem)) continue;
      const Element y = W_.mul(W_.inverse(d.elem), rest);
      if (in_u(d, y) && in_b(d, b)) found.push_back({b, d.elem, y});
    }
  }
  if (found.size() != 1)
    throw Error(Errc::NonUniqueDecomposition,
                W_.name(w) + " has " + std::to_string(found.size()) + " decompositions b.d.y");
  return found.front();
}

LengthReport Cells::length_additivity_check(Element d, int R) const {
  LengthReport rep;
  const auto bs = b_set(d, R), ys = u_set(d, R);
  for (Element b : bs)
    for (Element y : ys) {
      const int total = W_.length(b) + W_.length(d) + W_.length(y);
      if (total > W_.horizon()) {
        ++rep.pairs_beyond_horizon;
        continue;
      }
      ++rep.pairs_checked;
      if (W_.length(W_.mul(W_.mul(b, d), y)) != total) {
        rep.pass = false;
        rep.counterexample = {b, y};
        return rep;
      }
    }
  return rep;
}

CellVerdict Cells::two_sided_classifier(Element d1, Element d2, std::string* rule) const {
  return classify_pair(require(d1).symbol, require(d2).symbol, W_.system(), L_, rule);
}

std::optional<Element> Cells::connect_witness(Element d1, Element d2) const {
  const long long N = require(d1).aprime;
  require(d2);
  for (std::uint32_t id = 0; id < W_.size(); ++id) {
    const Element w{id};
    if (a_pred(w) == N && W_.is_weak_prefix(w, d1) && W_.is_weak_suffix(w, d2)) return w;
  }
  return std::nullopt;
}

std::string Cells::cell_table_csv(int R) const {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> ids;
  std::string out = "word,length,a_pred,d,b,y,cell_id\n";
  for (Element w : W_.ball(R)) {
    const auto dec = decompose(w);
    const auto id = ids.emplace(std::pair{dec.b.id, dec.d.id}, ids.size()).first->second;
    out += W_.name(w) + ',' + std::to_string(W_.length(w)) + ',' + std::to_string(a_pred(w)) + ',' + W_.name(dec.d) +
           ',' + W_.name(dec.b) + ',' + W_.name(dec.y) + ',' + std::to_string(id) + '\n';
  }
  return out;
}

}  // namespace wcells
