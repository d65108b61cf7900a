#include "wcells/dihedral.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

#include "wcells/error.hpp"
#include "wcells/hecke.hpp"

namespace wcells {

namespace {

constexpr int kInfiniteWindow = 12;

// xi_s^i xi_t^j -> coefficient; coefficients of f_{u,v,w} are nonnegative, so nothing cancels.
using Monomial = std::pair<int, int>;
using XiPoly = std::map<Monomial, long long>;

const Monomial kConst{0, 0}, kXiS{1, 0}, kXiT{0, 1}, kXiSXiT{1, 1};

std::string show_deg(int d) { return d == kNegInfDegree ? "-inf" : std::to_string(d); }

struct Dihedral {
  int m;
  long long Ls, Lt;
  CoxeterGroup W;
  HeckeAlgebra H;
  Element e, s, t, st, ts, sts, tst;
  std::optional<Element> wI;
  // heavier generator s1, lighter s2; defined for even m >= 4 with unequal weights
  std::optional<Element> dI, dI_prime;
  std::optional<Gen> heavy;

  Dihedral(int m_, long long Ls_, long long Lt_)
      : m(m_),
        Ls(Ls_),
        Lt(Lt_),
        W(CoxeterSystem(2, 2, m_, GenSet{Gen::s, Gen::t}), m_ == kInfinity ? 2 * kInfiniteWindow + 3 : 2 * m_),
        H(W, Weights(1, Ls_, Lt_)) {
    e = CoxeterGroup::identity();
    s = W.gen(Gen::s);
    t = W.gen(Gen::t);
    st = W.normal_form("st");
    ts = W.normal_form("ts");
    sts = W.normal_form("sts");
    tst = W.normal_form("tst");
    if (m == kInfinity) return;
    wI = W.longest_element(GenSet{Gen::s, Gen::t});
    if (m % 2 == 0 && m >= 4 && Ls != Lt) {
      heavy = Ls > Lt ? Gen::s : Gen::t;
      const Gen light = Ls > Lt ? Gen::t : Gen::s;
      dI = W.lmul(light, *wI);
      dI_prime = W.lmul(*heavy, *wI);
    }
  }

  std::string name(Element x) const { return W.name(x); }
  long long L(Element x) const { return H.weight(x); }

  // Odd m forces xi_s = xi_t, so only the total degree of a monomial is meaningful.
  bool appears(const XiPoly& p, Monomial mono) const {
    if (m == kInfinity || m % 2 == 0) return p.count(mono) > 0;
    for (const auto& [k, c] : p)
      if (k.first + k.second == mono.first + mono.second) return true;
    return false;
  }
  int len(Element x) const { return W.length(x); }

  // L'(s1) = L(s1), L'(s2) = -L(s2)
  long long Lprime(Element x) const {
    long long out = 0;
    for (char c : W.word(x)) {
      const Gen g = *gen_from_char(c);
      const long long w = g == Gen::s ? Ls : Lt;
      out += g == *heavy ? w : -w;
    }
    return out;
  }

  std::vector<Element> elements() const {
    return W.ball(m == kInfinity ? kInfiniteWindow : m);
  }

  XiPoly formal_coeff(Element u, Element v, Element z) const {
    std::map<Element, XiPoly> h{{u, XiPoly{{kConst, 1}}}};
    for (char c : W.word(v)) {
      const Gen g = *gen_from_char(c);
      std::map<Element, XiPoly> next;
      for (const auto& [x, P] : h) {
        const Element xg = W.rmul(x, g);
        for (const auto& [mono, k] : P) next[xg][mono] += k;
        if (len(xg) < len(x))
          for (const auto& [mono, k] : P) {
            const Monomial up = g == Gen::s ? Monomial{mono.first + 1, mono.second} : Monomial{mono.first, mono.second + 1};
            next[x][up] += k;
          }
      }
      h = std::move(next);
    }
    auto it = h.find(z);
    return it == h.end() ? XiPoly{} : it->second;
  }

  Laurent f(Element u, Element v, Element z) const { return H.t_mult(u, v).coeff(z); }
  Laurent p(Element y, Element w) const { return W.bruhat_leq(y, w) ? H.kl_poly(y, w) : Laurent{}; }
  // F(u,v) = f_{u,v,d_I} - p_{d_I,w_I} f_{u,v,w_I}
  Laurent F(Element u, Element v) const { return f(u, v, *dI) - p(*dI, *wI) * f(u, v, *wI); }

  // (a.u', u'^-1.b) for some u'
  bool split_pair(Element u, Element v, Element a, Element b) const {
    if (!W.is_weak_prefix(u, a)) return false;
    const Element rest = W.mul(W.inverse(a), u);
    const Element inv = W.inverse(rest);
    return W.reduced_product(inv, b) && W.mul(inv, b) == v;
  }
  bool left_desc(Element x, Gen g) const { return W.left_descents(x).contains(g); }
  bool right_desc(Element x, Gen g) const { return W.right_descents(x).contains(g); }
};

struct Check {
  std::size_t cases = 0;
  std::string counterexample;
  bool fail(std::string why) {
    counterexample = std::move(why);
    return false;
  }
};

std::string uv(const Dihedral& D, Element u, Element v) { return "u=" + D.name(u) + ", v=" + D.name(v); }

// Runs `body` over all (u, v), skipping w_I when `proper`; stops at the first failure.
void for_pairs(const Dihedral& D, Check& c, bool proper, const std::function<bool(Element, Element)>& body) {
  const auto els = D.elements();
  for (Element u : els)
    for (Element v : els) {
      if (proper && (u == D.wI || v == D.wI)) continue;
      ++c.cases;
      if (!body(u, v)) return;
    }
}

void lemma_fuvw(const Dihedral& D, Check& c) {
  const Element wI = *D.wI;
  const Element s_wI = D.W.lmul(Gen::s, wI), t_wI = D.W.lmul(Gen::t, wI);
  const Element wI_s = D.W.rmul(wI, Gen::s), wI_t = D.W.rmul(wI, Gen::t);
  for_pairs(D, c, true, [&](Element u, Element v) {
    const XiPoly P = D.formal_coeff(u, v, D.sts);
    if (P.empty() || D.appears(P, kConst)) return true;
    if (D.appears(P, kXiS) && (D.split_pair(u, v, D.s, D.sts) || (u == t_wI && v == wI_s) ||
                             D.split_pair(u, v, D.sts, D.s) || (u == s_wI && v == wI_t)))
      return true;
    if (D.appears(P, kXiT) && (D.split_pair(u, v, D.st, D.ts) || (u == s_wI && v == wI_s))) return true;
    return c.fail(uv(D, u, v) + ": f_{u,v,sts} fits no situation");
  });
}

void lemma_infinite2(const Dihedral& D, Check& c) {
  for_pairs(D, c, false, [&](Element u, Element v) {
    const XiPoly P = D.formal_coeff(u, v, D.sts);
    if (P.empty() || D.appears(P, kConst)) return true;
    if (D.appears(P, kXiS) && D.left_desc(u, Gen::s) && D.right_desc(v, Gen::s)) return true;
    if (D.appears(P, kXiT) && D.split_pair(u, v, D.st, D.ts)) return true;
    return c.fail(uv(D, u, v) + ": f_{u,v,sts} fits no situation");
  });
}

void lemma_fuvw2(const Dihedral& D, Check& c) {
  const Element wI = *D.wI;
  const Element s_wI = D.W.lmul(Gen::s, wI), wI_t = D.W.rmul(wI, Gen::t);
  for_pairs(D, c, false, [&](Element u, Element v) {
    const XiPoly P = D.formal_coeff(u, v, D.st);
    if (P.empty() || D.appears(P, kConst)) return true;
    if (D.appears(P, kXiSXiT) && u == wI && v == wI) return true;
    if (D.appears(P, kXiS) && (D.split_pair(u, v, D.s, D.st) || (u == wI && v == wI_t))) return true;
    if (D.appears(P, kXiT) && (D.split_pair(u, v, D.st, D.t) || (u == s_wI && v == wI))) return true;
    return c.fail(uv(D, u, v) + ": f_{u,v,st} fits no situation");
  });
}

void lemma_infinite1(const Dihedral& D, Check& c) {
  for_pairs(D, c, false, [&](Element u, Element v) {
    const XiPoly P = D.formal_coeff(u, v, D.st);
    if (P.empty() || D.appears(P, kConst)) return true;
    if (D.appears(P, kXiS) && D.split_pair(u, v, D.s, D.st)) return true;
    if (D.appears(P, kXiT) && D.split_pair(u, v, D.st, D.t)) return true;
    return c.fail(uv(D, u, v) + ": f_{u,v,st} fits no situation");
  });
}

void lemma_plusdeg(const Dihedral& D, Check& c) {
  const Element wI = *D.wI;
  for_pairs(D, c, false, [&](Element u, Element v) {
    const Laurent f = D.f(u, v, wI);
    if (f.is_zero() || f.degree() == D.L(u) + D.L(v) - D.L(wI)) return true;
    return c.fail(uv(D, u, v) + ": deg f_{u,v,w_I} = " + show_deg(f.degree()));
  });
}

// delta = deg f_{u,v,w_I} p_{z,w_I}
int delta(const Dihedral& D, Element u, Element v, Element z) {
  return degree_add(D.f(u, v, *D.wI).degree(), D.p(z, *D.wI).degree());
}

void lemma_degfp(const Dihedral& D, Check& c) {
  const Element wI = *D.wI;
  const Element s_wI = D.W.lmul(Gen::s, wI), t_wI = D.W.lmul(Gen::t, wI);
  const long long Ls = D.Ls, Lt = D.Lt, LwI = D.L(wI);
  // delta is invariant under (u, v) -> (v^-1, u^-1), so each case is accepted in either orientation
  auto fits = [&](Element u, Element v, long long d) {
    if (Ls == Lt && d == Ls && D.len(u) == D.m - 1 && D.len(v) == D.m - 1) return true;
    if (Ls != Lt && d == Lt && u == s_wI && v == s_wI) return true;
    if (Ls != Lt && D.dI && d == Ls && ((u == *D.dI && v == *D.dI_prime) || (u == *D.dI_prime && v == *D.dI)))
      return true;
    if (Ls != Lt && d == 2 * Ls - Lt && u == t_wI && v == t_wI) return true;
    if (Ls > Lt && d == Ls - Lt && u == *D.dI && D.L(v) == LwI - Ls - Lt) return true;
    if (Ls > Lt && d == Ls - 2 * Lt && u == *D.dI && D.L(v) == LwI - Ls - 2 * Lt) return true;
    return false;
  };
  for_pairs(D, c, true, [&](Element u, Element v) {
    const long long d = delta(D, u, v, D.sts);
    if (d <= 0 || fits(u, v, d) || fits(D.W.inverse(v), D.W.inverse(u), d)) return true;
    return c.fail(uv(D, u, v) + ": delta = " + std::to_string(d));
  });
}

void lemma_degfp_cor(const Dihedral& D, Check& c) {
  for_pairs(D, c, true, [&](Element u, Element v) {
    const long long d = delta(D, u, v, D.sts);
    if (d <= 0) return true;
    if ((D.left_desc(u, Gen::s) || D.right_desc(v, Gen::s)) && d < 2 * D.Ls) return true;
    if (D.left_desc(u, Gen::t) && D.right_desc(v, Gen::t) && d == D.Lt) return true;
    return c.fail(uv(D, u, v) + ": delta = " + std::to_string(d));
  });
}

void lemma_degfp2(const Dihedral& D, Check& c) {
  for_pairs(D, c, true, [&](Element u, Element v) {
    const long long d = delta(D, u, v, D.st);
    if (d <= 0) return true;
    if (D.Ls != D.Lt && d == std::abs(D.Ls - D.Lt) && u == *D.dI && v == *D.dI) return true;
    return c.fail(uv(D, u, v) + ": delta = " + std::to_string(d));
  });
}

void lemma_aaa(const Dihedral& D, Check& c) {
  for (Element w : D.elements()) {
    if (!D.W.bruhat_leq(w, *D.dI)) continue;
    ++c.cases;
    const int deg = D.p(w, *D.dI).degree();
    if (deg != D.Lprime(w) - D.Lprime(*D.dI)) {
      c.fail("w=" + D.name(w) + ": deg p_{w,d_I} = " + show_deg(deg));
      return;
    }
  }
}

// Needs L(t) > L(s), so d_I = s w_I; the bond is 2k with k = m/2.
void lemma_Fuv(const Dihedral& D, Check& c) {
  const int k = D.m / 2;
  const Laurent shift = -Laurent::q(int(-D.Ls));
  for_pairs(D, c, true, [&](Element u, Element v) {
    const Laurent F = D.F(u, v);
    if (D.right_desc(v, Gen::s)) {
      const Element vs = D.W.rmul(v, Gen::s);
      if (F == shift * D.F(u, vs)) return true;
      return c.fail(uv(D, u, v) + ": F(u,v) != -q^-L(s) F(u,vs)");
    }
    if (D.left_desc(u, Gen::s)) {
      const Element su = D.W.lmul(Gen::s, u);
      if (F == shift * D.F(su, v)) return true;
      return c.fail(uv(D, u, v) + ": F(u,v) != -q^-L(s) F(su,v)");
    }
    const int n = D.len(u) + D.len(v);
    bool ok;
    if (n < 2 * k - 1) ok = F.is_zero();
    else if (n == 2 * k - 1) ok = F == Laurent(1);
    else if (n == 2 * k) ok = F == (D.len(u) % 2 == 0 ? D.H.xi(Gen::s) : D.H.xi(Gen::t));
    else ok = F.degree() == D.Lprime(u) + D.Lprime(v) - D.Lprime(*D.dI);
    if (ok) return true;
    return c.fail(uv(D, u, v) + ": F(u,v) = " + F.str());
  });
}

// The degree named gamma in the dihedral degree bounds: deg F(u,v) p_{z,d_I}.
int delta3_gamma(const Dihedral& D, Element u, Element v, Element z) {
  return degree_add(D.F(u, v).degree(), D.p(z, *D.dI).degree());
}

void lemma_degnfp(const Dihedral& D, Check& c, Element z, bool allow_positive) {
  for_pairs(D, c, true, [&](Element u, Element v) {
    if (u == *D.dI || v == *D.dI) return true;
    const long long g = delta3_gamma(D, u, v, z);
    if (g <= 0) return true;
    if (allow_positive && D.Ls > D.Lt && D.left_desc(u, Gen::s) && D.right_desc(v, Gen::s) && g <= D.Lt) return true;
    return c.fail(uv(D, u, v) + ": gamma = " + std::to_string(g));
  });
}

void lemma_bbb(const Dihedral& D, Check& c, int part) {
  const auto els = D.elements();
  for_pairs(D, c, true, [&](Element u, Element v) {
    for (Element w : els) {
      if (D.len(w) < 2) continue;
      int deg;
      if (part == 1) deg = D.f(u, v, w).degree();
      else if (part == 2) deg = degree_add(D.f(u, v, *D.wI).degree(), D.p(w, *D.wI).degree());
      else deg = delta3_gamma(D, u, v, w);
      if (deg != kNegInfDegree && deg >= D.L(w))
        return c.fail(uv(D, u, v) + ", w=" + D.name(w) + ": degree " + std::to_string(deg) + " >= L(w)");
    }
    return true;
  });
}

struct LemmaSpec {
  const char* id;
  int min_m;
  bool finite;  // false: m = infinity only
};

const std::vector<LemmaSpec>& lemma_specs() {
  static const std::vector<LemmaSpec> specs{
      {"fuvw", 3, true},      {"infinite2", 0, false}, {"fuvw2", 2, true},     {"infinite1", 0, false},
      {"plusdeg", 3, true},   {"degfp", 3, true},      {"degfp-cor", 3, true}, {"degfp2", 3, true},
      {"aaa", 3, true},       {"Fuv", 3, true},        {"degnfp", 3, true},    {"degnfp2", 3, true},
      {"bbb-part1", 3, true}, {"bbb-part2", 3, true},  {"bbb-part3", 3, true},
  };
  return specs;
}

const LemmaSpec& spec_of(std::string_view id) {
  for (const auto& s : lemma_specs())
    if (id == s.id) return s;
  throw Error(Errc::UnsupportedLemma, "unknown dihedral lemma '" + std::string(id) + "'");
}

// Weight hypotheses, and the z of degnfp/degnfp2 lying outside {w_I, d_I}; unmet ones make
// the statement vacuous.
bool weights_apply(std::string_view id, const Dihedral& D) {
  if (id == "degnfp") return D.dI.has_value() && D.sts != *D.wI && D.sts != *D.dI;
  if (id == "degnfp2") return D.dI.has_value() && D.st != *D.wI && D.st != *D.dI;
  if (id == "aaa" || id == "bbb-part3") return D.dI.has_value();
  if (id == "Fuv") return D.dI.has_value() && D.Lt > D.Ls;
  return true;
}

}  // namespace

std::vector<std::string> dihedral_lemma_ids() {
  std::vector<std::string> out;
  for (const auto& s : lemma_specs()) out.emplace_back(s.id);
  return out;
}

bool dihedral_applies(std::string_view lemma_id, int m) {
  const auto& spec = spec_of(lemma_id);
  if (!spec.finite) return m == kInfinity;
  return m != kInfinity && m >= spec.min_m;
}

DihedralReport dihedral_sweep(int m, long long Ls, long long Lt, std::string_view lemma_id) {
  if (!dihedral_applies(lemma_id, m))
    throw Error(Errc::UnsupportedLemma, std::string(lemma_id) + " does not cover m = " +
                                            (m == kInfinity ? std::string("inf") : std::to_string(m)));
  const Dihedral D(m, Ls, Lt);
  DihedralReport rep;
  rep.lemma = std::string(lemma_id);
  rep.m = m;
  rep.Ls = Ls;
  rep.Lt = Lt;
  if (!weights_apply(lemma_id, D)) {
    rep.vacuous = true;
    return rep;
  }
  Check c;
  const std::string id(lemma_id);
  if (id == "fuvw") lemma_fuvw(D, c);
  else if (id == "infinite2") lemma_infinite2(D, c);
  else if (id == "fuvw2") lemma_fuvw2(D, c);
  else if (id == "infinite1") lemma_infinite1(D, c);
  else if (id == "plusdeg") lemma_plusdeg(D, c);
  else if (id == "degfp") lemma_degfp(D, c);
  else if (id == "degfp-cor") lemma_degfp_cor(D, c);
  else if (id == "degfp2") lemma_degfp2(D, c);
  else if (id == "aaa") lemma_aaa(D, c);
  else if (id == "Fuv") lemma_Fuv(D, c);
  else if (id == "degnfp") lemma_degnfp(D, c, D.sts, true);
  else if (id == "degnfp2") lemma_degnfp(D, c, D.st, false);
  else lemma_bbb(D, c, id.back() - '0');
  rep.cases_checked = c.cases;
  rep.pass = c.counterexample.empty();
  rep.counterexample = c.counterexample;
  return rep;
}

std::vector<DihedralCase> dihedral_grid() {
  std::vector<DihedralCase> out;
  for (int m : {2, 3, 4, 5, 6, 7, 8, kInfinity})
    for (long long Ls = 1; Ls <= 3; ++Ls)
      for (long long Lt = 1; Lt <= 3; ++Lt) {
        if (m != kInfinity && m % 2 == 1 && Ls != Lt) continue;
        for (const auto& id : dihedral_lemma_ids())
          if (dihedral_applies(id, m)) out.push_back({m, Ls, Lt, id});
      }
  return out;
}

std::vector<DihedralReport> dihedral_sweep_all() {
  std::vector<DihedralReport> out;
  for (const auto& c : dihedral_grid()) out.push_back(dihedral_sweep(c.m, c.Ls, c.Lt, c.lemma));
  return out;
}

nlohmann::ordered_json to_json(const DihedralReport& r) {
  return {{"lemma", r.lemma},
          {"m", r.m == kInfinity ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(r.m)},
          {"weights", {r.Ls, r.Lt}},
          {"result", r.vacuous ? "vacuous" : (r.pass ? "pass" : "fail")},
          {"cases_checked", r.cases_checked},
          {"counterexample", r.counterexample.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.counterexample)}};
}

}  // namespace wcells
