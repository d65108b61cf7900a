#include "wcells/hecke.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wcells/error.hpp"

namespace wcells {

HeckeElt HeckeElt::basis(Element w, Laurent c) {
  HeckeElt h;
  h.add(w, c);
  return h;
}

Laurent HeckeElt::coeff(Element w) const {
  auto it = coords_.find(w);
  return it == coords_.end() ? Laurent{} : it->second;
}

int HeckeElt::degree() const {
  int d = kNegInfDegree;
  for (const auto& [w, c] : coords_) d = std::max(d, c.degree());
  return d;
}

void HeckeElt::add(Element w, const Laurent& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = coords_.try_emplace(w, c);
  if (fresh) return;
  it->second += c;
  if (it->second.is_zero()) coords_.erase(it);
}

void HeckeElt::add_product(Element w, const Laurent& a, const Laurent& b) {
  if (a.is_zero() || b.is_zero()) return;
  auto [it, fresh] = coords_.try_emplace(w);
  it->second.add_product(a, b);
  if (it->second.is_zero()) coords_.erase(it);
}

void HeckeElt::add_scaled(const HeckeElt& h, const Laurent& c) {
  for (const auto& [w, x] : h.coords_) add_product(w, x, c);
}

std::string HeckeElt::str(const CoxeterGroup& W, const char* basis) const {
  if (coords_.empty()) return "0";
  std::string out;
  for (auto it = coords_.rbegin(); it != coords_.rend(); ++it) {
    if (!out.empty()) out += " + ";
    out += "(" + it->second.str() + ")" + basis + "_" + W.name(it->first);
  }
  return out;
}

HeckeAlgebra::HeckeAlgebra(const CoxeterGroup& W, Weights L) : W_(W), L_(L) {
  L_.validate(W.system());
  for (Gen g : kAllGens) xi_[index(g)] = Laurent::xi(L_[g]);
}

std::string HeckeAlgebra::fingerprint() const {
  return "system=" + W_.system().label() + ";gens=" + W_.system().generators().str() +
         ";weights=" + L_.label();
}

HeckeElt HeckeAlgebra::mul_gen_right(const HeckeElt& h, Gen s) const {
  HeckeElt out;
  for (const auto& [z, c] : h.coords()) {
    const Element zs = W_.rmul(z, s);
    out.add(zs, c);
    if (W_.length(zs) < W_.length(z)) out.add_product(z, c, xi(s));
  }
  return out;
}

HeckeElt HeckeAlgebra::mul_gen_left(Gen s, const HeckeElt& h) const {
  HeckeElt out;
  for (const auto& [z, c] : h.coords()) {
    const Element sz = W_.lmul(s, z);
    out.add(sz, c);
    if (W_.length(sz) < W_.length(z)) out.add_product(z, c, xi(s));
  }
  return out;
}

HeckeElt HeckeAlgebra::t_mult(const HeckeElt& a, const HeckeElt& b) const {
  HeckeElt out;
  for (const auto& [y, c] : b.coords()) {
    HeckeElt cur = a;
    for (char ch : W_.word(y)) cur = mul_gen_right(cur, *gen_from_char(ch));
    out.add_scaled(cur, c);
  }
  return out;
}

HeckeElt HeckeAlgebra::t_mult(Element x, Element y) const {
  return t_mult(HeckeElt::basis(x), HeckeElt::basis(y));
}

HeckeElt HeckeAlgebra::bar(const HeckeElt& h) const {
  HeckeElt out;
  for (const auto& [w, c] : h.coords()) out.add_scaled(bar_expand(w), c.bar());
  return out;
}

const HeckeElt& HeckeAlgebra::bar_expand(Element w) const {
  std::lock_guard lock(mu_);
  if (auto it = bar_.find(w.id); it != bar_.end()) return *it->second;
  HeckeElt value;
  if (w == CoxeterGroup::identity()) {
    value = HeckeElt::basis(w);
  } else {
    // bar(T_{ws.s}) = bar(T_ws) (T_s - xi_s)
    const Gen s = *gen_from_char(W_.word(w).back());
    const HeckeElt& prev = bar_expand(W_.rmul(w, s));
    value = mul_gen_right(prev, s);
    value.add_scaled(prev, -xi(s));
  }
  return *bar_.emplace(w.id, std::make_unique<HeckeElt>(std::move(value))).first->second;
}

void HeckeAlgebra::solve_column(Element w) const {
  // p_{y,w} - bar(p_{y,w}) = sum_{y<z<=w} r_{y,z} bar(p_{z,w}), solved for descending y.
  const HeckeElt& interval = bar_expand(w);
  std::map<Element, Laurent> acc;
  HeckeElt column;
  for (auto it = interval.coords().rbegin(); it != interval.coords().rend(); ++it) {
    const Element z = it->first;
    Laurent p;
    if (z == w) {
      p = 1;
    } else {
      Laurent rhs = std::move(acc[z]);
      acc.erase(z);
      if (rhs.bar() != -rhs)
        throw Error(Errc::InconsistentBar, "right side for (" + W_.name(z) + "," + W_.name(w) +
                                               ") is not bar-anti-invariant");
      p = rhs.negative_part();
    }
    if (p.is_zero()) continue;
    const Laurent pb = p.bar();
    for (const auto& [y, r] : bar_expand(z).coords())
      if (y != z) acc[y].add_product(r, pb);
    column.add(z, p);
  }
  ++kl_solves_;
  kl_.emplace(w.id, std::make_unique<HeckeElt>(std::move(column)));
}

const HeckeElt& HeckeAlgebra::c_basis(Element w) const {
  std::lock_guard lock(mu_);
  auto it = kl_.find(w.id);
  if (it == kl_.end()) {
    solve_column(w);
    it = kl_.find(w.id);
  }
  return *it->second;
}

HeckeElt HeckeAlgebra::to_c_coords(HeckeElt h) const {
  HeckeElt out;
  while (!h.is_zero()) {
    const auto top = std::prev(h.coords().end());
    const Element z = top->first;
    const Laurent c = top->second;
    out.add(z, c);
    h.add_scaled(c_basis(z), -c);
  }
  return out;
}

const HeckeElt& HeckeAlgebra::c_gen_product(Gen s, Element u) const {
  std::lock_guard lock(mu_);
  auto& memo = cgen_[index(s)];
  if (auto it = memo.find(u.id); it != memo.end()) return *it->second;
  HeckeElt value;
  const long long Ls = L_[s];
  if (W_.length(W_.lmul(s, u)) < W_.length(u)) {
    value = HeckeElt::basis(u, Laurent::q(static_cast<int>(Ls)) + Laurent::q(-static_cast<int>(Ls)));
  } else {
    // C_s = T_s + q^{-L(s)}
    HeckeElt t = mul_gen_left(s, c_basis(u));
    t.add_scaled(c_basis(u), Laurent::q(-static_cast<int>(Ls)));
    value = to_c_coords(std::move(t));
  }
  return *memo.emplace(u.id, std::make_unique<HeckeElt>(std::move(value))).first->second;
}

HeckeElt HeckeAlgebra::c_left_mul(Gen s, const HeckeElt& h) const {
  HeckeElt out;
  for (const auto& [u, c] : h.coords()) out.add_scaled(c_gen_product(s, u), c);
  return out;
}

std::vector<HeckeElt> HeckeAlgebra::c_products_column(const std::vector<Element>& xs, Element y) const {
  // C_{sx'} = C_s C_{x'} - sum_{z != sx'} [C_s C_{x'} : C_z] C_z with every such z shorter.
  std::unordered_map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < xs.size(); ++i) pos.emplace(xs[i].id, i);
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<HeckeElt> out(xs.size());
  auto lookup = [&](Element z) -> const HeckeElt& {
    auto it = pos.find(z.id);
    if (it == pos.end()) throw std::logic_error("c_products_column: prefix set not closed");
    return out[it->second];
  };
  for (std::size_t i : order) {
    const Element x = xs[i];
    if (x == CoxeterGroup::identity()) {
      out[i] = HeckeElt::basis(y);
      continue;
    }
    const Gen s = *gen_from_char(W_.word(x).front());
    const Element rest = W_.lmul(s, x);
    HeckeElt value = c_left_mul(s, lookup(rest));
    for (const auto& [z, m] : c_gen_product(s, rest).coords())
      if (z != x) value.add_scaled(lookup(z), -m);
    out[i] = std::move(value);
  }
  return out;
}

HeckeElt HeckeAlgebra::c_product(Element x, Element y) const {
  if (x == CoxeterGroup::identity()) return HeckeElt::basis(y);
  const Gen s = *gen_from_char(W_.word(x).front());
  const Element rest = W_.lmul(s, x);
  HeckeElt value = c_left_mul(s, c_product(rest, y));
  for (const auto& [z, m] : c_gen_product(s, rest).coords())
    if (z != x) value.add_scaled(c_product(z, y), -m);
  return value;
}

namespace {

nlohmann::json poly_json(const Laurent& p) {
  auto arr = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) {
    if (c >= std::numeric_limits<long long>::min() && c <= std::numeric_limits<long long>::max())
      arr.push_back({e, static_cast<long long>(c)});
    else
      arr.push_back({e, c.str()});
  }
  return arr;
}

Laurent poly_from_json(const nlohmann::json& j) {
  std::vector<Laurent::Term> terms;
  for (const auto& t : j) {
    const int e = t.at(0).get<int>();
    Integer c = t.at(1).is_string() ? Integer(t.at(1).get<std::string>()) : Integer(t.at(1).get<long long>());
    terms.emplace_back(e, std::move(c));
  }
  return Laurent::from_terms(std::move(terms));
}

}  // namespace

void HeckeAlgebra::save_cache(const std::filesystem::path& file) const {
  std::lock_guard lock(mu_);
  std::vector<std::uint32_t> ws;
  for (const auto& [id, col] : kl_) ws.push_back(id);
  std::sort(ws.begin(), ws.end());
  // columns beyond this horizon in an intact file of the same fingerprint survive the rewrite
  std::vector<std::string> carried;
  if (std::ifstream old(file); old) {
    try {
      std::string line;
      if (std::getline(old, line) && nlohmann::json::parse(line).value("fingerprint", "") == fingerprint())
        while (std::getline(old, line))
          if (!line.empty() &&
              static_cast<int>(nlohmann::json::parse(line).at("w").get_ref<const std::string&>().size()) > W_.horizon())
            carried.push_back(line);
    } catch (const std::exception&) {
      carried.clear();
    }
  }
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write cache file " + file.string());
  out << nlohmann::json{{"format", "wcells-kl/1"}, {"fingerprint", fingerprint()},
                        {"system", W_.system().label()}, {"weights", L_.label()}}
             .dump()
      << '\n';
  for (auto id : ws)
    for (const auto& [y, p] : kl_.at(id)->coords())
      out << nlohmann::json{{"y", W_.word(y)}, {"w", W_.word(Element{id})}, {"p", poly_json(p)}}.dump()
          << '\n';
  for (const auto& line : carried) out << line << '\n';
}

bool HeckeAlgebra::load_cache(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    cache_error_ = "missing";
    return false;
  }
  std::map<std::uint32_t, HeckeElt> cols;
  try {
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::CacheParse, "empty cache file");
    auto header = nlohmann::json::parse(line);
    if (header.value("fingerprint", "") != fingerprint())
      throw Error(Errc::FingerprintMismatch, "cache fingerprint " + header.value("fingerprint", "?"));
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto rec = nlohmann::json::parse(line);
      const auto& yw = rec.at("y").get_ref<const std::string&>();
      const auto& ww = rec.at("w").get_ref<const std::string&>();
      if (static_cast<int>(ww.size()) > W_.horizon()) continue;
      const Element y = W_.normal_form(yw);
      const Element w = W_.normal_form(ww);
      if (W_.word(y) != yw || W_.word(w) != ww) throw Error(Errc::CacheParse, "non-canonical word in cache");
      cols[w.id].add(y, poly_from_json(rec.at("p")));
    }
  } catch (const Error& e) {
    cache_error_ = e.what();
    return false;
  } catch (const std::exception& e) {
    cache_error_ = std::string("CacheParse: ") + e.what();
    return false;
  }
  std::lock_guard lock(mu_);
  for (auto& [id, col] : cols)
    if (!kl_.count(id) && col.coeff(Element{id}) == Laurent(1))
      kl_.emplace(id, std::make_unique<HeckeElt>(std::move(col)));
  cache_error_.clear();
  return true;
}

}  // namespace wcells
