#include "wcells/coxeter.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "wcells/error.hpp"

namespace wcells {

std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::HorizonExceeded: return "HorizonExceeded";
    case Errc::UnknownGenerator: return "UnknownGenerator";
    case Errc::InvalidSystem: return "InvalidSystem";
    case Errc::InvalidWeights: return "InvalidWeights";
    case Errc::InfiniteParabolic: return "InfiniteParabolic";
    case Errc::InconsistentBar: return "InconsistentBar";
    case Errc::UnsupportedLemma: return "UnsupportedLemma";
    case Errc::NotDimensionTwo: return "NotDimensionTwo";
    case Errc::NotInD: return "NotInD";
    case Errc::NonUniqueDecomposition: return "NonUniqueDecomposition";
    case Errc::NotApplicableSystem: return "NotApplicableSystem";
    case Errc::UnequalAValues: return "UnequalAValues";
    case Errc::ConstraintUnsatisfiable: return "ConstraintUnsatisfiable";
    case Errc::UndefinedInChamber: return "UndefinedInChamber";
    case Errc::UnsupportedWithoutPrediction: return "UnsupportedWithoutPrediction";
    case Errc::FingerprintMismatch: return "FingerprintMismatch";
    case Errc::CacheParse: return "CacheParse";
    case Errc::IoError: return "IoError";
    case Errc::Usage: return "Usage";
  }
  return "Unknown";
}

char to_char(Gen g) { return "rst"[index(g)]; }

std::optional<Gen> gen_from_char(char c) {
  switch (c) {
    case 'r': return Gen::r;
    case 's': return Gen::s;
    case 't': return Gen::t;
    default: return std::nullopt;
  }
}

std::vector<Gen> GenSet::members() const {
  std::vector<Gen> out;
  for (Gen g : kAllGens)
    if (contains(g)) out.push_back(g);
  return out;
}

std::string GenSet::str() const {
  std::string out = "{";
  for (Gen g : members()) {
    if (out.size() > 1) out += ',';
    out += to_char(g);
  }
  return out + "}";
}

namespace {

std::vector<std::string> split_commas(std::string_view spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '(' && c != ')') {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

long long parse_integer(const std::string& s, Errc code) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw Error(code, "not an integer: '" + s + "'");
  return v;
}

std::string bond_label(int m) { return m == kInfinity ? "inf" : std::to_string(m); }

}  // namespace

CoxeterSystem::CoxeterSystem(int m_rt, int m_rs, int m_st, GenSet gens) : gens_(gens) {
  for (int m : {m_rt, m_rs, m_st})
    if (m < 2) throw Error(Errc::InvalidSystem, "bond labels must be >= 2");
  if (gens.empty()) throw Error(Errc::InvalidSystem, "empty generator set");
  for (auto& row : m_) row.fill(2);
  for (int i = 0; i < kRank; ++i) m_[i][i] = 1;
  auto set = [&](Gen a, Gen b, int m) {
    m_[index(a)][index(b)] = m;
    m_[index(b)][index(a)] = m;
  };
  set(Gen::r, Gen::t, m_rt);
  set(Gen::r, Gen::s, m_rs);
  set(Gen::s, Gen::t, m_st);
}

CoxeterSystem CoxeterSystem::parse(std::string_view spec) {
  auto parts = split_commas(spec);
  if (parts.size() != 3) throw Error(Errc::Usage, "system needs three bond labels m_rt,m_rs,m_st");
  std::array<int, 3> m{};
  for (int i = 0; i < 3; ++i) {
    const auto& p = parts[i];
    if (p == "inf" || p == "oo" || p == "infinity" || p == "0")
      m[i] = kInfinity;
    else
      m[i] = static_cast<int>(parse_integer(p, Errc::Usage));
  }
  return CoxeterSystem(m[0], m[1], m[2]);
}

bool CoxeterSystem::finite_parabolic(GenSet J) const {
  auto g = (J & gens_).members();
  if (g.size() <= 1) return true;
  if (g.size() == 2) return m(g[0], g[1]) != kInfinity;
  // rank 3: spherical iff 1/m_rt + 1/m_rs + 1/m_st > 1
  long long num = 0, den = 1;
  for (auto [a, b] : {std::pair{Gen::r, Gen::t}, std::pair{Gen::r, Gen::s}, std::pair{Gen::s, Gen::t}}) {
    int mm = m(a, b);
    if (mm == kInfinity) return false;
    num = num * mm + den;
    den *= mm;
  }
  return num > den;
}

bool CoxeterSystem::finite() const { return finite_parabolic(gens_); }

CoxeterSystem CoxeterSystem::parabolic(GenSet J) const {
  CoxeterSystem out = *this;
  out.gens_ = J & gens_;
  if (out.gens_.empty()) out.gens_ = GenSet{};  // trivial group; generators stay empty
  return out;
}

CoxeterSystem CoxeterSystem::mirrored() const {
  CoxeterSystem out(m_rt(), m_st(), m_rs());
  GenSet g;
  if (gens_.contains(Gen::r)) g.insert(Gen::t);
  if (gens_.contains(Gen::s)) g.insert(Gen::s);
  if (gens_.contains(Gen::t)) g.insert(Gen::r);
  out.gens_ = g;
  return out;
}

std::string CoxeterSystem::label() const {
  return bond_label(m_rt()) + "," + bond_label(m_rs()) + "," + bond_label(m_st());
}

Weights Weights::parse(std::string_view spec) {
  auto parts = split_commas(spec);
  if (parts.size() != 3) throw Error(Errc::Usage, "weights need three values L(r),L(s),L(t)");
  return {parse_integer(parts[0], Errc::Usage), parse_integer(parts[1], Errc::Usage),
          parse_integer(parts[2], Errc::Usage)};
}

std::string Weights::label() const {
  return std::to_string(v_[0]) + "," + std::to_string(v_[1]) + "," + std::to_string(v_[2]);
}

void Weights::validate(const CoxeterSystem& sys) const {
  for (Gen g : kAllGens)
    if (v_[index(g)] < 1) throw Error(Errc::InvalidWeights, "weights must be positive");
  for (Gen a : sys.generators().members())
    for (Gen b : sys.generators().members()) {
      int m = sys.m(a, b);
      if (a != b && m != kInfinity && m % 2 == 1 && (*this)[a] != (*this)[b])
        throw Error(Errc::InvalidWeights, std::string("odd bond forces L(") + to_char(a) + ")=L(" +
                                              to_char(b) + ")");
    }
}

CoxeterGroup::CoxeterGroup(CoxeterSystem sys, int horizon) : sys_(std::move(sys)), horizon_(horizon) {
  if (horizon < 0 || horizon > 255) throw Error(Errc::InvalidSystem, "horizon out of range");
  build();
}

std::uint32_t CoxeterGroup::other_predecessor(std::uint32_t x, Gen s, Gen t) const {
  // x = u.v with v the alternating word of length m-1 ending in t; returns u.(w_st t).
  const int m = sys_.m(s, t);
  std::uint32_t cur = x;
  for (int i = 0; i < m - 1; ++i) cur = nodes_[cur].right[index(i % 2 == 0 ? t : s)];
  for (int i = 0; i < m - 1; ++i) {
    Gen g = ((m - 2 - i) % 2 == 0) ? s : t;
    cur = nodes_[cur].right[index(g)];
  }
  return cur;
}

void CoxeterGroup::build() {
  const auto gens = sys_.generators().members();
  nodes_.assign(1, Node{});
  words_.assign(1, "");
  layer_end_.assign(1, 1);
  std::size_t begin = 0;
  for (int n = 0; n < horizon_; ++n) {
    const std::size_t end = nodes_.size();
    struct Fresh {
      std::uint8_t rdesc = 0;
      std::array<std::uint32_t, kRank> down{kNone, kNone, kNone};
    };
    std::vector<Fresh> fresh;
    for (std::size_t x = begin; x < end; ++x) {
      for (Gen s : gens) {
        if (nodes_[x].rdesc & (1u << index(s))) continue;
        if (nodes_[x].right[index(s)] != kNone) continue;
        Fresh f;
        f.rdesc = static_cast<std::uint8_t>(1u << index(s));
        f.down[index(s)] = static_cast<std::uint32_t>(x);
        const auto k = static_cast<std::uint32_t>(fresh.size());
        nodes_[x].right[index(s)] = k;
        for (Gen t : gens) {
          if (t == s) continue;
          const int m = sys_.m(s, t);
          if (m == kInfinity || nodes_[x].tail[pair_index(s, t)] != m - 1) continue;
          f.rdesc |= static_cast<std::uint8_t>(1u << index(t));
          std::uint32_t x2 = other_predecessor(static_cast<std::uint32_t>(x), s, t);
          f.down[index(t)] = x2;
          nodes_[x2].right[index(t)] = k;
        }
        fresh.push_back(f);
      }
    }
    if (fresh.empty()) break;

    std::vector<std::string> fwords(fresh.size());
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      std::string best;
      for (Gen u : gens) {
        if (!(fresh[k].rdesc & (1u << index(u)))) continue;
        std::string cand = words_[fresh[k].down[index(u)]] + to_char(u);
        if (best.empty() || cand < best) best = std::move(cand);
      }
      fwords[k] = std::move(best);
    }
    std::vector<std::uint32_t> order(fresh.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fwords[a] < fwords[b]; });
    std::vector<std::uint32_t> final_id(fresh.size());
    for (std::size_t i = 0; i < order.size(); ++i) final_id[order[i]] = static_cast<std::uint32_t>(end + i);

    for (std::size_t x = begin; x < end; ++x)
      for (Gen s : gens)
        if (!(nodes_[x].rdesc & (1u << index(s)))) nodes_[x].right[index(s)] = final_id[nodes_[x].right[index(s)]];

    for (std::uint32_t k : order) {
      const Fresh& f = fresh[k];
      Node node;
      node.len = static_cast<std::uint8_t>(n + 1);
      node.rdesc = f.rdesc;
      node.right = f.down;
      const std::string& w = fwords[k];
      auto last = *gen_from_char(w.back());
      node.counts = nodes_[f.down[index(last)]].counts;
      ++node.counts[index(last)];
      for (Gen a : gens)
        for (Gen b : gens) {
          if (index(a) >= index(b)) continue;
          const bool ha = f.rdesc & (1u << index(a)), hb = f.rdesc & (1u << index(b));
          std::uint8_t tl = 0;
          if (ha && hb)
            tl = static_cast<std::uint8_t>(sys_.m(a, b));
          else if (ha)
            tl = static_cast<std::uint8_t>(nodes_[f.down[index(a)]].tail[pair_index(a, b)] + 1);
          else if (hb)
            tl = static_cast<std::uint8_t>(nodes_[f.down[index(b)]].tail[pair_index(a, b)] + 1);
          node.tail[pair_index(a, b)] = tl;
        }
      nodes_.push_back(node);
      words_.push_back(w);
    }
    layer_end_.push_back(nodes_.size());
    begin = end;
  }

  inverse_.resize(nodes_.size());
  for (std::size_t x = 0; x < nodes_.size(); ++x) {
    std::uint32_t cur = 0;
    const auto& w = words_[x];
    for (auto it = w.rbegin(); it != w.rend(); ++it) cur = nodes_[cur].right[index(*gen_from_char(*it))];
    inverse_[x] = cur;
  }
}

long long CoxeterGroup::weight(Element x, const Weights& L) const {
  const auto& c = nodes_[x.id].counts;
  return c[0] * L[Gen::r] + c[1] * L[Gen::s] + c[2] * L[Gen::t];
}

bool CoxeterGroup::can_rmul(Element x, Gen g) const {
  return sys_.generators().contains(g) && nodes_[x.id].right[index(g)] != kNone;
}

Element CoxeterGroup::rmul(Element x, Gen g) const {
  if (!sys_.generators().contains(g))
    throw Error(Errc::UnknownGenerator, std::string(1, to_char(g)) + " is not a generator of this system");
  auto y = nodes_[x.id].right[index(g)];
  if (y == kNone)
    throw Error(Errc::HorizonExceeded,
                name(x) + to_char(g) + " exceeds horizon " + std::to_string(horizon_));
  return Element{y};
}

Element CoxeterGroup::lmul(Gen g, Element x) const { return inverse(rmul(inverse(x), g)); }

Element CoxeterGroup::mul(Element x, Element y) const {
  Element cur = x;
  for (char c : words_[y.id]) cur = rmul(cur, *gen_from_char(c));
  return cur;
}

Element CoxeterGroup::normal_form(std::string_view word) const {
  Element cur = identity();
  if (word == "e") return cur;
  for (char c : word) {
    if (c == ' ' || c == '.' || c == '*') continue;
    auto g = gen_from_char(c);
    if (!g || !sys_.generators().contains(*g))
      throw Error(Errc::UnknownGenerator, std::string("'") + c + "' in '" + std::string(word) + "'");
    cur = rmul(cur, *g);
  }
  return cur;
}

Element CoxeterGroup::from_gens(const std::vector<Gen>& gens) const {
  Element cur = identity();
  for (Gen g : gens) cur = rmul(cur, g);
  return cur;
}

std::size_t CoxeterGroup::ball_size(int R) const {
  if (R < 0) return 0;
  if (R > horizon_)
    throw Error(Errc::HorizonExceeded, "ball radius " + std::to_string(R) + " beyond horizon");
  return layer_end_[std::min<std::size_t>(R, layer_end_.size() - 1)];
}

std::vector<Element> CoxeterGroup::ball(int R) const {
  std::vector<Element> out(ball_size(R));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Element{static_cast<std::uint32_t>(i)};
  return out;
}

bool CoxeterGroup::bruhat_leq(Element x, Element w) const {
  for (;;) {
    if (length(x) > length(w)) return false;
    if (x.id == 0) return true;
    if (length(x) == length(w)) return x == w;
    const auto rd = nodes_[w.id].rdesc;
    int s = rd & 1 ? 0 : (rd & 2 ? 1 : 2);
    if (nodes_[x.id].rdesc & (1u << s)) x = Element{nodes_[x.id].right[s]};
    w = Element{nodes_[w.id].right[s]};
  }
}

std::vector<Element> CoxeterGroup::weak_prefixes(Element w) const {
  std::vector<std::uint32_t> seen{w.id}, frontier{w.id};
  while (!frontier.empty()) {
    std::vector<std::uint32_t> next;
    for (auto x : frontier)
      for (int s = 0; s < kRank; ++s)
        if (nodes_[x].rdesc & (1u << s)) next.push_back(nodes_[x].right[s]);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    seen.insert(seen.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(seen.begin(), seen.end());
  std::vector<Element> out;
  out.reserve(seen.size());
  for (auto id : seen) out.push_back(Element{id});
  return out;
}

bool CoxeterGroup::is_weak_suffix(Element w, Element d) const {
  if (length(d) > length(w)) return false;
  std::uint32_t cur = w.id;
  const auto& word = words_[d.id];
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    int s = index(*gen_from_char(*it));
    if (!(nodes_[cur].rdesc & (1u << s))) return false;
    cur = nodes_[cur].right[s];
  }
  return true;
}

bool CoxeterGroup::is_weak_prefix(Element w, Element p) const {
  return is_weak_suffix(inverse(w), inverse(p));
}

bool CoxeterGroup::contains_factor(Element w, Element d) const {
  if (d.id == 0) return true;
  const int ld = length(d);
  std::vector<std::uint32_t> frontier{w.id};
  while (!frontier.empty() && length(Element{frontier.front()}) >= ld) {
    std::vector<std::uint32_t> next;
    for (auto x : frontier) {
      if (is_weak_suffix(Element{x}, d)) return true;
      for (int s = 0; s < kRank; ++s)
        if (nodes_[x].rdesc & (1u << s)) next.push_back(nodes_[x].right[s]);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  return false;
}

bool CoxeterGroup::reduced_product(Element x, Element y) const {
  // x.y is reduced iff each letter of y extends the running product upward
  std::uint32_t cur = x.id;
  for (char c : words_[y.id]) {
    int s = index(*gen_from_char(c));
    if (nodes_[cur].rdesc & (1u << s)) return false;
    if (nodes_[cur].right[s] == kNone) throw Error(Errc::HorizonExceeded, "product beyond horizon");
    cur = nodes_[cur].right[s];
  }
  return true;
}

Element CoxeterGroup::longest_element(GenSet J) const {
  J = J & sys_.generators();
  if (!sys_.finite_parabolic(J)) throw Error(Errc::InfiniteParabolic, "W_" + J.str() + " is infinite");
  Element cur = identity();
  for (;;) {
    bool grew = false;
    for (Gen g : J.members())
      if (!right_descents(cur).contains(g)) {
        cur = rmul(cur, g);
        grew = true;
        break;
      }
    if (!grew) return cur;
  }
}

int CoxeterGroup::parabolic_tail(Element x, Gen a, Gen b) const {
  return nodes_[x.id].tail[pair_index(a, b)];
}

}  // namespace wcells
