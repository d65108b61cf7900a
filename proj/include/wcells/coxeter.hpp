#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wcells {

enum class Gen : std::uint8_t { r = 0, s = 1, t = 2 };

inline constexpr int kRank = 3;
inline constexpr std::array<Gen, kRank> kAllGens{Gen::r, Gen::s, Gen::t};
// Bond label for m = infinity; compares above every finite label.
inline constexpr int kInfinity = std::numeric_limits<int>::max();

constexpr int index(Gen g) { return static_cast<int>(g); }
char to_char(Gen g);
std::optional<Gen> gen_from_char(char c);

class GenSet {
public:
  constexpr GenSet() = default;
  constexpr GenSet(std::initializer_list<Gen> gs) {
    for (Gen g : gs) insert(g);
  }
  static constexpr GenSet from_bits(std::uint8_t b) {
    GenSet s;
    s.bits_ = b & 7u;
    return s;
  }
  static constexpr GenSet all() { return from_bits(7u); }

  constexpr bool contains(Gen g) const { return (bits_ >> index(g)) & 1u; }
  constexpr void insert(Gen g) { bits_ |= static_cast<std::uint8_t>(1u << index(g)); }
  constexpr void erase(Gen g) { bits_ &= static_cast<std::uint8_t>(~(1u << index(g))); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return ((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool subset_of(GenSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr GenSet operator|(GenSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr GenSet operator&(GenSet o) const { return from_bits(bits_ & o.bits_); }
  constexpr bool operator==(const GenSet&) const = default;
  std::vector<Gen> members() const;
  std::string str() const;  // e.g. "{r,t}"

private:
  std::uint8_t bits_ = 0;
};

// Rank <= 3 Coxeter system on a subset of {r, s, t}.
class CoxeterSystem {
public:
  // Bond labels in the "(m_rt, m_rs, m_st)" order used throughout, kInfinity for m = infinity.
  CoxeterSystem(int m_rt, int m_rs, int m_st, GenSet gens = GenSet::all());

  static CoxeterSystem parse(std::string_view spec);  // "2,4,5", "2,inf,3"

  int m(Gen a, Gen b) const { return m_[index(a)][index(b)]; }
  int m_rt() const { return m(Gen::r, Gen::t); }
  int m_rs() const { return m(Gen::r, Gen::s); }
  int m_st() const { return m(Gen::s, Gen::t); }
  GenSet generators() const { return gens_; }
  bool finite() const;                 // W itself finite
  bool finite_parabolic(GenSet J) const;
  CoxeterSystem parabolic(GenSet J) const;
  CoxeterSystem mirrored() const;      // r <-> t
  std::string label() const;           // "2,4,5"
  bool operator==(const CoxeterSystem&) const = default;

private:
  std::array<std::array<int, kRank>, kRank> m_{};
  GenSet gens_;
};

class Weights {
public:
  Weights(long long a, long long b, long long c) : v_{a, b, c} {}
  static Weights parse(std::string_view spec);  // "5,1,1" as (L(r), L(s), L(t))
  static Weights uniform() { return {1, 1, 1}; }

  long long operator[](Gen g) const { return v_[index(g)]; }
  Weights mirrored() const { return {v_[2], v_[1], v_[0]}; }
  std::string label() const;
  // Throws InvalidWeights unless positive and constant across odd bonds.
  void validate(const CoxeterSystem& sys) const;
  bool operator==(const Weights&) const = default;

private:
  std::array<long long, kRank> v_;
};

struct Element {
  std::uint32_t id = 0;  // ids are ordered by (length, ShortLex)
  auto operator<=>(const Element&) const = default;
};

struct ElementHash {
  std::size_t operator()(Element e) const noexcept { return e.id; }
};

// Cayley-graph ball of radius `horizon`, built once by BFS and then read-only.
class CoxeterGroup {
public:
  explicit CoxeterGroup(CoxeterSystem sys, int horizon = 16);

  const CoxeterSystem& system() const { return sys_; }
  int horizon() const { return horizon_; }
  std::size_t size() const { return nodes_.size(); }

  static constexpr Element identity() { return {0}; }
  int length(Element x) const { return nodes_[x.id].len; }
  const std::string& word(Element x) const { return words_[x.id]; }
  std::string name(Element x) const { return x.id == 0 ? "e" : words_[x.id]; }
  GenSet right_descents(Element x) const { return GenSet::from_bits(nodes_[x.id].rdesc); }
  GenSet left_descents(Element x) const { return right_descents(inverse(x)); }
  long long weight(Element x, const Weights& L) const;
  const std::array<std::uint8_t, kRank>& letter_counts(Element x) const { return nodes_[x.id].counts; }

  Element rmul(Element x, Gen g) const;  // x*g
  Element lmul(Gen g, Element x) const;  // g*x
  Element mul(Element x, Element y) const;
  Element inverse(Element x) const { return Element{inverse_[x.id]}; }
  bool can_rmul(Element x, Gen g) const;

  Element normal_form(std::string_view word) const;
  Element from_gens(const std::vector<Gen>& gens) const;
  Element gen(Gen g) const { return rmul(identity(), g); }

  std::size_t ball_size(int R) const;
  std::vector<Element> ball(int R) const;

  bool bruhat_leq(Element x, Element w) const;
  std::vector<Element> weak_prefixes(Element w) const;
  bool is_weak_prefix(Element w, Element p) const;  // w = p.(p^-1 w) reduced
  bool is_weak_suffix(Element w, Element d) const;  // w = (w d^-1).d reduced
  bool contains_factor(Element w, Element d) const;
  bool reduced_product(Element x, Element y) const;  // l(xy) = l(x)+l(y)
  Element longest_element(GenSet J) const;
  // Length of the W_J-component of the right parabolic factorization, |J| = 2.
  int parabolic_tail(Element x, Gen a, Gen b) const;

private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  struct Node {
    std::array<std::uint32_t, kRank> right{kNone, kNone, kNone};
    std::array<std::uint8_t, kRank> tail{};  // indexed by pair_index
    std::array<std::uint8_t, kRank> counts{};
    std::uint8_t len = 0;
    std::uint8_t rdesc = 0;
  };
  static int pair_index(Gen a, Gen b) { return 3 - index(a) - index(b); }  // the generator left out
  void build();
  std::uint32_t other_predecessor(std::uint32_t x, Gen s, Gen t) const;

  CoxeterSystem sys_;
  int horizon_;
  std::vector<Node> nodes_;
  std::vector<std::string> words_;
  std::vector<std::uint32_t> inverse_;
  std::vector<std::size_t> layer_end_;
};

}  // namespace wcells
