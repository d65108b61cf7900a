#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "wcells/coxeter.hpp"
#include "wcells/laurent.hpp"

namespace wcells {

// Finite A-linear combination of group elements, iterated in (length, ShortLex) order.
class HeckeElt {
public:
  using Map = std::map<Element, Laurent>;

  HeckeElt() = default;
  static HeckeElt basis(Element w, Laurent c = 1);

  const Map& coords() const { return coords_; }
  Laurent coeff(Element w) const;
  bool is_zero() const { return coords_.empty(); }
  std::size_t size() const { return coords_.size(); }
  // Highest degree over all coefficients.
  int degree() const;

  void add(Element w, const Laurent& c);
  void add_product(Element w, const Laurent& a, const Laurent& b);  // += a*b at w
  void add_scaled(const HeckeElt& h, const Laurent& c);
  HeckeElt& operator+=(const HeckeElt& h) { return add_scaled(h, 1), *this; }
  HeckeElt& operator-=(const HeckeElt& h) { return add_scaled(h, -1), *this; }
  bool operator==(const HeckeElt&) const = default;
  std::string str(const CoxeterGroup& W, const char* basis = "T") const;

private:
  Map coords_;
};

// Hecke algebra of (W, L) with memoized bar expansions and Kazhdan-Lusztig basis.
// Queries lock internally; the returned references stay valid for the object's lifetime.
class HeckeAlgebra {
public:
  HeckeAlgebra(const CoxeterGroup& W, Weights L);

  const CoxeterGroup& group() const { return W_; }
  const Weights& weights() const { return L_; }
  const Laurent& xi(Gen g) const { return xi_[index(g)]; }
  long long weight(Element w) const { return W_.weight(w, L_); }
  std::string fingerprint() const;

  HeckeElt mul_gen_right(const HeckeElt& h, Gen s) const;  // h * T_s
  HeckeElt mul_gen_left(Gen s, const HeckeElt& h) const;   // T_s * h
  HeckeElt t_mult(const HeckeElt& a, const HeckeElt& b) const;
  HeckeElt t_mult(Element x, Element y) const;  // coordinates are f_{x,y,z}
  HeckeElt bar(const HeckeElt& h) const;

  const HeckeElt& bar_expand(Element w) const;
  const HeckeElt& c_basis(Element w) const;
  Laurent kl_poly(Element y, Element w) const { return c_basis(w).coeff(y); }
  // C-coordinates; the result's `coords()` maps z to the coefficient of C_z.
  HeckeElt to_c_coords(HeckeElt h) const;
  HeckeElt c_product(Element x, Element y) const;  // C_x C_y in C-coordinates
  // C_s C_u in C-coordinates.
  const HeckeElt& c_gen_product(Gen s, Element u) const;
  // C_s h for h given in C-coordinates.
  HeckeElt c_left_mul(Gen s, const HeckeElt& h) const;
  // C_x C_y for every x in `xs` (which must be closed under taking left-descent prefixes,
  // e.g. a ball), indexed like `xs`.
  std::vector<HeckeElt> c_products_column(const std::vector<Element>& xs, Element y) const;
  Laurent h_const(Element x, Element y, Element z) const { return c_product(x, y).coeff(z); }

  std::uint64_t kl_solves() const { return kl_solves_; }

  // KL cache persistence (JSON lines). load returns false and leaves state untouched on a
  // fingerprint mismatch or a malformed file; the reason is stored in `last_cache_error`.
  void save_cache(const std::filesystem::path& file) const;
  bool load_cache(const std::filesystem::path& file);
  const std::string& last_cache_error() const { return cache_error_; }

private:
  void solve_column(Element w) const;

  const CoxeterGroup& W_;
  Weights L_;
  std::array<Laurent, kRank> xi_;
  mutable std::recursive_mutex mu_;
  mutable std::unordered_map<std::uint32_t, std::unique_ptr<HeckeElt>> bar_;
  mutable std::unordered_map<std::uint32_t, std::unique_ptr<HeckeElt>> kl_;
  mutable std::unordered_map<std::uint32_t, std::unique_ptr<HeckeElt>> cgen_[kRank];
  mutable std::uint64_t kl_solves_ = 0;
  std::string cache_error_;
};

}  // namespace wcells
