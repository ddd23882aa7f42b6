#pragma once

// Finite ringed spaces: a finite preorder of points (x <= y means y is a
// generization of x), a stalk algebra per point and generization maps.
// Opens are the generization-closed subsets.

#include <bit>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgperf/algebra.hpp"

namespace dgperf {

/// Subset of points as a bitmask.
struct Open {
  std::uint64_t mask = 0;

  bool contains(std::size_t x) const noexcept { return (mask >> x) & 1U; }
  bool empty() const noexcept { return mask == 0; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask)); }
  bool subset_of(Open o) const noexcept { return (mask & ~o.mask) == 0; }
  Open operator|(Open o) const noexcept { return {mask | o.mask}; }
  Open operator&(Open o) const noexcept { return {mask & o.mask}; }
  auto operator<=>(const Open&) const = default;
};

class FinRingedSpace {
 public:
  /// `order` lists pairs (x, y) with x <= y; the reflexive-transitive closure is taken.
  /// `res` gives the generization maps for listed pairs; maps for implied pairs are
  /// composed along a path and checked for consistency by validate().
  FinRingedSpace(std::string name, std::vector<std::string> points,
                 const std::vector<std::pair<std::size_t, std::size_t>>& order, std::vector<AlgebraPtr> stalks,
                 const std::vector<std::pair<std::pair<std::size_t, std::size_t>, AlgebraMap>>& res);

  /// Discrete space with the given stalks.
  static FinRingedSpace discrete(std::string name, std::vector<std::string> points, std::vector<AlgebraPtr> stalks);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<std::string>& points() const noexcept { return points_; }
  std::uint32_t p() const noexcept { return stalks_.empty() ? 2 : stalks_.front()->p(); }
  std::size_t index_of(const std::string& point) const;

  bool leq(std::size_t x, std::size_t y) const { return leq_[x * size() + y]; }
  const AlgebraPtr& stalk(std::size_t x) const { return stalks_[x]; }
  /// Generization map O_x -> O_y; requires leq(x, y).
  const AlgebraMap& res(std::size_t x, std::size_t y) const;
  /// Direct generization pairs as given at construction (excluding reflexive ones).
  const std::vector<std::pair<std::size_t, std::size_t>>& given_pairs() const noexcept { return given_; }

  Open all() const noexcept { return {size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << size()) - 1)}; }
  /// U_x = { y : x <= y }, the smallest open containing x.
  Open minimal_open(std::size_t x) const;
  bool is_open(Open u) const;
  std::vector<std::size_t> points_of(Open u) const;
  Open open_of(const std::vector<std::string>& names) const;
  std::string describe(Open u) const;

  /// Preorder, stalk algebras, res maps, functoriality, common characteristic, lattice closure.
  CheckReport validate() const;

 private:
  std::string name_;
  std::vector<std::string> points_;
  std::vector<bool> leq_;
  std::vector<AlgebraPtr> stalks_;
  std::vector<std::optional<AlgebraMap>> res_;
  std::vector<std::pair<std::size_t, std::size_t>> given_;
};

using SpacePtr = std::shared_ptr<const FinRingedSpace>;

/// All opens sorted by mask. Throws SizeError past the point cap.
std::vector<Open> opens(const FinRingedSpace& s);

struct RingedMap {
  std::string name;
  SpacePtr source;  // T
  SpacePtr target;  // S
  std::vector<std::size_t> point_map;
  std::vector<AlgebraMap> sharp;  // sharp[t]: O_{S, f(t)} -> O_{T, t}

  static RingedMap identity(const SpacePtr& s);
  /// f^{-1}(V)
  Open preimage(Open v) const;
  CheckReport validate() const;

  bool operator==(const RingedMap& o) const {
    return source == o.source && target == o.target && point_map == o.point_map && sharp == o.sharp;
  }
};

/// f ∘ g for g: U -> T and f: T -> S.
RingedMap compose(const RingedMap& f, const RingedMap& g);

struct SpecSpace {
  AlgebraPtr ring;
  SpacePtr space;
  std::vector<Vector> idempotents;       // primitive idempotent of each point's local factor
  std::vector<Subspace> primes;          // prime ideal of each point
  std::vector<AlgebraMap> factor_maps;   // A -> O_x = e_x A
  std::vector<Matrix> factor_inclusions; // e_x A -> A
};

/// Spec of a finite algebra: one point per prime, discrete order, local factors as stalks.
SpecSpace spec(const AlgebraPtr& a, std::string name = {});
/// Spec B -> Spec A for phi: A -> B. Points go to contractions of primes.
RingedMap spec_map(const AlgebraMap& phi, const SpecSpace& spec_a, const SpecSpace& spec_b, std::string name = {});

/// D(f) = { x : f not in the prime of x }.
Open distinguished_open(const SpecSpace& s, std::span<const Scalar> f);
/// Every open is a union of distinguished opens, checked by enumerating elements.
CheckReport check_distinguished_cover(const SpecSpace& s);

}  // namespace dgperf
