#pragma once

// The categories F_S (modules O_{S,V}) and D_S (finite direct sums of them),
// and the strictified pullback f⋆ that composes on the nose.

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "dgperf/sheaf.hpp"

namespace dgperf {

/// ⊕_j O_{S,V_j}; the empty list is the zero object.
struct DObject {
  SpacePtr base;
  std::vector<Open> opens;

  std::size_t size() const noexcept { return opens.size(); }
  bool operator==(const DObject& o) const { return base == o.base && opens == o.opens; }
};

/// Concatenation X ⊕ Y.
DObject concat(const DObject& x, const DObject& y);

/// Entry (k, j) is hom(O_{V_j}, O_{W_k}) in σ-coordinates: an ambient family of Γ(V_j, O_{W_k}).
struct DMorphism {
  DObject source;
  DObject target;
  std::vector<Vector> entries;  // row-major: k * source.size() + j

  static DMorphism identity(const DObject& x);
  static DMorphism zero(const DObject& x, const DObject& y);

  const Vector& entry(std::size_t k, std::size_t j) const { return entries[k * source.size() + j]; }
  Vector& entry(std::size_t k, std::size_t j) { return entries[k * source.size() + j]; }

  DMorphism operator+(const DMorphism& o) const;
  DMorphism scaled(Scalar s) const;
  bool is_zero() const;
  /// Entries are sections of the right sheaves over the right opens.
  CheckReport validate() const;

  bool operator==(const DMorphism& o) const {
    return source == o.source && target == o.target && entries == o.entries;
  }
};

/// Γ(V, O_{S,W}), the home of an entry O_V -> O_W.
SectionModule entry_sections(const SpacePtr& s, Open v, Open w);

/// Composite entry of s: O_V -> O_W and t: O_W -> O_X, computed pointwise as s_x t_x.
Vector compose_entries(const FinRingedSpace& s, Open v, Open w, Open x, std::span<const Scalar> first,
                       std::span<const Scalar> second);

/// second ∘ first by matrix multiplication of entries.
DMorphism compose(const DMorphism& second, const DMorphism& first);

/// Realization D_S -> Mod(S).
DirectSum to_sheaf(const DObject& x);
SheafMap to_sheaf(const DMorphism& m);
/// Inverse of to_sheaf on morphisms between realized objects.
DMorphism from_sheaf_map(const DObject& x, const DObject& y, const SheafMap& phi);

/// The strictified pullback along one map, with θ cached per open.
class Rectifier {
 public:
  explicit Rectifier(RingedMap f) : f_(std::move(f)) {}

  const RingedMap& map() const noexcept { return f_; }
  const Theta& theta_at(Open v) const;
  DObject object(const DObject& x) const;
  DMorphism morphism(const DMorphism& m) const;
  /// θ_{f,W} ∘ f^*(φ) = f⋆(φ) ∘ θ_{f,V} for every entry.
  CheckReport check_theta_naturality(const DMorphism& m) const;

 private:
  RingedMap f_;
  mutable std::mutex mutex_;
  mutable std::map<std::uint64_t, std::shared_ptr<const Theta>> cache_;
};

DObject f_star_object(const RingedMap& f, const DObject& x);
DMorphism f_star_morphism(const RingedMap& f, const DMorphism& m);

/// g⋆ f⋆ = (fg)⋆ on the given objects and morphisms, bit-exact; also identities and composition.
CheckReport check_strict_functoriality(const RingedMap& f, const RingedMap& g, const std::vector<DObject>& objects,
                                       const std::vector<DMorphism>& morphisms);

/// θ_{g,f^{-1}W} ∘ g^*(θ_{f,W}) ∘ α = θ_{fg,W} exactly, and both sides agree under hom(-, N).
CheckReport check_theta_cocycle(const RingedMap& f, const RingedMap& g, Open w, const std::vector<SheafPtr>& probes);

DObject random_dobject(const SpacePtr& s, std::mt19937_64& rng, std::size_t max_len = 3);
DMorphism random_dmorphism(const DObject& x, const DObject& y, std::mt19937_64& rng);

}  // namespace dgperf
