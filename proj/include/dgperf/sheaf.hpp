#pragma once

// Sheaves of modules on finite ringed spaces, stored as stalk functors:
// one module per point and a comparison map for every generization x <= y.

#include <memory>
#include <random>
#include <vector>

#include "dgperf/ringedspace.hpp"

namespace dgperf {

class Sheaf {
 public:
  /// comparisons[x * n + y] for every x <= y (identity on the diagonal); other entries are ignored.
  Sheaf(SpacePtr base, std::vector<FinModule> stalks, std::vector<Matrix> comparisons);

  /// Comparisons listed for some pairs; implied pairs are composed along a path and
  /// pairs touching a zero stalk default to zero.
  static Sheaf from_pairs(SpacePtr base, std::vector<FinModule> stalks,
                          const std::vector<std::pair<std::pair<std::size_t, std::size_t>, Matrix>>& comparisons);
  static Sheaf structure(const SpacePtr& base);
  static Sheaf zero(const SpacePtr& base);

  const SpacePtr& base() const noexcept { return base_; }
  std::size_t size() const noexcept { return stalks_.size(); }
  std::uint32_t p() const noexcept { return base_->p(); }
  const FinModule& stalk(std::size_t x) const { return stalks_[x]; }
  /// m_{x -> y}: M_x -> M_y, semilinear over res_{x -> y}.
  const Matrix& comparison(std::size_t x, std::size_t y) const;
  std::size_t total_dim() const;

  /// Stalk modules, semilinearity of comparisons and functoriality.
  CheckReport validate() const;

  bool operator==(const Sheaf& o) const {
    return base_ == o.base_ && stalks_ == o.stalks_ && comparisons_ == o.comparisons_;
  }

 private:
  SpacePtr base_;
  std::vector<FinModule> stalks_;
  std::vector<Matrix> comparisons_;
};

using SheafPtr = std::shared_ptr<const Sheaf>;

bool same_sheaf(const SheafPtr& a, const SheafPtr& b);

struct SheafMap {
  SheafPtr source;
  SheafPtr target;
  std::vector<Matrix> components;

  static SheafMap identity(const SheafPtr& m);
  static SheafMap zero(const SheafPtr& m, const SheafPtr& n);

  /// Stalk components are module maps and commute with every comparison.
  CheckReport validate() const;
  bool is_epi() const;
  bool is_mono() const;
  bool is_iso() const { return is_epi() && is_mono(); }
  bool is_zero() const;
  /// Stalkwise inverse; throws PreconditionError unless iso.
  SheafMap inverse() const;

  SheafMap operator+(const SheafMap& o) const;
  SheafMap operator-(const SheafMap& o) const;
  SheafMap scaled(Scalar s) const;

  bool operator==(const SheafMap& o) const {
    return same_sheaf(source, o.source) && same_sheaf(target, o.target) && components == o.components;
  }
};

/// second ∘ first
SheafMap compose(const SheafMap& second, const SheafMap& first);

/// Γ(U, M): compatible families (s_x)_{x in U} inside the ambient space ⊕_{x in U} M_x.
struct SectionModule {
  Open open;
  std::vector<std::size_t> points;   // points of U in index order
  std::vector<std::size_t> offsets;  // offset of each point's block in the ambient vector
  std::vector<std::size_t> dims;     // dim M_x per point
  std::size_t ambient = 0;
  Subspace space;

  std::size_t dim() const noexcept { return space.dim(); }
  /// Position of x in `points`; throws if x is not in U.
  std::size_t slot(std::size_t x) const;
  /// ambient -> M_x
  Matrix component(std::size_t x) const;
  Vector component_of(std::span<const Scalar> family, std::size_t x) const;
  /// Ambient restriction to a smaller open.
  Matrix restriction_to(const SectionModule& smaller) const;
};

SectionModule sections(const Sheaf& m, Open u);

/// Γ(U, φ) on ambient families.
Matrix sections_map(const SheafMap& phi, Open u);

/// Basis of hom(M, N) computed by solving the linearity and compatibility equations.
std::vector<SheafMap> hom_sheaves(const SheafPtr& m, const SheafPtr& n);
SheafMap combine(const SheafPtr& m, const SheafPtr& n, const std::vector<SheafMap>& basis,
                 std::span<const Scalar> coefficients);
/// Coordinates of phi in a basis from hom_sheaves.
Vector hom_coordinates(const std::vector<SheafMap>& basis, const SheafMap& phi);

/// O_{S,V}: O_x on V, zero elsewhere.
Sheaf ext_by_zero(const SpacePtr& s, Open v);
/// No comparison map leaves V, so the stalkwise extension is already a sheaf.
CheckReport check_ext_by_zero_structure(const FinRingedSpace& s, Open v);

struct DirectSum {
  SheafPtr sum;
  std::vector<SheafMap> inclusions;
  std::vector<SheafMap> projections;
};
DirectSum direct_sum(const SpacePtr& base, const std::vector<SheafPtr>& parts);

/// Inclusion of the stalkwise kernel.
SheafMap kernel_of(const SheafMap& phi);
/// Projection onto the stalkwise cokernel.
SheafMap cokernel_of(const SheafMap& phi);

/// Γ(U_x, M) -> M_x is an isomorphism for every x.
CheckReport check_stalk_sections(const Sheaf& m);

// ---------------------------------------------------------------------------
// σ: hom(O_{S,V}, M) ≅ Γ(V, M)

Vector sigma(const SheafMap& phi, Open v);
SheafMap sigma_inverse(const SpacePtr& s, Open v, const SheafPtr& m, std::span<const Scalar> family);

// ---------------------------------------------------------------------------
// Direct and inverse images

struct Pushforward {
  SheafPtr sheaf;
  std::vector<SectionModule> stalk_sections;  // Γ(f^{-1} U_s, N) per point s
};
struct Pullback {
  SheafPtr sheaf;
  std::vector<TensorProduct> tensors;  // M_{f(t)} ⊗ O_{T,t} per point t
};

Pushforward pushforward(const RingedMap& f, const SheafPtr& n);
Pullback pullback(const RingedMap& f, const SheafPtr& m);
SheafMap pushforward_map(const RingedMap& f, const SheafMap& psi);
SheafMap pullback_map(const RingedMap& f, const SheafMap& phi);

/// Γ(f^{-1} U, N) -> Γ(U, f_* N) on ambient families, and its inverse.
Matrix pushforward_sections(const RingedMap& f, const SheafPtr& n, Open u);
Matrix pushforward_sections_inverse(const RingedMap& f, const SheafPtr& n, Open u);

/// η: M -> f_* f^* M
SheafMap unit(const RingedMap& f, const SheafPtr& m);
/// ε: f^* f_* N -> N
SheafMap counit(const RingedMap& f, const SheafPtr& n);

/// hom_T(f^* M, N) -> hom_S(M, f_* N): psi -> f_*(psi) ∘ η_M
SheafMap adjoint_right(const RingedMap& f, const SheafPtr& m, const SheafMap& psi);
/// hom_S(M, f_* N) -> hom_T(f^* M, N): chi -> ε_N ∘ f^*(chi)
SheafMap adjoint_left(const RingedMap& f, const SheafPtr& n, const SheafMap& chi);

// ---------------------------------------------------------------------------
// θ and α

/// The four-step chain hom_T(O_{T,f^{-1}V}, N) -> hom_T(f^* O_{S,V}, N).
SheafMap theta_chain(const RingedMap& f, Open v, const SheafPtr& n, const SheafMap& psi);

struct Theta {
  SheafMap forward;  // f^* O_{S,V} -> O_{T,f^{-1}V}
  SheafMap inverse;
};
/// θ_{f,V} as the image of the identity under theta_chain.
Theta theta(const RingedMap& f, Open v);
/// Stalkwise agreement with a ⊗ b -> f♯(a) b.
CheckReport check_theta_canonical(const RingedMap& f, Open v, const Theta& th);

/// α: (fg)^* M -> g^* f^* M, transposed from M -> f_*f^*M -> f_*g_*g^*f^*M -> (fg)_* g^*f^*M.
SheafMap alpha(const RingedMap& f, const RingedMap& g, const SheafPtr& m);

// ---------------------------------------------------------------------------
// Sampling

/// Random element of a hom space.
SheafMap random_hom(const SheafPtr& m, const SheafPtr& n, std::mt19937_64& rng);
/// Sum of 1..max_parts extensions by zero over random opens.
SheafPtr random_ext_sum(const SpacePtr& s, std::mt19937_64& rng, std::size_t max_parts = 2);
/// Cokernel of a random map between two random sums of extensions by zero.
SheafPtr random_module(const SpacePtr& s, std::mt19937_64& rng);

}  // namespace dgperf
