#pragma once

// Bounded complexes over D_S, their hom complexes, shifts and cones, and the
// stalkwise tests for acyclicity and perfectness.

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dgperf/rectify.hpp"

namespace dgperf {

/// Cochain complex with components in degrees lo..hi; zero outside the window.
struct DComplex {
  SpacePtr base;
  int lo = 0;
  int hi = -1;
  std::vector<DObject> components;       // degree lo + i
  std::vector<DMorphism> differentials;  // d^{lo+i}, for lo + i < hi

  static DComplex zero(const SpacePtr& s);
  static DComplex single(const DObject& x, int degree);
  /// Throws PreconditionError on shape mismatches; d∘d = 0 is left to validate().
  static DComplex make(const SpacePtr& s, int lo, std::vector<DObject> components,
                       std::vector<DMorphism> differentials);

  bool empty() const noexcept { return hi < lo; }
  bool in_window(int n) const noexcept { return n >= lo && n <= hi; }
  DObject object(int n) const;
  /// d^n: E^n -> E^{n+1}, zero outside the window.
  DMorphism d(int n) const;
  /// Shapes, entries and d∘d = 0.
  CheckReport validate() const;
  /// Same complex with zero objects removed from both ends of the window.
  DComplex trimmed() const;

  bool operator==(const DComplex& o) const {
    return base == o.base && lo == o.lo && hi == o.hi && components == o.components &&
           differentials == o.differentials;
  }
};

using ComplexPtr = std::shared_ptr<const DComplex>;

inline ComplexPtr share(DComplex e) { return std::make_shared<const DComplex>(std::move(e)); }
bool same_complex(const ComplexPtr& a, const ComplexPtr& b);

/// Degree-n element of the hom complex: φ^p: E^p -> F^{p+n} for p in E's window.
struct HomElement {
  ComplexPtr source;
  ComplexPtr target;
  int degree = 0;
  std::vector<DMorphism> components;  // index p - source->lo

  static HomElement zero(const ComplexPtr& e, const ComplexPtr& f, int degree);
  static HomElement identity(const ComplexPtr& e);

  DMorphism component(int p) const;
  HomElement operator+(const HomElement& o) const;
  HomElement operator-(const HomElement& o) const;
  HomElement scaled(Scalar s) const;
  HomElement negated() const;
  bool is_zero() const;
  CheckReport validate() const;

  bool operator==(const HomElement& o) const {
    return same_complex(source, o.source) && same_complex(target, o.target) && degree == o.degree &&
           components == o.components;
  }
};

/// (ψφ)^p = ψ^{p+|φ|} ∘ φ^p
HomElement compose(const HomElement& second, const HomElement& first);
/// d(φ) = d_F ∘ φ − (−1)^n φ ∘ d_E
HomElement differential(const HomElement& phi);

/// The finite space of degree-n hom elements in concatenated entry coordinates.
struct HomSlice {
  struct Block {
    int p;
    std::size_t k, j;
    Subspace space;
    std::size_t offset;
  };

  ComplexPtr source;
  ComplexPtr target;
  int degree = 0;
  std::vector<Block> blocks;
  std::size_t dim = 0;

  HomElement element(std::span<const Scalar> coords) const;
  Vector coordinates(const HomElement& phi) const;
  std::vector<HomElement> basis() const;
};

HomSlice hom_slice(const ComplexPtr& e, const ComplexPtr& f, int n);
/// Matrix of d: slice n -> slice n+1.
Matrix slice_differential(const HomSlice& from, const HomSlice& to);

/// E[m]^n = E^{n+m} with differential (−1)^m d.
DComplex shift(const DComplex& e, int m);

struct Cone {
  ComplexPtr complex;
  HomElement in_f;  // F -> C, degree 0
  HomElement pr_f;  // C -> F, degree 0
  HomElement in_e;  // E -> C, degree −1
  HomElement pr_e;  // C -> E, degree 1
};

/// C^n = F^n ⊕ E^{n+1} with d = [[d_F, φ], [0, −d_E]]; flip_sign uses +d_E.
/// Throws PreconditionError unless φ is a degree-0 cocycle.
Cone cone(const HomElement& phi, bool flip_sign = false);

// ---------------------------------------------------------------------------
// Stalkwise homology

std::size_t stalk_dim(const DObject& x, std::size_t point);
/// d_x as a matrix on ⊕_{x in V_j} O_x.
Matrix stalk_matrix(const DMorphism& m, std::size_t point);

struct Homology {
  int lo = 0;
  int hi = -1;
  std::vector<std::vector<std::size_t>> dims;  // dims[n - lo][x]

  bool acyclic() const;
  std::size_t at(int n, std::size_t x) const;
  std::int64_t euler(std::size_t x) const;
  bool operator==(const Homology& o) const = default;
};

Homology homology(const DComplex& e);
bool is_acyclic(const DComplex& e);

/// Complex of arbitrary sheaves, for inputs that are not built from D_S.
struct SheafComplex {
  SpacePtr base;
  int lo = 0;
  std::vector<SheafPtr> terms;
  std::vector<SheafMap> d;  // d[i]: terms[i] -> terms[i+1]

  int hi() const noexcept { return lo + static_cast<int>(terms.size()) - 1; }
  static SheafComplex single(const SheafPtr& m, int degree);
  CheckReport validate() const;
};

SheafComplex realize(const DComplex& e);
Homology homology(const SheafComplex& e);

// ---------------------------------------------------------------------------
// Perfectness

/// Free resolution of one local factor e·O_x, built from the top degree down.
struct LocalResolution {
  std::size_t point = 0;
  Vector idempotent;
  int top = 0;
  std::vector<std::size_t> ranks;         // rank of P^{top}, P^{top-1}, ...
  std::vector<std::size_t> syzygy_dims;   // F_p-dimensions of the kernels at and below the bottom
  bool terminated = false;
  std::string reason;
};

struct Perfectness {
  bool perfect = true;
  std::size_t depth = 0;
  std::vector<LocalResolution> witnesses;
  std::string reason;
};

/// depth counts resolution steps below the bottom of the window.
Perfectness is_perfect(const SheafComplex& e, std::size_t depth);
Perfectness is_perfect(const DComplex& e, std::size_t depth);

/// Isomorphism of modules by enumerating a hom basis; nullopt past the enumeration cap.
std::optional<bool> modules_isomorphic(const FinModule& m, const FinModule& n);

// ---------------------------------------------------------------------------
// H⁰ and pullback

struct H0 {
  HomSlice slice;
  Subspace cocycles;
  Subspace boundaries;
  std::vector<Vector> representatives;  // slice coordinates of one cocycle per class basis vector

  std::size_t dim() const noexcept { return representatives.size(); }
  /// Class coordinates of a degree-0 cocycle; throws PreconditionError otherwise.
  Vector class_of(const HomElement& phi) const;
  HomElement representative(std::size_t i) const { return slice.element(representatives[i]); }
};

H0 h0_hom(const ComplexPtr& e, const ComplexPtr& f);

DComplex apply_f_star(const Rectifier& r, const DComplex& e);
/// Also maps source and target, so the result lives between f⋆E and f⋆F.
HomElement apply_f_star(const Rectifier& r, const HomElement& phi);
DComplex apply_f_star(const RingedMap& f, const DComplex& e);
HomElement apply_f_star(const RingedMap& f, const HomElement& phi);

/// Tensoring sampled short exact sequences of stalk modules with the stalks of O_{S,V}
/// keeps them exact.
CheckReport check_flatness(const SpacePtr& s, Open v, std::mt19937_64& rng, std::size_t samples);

// ---------------------------------------------------------------------------
// Sampling

/// Components in degrees lo..lo+length-1 with differentials chosen in the kernel of
/// precomposition, so d∘d = 0 by construction.
DComplex random_dcomplex(const SpacePtr& s, std::mt19937_64& rng, int lo, std::size_t length,
                         std::size_t max_len = 2);
HomElement random_hom_element(const ComplexPtr& e, const ComplexPtr& f, int n, std::mt19937_64& rng);
/// Random degree-0 cocycle.
HomElement random_cocycle(const ComplexPtr& e, const ComplexPtr& f, std::mt19937_64& rng);

}  // namespace dgperf
