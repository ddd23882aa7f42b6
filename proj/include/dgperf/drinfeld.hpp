#pragma once

// The Drinfeld quotient perf_S / ac_S: morphisms are sums of words
// f_0 ε_{U_1} f_1 ... ε_{U_n} f_n with d(ε_U) = id_U, held in tensor
// coordinates over chosen bases of the hom slices.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dgperf/resolve.hpp"

namespace dgperf {

/// Deterministic text form of a complex; equal complexes give equal strings.
std::string canonical_string(const DComplex& e);

/// One summand type of a hom complex of the quotient: the chain U_1..U_n and the degrees of f_0..f_n.
struct Sector {
  std::vector<std::size_t> chain;
  std::vector<int> degrees;

  std::size_t eps_degree() const noexcept { return chain.size(); }
  auto operator<=>(const Sector&) const = default;
};

struct QuotientMorphism {
  std::uint32_t p = 2;
  std::size_t source = 0;  // object ids
  std::size_t target = 0;
  int degree = 0;
  std::map<Sector, Vector> terms;  // only nonzero tensors are stored

  std::size_t eps_degree() const;
  bool is_zero() const noexcept { return terms.empty(); }
  QuotientMorphism operator+(const QuotientMorphism& o) const;
  QuotientMorphism operator-(const QuotientMorphism& o) const;
  QuotientMorphism scaled(Scalar s) const;
  bool operator==(const QuotientMorphism& o) const = default;
};

/// Object table, acyclic registry and cached slice data for one base space.
class DrinfeldQuotient {
 public:
  explicit DrinfeldQuotient(SpacePtr base) : base_(std::move(base)) {}

  const SpacePtr& base() const noexcept { return base_; }
  /// Get-or-insert by canonical serialization.
  std::size_t object(const ComplexPtr& e);
  /// Registers an acyclic complex; throws PreconditionError otherwise.
  std::size_t adjoin_acyclic(const ComplexPtr& u);
  bool is_acyclic_id(std::size_t id) const;
  std::vector<std::size_t> acyclics() const;
  ComplexPtr complex(std::size_t id) const;
  std::string serialization(std::size_t id) const;
  std::size_t size() const;

  const HomSlice& slice(std::size_t from, std::size_t to, int degree);
  /// d: slice(from, to, degree) -> slice(from, to, degree + 1)
  const Matrix& slice_d(std::size_t from, std::size_t to, int degree);
  /// (g, f) -> g∘f for g in slice(b, c, a), f in slice(x, b, d); column index i * dim_f + j.
  const Matrix& composition(std::size_t x, std::size_t b, std::size_t c, int a, int d);

  std::vector<std::size_t> sector_dims(std::size_t source, std::size_t target, const Sector& s);

  QuotientMorphism zero(std::size_t source, std::size_t target, int degree) const;
  /// ε-degree 0 word.
  QuotientMorphism from_hom(const HomElement& phi);
  /// f_0 ε_{eps[0]} f_1 ... ε_{eps[n-1]} f_n; every eps id must be a registered acyclic.
  QuotientMorphism word(const std::vector<HomElement>& fs, const std::vector<std::size_t>& eps);
  /// id_U ε_U id_U
  QuotientMorphism epsilon(std::size_t id);
  QuotientMorphism identity(std::size_t id);

  QuotientMorphism compose(const QuotientMorphism& second, const QuotientMorphism& first);
  QuotientMorphism d(const QuotientMorphism& m);

  struct Flat {
    std::map<Sector, std::size_t> offsets;
    std::size_t dim = 0;
    Vector flatten(const QuotientMorphism& m) const;
  };
  /// Basis of the words source -> target of the given degree and ε-degree <= bound,
  /// over the currently registered acyclics.
  std::vector<QuotientMorphism> word_basis(std::size_t source, std::size_t target, int degree, std::size_t bound);

 private:
  SpacePtr base_;
  mutable std::mutex mutex_;
  std::vector<ComplexPtr> objects_;
  std::vector<std::string> keys_;
  std::map<std::string, std::size_t> ids_;
  std::set<std::size_t> acyclic_;
  std::map<std::tuple<std::size_t, std::size_t, int>, HomSlice> slices_;
  std::map<std::tuple<std::size_t, std::size_t, int>, Matrix> slice_d_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, int, int>, Matrix> compositions_;
};

/// Flat layout covering every sector of the given morphisms.
DrinfeldQuotient::Flat flat_layout(const std::vector<QuotientMorphism>& ms, DrinfeldQuotient& q);

struct QuasiInverse {
  QuotientMorphism t;   // F -> E
  QuotientMorphism h1;  // E -> E, degree −1
  QuotientMorphism h2;  // F -> F, degree −1
  std::size_t cone_id = 0;
  CheckReport checks;   // t∘s − id_E = d(h1), s∘t − id_F = d(h2), d(t) = 0
};

/// Throws PreconditionError unless the cone of s is acyclic.
QuasiInverse quasi_inverse(DrinfeldQuotient& q, const HomElement& s);

/// f⋆ on normal forms: every f_i through apply_f_star and ε_U to ε_{f⋆U}, registered in `to`.
QuotientMorphism quotient_f_star(const Rectifier& r, DrinfeldQuotient& from, DrinfeldQuotient& to,
                                 const QuotientMorphism& m);

// ---------------------------------------------------------------------------
// Oracle for derived hom

class OracleUnavailable : public Error {
 public:
  using Error::Error;
};

/// Hom(P, G)^n for P built from D_S and G an arbitrary sheaf complex: ⊕ Γ(V_j, G^{p+n}).
struct MixedSlice {
  struct Block {
    int p;
    std::size_t j;
    SectionModule sections;
    std::size_t offset;
  };
  ComplexPtr source;
  SheafComplex target;
  int degree = 0;
  std::vector<Block> blocks;
  std::size_t dim = 0;

  /// Coordinates of a hom element P -> F when target is the realization of F.
  Vector coordinates(const HomElement& phi) const;
};

MixedSlice mixed_slice(const ComplexPtr& p, const SheafComplex& g, int n);
Matrix mixed_differential(const MixedSlice& from, const MixedSlice& to);

struct DerivedHom {
  bool complete = false;    // the resolution terminated
  bool stabilized = false;  // the resolution reaches every degree H⁰ depends on
  int truncation = 0;       // lowest degree of the resolution that was built
  std::size_t dim = 0;
  ResolutionResult resolution;
  MixedSlice slice;
  Subspace cocycles;
  Subspace boundaries;
  std::vector<Vector> representatives;

  /// Class coordinates of a degree-0 cocycle of the slice.
  Vector class_of(std::span<const Scalar> coords) const;
};

/// Degree-0 morphisms E -> F in the derived category via a resolution of E by minimal-open generators.
/// Without a depth the minimal one that makes H⁰ exact is used; throws OracleUnavailable when the given
/// depth neither completes the resolution nor reaches the degrees H⁰ depends on.
DerivedHom derived_hom_oracle(const SheafComplex& e, const SheafComplex& f,
                              std::optional<std::size_t> depth = std::nullopt);

struct H0Comparison {
  std::size_t perf_dim = 0;
  std::size_t oracle_dim = 0;
  std::size_t image_rank = 0;      // rank of H⁰(perf) -> D
  std::size_t bound = 0;
  std::size_t coboundary_dim = 0;  // of the searched coboundary space
  bool consistent = false;         // (i), up to the bound
  std::size_t witnesses = 0;       // (ii), explicit witnesses verified
  std::optional<bool> square;      // (iii), when a map was given
  CheckReport checks;
};

/// (i) classes independent in D stay independent modulo coboundaries of ε-degree <= bound;
/// (ii) homotopic maps and classes dying in D get explicit witnesses in the quotient;
/// (iii) with f given, pulling classes back commutes with the oracle's pullback.
H0Comparison h0_compare(DrinfeldQuotient& q, const ComplexPtr& e, const ComplexPtr& f, std::size_t bound,
                        const RingedMap* pull = nullptr, std::uint64_t seed = 1);

}  // namespace dgperf
