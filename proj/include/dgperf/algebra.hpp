#pragma once

// Finite commutative F_p-algebras given by structure constants, finite modules
// over them, and the module-level linear algebra everything else compiles to.

#include <memory>
#include <string>
#include <vector>

#include "dgperf/errors.hpp"
#include "dgperf/linalg.hpp"

namespace dgperf {

class FinAlgebra {
 public:
  /// structure[(i * dim + j) * dim + k] is the e_k coefficient of e_i * e_j.
  FinAlgebra(std::uint32_t p, std::vector<std::string> labels, std::vector<Scalar> structure,
             Vector unit);

  std::uint32_t p() const noexcept { return p_; }
  std::size_t dim() const noexcept { return labels_.size(); }
  PrimeField field() const noexcept { return PrimeField{p_}; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Scalar>& structure() const noexcept { return structure_; }
  const Vector& unit() const noexcept { return unit_; }
  bool is_zero_algebra() const noexcept { return labels_.empty(); }

  Scalar constant(std::size_t i, std::size_t j, std::size_t k) const {
    return structure_[(i * dim() + j) * dim() + k];
  }
  Vector zero() const { return Vector(dim(), 0); }
  Vector basis_vector(std::size_t i) const;
  Vector multiply(std::span<const Scalar> a, std::span<const Scalar> b) const;
  Vector power(std::span<const Scalar> a, std::uint64_t e) const;
  /// Left multiplication by the i-th basis element.
  const Matrix& basis_action(std::size_t i) const { return basis_action_[i]; }
  /// Left multiplication by an arbitrary element.
  Matrix multiplication_matrix(std::span<const Scalar> a) const;

  /// Exhaustive associativity / commutativity / unitality check on basis triples.
  CheckReport validate() const;
  std::string describe_element(std::span<const Scalar> a) const;

  bool operator==(const FinAlgebra& o) const {
    return p_ == o.p_ && structure_ == o.structure_ && unit_ == o.unit_ && labels_.size() == o.labels_.size();
  }

 private:
  std::uint32_t p_;
  std::vector<std::string> labels_;
  std::vector<Scalar> structure_;
  Vector unit_;
  std::vector<Matrix> basis_action_;
};

using AlgebraPtr = std::shared_ptr<const FinAlgebra>;

/// Throws SizeError when the algebra exceeds the configured caps.
void check_caps(const FinAlgebra& a);
bool same_algebra(const AlgebraPtr& a, const AlgebraPtr& b);

struct AlgebraMap {
  AlgebraPtr source;
  AlgebraPtr target;
  Matrix matrix;  // dim(target) x dim(source)

  static AlgebraMap identity(const AlgebraPtr& a);
  Vector apply(std::span<const Scalar> a) const { return matrix.apply(a); }
  /// Unital and multiplicative on all basis pairs; failures name the basis pair.
  CheckReport validate() const;
  bool operator==(const AlgebraMap& o) const {
    return same_algebra(source, o.source) && same_algebra(target, o.target) && matrix == o.matrix;
  }
};

/// second ∘ first
AlgebraMap compose(const AlgebraMap& second, const AlgebraMap& first);

class FinModule {
 public:
  FinModule() = default;
  FinModule(AlgebraPtr owner, std::size_t dim, std::vector<Matrix> action);

  static FinModule regular(const AlgebraPtr& a);
  static FinModule zero(const AlgebraPtr& a);

  const AlgebraPtr& owner() const noexcept { return owner_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint32_t p() const noexcept { return owner_->p(); }
  const std::vector<Matrix>& action() const noexcept { return action_; }
  const Matrix& basis_action(std::size_t i) const { return action_[i]; }
  Matrix action_of(std::span<const Scalar> a) const;

  CheckReport validate() const;

  bool operator==(const FinModule& o) const {
    return same_algebra(owner_, o.owner_) && dim_ == o.dim_ && action_ == o.action_;
  }

 private:
  AlgebraPtr owner_;
  std::size_t dim_ = 0;
  std::vector<Matrix> action_;
};

/// N viewed as a module over A through phi: A -> owner(N).
FinModule restrict_scalars(const FinModule& n, const AlgebraMap& phi);
FinModule submodule(const FinModule& m, const Subspace& u);
FinModule quotient_module(const FinModule& m, const QuotientSpace& q);

struct ModuleMap {
  FinModule source;
  FinModule target;
  Matrix matrix;

  /// Linear over the common owner, or semilinear along `along` when given.
  CheckReport validate(const AlgebraMap* along = nullptr) const;
};

// ---------------------------------------------------------------------------
// Constructors

/// F_p[x]/(f) with the power basis; f is given low degree first and must be monic.
AlgebraPtr algebra_from_poly(std::uint32_t p, const std::vector<std::int64_t>& coefficients);
AlgebraPtr product_algebra(const AlgebraPtr& a, const AlgebraPtr& b);
AlgebraPtr zero_algebra(std::uint32_t p);

/// Calls fn(element) for every element in lexicographic coordinate order.
template <typename Fn>
void for_each_element(std::uint32_t p, std::size_t dim, Fn&& fn) {
  Vector v(dim, 0);
  while (true) {
    fn(static_cast<const Vector&>(v));
    std::size_t i = dim;
    bool carry = true;
    while (carry && i > 0) {
      --i;
      if (++v[i] < p)
        carry = false;
      else
        v[i] = 0;
    }
    if (carry) return;
  }
}
std::uint64_t element_count(std::uint32_t p, std::size_t dim);

struct IdempotentsAndPrimes {
  std::vector<Vector> idempotents;  // all e with e^2 = e, lexicographic
  std::vector<Vector> primitive;    // minimal nonzero idempotents, one per local factor
  std::vector<Subspace> primes;     // primes[i] is the prime ideal of the factor primitive[i]
};

IdempotentsAndPrimes enumerate_idempotents_and_primes(const FinAlgebra& a);

/// Nilpotent elements, computed as the kernel of an iterated Frobenius.
Subspace nilradical(const FinAlgebra& a);

struct Localization {
  AlgebraPtr algebra;     // eA
  AlgebraMap structure;   // a -> e a
  Vector idempotent;      // e, in coordinates of A
  Matrix inclusion;       // eA -> A as F_p-spaces
};

/// eA for an idempotent e, with basis taken in reduced echelon form inside A.
Localization corner_algebra(const AlgebraPtr& a, std::span<const Scalar> e);
/// A_f: the idempotent power of f found by cycle detection, then eA.
Localization localize_at_element(const AlgebraPtr& a, std::span<const Scalar> f);
/// The unique idempotent in the power sequence f, f^2, ...
Vector idempotent_power(const FinAlgebra& a, std::span<const Scalar> f);

std::vector<ModuleMap> hom_modules(const FinModule& m, const FinModule& n);

struct TensorProduct {
  FinModule module;
  QuotientSpace quotient;  // on the F_p-tensor product, index i * right_dim + j
  std::size_t left_dim = 0;
  std::size_t right_dim = 0;

  /// Image of m ⊗ n.
  Vector pure(std::span<const Scalar> m, std::span<const Scalar> n) const;
};

/// M ⊗_A N for two modules over the same algebra A.
TensorProduct tensor_modules(const FinModule& m, const FinModule& n);
/// M ⊗_A B for an A-module M and phi: A -> B, as a B-module acting on the right factor.
TensorProduct base_change(const FinModule& m, const AlgebraMap& phi);

struct KernelImageCokernel {
  FinModule kernel;
  FinModule image;
  FinModule cokernel;
  Matrix kernel_inclusion;      // ker -> source
  Matrix image_corestriction;   // source -> im
  Matrix image_inclusion;       // im -> target
  Matrix cokernel_projection;   // target -> coker
};

KernelImageCokernel kernel_image_quotient(const ModuleMap& phi);

}  // namespace dgperf
