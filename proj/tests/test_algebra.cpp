#include <doctest.h>

#include "dgperf/algebra.hpp"

using namespace dgperf;

namespace {

// Independent oracle: x^n mod f by schoolbook long division.
Vector power_mod_poly(std::uint32_t p, std::vector<std::int64_t> f, std::size_t n) {
  const std::size_t d = f.size() - 1;
  std::vector<std::int64_t> num(n + 1, 0);
  num[n] = 1;
  for (std::size_t top = n + 1; top-- > d;) {
    const std::int64_t c = ((num[top] % p) + p) % p;
    if (c == 0) continue;
    for (std::size_t i = 0; i <= d; ++i) num[top - d + i] -= c * f[i];
  }
  Vector out(d, 0);
  for (std::size_t i = 0; i < d && i < num.size(); ++i) out[i] = static_cast<Scalar>(((num[i] % p) + p) % p);
  return out;
}

FinModule residue_field(const AlgebraPtr& r) {
  // F_p[t]/(t^2) acting on F_p by t -> 0
  return FinModule(r, 1, {Matrix::identity(r->p(), 1), Matrix(r->p(), 1, 1)});
}

}  // namespace

TEST_CASE("algebra_from_poly matches polynomial division") {
  struct Case {
    std::uint32_t p;
    std::vector<std::int64_t> f;
  };
  for (const auto& c : {Case{2, {0, 1}}, Case{2, {0, 1, 1}}, Case{2, {0, 0, 1}}, Case{3, {1, 0, 2, 1}},
                        Case{5, {2, 3, 0, 1}}}) {
    const auto a = algebra_from_poly(c.p, c.f);
    const std::size_t d = c.f.size() - 1;
    REQUIRE(a->dim() == d);
    CHECK(a->validate().ok());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const Vector expect = power_mod_poly(c.p, c.f, i + j);
        for (std::size_t k = 0; k < d; ++k) CHECK(a->constant(i, j, k) == expect[k]);
      }
  }
}

TEST_CASE("algebra_from_poly examples") {
  const auto f2 = algebra_from_poly(2, {0, 1});
  CHECK(f2->dim() == 1);
  CHECK(f2->unit() == Vector{1});

  const auto split = algebra_from_poly(2, {0, 1, 1});
  const Vector x{0, 1};
  CHECK(split->multiply(x, x) == x);

  const auto dual = algebra_from_poly(2, {0, 0, 1});
  CHECK(is_zero(dual->multiply(x, x)));

  CHECK_THROWS_AS(algebra_from_poly(2, {1, 1, 0}), PreconditionError);
  CHECK_THROWS_AS(algebra_from_poly(2, {1}), PreconditionError);
  CHECK_THROWS_AS(algebra_from_poly(3, {0, 2}), PreconditionError);
}

TEST_CASE("enumerate_idempotents_and_primes examples") {
  const auto f2 = algebra_from_poly(2, {0, 1});
  auto ip = enumerate_idempotents_and_primes(*f2);
  CHECK(ip.idempotents == std::vector<Vector>{{0}, {1}});
  REQUIRE(ip.primes.size() == 1);
  CHECK(ip.primes[0].dim() == 0);

  const auto split = algebra_from_poly(2, {0, 1, 1});
  ip = enumerate_idempotents_and_primes(*split);
  CHECK(ip.idempotents.size() == 4);
  REQUIRE(ip.primes.size() == 2);
  // primes (x) and (x + 1), each one-dimensional
  std::vector<Subspace> expect{Subspace::span(2, 2, {Vector{0, 1}}), Subspace::span(2, 2, {Vector{1, 1}})};
  for (const auto& q : ip.primes) CHECK(std::find(expect.begin(), expect.end(), q) != expect.end());
  CHECK(ip.primes[0] != ip.primes[1]);

  const auto dual = algebra_from_poly(2, {0, 0, 1});
  ip = enumerate_idempotents_and_primes(*dual);
  CHECK(ip.idempotents == std::vector<Vector>{{0, 0}, {1, 0}});
  REQUIRE(ip.primes.size() == 1);
  CHECK(ip.primes[0] == Subspace::span(2, 2, {Vector{0, 1}}));
}

TEST_CASE("primes are exactly the maximal ideals found by brute force") {
  // F_3[x]/(x^3 - x) = F_3^3 has three primes, each of codimension one.
  const auto a = algebra_from_poly(3, {0, -1, 0, 1});
  const auto ip = enumerate_idempotents_and_primes(*a);
  CHECK(ip.idempotents.size() == 8);
  REQUIRE(ip.primes.size() == 3);
  for (const auto& m : ip.primes) {
    CHECK(m.dim() == 2);
    // closed under multiplication by every element
    for_each_element(3, 3, [&](const Vector& r) {
      for (const auto& b : m.basis()) CHECK(m.contains(a->multiply(r, b)));
    });
  }
}

TEST_CASE("localize_at_element examples and invariants") {
  const auto split = algebra_from_poly(2, {0, 1, 1});
  auto loc = localize_at_element(split, Vector{0, 1});
  CHECK(loc.algebra->dim() == 1);
  CHECK(loc.idempotent == Vector{0, 1});
  CHECK(loc.structure.validate().ok());

  const auto dual = algebra_from_poly(2, {0, 0, 1});
  loc = localize_at_element(dual, Vector{0, 1});
  CHECK(loc.algebra->is_zero_algebra());

  for (const auto& a : {split, dual, algebra_from_poly(3, {0, -1, 0, 1})}) {
    loc = localize_at_element(a, a->unit());
    CHECK(*loc.algebra == *a);
    CHECK(loc.structure.matrix.is_identity());
  }

  // image of f is a unit in A_f, and localizing twice is idempotent
  const auto a = algebra_from_poly(3, {0, 0, 1, 1});  // x^2 (x + 1)
  for_each_element(3, 3, [&](const Vector& f) {
    const auto l1 = localize_at_element(a, f);
    if (l1.algebra->is_zero_algebra()) return;
    const Vector image = l1.structure.apply(f);
    bool invertible = false;
    for_each_element(3, l1.algebra->dim(), [&](const Vector& g) {
      if (l1.algebra->multiply(image, g) == l1.algebra->unit()) invertible = true;
    });
    CHECK(invertible);
    const auto l2 = localize_at_element(a, a->multiply(f, f));
    CHECK(l2.idempotent == l1.idempotent);
  });
}

TEST_CASE("hom_modules examples") {
  const auto dual = algebra_from_poly(2, {0, 0, 1});
  const auto reg = FinModule::regular(dual);
  CHECK(hom_modules(reg, reg).size() == dual->dim());
  const auto k = residue_field(dual);
  REQUIRE(k.validate().ok());
  CHECK(hom_modules(k, k).size() == 1);
  CHECK(hom_modules(reg, FinModule::zero(dual)).empty());
  CHECK_THROWS_AS(hom_modules(reg, FinModule::regular(algebra_from_poly(2, {0, 1}))), PreconditionError);
}

TEST_CASE("hom_modules agrees with brute force over all matrices") {
  const auto dual = algebra_from_poly(2, {0, 0, 1});
  const auto split = algebra_from_poly(2, {0, 1, 1});
  const std::vector<std::pair<FinModule, FinModule>> cases{
      {FinModule::regular(dual), FinModule::regular(dual)},
      {FinModule::regular(dual), residue_field(dual)},
      {residue_field(dual), FinModule::regular(dual)},
      {FinModule::regular(split), FinModule::regular(split)},
  };
  for (const auto& [m, n] : cases) {
    const auto basis = hom_modules(m, n);
    for (const auto& h : basis) CHECK(h.validate().ok());
    std::size_t count = 0;
    for_each_element(2, m.dim() * n.dim(), [&](const Vector& flat) {
      Matrix x(2, n.dim(), m.dim());
      for (std::size_t r = 0; r < n.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) x(r, c) = flat[r * m.dim() + c];
      if (ModuleMap{m, n, x}.validate().ok()) ++count;
    });
    CHECK(count == element_count(2, basis.size()));
  }
}

TEST_CASE("tensor_modules examples") {
  const auto dual = algebra_from_poly(2, {0, 0, 1});
  const auto reg = FinModule::regular(dual);
  const auto k = residue_field(dual);
  const auto t = tensor_modules(reg, k);
  CHECK(t.module.dim() == k.dim());
  const auto kk = tensor_modules(k, k);
  CHECK(kk.module.dim() == 1);
  CHECK(tensor_modules(reg, FinModule::zero(dual)).module.dim() == 0);

  // A ⊗_A N ≅ N through a ⊗ n -> a n; balanced structure map
  const auto rr = tensor_modules(reg, reg);
  CHECK(rr.module.dim() == 2);
  const Vector one{1, 0}, tt{0, 1};
  CHECK(rr.pure(dual->multiply(tt, one), one) == rr.pure(one, dual->multiply(tt, one)));
  CHECK(rr.module.validate().ok());
}

TEST_CASE("base change along a ring map") {
  const auto f2 = algebra_from_poly(2, {0, 1});
  const auto split = algebra_from_poly(2, {0, 1, 1});
  const AlgebraMap diag{f2, split, Matrix::from_rows(2, {{1}, {0}})};
  REQUIRE(diag.validate().ok());
  const auto bc = base_change(FinModule::regular(f2), diag);
  CHECK(bc.module.dim() == 2);
  CHECK(bc.module.validate().ok());
}

TEST_CASE("kernel_image_quotient examples and rank-nullity") {
  const auto dual = algebra_from_poly(2, {0, 0, 1});
  const auto reg = FinModule::regular(dual);
  const ModuleMap times_t{reg, reg, dual->multiplication_matrix(Vector{0, 1})};
  REQUIRE(times_t.validate().ok());
  auto kic = kernel_image_quotient(times_t);
  CHECK(kic.kernel.dim() == 1);
  CHECK(kic.image.dim() == 1);
  CHECK(kic.cokernel.dim() == 1);
  CHECK(kic.cokernel.validate().ok());
  CHECK(kic.kernel_inclusion == kic.image_inclusion);

  const ModuleMap id{reg, reg, Matrix::identity(2, 2)};
  kic = kernel_image_quotient(id);
  CHECK(kic.kernel.dim() == 0);
  CHECK(kic.cokernel.dim() == 0);

  const ModuleMap zero{reg, reg, Matrix(2, 2, 2)};
  kic = kernel_image_quotient(zero);
  CHECK(kic.kernel.dim() == 2);
  CHECK(kic.image.dim() == 0);

  const auto a = algebra_from_poly(3, {0, -1, 0, 1});
  const auto m = FinModule::regular(a);
  for (const auto& h : hom_modules(m, m)) {
    const auto k = kernel_image_quotient(h);
    CHECK(k.kernel.dim() + k.image.dim() == m.dim());
    CHECK(k.kernel.validate().ok());
  }
}
