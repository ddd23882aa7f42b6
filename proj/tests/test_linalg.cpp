#include <doctest.h>

#include <random>

#include "dgperf/linalg.hpp"

using namespace dgperf;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::uint32_t p, std::size_t r, std::size_t c) {
  Matrix m(p, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = static_cast<Scalar>(rng() % p);
  return m;
}

}  // namespace

TEST_CASE("field inverse and power") {
  const PrimeField f{13};
  for (Scalar a = 1; a < 13; ++a) CHECK(f.mul(a, f.inv(a)) == 1);
  CHECK(f.pow(2, 12) == 1);
  CHECK_THROWS_AS(f.inv(0), std::exception);
}

TEST_CASE("rank-nullity and kernel membership on random matrices") {
  std::mt19937_64 rng(11);
  for (std::uint32_t p : {2U, 3U, 7U}) {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
      const Matrix a = random_matrix(rng, p, r, c);
      const Matrix k = kernel(a);
      CHECK(k.cols() + a.rank() == c);
      CHECK((a * k).is_zero());
    }
  }
}

TEST_CASE("inverse round trip") {
  std::mt19937_64 rng(5);
  int invertible = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(rng, 5, 3, 3);
    const auto inv = inverse(a);
    CHECK(inv.has_value() == (a.rank() == 3));
    if (inv) {
      ++invertible;
      CHECK((a * *inv).is_identity());
    }
  }
  CHECK(invertible > 0);
}

TEST_CASE("solve finds a solution exactly when b is in the column span") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(rng, 3, 3, 2);
    Vector b(3);
    for (auto& x : b) x = static_cast<Scalar>(rng() % 3);
    const auto x = solve(a, b);
    CHECK(x.has_value() == Subspace::column_span(a).contains(b));
    if (x) CHECK(a.apply(*x) == b);
  }
}

TEST_CASE("subspace reduce gives the lexicographically least coset member") {
  // Brute force over F_3^3 for a 1-dimensional subspace.
  const std::uint32_t p = 3;
  const Subspace u = Subspace::span(p, 3, {Vector{0, 1, 2}});
  const Vector v{2, 2, 1};
  Vector best;
  for (Scalar t = 0; t < p; ++t) {
    Vector w{v[0], (v[1] + t) % p, (v[2] + 2 * t) % p};
    if (best.empty() || w < best) best = w;
  }
  CHECK(u.reduce(v) == best);
  CHECK(u.coordinates(Vector{0, 2, 1}) == Vector{2});
}

TEST_CASE("quotient projection kills the relations and splits the lift") {
  const Subspace u = Subspace::span(2, 3, {Vector{1, 1, 0}});
  const QuotientSpace q(u);
  CHECK(q.dim() == 2);
  CHECK(is_zero(q.project(Vector{1, 1, 0})));
  CHECK((q.projection() * q.lift()).is_identity());
}

TEST_CASE("intersection and sum dimensions") {
  const Subspace a = Subspace::span(2, 3, {Vector{1, 0, 0}, Vector{0, 1, 0}});
  const Subspace b = Subspace::span(2, 3, {Vector{0, 1, 0}, Vector{0, 0, 1}});
  CHECK(a.intersect(b).dim() == 1);
  CHECK(a.sum(b).dim() == 3);
}
