#pragma once

// Exact dense linear algebra over a prime field F_p.
//
// Vectors are column vectors; a linear map V -> W is a dim(W) x dim(V) matrix.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dgperf {

using Scalar = std::uint32_t;
using Vector = std::vector<Scalar>;

bool is_prime(std::uint32_t n);

/// Arithmetic in Z/p for a runtime prime p < 2^16.
struct PrimeField {
  std::uint32_t p = 2;

  Scalar normalize(std::int64_t v) const {
    const auto m = static_cast<std::int64_t>(p);
    v %= m;
    return static_cast<Scalar>(v < 0 ? v + m : v);
  }
  Scalar add(Scalar a, Scalar b) const { return (a + b) % p; }
  Scalar sub(Scalar a, Scalar b) const { return (a + p - b) % p; }
  Scalar neg(Scalar a) const { return a == 0 ? 0 : p - a; }
  Scalar mul(Scalar a, Scalar b) const {
    return static_cast<Scalar>((std::uint64_t{a} * b) % p);
  }
  Scalar inv(Scalar a) const;
  Scalar pow(Scalar a, std::uint64_t e) const;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::uint32_t p, std::size_t rows, std::size_t cols);

  static Matrix identity(std::uint32_t p, std::size_t n);
  static Matrix from_rows(std::uint32_t p, const std::vector<std::vector<std::int64_t>>& rows,
                          std::size_t cols_if_empty = 0);
  static Matrix from_columns(std::uint32_t p, std::size_t rows, const std::vector<Vector>& cols);
  static Matrix hstack(const Matrix& a, const Matrix& b);
  static Matrix vstack(const Matrix& a, const Matrix& b);
  static Matrix block_diagonal(std::uint32_t p, const std::vector<Matrix>& blocks);
  static Matrix kron(const Matrix& a, const Matrix& b);

  std::uint32_t p() const noexcept { return p_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  PrimeField field() const noexcept { return PrimeField{p_}; }

  Scalar operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  Vector column(std::size_t c) const;
  Vector row(std::size_t r) const;
  void set_column(std::size_t c, std::span<const Scalar> v);
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);
  Matrix select_columns(std::span<const std::size_t> cols) const;

  Vector apply(std::span<const Scalar> v) const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix scaled(Scalar s) const;
  Matrix negated() const;
  Matrix transposed() const;

  bool is_zero() const;
  bool is_identity() const;
  std::size_t rank() const;

  bool operator==(const Matrix& o) const = default;

  /// Row-major integer rows for serialization.
  std::vector<std::vector<std::int64_t>> to_rows() const;

 private:
  std::uint32_t p_ = 2;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

struct RowEchelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Reduced row echelon form.
RowEchelon row_reduce(Matrix m);

/// Columns spanning the null space, in canonical (reduced) form.
Matrix kernel(const Matrix& a);

/// Some solution of a x = b, if one exists.
std::optional<Vector> solve(const Matrix& a, std::span<const Scalar> b);

std::optional<Matrix> inverse(const Matrix& a);

Vector add(const PrimeField& f, std::span<const Scalar> a, std::span<const Scalar> b);
Vector sub(const PrimeField& f, std::span<const Scalar> a, std::span<const Scalar> b);
Vector scale(const PrimeField& f, Scalar s, std::span<const Scalar> a);
bool is_zero(std::span<const Scalar> v);

/// A subspace of F_p^n held in reduced echelon form, so its basis and the
/// coordinates of its members are canonical.
class Subspace {
 public:
  Subspace() = default;
  Subspace(std::uint32_t p, std::size_t ambient);

  static Subspace span(std::uint32_t p, std::size_t ambient, const std::vector<Vector>& gens);
  static Subspace column_span(const Matrix& m);
  static Subspace whole(std::uint32_t p, std::size_t ambient);

  std::uint32_t p() const noexcept { return p_; }
  std::size_t ambient() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return basis_.size(); }
  const std::vector<Vector>& basis() const noexcept { return basis_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }
  /// ambient x dim matrix whose columns are the basis.
  Matrix basis_matrix() const;

  bool contains(std::span<const Scalar> v) const;
  /// Canonical representative of v modulo the subspace (zero at every pivot).
  /// It is also the lexicographically least element of the coset v + U.
  Vector reduce(std::span<const Scalar> v) const;
  /// Coordinates of a member; throws PreconditionError for non-members.
  Vector coordinates(std::span<const Scalar> v) const;
  /// Coordinates of each column of m.
  Matrix coordinates(const Matrix& m) const;
  Vector element(std::span<const Scalar> coords) const;

  Subspace sum(const Subspace& other) const;
  Subspace intersect(const Subspace& other) const;

  bool operator==(const Subspace& o) const = default;

 private:
  std::uint32_t p_ = 2;
  std::size_t ambient_ = 0;
  std::vector<Vector> basis_;
  std::vector<std::size_t> pivots_;
};

/// F_p^n / U with coordinates on the non-pivot positions of U.
class QuotientSpace {
 public:
  QuotientSpace() = default;
  explicit QuotientSpace(Subspace relations);

  std::size_t dim() const noexcept { return free_.size(); }
  std::size_t ambient() const noexcept { return relations_.ambient(); }
  const Subspace& relations() const noexcept { return relations_; }

  Vector project(std::span<const Scalar> v) const;
  Matrix projection() const;  // dim x ambient
  Matrix lift() const;        // ambient x dim

  bool operator==(const QuotientSpace& o) const = default;

 private:
  Subspace relations_;
  std::vector<std::size_t> free_;
};

}  // namespace dgperf
