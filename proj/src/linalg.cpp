#include "dgperf/linalg.hpp"

#include <algorithm>

#include "dgperf/errors.hpp"

namespace dgperf {

#define SHAPE_CHECK(cond) \
  if (!(cond)) throw PreconditionError("shape mismatch: " #cond)

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Scalar PrimeField::pow(Scalar a, std::uint64_t e) const {
  Scalar result = 1 % p;
  Scalar base = a % p;
  while (e > 0) {
    if (e & 1U) result = mul(result, base);
    base = mul(base, base);
    e >>= 1U;
  }
  return result;
}

Scalar PrimeField::inv(Scalar a) const {
  if (a % p == 0) throw PreconditionError("inverse of zero in F_" + std::to_string(p));
  return pow(a, p - 2);
}

Matrix::Matrix(std::uint32_t p, std::size_t rows, std::size_t cols)
    : p_(p), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

Matrix Matrix::identity(std::uint32_t p, std::size_t n) {
  Matrix m(p, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1 % p;
  return m;
}

Matrix Matrix::from_rows(std::uint32_t p, const std::vector<std::vector<std::int64_t>>& rows,
                         std::size_t cols_if_empty) {
  const std::size_t cols = rows.empty() ? cols_if_empty : rows.front().size();
  Matrix m(p, rows.size(), cols);
  const PrimeField f{p};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw ValidationError("", "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = f.normalize(rows[r][c]);
  }
  return m;
}

Matrix Matrix::from_columns(std::uint32_t p, std::size_t rows, const std::vector<Vector>& cols) {
  Matrix m(p, rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) m.set_column(c, cols[c]);
  return m;
}

Matrix Matrix::hstack(const Matrix& a, const Matrix& b) {
  SHAPE_CHECK(a.rows_ == b.rows_);
  Matrix m(a.p_, a.rows_, a.cols_ + b.cols_);
  m.set_block(0, 0, a);
  m.set_block(0, a.cols_, b);
  return m;
}

Matrix Matrix::vstack(const Matrix& a, const Matrix& b) {
  SHAPE_CHECK(a.cols_ == b.cols_);
  Matrix m(a.p_, a.rows_ + b.rows_, a.cols_);
  m.set_block(0, 0, a);
  m.set_block(a.rows_, 0, b);
  return m;
}

Matrix Matrix::block_diagonal(std::uint32_t p, const std::vector<Matrix>& blocks) {
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows_;
    c += b.cols_;
  }
  Matrix m(p, r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    m.set_block(r, c, b);
    r += b.rows_;
    c += b.cols_;
  }
  return m;
}

Matrix Matrix::kron(const Matrix& a, const Matrix& b) {
  Matrix m(a.p_, a.rows_ * b.rows_, a.cols_ * b.cols_);
  const PrimeField f{a.p_};
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < a.cols_; ++j) {
      const Scalar s = a(i, j);
      if (s == 0) continue;
      for (std::size_t k = 0; k < b.rows_; ++k)
        for (std::size_t l = 0; l < b.cols_; ++l)
          m(i * b.rows_ + k, j * b.cols_ + l) = f.mul(s, b(k, l));
    }
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

Vector Matrix::row(std::size_t r) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

void Matrix::set_column(std::size_t c, std::span<const Scalar> v) {
  SHAPE_CHECK(v.size() == rows_);
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  Matrix m(p_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) m(r, c) = (*this)(r0 + r, c0 + c);
  return m;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  SHAPE_CHECK(r0 + m.rows_ <= rows_ && c0 + m.cols_ <= cols_);
  for (std::size_t r = 0; r < m.rows_; ++r)
    for (std::size_t c = 0; c < m.cols_; ++c) (*this)(r0 + r, c0 + c) = m(r, c);
}

Matrix Matrix::select_columns(std::span<const std::size_t> cols) const {
  Matrix m(p_, rows_, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t r = 0; r < rows_; ++r) m(r, j) = (*this)(r, cols[j]);
  return m;
}

Vector Matrix::apply(std::span<const Scalar> v) const {
  SHAPE_CHECK(v.size() == cols_);
  Vector out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < cols_; ++c) acc += std::uint64_t{(*this)(r, c)} * v[c];
    out[r] = static_cast<Scalar>(acc % p_);
  }
  return out;
}

Matrix Matrix::operator*(const Matrix& o) const {
  SHAPE_CHECK(cols_ == o.rows_);
  Matrix m(p_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Scalar a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j)
        m(i, j) = static_cast<Scalar>((m(i, j) + std::uint64_t{a} * o(k, j)) % p_);
    }
  return m;
}

Matrix Matrix::operator+(const Matrix& o) const {
  SHAPE_CHECK(rows_ == o.rows_ && cols_ == o.cols_);
  Matrix m = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = (data_[i] + o.data_[i]) % p_;
  return m;
}

Matrix Matrix::operator-(const Matrix& o) const {
  SHAPE_CHECK(rows_ == o.rows_ && cols_ == o.cols_);
  Matrix m = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = (data_[i] + p_ - o.data_[i]) % p_;
  return m;
}

Matrix Matrix::scaled(Scalar s) const {
  Matrix m = *this;
  const PrimeField f{p_};
  for (auto& v : m.data_) v = f.mul(v, s);
  return m;
}

Matrix Matrix::negated() const { return scaled(p_ - 1); }

Matrix Matrix::transposed() const {
  Matrix m(p_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](Scalar v) { return v == 0; });
}

bool Matrix::is_identity() const { return rows_ == cols_ && *this == identity(p_, rows_); }

std::size_t Matrix::rank() const { return row_reduce(*this).pivots.size(); }

std::vector<std::vector<std::int64_t>> Matrix::to_rows() const {
  std::vector<std::vector<std::int64_t>> out(rows_, std::vector<std::int64_t>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r][c] = (*this)(r, c);
  return out;
}

RowEchelon row_reduce(Matrix m) {
  const PrimeField f{m.p()};
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t sel = row;
    while (sel < m.rows() && m(sel, col) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(sel, c), m(row, c));
    const Scalar inv = f.inv(m(row, col));
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) = f.mul(m(row, c), inv);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      const Scalar factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c)
        m(r, c) = f.sub(m(r, c), f.mul(factor, m(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

Matrix kernel(const Matrix& a) {
  const auto ech = row_reduce(a);
  const PrimeField f{a.p()};
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : ech.pivots) is_pivot[c] = true;
  std::vector<Vector> gens;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vector v(a.cols(), 0);
    v[free] = 1 % a.p();
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) v[ech.pivots[r]] = f.neg(ech.reduced(r, free));
    gens.push_back(std::move(v));
  }
  return Subspace::span(a.p(), a.cols(), gens).basis_matrix();
}

std::optional<Vector> solve(const Matrix& a, std::span<const Scalar> b) {
  SHAPE_CHECK(b.size() == a.rows());
  Matrix aug(a.p(), a.rows(), a.cols() + 1);
  aug.set_block(0, 0, a);
  for (std::size_t r = 0; r < a.rows(); ++r) aug(r, a.cols()) = b[r];
  const auto ech = row_reduce(std::move(aug));
  Vector x(a.cols(), 0);
  for (std::size_t r = 0; r < ech.pivots.size(); ++r) {
    if (ech.pivots[r] == a.cols()) return std::nullopt;
    x[ech.pivots[r]] = ech.reduced(r, a.cols());
  }
  return x;
}

std::optional<Matrix> inverse(const Matrix& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  const std::size_t n = a.rows();
  const auto ech = row_reduce(Matrix::hstack(a, Matrix::identity(a.p(), n)));
  if (ech.pivots.size() < n || (n > 0 && ech.pivots[n - 1] >= n)) return std::nullopt;
  return ech.reduced.block(0, n, n, n);
}

Vector add(const PrimeField& f, std::span<const Scalar> a, std::span<const Scalar> b) {
  SHAPE_CHECK(a.size() == b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.add(a[i], b[i]);
  return out;
}

Vector sub(const PrimeField& f, std::span<const Scalar> a, std::span<const Scalar> b) {
  SHAPE_CHECK(a.size() == b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.sub(a[i], b[i]);
  return out;
}

Vector scale(const PrimeField& f, Scalar s, std::span<const Scalar> a) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.mul(s, a[i]);
  return out;
}

bool is_zero(std::span<const Scalar> v) {
  return std::all_of(v.begin(), v.end(), [](Scalar s) { return s == 0; });
}

// ---------------------------------------------------------------------------

Subspace::Subspace(std::uint32_t p, std::size_t ambient) : p_(p), ambient_(ambient) {}

Subspace Subspace::span(std::uint32_t p, std::size_t ambient, const std::vector<Vector>& gens) {
  Subspace s(p, ambient);
  if (gens.empty()) return s;
  Matrix rows(p, gens.size(), ambient);
  for (std::size_t r = 0; r < gens.size(); ++r) {
    SHAPE_CHECK(gens[r].size() == ambient);
    for (std::size_t c = 0; c < ambient; ++c) rows(r, c) = gens[r][c] % p;
  }
  auto ech = row_reduce(std::move(rows));
  s.pivots_ = ech.pivots;
  for (std::size_t r = 0; r < ech.pivots.size(); ++r) s.basis_.push_back(ech.reduced.row(r));
  return s;
}

Subspace Subspace::column_span(const Matrix& m) {
  std::vector<Vector> cols;
  cols.reserve(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) cols.push_back(m.column(c));
  return span(m.p(), m.rows(), cols);
}

Subspace Subspace::whole(std::uint32_t p, std::size_t ambient) {
  return column_span(Matrix::identity(p, ambient));
}

Matrix Subspace::basis_matrix() const { return Matrix::from_columns(p_, ambient_, basis_); }

Vector Subspace::reduce(std::span<const Scalar> v) const {
  SHAPE_CHECK(v.size() == ambient_);
  const PrimeField f{p_};
  Vector out(v.begin(), v.end());
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const Scalar c = v[pivots_[i]];
    if (c == 0) continue;
    for (std::size_t k = 0; k < ambient_; ++k) out[k] = f.sub(out[k], f.mul(c, basis_[i][k]));
  }
  return out;
}

bool Subspace::contains(std::span<const Scalar> v) const { return is_zero(reduce(v)); }

Vector Subspace::coordinates(std::span<const Scalar> v) const {
  if (!contains(v)) throw PreconditionError("vector is not in the subspace");
  Vector c(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) c[i] = v[pivots_[i]];
  return c;
}

Matrix Subspace::coordinates(const Matrix& m) const {
  Matrix out(p_, dim(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) out.set_column(c, coordinates(m.column(c)));
  return out;
}

Vector Subspace::element(std::span<const Scalar> coords) const {
  SHAPE_CHECK(coords.size() == basis_.size());
  const PrimeField f{p_};
  Vector out(ambient_, 0);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (coords[i] == 0) continue;
    for (std::size_t k = 0; k < ambient_; ++k) out[k] = f.add(out[k], f.mul(coords[i], basis_[i][k]));
  }
  return out;
}

Subspace Subspace::sum(const Subspace& other) const {
  auto gens = basis_;
  gens.insert(gens.end(), other.basis_.begin(), other.basis_.end());
  return span(p_, ambient_, gens);
}

Subspace Subspace::intersect(const Subspace& other) const {
  // Solve a x = b y: kernel of [A | -B], then map through A.
  const Matrix a = basis_matrix();
  const Matrix b = other.basis_matrix();
  const Matrix k = kernel(Matrix::hstack(a, b.negated()));
  std::vector<Vector> gens;
  for (std::size_t c = 0; c < k.cols(); ++c) {
    const Vector full = k.column(c);
    gens.push_back(a.apply(std::span<const Scalar>(full).subspan(0, dim())));
  }
  return span(p_, ambient_, gens);
}

QuotientSpace::QuotientSpace(Subspace relations) : relations_(std::move(relations)) {
  std::vector<bool> is_pivot(relations_.ambient(), false);
  for (auto c : relations_.pivots()) is_pivot[c] = true;
  for (std::size_t i = 0; i < relations_.ambient(); ++i)
    if (!is_pivot[i]) free_.push_back(i);
}

Vector QuotientSpace::project(std::span<const Scalar> v) const {
  const Vector r = relations_.reduce(v);
  Vector out(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i) out[i] = r[free_[i]];
  return out;
}

Matrix QuotientSpace::projection() const {
  Matrix m(relations_.p(), dim(), ambient());
  Vector e(ambient(), 0);
  for (std::size_t c = 0; c < ambient(); ++c) {
    e[c] = 1;
    const Vector q = project(e);
    e[c] = 0;
    for (std::size_t r = 0; r < dim(); ++r) m(r, c) = q[r];
  }
  return m;
}

Matrix QuotientSpace::lift() const {
  Matrix m(relations_.p(), ambient(), dim());
  for (std::size_t i = 0; i < free_.size(); ++i) m(free_[i], i) = 1;
  return m;
}

}  // namespace dgperf
