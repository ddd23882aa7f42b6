#include "dgperf/algebra.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "dgperf/caps.hpp"

namespace dgperf {

FinAlgebra::FinAlgebra(std::uint32_t p, std::vector<std::string> labels, std::vector<Scalar> structure,
                       Vector unit)
    : p_(p), labels_(std::move(labels)), structure_(std::move(structure)), unit_(std::move(unit)) {
  if (!is_prime(p_)) throw ValidationError("", "characteristic " + std::to_string(p_) + " is not prime");
  const std::size_t n = labels_.size();
  if (structure_.size() != n * n * n)
    throw ValidationError("", "structure constants must have dim^3 entries");
  if (unit_.size() != n) throw ValidationError("", "unit vector has wrong length");
  for (auto& s : structure_) s %= p_;
  for (auto& s : unit_) s %= p_;
  basis_action_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix m(p_, n, n);
    // column j holds e_i * e_j
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) m(k, j) = constant(i, j, k);
    basis_action_.push_back(std::move(m));
  }
}

Vector FinAlgebra::basis_vector(std::size_t i) const {
  Vector v(dim(), 0);
  v[i] = 1;
  return v;
}

Vector FinAlgebra::multiply(std::span<const Scalar> a, std::span<const Scalar> b) const {
  const std::size_t n = dim();
  std::vector<std::uint64_t> acc(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (b[j] == 0) continue;
      const std::uint64_t ab = (std::uint64_t{a[i]} * b[j]) % p_;
      const Scalar* row = &structure_[(i * n + j) * n];
      for (std::size_t k = 0; k < n; ++k) acc[k] = (acc[k] + ab * row[k]) % p_;
    }
  }
  return Vector(acc.begin(), acc.end());
}

Vector FinAlgebra::power(std::span<const Scalar> a, std::uint64_t e) const {
  Vector result = unit_;
  Vector base(a.begin(), a.end());
  while (e > 0) {
    if (e & 1U) result = multiply(result, base);
    base = multiply(base, base);
    e >>= 1U;
  }
  return result;
}

Matrix FinAlgebra::multiplication_matrix(std::span<const Scalar> a) const {
  Matrix m(p_, dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i)
    if (a[i] != 0) m = m + basis_action_[i].scaled(a[i]);
  return m;
}

CheckReport FinAlgebra::validate() const {
  CheckReport report;
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector ei = basis_vector(i);
    if (multiply(unit_, ei) != ei) report.fail("unit does not act as identity on " + labels_[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const Vector ej = basis_vector(j);
      const Vector ij = multiply(ei, ej);
      if (ij != multiply(ej, ei)) report.fail("not commutative on (" + labels_[i] + ", " + labels_[j] + ")");
      for (std::size_t k = 0; k < n; ++k) {
        const Vector ek = basis_vector(k);
        if (multiply(ij, ek) != multiply(ei, multiply(ej, ek)))
          report.fail("not associative on (" + labels_[i] + ", " + labels_[j] + ", " + labels_[k] + ")");
      }
    }
  }
  return report;
}

std::string FinAlgebra::describe_element(std::span<const Scalar> a) const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (a[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (a[i] != 1) os << a[i] << "*";
    os << labels_[i];
  }
  if (first) os << "0";
  return os.str();
}

void check_caps(const FinAlgebra& a) {
  if (a.dim() > caps().max_dim)
    throw SizeError("algebra dimension " + std::to_string(a.dim()) + " exceeds cap " +
                    std::to_string(caps().max_dim));
  if (a.p() > caps().max_prime)
    throw SizeError("characteristic " + std::to_string(a.p()) + " exceeds cap " +
                    std::to_string(caps().max_prime));
}

bool same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
  return a == b || (a && b && *a == *b);
}

// ---------------------------------------------------------------------------

AlgebraMap AlgebraMap::identity(const AlgebraPtr& a) {
  return {a, a, Matrix::identity(a->p(), a->dim())};
}

CheckReport AlgebraMap::validate() const {
  CheckReport report;
  if (source->p() != target->p()) {
    report.fail("characteristics differ");
    return report;
  }
  if (matrix.rows() != target->dim() || matrix.cols() != source->dim()) {
    report.fail("matrix shape does not match the algebras");
    return report;
  }
  if (apply(source->unit()) != target->unit()) report.fail("not unital: 1 does not map to 1");
  const std::size_t n = source->dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const Vector ei = source->basis_vector(i), ej = source->basis_vector(j);
      if (apply(source->multiply(ei, ej)) != target->multiply(apply(ei), apply(ej)))
        report.fail("not multiplicative on basis pair (" + source->labels()[i] + ", " +
                    source->labels()[j] + ")");
    }
  return report;
}

AlgebraMap compose(const AlgebraMap& second, const AlgebraMap& first) {
  if (!same_algebra(first.target, second.source))
    throw PreconditionError("algebra maps are not composable");
  return {first.source, second.target, second.matrix * first.matrix};
}

// ---------------------------------------------------------------------------

FinModule::FinModule(AlgebraPtr owner, std::size_t dim, std::vector<Matrix> action)
    : owner_(std::move(owner)), dim_(dim), action_(std::move(action)) {
  if (action_.size() != owner_->dim())
    throw ValidationError("", "module needs one action matrix per algebra basis element");
  for (const auto& m : action_)
    if (m.rows() != dim_ || m.cols() != dim_)
      throw ValidationError("", "action matrix has wrong shape");
}

FinModule FinModule::regular(const AlgebraPtr& a) {
  std::vector<Matrix> act;
  for (std::size_t i = 0; i < a->dim(); ++i) act.push_back(a->basis_action(i));
  return FinModule(a, a->dim(), std::move(act));
}

FinModule FinModule::zero(const AlgebraPtr& a) {
  return FinModule(a, 0, std::vector<Matrix>(a->dim(), Matrix(a->p(), 0, 0)));
}

Matrix FinModule::action_of(std::span<const Scalar> a) const {
  Matrix m(p(), dim_, dim_);
  for (std::size_t i = 0; i < action_.size(); ++i)
    if (a[i] != 0) m = m + action_[i].scaled(a[i]);
  return m;
}

CheckReport FinModule::validate() const {
  CheckReport report;
  const auto& a = *owner_;
  if (action_of(a.unit()) != Matrix::identity(a.p(), dim_)) report.fail("unit does not act as identity");
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      const Matrix lhs = action_[i] * action_[j];
      const Matrix rhs = action_of(a.multiply(a.basis_vector(i), a.basis_vector(j)));
      if (lhs != rhs)
        report.fail("action is not multiplicative on (" + a.labels()[i] + ", " + a.labels()[j] + ")");
    }
  return report;
}

FinModule restrict_scalars(const FinModule& n, const AlgebraMap& phi) {
  if (!same_algebra(phi.target, n.owner())) throw PreconditionError("restrict_scalars: owner mismatch");
  std::vector<Matrix> act;
  for (std::size_t i = 0; i < phi.source->dim(); ++i)
    act.push_back(n.action_of(phi.apply(phi.source->basis_vector(i))));
  return FinModule(phi.source, n.dim(), std::move(act));
}

FinModule submodule(const FinModule& m, const Subspace& u) {
  const Matrix basis = u.basis_matrix();
  std::vector<Matrix> act;
  for (const auto& a : m.action()) act.push_back(u.coordinates(a * basis));
  return FinModule(m.owner(), u.dim(), std::move(act));
}

FinModule quotient_module(const FinModule& m, const QuotientSpace& q) {
  const Matrix proj = q.projection();
  const Matrix lift = q.lift();
  std::vector<Matrix> act;
  for (const auto& a : m.action()) act.push_back(proj * a * lift);
  return FinModule(m.owner(), q.dim(), std::move(act));
}

CheckReport ModuleMap::validate(const AlgebraMap* along) const {
  CheckReport report;
  if (matrix.rows() != target.dim() || matrix.cols() != source.dim()) {
    report.fail("module map matrix has wrong shape");
    return report;
  }
  const auto& a = *source.owner();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const Matrix tgt_action = along ? target.action_of(along->apply(a.basis_vector(i)))
                                    : target.basis_action(i);
    if (matrix * source.basis_action(i) != tgt_action * matrix)
      report.fail("does not commute with the action of " + a.labels()[i]);
  }
  return report;
}

// ---------------------------------------------------------------------------

AlgebraPtr algebra_from_poly(std::uint32_t p, const std::vector<std::int64_t>& coefficients) {
  if (!is_prime(p)) throw PreconditionError("algebra_from_poly: p is not prime");
  if (coefficients.size() < 2) throw PreconditionError("algebra_from_poly: degree must be at least 1");
  const PrimeField f{p};
  if (f.normalize(coefficients.back()) != 1) throw PreconditionError("algebra_from_poly: polynomial is not monic");
  const std::size_t d = coefficients.size() - 1;
  Vector poly(coefficients.size());
  for (std::size_t i = 0; i < poly.size(); ++i) poly[i] = f.normalize(coefficients[i]);

  // x^k mod f for k < 2d - 1
  std::vector<Vector> powers;
  Vector cur(d, 0);
  cur[0] = 1 % p;
  for (std::size_t k = 0; k + 1 < 2 * d; ++k) {
    powers.push_back(cur);
    // multiply by x: shift, then reduce the overflow with x^d = -(f_0 + ... + f_{d-1} x^{d-1})
    const Scalar top = cur[d - 1];
    Vector next(d, 0);
    for (std::size_t i = d - 1; i > 0; --i) next[i] = cur[i - 1];
    for (std::size_t i = 0; i < d; ++i) next[i] = f.sub(next[i], f.mul(top, poly[i]));
    cur = std::move(next);
  }
  std::vector<Scalar> structure(d * d * d, 0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) structure[(i * d + j) * d + k] = powers[i + j][k];
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < d; ++i)
    labels.push_back(i == 0 ? "1" : (i == 1 ? "x" : "x^" + std::to_string(i)));
  Vector unit(d, 0);
  unit[0] = 1 % p;
  auto a = std::make_shared<const FinAlgebra>(p, std::move(labels), std::move(structure), std::move(unit));
  check_caps(*a);
  return a;
}

AlgebraPtr product_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
  if (a->p() != b->p()) throw PreconditionError("product_algebra: characteristics differ");
  const std::size_t na = a->dim(), nb = b->dim(), n = na + nb;
  std::vector<Scalar> structure(n * n * n, 0);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < na; ++k) structure[(i * n + j) * n + k] = a->constant(i, j, k);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        structure[((na + i) * n + na + j) * n + na + k] = b->constant(i, j, k);
  std::vector<std::string> labels;
  for (const auto& l : a->labels()) labels.push_back("(" + l + ",0)");
  for (const auto& l : b->labels()) labels.push_back("(0," + l + ")");
  Vector unit = a->unit();
  unit.insert(unit.end(), b->unit().begin(), b->unit().end());
  auto out = std::make_shared<const FinAlgebra>(a->p(), std::move(labels), std::move(structure), std::move(unit));
  check_caps(*out);
  return out;
}

AlgebraPtr zero_algebra(std::uint32_t p) {
  return std::make_shared<const FinAlgebra>(p, std::vector<std::string>{}, std::vector<Scalar>{}, Vector{});
}

std::uint64_t element_count(std::uint32_t p, std::size_t dim) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    n *= p;
    if (n > (std::uint64_t{1} << 62)) return n;
  }
  return n;
}

Subspace nilradical(const FinAlgebra& a) {
  // a -> a^p is F_p-linear on a commutative algebra of characteristic p.
  const std::size_t n = a.dim();
  Matrix frob(a.p(), n, n);
  for (std::size_t i = 0; i < n; ++i) frob.set_column(i, a.power(a.basis_vector(i), a.p()));
  Matrix iter = Matrix::identity(a.p(), n);
  for (std::size_t i = 0; i < n; ++i) iter = frob * iter;
  return Subspace::column_span(kernel(iter));
}

IdempotentsAndPrimes enumerate_idempotents_and_primes(const FinAlgebra& a) {
  if (element_count(a.p(), a.dim()) > caps().max_enumeration)
    throw SizeError("algebra has more than " + std::to_string(caps().max_enumeration) + " elements");
  IdempotentsAndPrimes out;
  for_each_element(a.p(), a.dim(), [&](const Vector& e) {
    if (a.multiply(e, e) == e) out.idempotents.push_back(e);
  });
  for (const auto& e : out.idempotents) {
    if (is_zero(e)) continue;
    const bool primitive = std::all_of(out.idempotents.begin(), out.idempotents.end(), [&](const Vector& g) {
      const Vector eg = a.multiply(e, g);
      return is_zero(eg) || eg == e;
    });
    if (primitive) out.primitive.push_back(e);
  }
  const QuotientSpace reduced(nilradical(a));
  for (const auto& e : out.primitive) {
    // m_e = { a : e a is nilpotent }
    const Matrix m = reduced.projection() * a.multiplication_matrix(e);
    out.primes.push_back(Subspace::column_span(kernel(m)));
  }
  return out;
}

Localization corner_algebra(const AlgebraPtr& a, std::span<const Scalar> e) {
  const std::size_t n = a->dim();
  const Vector ev(e.begin(), e.end());
  if (a->multiply(ev, ev) != ev) throw PreconditionError("corner_algebra: element is not idempotent");
  std::vector<Vector> gens;
  for (std::size_t i = 0; i < n; ++i) gens.push_back(a->multiply(ev, a->basis_vector(i)));
  const Subspace sub = Subspace::span(a->p(), n, gens);
  const std::size_t d = sub.dim();
  std::vector<Scalar> structure(d * d * d, 0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const Vector c = sub.coordinates(a->multiply(sub.basis()[i], sub.basis()[j]));
      for (std::size_t k = 0; k < d; ++k) structure[(i * d + j) * d + k] = c[k];
    }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < d; ++i) labels.push_back(a->labels()[sub.pivots()[i]]);
  Vector unit = d == 0 ? Vector{} : sub.coordinates(ev);
  auto eA = std::make_shared<const FinAlgebra>(a->p(), std::move(labels), std::move(structure), std::move(unit));
  Matrix to_corner(a->p(), d, n);
  for (std::size_t i = 0; i < n; ++i) to_corner.set_column(i, sub.coordinates(gens[i]));
  return {eA, AlgebraMap{a, eA, std::move(to_corner)}, ev, sub.basis_matrix()};
}

Vector idempotent_power(const FinAlgebra& a, std::span<const Scalar> f) {
  std::map<Vector, std::uint64_t> seen;
  Vector cur(f.begin(), f.end());
  const std::uint64_t bound = element_count(a.p(), a.dim()) + 1;
  for (std::uint64_t k = 1; k <= bound; ++k) {
    auto [it, inserted] = seen.emplace(cur, k);
    if (!inserted) {
      const std::uint64_t start = it->second, period = k - it->second;
      const std::uint64_t target = ((start + period - 1) / period) * period;
      return a.power(f, target);
    }
    cur = a.multiply(cur, f);
  }
  throw InternalError("power sequence did not cycle within |A| steps");
}

Localization localize_at_element(const AlgebraPtr& a, std::span<const Scalar> f) {
  return corner_algebra(a, idempotent_power(*a, f));
}

std::vector<ModuleMap> hom_modules(const FinModule& m, const FinModule& n) {
  if (!same_algebra(m.owner(), n.owner())) throw PreconditionError("hom_modules: owner mismatch");
  const std::size_t dm = m.dim(), dn = n.dim();
  const auto& a = *m.owner();
  const PrimeField f{a.p()};
  // unknown X (dn x dm), index r * dm + c; equations X A_M - A_N X = 0
  Matrix eqs(a.p(), a.dim() * dn * dm, dn * dm);
  std::size_t row = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const Matrix& am = m.basis_action(i);
    const Matrix& an = n.basis_action(i);
    for (std::size_t r = 0; r < dn; ++r)
      for (std::size_t c = 0; c < dm; ++c, ++row) {
        for (std::size_t k = 0; k < dm; ++k) eqs(row, r * dm + k) = f.add(eqs(row, r * dm + k), am(k, c));
        for (std::size_t k = 0; k < dn; ++k) eqs(row, k * dm + c) = f.sub(eqs(row, k * dm + c), an(r, k));
      }
  }
  const Matrix sol = kernel(eqs);
  std::vector<ModuleMap> out;
  for (std::size_t s = 0; s < sol.cols(); ++s) {
    Matrix x(a.p(), dn, dm);
    for (std::size_t r = 0; r < dn; ++r)
      for (std::size_t c = 0; c < dm; ++c) x(r, c) = sol(r * dm + c, s);
    out.push_back({m, n, std::move(x)});
  }
  return out;
}

Vector TensorProduct::pure(std::span<const Scalar> m, std::span<const Scalar> n) const {
  const PrimeField f{module.p()};
  Vector v(left_dim * right_dim, 0);
  for (std::size_t i = 0; i < left_dim; ++i)
    for (std::size_t j = 0; j < right_dim; ++j) v[i * right_dim + j] = f.mul(m[i], n[j]);
  return quotient.project(v);
}

namespace {

TensorProduct tensor_with_relations(std::size_t dl, std::size_t dr, std::vector<Vector> relations,
                                    const AlgebraPtr& result_owner, const std::vector<Matrix>& ambient_action) {
  const std::uint32_t p = result_owner->p();
  QuotientSpace q(Subspace::span(p, dl * dr, relations));
  const Matrix proj = q.projection(), lift = q.lift();
  std::vector<Matrix> act;
  for (const auto& a : ambient_action) act.push_back(proj * a * lift);
  return {FinModule(result_owner, q.dim(), std::move(act)), std::move(q), dl, dr};
}

}  // namespace

TensorProduct tensor_modules(const FinModule& m, const FinModule& n) {
  if (!same_algebra(m.owner(), n.owner())) throw PreconditionError("tensor_modules: mismatched base");
  const auto& a = *m.owner();
  const std::uint32_t p = a.p();
  const std::size_t dm = m.dim(), dn = n.dim();
  std::vector<Vector> rel;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const Matrix left = Matrix::kron(m.basis_action(k), Matrix::identity(p, dn));
    const Matrix right = Matrix::kron(Matrix::identity(p, dm), n.basis_action(k));
    const Matrix diff = left - right;
    for (std::size_t c = 0; c < diff.cols(); ++c) rel.push_back(diff.column(c));
  }
  std::vector<Matrix> act;
  for (std::size_t k = 0; k < a.dim(); ++k) act.push_back(Matrix::kron(m.basis_action(k), Matrix::identity(p, dn)));
  return tensor_with_relations(dm, dn, std::move(rel), m.owner(), act);
}

TensorProduct base_change(const FinModule& m, const AlgebraMap& phi) {
  if (!same_algebra(phi.source, m.owner())) throw PreconditionError("base_change: mismatched base");
  const std::uint32_t p = m.p();
  const std::size_t dm = m.dim(), db = phi.target->dim();
  std::vector<Vector> rel;
  for (std::size_t k = 0; k < phi.source->dim(); ++k) {
    const Matrix left = Matrix::kron(m.basis_action(k), Matrix::identity(p, db));
    const Matrix right =
        Matrix::kron(Matrix::identity(p, dm), phi.target->multiplication_matrix(phi.apply(phi.source->basis_vector(k))));
    const Matrix diff = left - right;
    for (std::size_t c = 0; c < diff.cols(); ++c) rel.push_back(diff.column(c));
  }
  std::vector<Matrix> act;
  for (std::size_t k = 0; k < db; ++k)
    act.push_back(Matrix::kron(Matrix::identity(p, dm), phi.target->basis_action(k)));
  return tensor_with_relations(dm, db, std::move(rel), phi.target, act);
}

KernelImageCokernel kernel_image_quotient(const ModuleMap& phi) {
  const Subspace ker = Subspace::column_span(kernel(phi.matrix));
  const Subspace im = Subspace::column_span(phi.matrix);
  const QuotientSpace coker(im);
  KernelImageCokernel out;
  out.kernel = submodule(phi.source, ker);
  out.image = submodule(phi.target, im);
  out.cokernel = quotient_module(phi.target, coker);
  out.kernel_inclusion = ker.basis_matrix();
  out.image_corestriction = im.coordinates(phi.matrix);
  out.image_inclusion = im.basis_matrix();
  out.cokernel_projection = coker.projection();
  return out;
}

}  // namespace dgperf
