#include "dgperf/sheaf.hpp"

#include <algorithm>

namespace dgperf {

namespace {

// Reads the coordinates of a member of u: the entries at the pivot positions.
Matrix pivot_reader(const Subspace& u) {
  Matrix m(u.p(), u.dim(), u.ambient());
  for (std::size_t i = 0; i < u.dim(); ++i) m(i, u.pivots()[i]) = 1;
  return m;
}

Matrix flatten(const std::vector<Matrix>& parts, std::uint32_t p) {
  std::size_t total = 0;
  for (const auto& m : parts) total += m.rows() * m.cols();
  Matrix v(p, total, 1);
  std::size_t k = 0;
  for (const auto& m : parts)
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) v(k++, 0) = m(r, c);
  return v;
}

FinModule direct_sum_modules(const AlgebraPtr& owner, const std::vector<const FinModule*>& parts) {
  std::size_t dim = 0;
  for (const auto* m : parts) dim += m->dim();
  std::vector<Matrix> act;
  for (std::size_t k = 0; k < owner->dim(); ++k) {
    std::vector<Matrix> blocks;
    for (const auto* m : parts) blocks.push_back(m->basis_action(k));
    act.push_back(Matrix::block_diagonal(owner->p(), blocks));
  }
  return FinModule(owner, dim, std::move(act));
}

void require_same(const SheafPtr& a, const SheafPtr& b, const char* what) {
  if (!same_sheaf(a, b)) throw PreconditionError(std::string(what) + ": sheaves do not match");
}

}  // namespace

// ---------------------------------------------------------------------------

Sheaf::Sheaf(SpacePtr base, std::vector<FinModule> stalks, std::vector<Matrix> comparisons)
    : base_(std::move(base)), stalks_(std::move(stalks)), comparisons_(std::move(comparisons)) {
  const std::size_t n = base_->size();
  if (stalks_.size() != n) throw ValidationError("", "sheaf needs one stalk per point");
  if (comparisons_.size() != n * n) throw ValidationError("", "sheaf comparison table has wrong size");
  for (std::size_t x = 0; x < n; ++x) {
    if (!same_algebra(stalks_[x].owner(), base_->stalk(x)))
      throw ValidationError("", "stalk at " + base_->points()[x] + " is not a module over O_x");
    for (std::size_t y = 0; y < n; ++y) {
      if (!base_->leq(x, y)) {
        comparisons_[x * n + y] = Matrix();
        continue;
      }
      const Matrix& c = comparisons_[x * n + y];
      if (c.rows() != stalks_[y].dim() || c.cols() != stalks_[x].dim())
        throw ValidationError("", "comparison " + base_->points()[x] + "->" + base_->points()[y] +
                                      " has the wrong shape");
    }
  }
}

Sheaf Sheaf::from_pairs(SpacePtr base, std::vector<FinModule> stalks,
                        const std::vector<std::pair<std::pair<std::size_t, std::size_t>, Matrix>>& comparisons) {
  const std::size_t n = base->size();
  if (stalks.size() != n) throw ValidationError("", "sheaf needs one stalk per point");
  std::vector<std::optional<Matrix>> table(n * n);
  for (std::size_t x = 0; x < n; ++x) table[x * n + x] = Matrix::identity(base->p(), stalks[x].dim());
  for (const auto& [xy, m] : comparisons) {
    const auto [x, y] = xy;
    if (x >= n || y >= n || !base->leq(x, y)) throw ValidationError("", "comparison for a pair outside the order");
    if (x != y) table[x * n + y] = m;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (!base->leq(x, y) || table[x * n + y]) continue;
        if (stalks[x].dim() == 0 || stalks[y].dim() == 0) {
          table[x * n + y] = Matrix(base->p(), stalks[y].dim(), stalks[x].dim());
          changed = true;
          continue;
        }
        for (std::size_t k = 0; k < n; ++k)
          if (k != x && k != y && table[x * n + k] && table[k * n + y]) {
            table[x * n + y] = *table[k * n + y] * *table[x * n + k];
            changed = true;
            break;
          }
      }
  }
  std::vector<Matrix> full(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (!base->leq(x, y)) continue;
      if (!table[x * n + y])
        throw ValidationError("", "missing comparison " + base->points()[x] + "->" + base->points()[y]);
      full[x * n + y] = *table[x * n + y];
    }
  return Sheaf(std::move(base), std::move(stalks), std::move(full));
}

Sheaf Sheaf::structure(const SpacePtr& base) { return ext_by_zero(base, base->all()); }

Sheaf Sheaf::zero(const SpacePtr& base) { return ext_by_zero(base, Open{}); }

const Matrix& Sheaf::comparison(std::size_t x, std::size_t y) const {
  if (!base_->leq(x, y)) throw PreconditionError("comparison: not a generization pair");
  return comparisons_[x * size() + y];
}

std::size_t Sheaf::total_dim() const {
  std::size_t d = 0;
  for (const auto& m : stalks_) d += m.dim();
  return d;
}

CheckReport Sheaf::validate() const {
  CheckReport r;
  const auto& s = *base_;
  const std::size_t n = size();
  for (std::size_t x = 0; x < n; ++x) r.merge(stalks_[x].validate(), "stalk " + s.points()[x] + ": ");
  for (std::size_t x = 0; x < n; ++x) {
    if (!comparison(x, x).is_identity()) r.fail("comparison at " + s.points()[x] + " is not the identity");
    for (std::size_t y = 0; y < n; ++y) {
      if (!s.leq(x, y) || x == y) continue;
      const std::string name = s.points()[x] + "->" + s.points()[y];
      r.merge(ModuleMap{stalks_[x], stalks_[y], comparison(x, y)}.validate(&s.res(x, y)), "comparison " + name + ": ");
      for (std::size_t z = 0; z < n; ++z)
        if (s.leq(y, z) && comparison(y, z) * comparison(x, y) != comparison(x, z))
          r.fail("comparisons not functorial on " + s.points()[x] + "<=" + s.points()[y] + "<=" + s.points()[z]);
    }
  }
  return r;
}

bool same_sheaf(const SheafPtr& a, const SheafPtr& b) { return a == b || (a && b && *a == *b); }

// ---------------------------------------------------------------------------

SheafMap SheafMap::identity(const SheafPtr& m) {
  SheafMap f{m, m, {}};
  for (std::size_t x = 0; x < m->size(); ++x) f.components.push_back(Matrix::identity(m->p(), m->stalk(x).dim()));
  return f;
}

SheafMap SheafMap::zero(const SheafPtr& m, const SheafPtr& n) {
  if (m->base() != n->base()) throw PreconditionError("SheafMap::zero: different bases");
  SheafMap f{m, n, {}};
  for (std::size_t x = 0; x < m->size(); ++x)
    f.components.push_back(Matrix(m->p(), n->stalk(x).dim(), m->stalk(x).dim()));
  return f;
}

CheckReport SheafMap::validate() const {
  CheckReport r;
  if (source->base() != target->base()) {
    r.fail("source and target live on different spaces");
    return r;
  }
  const auto& s = *source->base();
  if (components.size() != s.size()) {
    r.fail("wrong number of components");
    return r;
  }
  for (std::size_t x = 0; x < s.size(); ++x) {
    const auto& c = components[x];
    if (c.rows() != target->stalk(x).dim() || c.cols() != source->stalk(x).dim()) {
      r.fail("component at " + s.points()[x] + " has the wrong shape");
      return r;
    }
    r.merge(ModuleMap{source->stalk(x), target->stalk(x), c}.validate(), "component " + s.points()[x] + ": ");
  }
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y)
      if (x != y && s.leq(x, y) &&
          target->comparison(x, y) * components[x] != components[y] * source->comparison(x, y))
        r.fail("square fails on " + s.points()[x] + "<=" + s.points()[y]);
  return r;
}

bool SheafMap::is_epi() const {
  for (std::size_t x = 0; x < components.size(); ++x)
    if (components[x].rank() != target->stalk(x).dim()) return false;
  return true;
}

bool SheafMap::is_mono() const {
  for (std::size_t x = 0; x < components.size(); ++x)
    if (components[x].rank() != source->stalk(x).dim()) return false;
  return true;
}

bool SheafMap::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](const Matrix& m) { return m.is_zero(); });
}

SheafMap SheafMap::inverse() const {
  SheafMap inv{target, source, {}};
  for (const auto& c : components) {
    const auto i = dgperf::inverse(c);
    if (!i) throw PreconditionError("SheafMap::inverse: not an isomorphism");
    inv.components.push_back(*i);
  }
  return inv;
}

SheafMap SheafMap::operator+(const SheafMap& o) const {
  require_same(source, o.source, "SheafMap +");
  require_same(target, o.target, "SheafMap +");
  SheafMap r{source, target, {}};
  for (std::size_t x = 0; x < components.size(); ++x) r.components.push_back(components[x] + o.components[x]);
  return r;
}

SheafMap SheafMap::operator-(const SheafMap& o) const { return *this + o.scaled(o.source->p() - 1); }

SheafMap SheafMap::scaled(Scalar s) const {
  SheafMap r{source, target, {}};
  for (const auto& c : components) r.components.push_back(c.scaled(s));
  return r;
}

SheafMap compose(const SheafMap& second, const SheafMap& first) {
  require_same(first.target, second.source, "compose");
  SheafMap r{first.source, second.target, {}};
  for (std::size_t x = 0; x < first.components.size(); ++x)
    r.components.push_back(second.components[x] * first.components[x]);
  return r;
}

// ---------------------------------------------------------------------------

std::size_t SectionModule::slot(std::size_t x) const {
  const auto it = std::find(points.begin(), points.end(), x);
  if (it == points.end()) throw PreconditionError("section module: point outside the open");
  return static_cast<std::size_t>(it - points.begin());
}

Matrix SectionModule::component(std::size_t x) const {
  const std::size_t k = slot(x);
  Matrix m(space.p(), dims[k], ambient);
  for (std::size_t i = 0; i < dims[k]; ++i) m(i, offsets[k] + i) = 1;
  return m;
}

Vector SectionModule::component_of(std::span<const Scalar> family, std::size_t x) const {
  const std::size_t k = slot(x);
  return Vector(family.begin() + static_cast<std::ptrdiff_t>(offsets[k]),
                family.begin() + static_cast<std::ptrdiff_t>(offsets[k] + dims[k]));
}

Matrix SectionModule::restriction_to(const SectionModule& smaller) const {
  Matrix m(space.p(), smaller.ambient, ambient);
  for (std::size_t k = 0; k < smaller.points.size(); ++k) {
    const std::size_t j = slot(smaller.points[k]);
    for (std::size_t i = 0; i < smaller.dims[k]; ++i) m(smaller.offsets[k] + i, offsets[j] + i) = 1;
  }
  return m;
}

SectionModule sections(const Sheaf& m, Open u) {
  const auto& s = *m.base();
  if (!s.is_open(u)) throw PreconditionError("sections: " + s.describe(u) + " is not an open of " + s.name());
  SectionModule sec;
  sec.open = u;
  for (std::size_t x : s.points_of(u)) {
    sec.points.push_back(x);
    sec.offsets.push_back(sec.ambient);
    sec.dims.push_back(m.stalk(x).dim());
    sec.ambient += m.stalk(x).dim();
  }
  std::size_t rows = 0;
  for (std::size_t a = 0; a < sec.points.size(); ++a)
    for (std::size_t b = 0; b < sec.points.size(); ++b)
      if (a != b && s.leq(sec.points[a], sec.points[b])) rows += sec.dims[b];
  Matrix c(m.p(), rows, sec.ambient);
  std::size_t row = 0;
  for (std::size_t a = 0; a < sec.points.size(); ++a)
    for (std::size_t b = 0; b < sec.points.size(); ++b) {
      if (a == b || !s.leq(sec.points[a], sec.points[b])) continue;
      c.set_block(row, sec.offsets[a], m.comparison(sec.points[a], sec.points[b]));
      c.set_block(row, sec.offsets[b], Matrix::identity(m.p(), sec.dims[b]).negated());
      row += sec.dims[b];
    }
  sec.space = rows == 0 ? Subspace::whole(m.p(), sec.ambient) : Subspace::column_span(kernel(c));
  return sec;
}

Matrix sections_map(const SheafMap& phi, Open u) {
  std::vector<Matrix> blocks;
  for (std::size_t x : phi.source->base()->points_of(u)) blocks.push_back(phi.components[x]);
  return Matrix::block_diagonal(phi.source->p(), blocks);
}

std::vector<SheafMap> hom_sheaves(const SheafPtr& m, const SheafPtr& n) {
  if (m->base() != n->base()) throw PreconditionError("hom_sheaves: different bases");
  const auto& s = *m->base();
  const std::uint32_t p = m->p();
  const std::size_t pts = s.size();
  std::vector<std::size_t> off(pts + 1, 0);
  for (std::size_t x = 0; x < pts; ++x) off[x + 1] = off[x] + n->stalk(x).dim() * m->stalk(x).dim();
  const std::size_t unknowns = off[pts];

  std::vector<Matrix> blocks;  // each block is a set of equation rows over all unknowns
  for (std::size_t x = 0; x < pts; ++x) {
    const auto& mx = m->stalk(x);
    const auto& nx = n->stalk(x);
    for (std::size_t k = 0; k < s.stalk(x)->dim(); ++k) {
      const Matrix eq = Matrix::kron(nx.basis_action(k), Matrix::identity(p, mx.dim())) -
                        Matrix::kron(Matrix::identity(p, nx.dim()), mx.basis_action(k).transposed());
      Matrix row(p, eq.rows(), unknowns);
      row.set_block(0, off[x], eq);
      blocks.push_back(std::move(row));
    }
  }
  for (std::size_t x = 0; x < pts; ++x)
    for (std::size_t y = 0; y < pts; ++y) {
      if (x == y || !s.leq(x, y)) continue;
      const Matrix lhs = Matrix::kron(n->comparison(x, y), Matrix::identity(p, m->stalk(x).dim()));
      const Matrix rhs = Matrix::kron(Matrix::identity(p, n->stalk(y).dim()), m->comparison(x, y).transposed());
      Matrix row(p, lhs.rows(), unknowns);
      row.set_block(0, off[x], lhs);
      row.set_block(0, off[y], rhs.negated());
      blocks.push_back(std::move(row));
    }
  Matrix system(p, 0, unknowns);
  for (const auto& b : blocks) system = Matrix::vstack(system, b);
  const Matrix sol = kernel(system);

  std::vector<SheafMap> out;
  for (std::size_t c = 0; c < sol.cols(); ++c) {
    SheafMap f{m, n, {}};
    for (std::size_t x = 0; x < pts; ++x) {
      const std::size_t r = n->stalk(x).dim(), cc = m->stalk(x).dim();
      Matrix comp(p, r, cc);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < cc; ++j) comp(i, j) = sol(off[x] + i * cc + j, c);
      f.components.push_back(std::move(comp));
    }
    out.push_back(std::move(f));
  }
  return out;
}

SheafMap combine(const SheafPtr& m, const SheafPtr& n, const std::vector<SheafMap>& basis,
                 std::span<const Scalar> coefficients) {
  SheafMap f = SheafMap::zero(m, n);
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (coefficients[i] != 0) f = f + basis[i].scaled(coefficients[i]);
  return f;
}

Vector hom_coordinates(const std::vector<SheafMap>& basis, const SheafMap& phi) {
  const std::uint32_t p = phi.source->p();
  const Matrix target = flatten(phi.components, p);
  Matrix cols(p, target.rows(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) cols.set_block(0, i, flatten(basis[i].components, p));
  const auto x = solve(cols, target.column(0));
  if (!x) throw PreconditionError("hom_coordinates: map is not in the span of the basis");
  return *x;
}

Sheaf ext_by_zero(const SpacePtr& s, Open v) {
  if (!s->is_open(v)) throw PreconditionError("ext_by_zero: " + s->describe(v) + " is not open");
  const std::size_t n = s->size();
  std::vector<FinModule> stalks;
  for (std::size_t x = 0; x < n; ++x)
    stalks.push_back(v.contains(x) ? FinModule::regular(s->stalk(x)) : FinModule::zero(s->stalk(x)));
  std::vector<Matrix> cmp(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (!s->leq(x, y)) continue;
      cmp[x * n + y] = v.contains(x) && v.contains(y) ? s->res(x, y).matrix
                                                       : Matrix(s->p(), stalks[y].dim(), stalks[x].dim());
    }
  return Sheaf(s, std::move(stalks), std::move(cmp));
}

CheckReport check_ext_by_zero_structure(const FinRingedSpace& s, Open v) {
  CheckReport r;
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y)
      if (v.contains(x) && s.leq(x, y) && !v.contains(y))
        r.fail("comparison " + s.points()[x] + "->" + s.points()[y] + " leaves " + s.describe(v));
  return r;
}

DirectSum direct_sum(const SpacePtr& base, const std::vector<SheafPtr>& parts) {
  const std::size_t n = base->size();
  const std::uint32_t p = base->p();
  for (const auto& part : parts)
    if (part->base() != base) throw PreconditionError("direct_sum: part lives on another space");
  std::vector<FinModule> stalks;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<const FinModule*> ms;
    for (const auto& part : parts) ms.push_back(&part->stalk(x));
    stalks.push_back(direct_sum_modules(base->stalk(x), ms));
  }
  std::vector<Matrix> cmp(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (!base->leq(x, y)) continue;
      std::vector<Matrix> blocks;
      for (const auto& part : parts) blocks.push_back(part->comparison(x, y));
      cmp[x * n + y] = Matrix::block_diagonal(p, blocks);
    }
  DirectSum out;
  out.sum = std::make_shared<const Sheaf>(base, std::move(stalks), std::move(cmp));
  std::vector<std::size_t> offset(n, 0);
  for (const auto& part : parts) {
    SheafMap inc{part, out.sum, {}}, proj{out.sum, part, {}};
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t d = part->stalk(x).dim(), total = out.sum->stalk(x).dim();
      Matrix i(p, total, d), q(p, d, total);
      for (std::size_t k = 0; k < d; ++k) {
        i(offset[x] + k, k) = 1;
        q(k, offset[x] + k) = 1;
      }
      offset[x] += d;
      inc.components.push_back(std::move(i));
      proj.components.push_back(std::move(q));
    }
    out.inclusions.push_back(std::move(inc));
    out.projections.push_back(std::move(proj));
  }
  return out;
}

SheafMap kernel_of(const SheafMap& phi) {
  const auto& s = phi.source->base();
  const std::size_t n = s->size();
  std::vector<Subspace> ks;
  std::vector<FinModule> stalks;
  for (std::size_t x = 0; x < n; ++x) {
    ks.push_back(Subspace::column_span(kernel(phi.components[x])));
    stalks.push_back(submodule(phi.source->stalk(x), ks.back()));
  }
  std::vector<Matrix> cmp(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (s->leq(x, y)) cmp[x * n + y] = ks[y].coordinates(phi.source->comparison(x, y) * ks[x].basis_matrix());
  SheafMap inc{std::make_shared<const Sheaf>(s, std::move(stalks), std::move(cmp)), phi.source, {}};
  for (const auto& k : ks) inc.components.push_back(k.basis_matrix());
  return inc;
}

SheafMap cokernel_of(const SheafMap& phi) {
  const auto& s = phi.source->base();
  const std::size_t n = s->size();
  std::vector<QuotientSpace> qs;
  std::vector<FinModule> stalks;
  for (std::size_t x = 0; x < n; ++x) {
    qs.emplace_back(Subspace::column_span(phi.components[x]));
    stalks.push_back(quotient_module(phi.target->stalk(x), qs.back()));
  }
  std::vector<Matrix> cmp(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (s->leq(x, y)) cmp[x * n + y] = qs[y].projection() * phi.target->comparison(x, y) * qs[x].lift();
  SheafMap proj{phi.target, std::make_shared<const Sheaf>(s, std::move(stalks), std::move(cmp)), {}};
  for (const auto& q : qs) proj.components.push_back(q.projection());
  return proj;
}

CheckReport check_stalk_sections(const Sheaf& m) {
  CheckReport r;
  const auto& s = *m.base();
  for (std::size_t x = 0; x < s.size(); ++x) {
    const auto sec = sections(m, s.minimal_open(x));
    const Matrix to_stalk = sec.component(x) * sec.space.basis_matrix();
    if (to_stalk.rows() != to_stalk.cols() || to_stalk.rank() != to_stalk.rows())
      r.fail("sections over U_" + s.points()[x] + " do not match the stalk");
  }
  return r;
}

// ---------------------------------------------------------------------------

Vector sigma(const SheafMap& phi, Open v) {
  const auto& s = *phi.source->base();
  Vector family;
  for (std::size_t x : s.points_of(v)) {
    const Vector image = phi.components[x].apply(s.stalk(x)->unit());
    family.insert(family.end(), image.begin(), image.end());
  }
  return family;
}

SheafMap sigma_inverse(const SpacePtr& s, Open v, const SheafPtr& m, std::span<const Scalar> family) {
  const auto source = std::make_shared<const Sheaf>(ext_by_zero(s, v));
  const auto sec = sections(*m, v);
  if (family.size() != sec.ambient || !sec.space.contains(family))
    throw PreconditionError("sigma_inverse: not a section over " + s->describe(v));
  SheafMap phi{source, m, {}};
  for (std::size_t x = 0; x < s->size(); ++x) {
    const auto& mx = m->stalk(x);
    if (!v.contains(x)) {
      phi.components.emplace_back(s->p(), mx.dim(), 0);
      continue;
    }
    const Vector sx = sec.component_of(family, x);
    Matrix c(s->p(), mx.dim(), s->stalk(x)->dim());
    for (std::size_t k = 0; k < s->stalk(x)->dim(); ++k) c.set_column(k, mx.basis_action(k).apply(sx));
    phi.components.push_back(std::move(c));
  }
  return phi;
}

// ---------------------------------------------------------------------------

Pushforward pushforward(const RingedMap& f, const SheafPtr& n) {
  if (n->base() != f.source) throw PreconditionError("pushforward: sheaf is not on the source of " + f.name);
  const auto& s_space = *f.target;
  const std::size_t ns = s_space.size();
  const std::uint32_t p = s_space.p();
  Pushforward out;
  std::vector<FinModule> stalks;
  for (std::size_t s = 0; s < ns; ++s) {
    auto sec = sections(*n, f.preimage(s_space.minimal_open(s)));
    const Matrix basis = sec.space.basis_matrix();
    std::vector<Matrix> act;
    for (std::size_t k = 0; k < s_space.stalk(s)->dim(); ++k) {
      const Vector a = s_space.stalk(s)->basis_vector(k);
      std::vector<Matrix> blocks;
      for (std::size_t t : sec.points) {
        const Vector at_t = f.sharp[t].apply(s_space.res(s, f.point_map[t]).apply(a));
        blocks.push_back(n->stalk(t).action_of(at_t));
      }
      act.push_back(sec.space.coordinates(Matrix::block_diagonal(p, blocks) * basis));
    }
    stalks.emplace_back(s_space.stalk(s), sec.dim(), std::move(act));
    out.stalk_sections.push_back(std::move(sec));
  }
  std::vector<Matrix> cmp(ns * ns);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t s2 = 0; s2 < ns; ++s2) {
      if (!s_space.leq(s, s2)) continue;
      const auto& big = out.stalk_sections[s];
      const auto& small = out.stalk_sections[s2];
      cmp[s * ns + s2] = pivot_reader(small.space) * big.restriction_to(small) * big.space.basis_matrix();
    }
  out.sheaf = std::make_shared<const Sheaf>(f.target, std::move(stalks), std::move(cmp));
  return out;
}

Pullback pullback(const RingedMap& f, const SheafPtr& m) {
  if (m->base() != f.target) throw PreconditionError("pullback: sheaf is not on the target of " + f.name);
  const auto& t_space = *f.source;
  const std::size_t nt = t_space.size();
  Pullback out;
  std::vector<FinModule> stalks;
  for (std::size_t t = 0; t < nt; ++t) {
    out.tensors.push_back(base_change(m->stalk(f.point_map[t]), f.sharp[t]));
    stalks.push_back(out.tensors.back().module);
  }
  std::vector<Matrix> cmp(nt * nt);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t t2 = 0; t2 < nt; ++t2) {
      if (!t_space.leq(t, t2)) continue;
      const Matrix k = Matrix::kron(m->comparison(f.point_map[t], f.point_map[t2]), t_space.res(t, t2).matrix);
      cmp[t * nt + t2] = out.tensors[t2].quotient.projection() * k * out.tensors[t].quotient.lift();
    }
  out.sheaf = std::make_shared<const Sheaf>(f.source, std::move(stalks), std::move(cmp));
  return out;
}

SheafMap pushforward_map(const RingedMap& f, const SheafMap& psi) {
  const auto src = pushforward(f, psi.source);
  const auto tgt = pushforward(f, psi.target);
  SheafMap out{src.sheaf, tgt.sheaf, {}};
  for (std::size_t s = 0; s < f.target->size(); ++s) {
    const auto& a = src.stalk_sections[s];
    const auto& b = tgt.stalk_sections[s];
    out.components.push_back(pivot_reader(b.space) * sections_map(psi, a.open) * a.space.basis_matrix());
  }
  return out;
}

SheafMap pullback_map(const RingedMap& f, const SheafMap& phi) {
  const auto src = pullback(f, phi.source);
  const auto tgt = pullback(f, phi.target);
  SheafMap out{src.sheaf, tgt.sheaf, {}};
  for (std::size_t t = 0; t < f.source->size(); ++t) {
    const Matrix k = Matrix::kron(phi.components[f.point_map[t]],
                                  Matrix::identity(f.source->p(), f.source->stalk(t)->dim()));
    out.components.push_back(tgt.tensors[t].quotient.projection() * k * src.tensors[t].quotient.lift());
  }
  return out;
}

Matrix pushforward_sections(const RingedMap& f, const SheafPtr& n, Open u) {
  const auto pf = pushforward(f, n);
  const auto whole = sections(*n, f.preimage(u));
  const auto target = sections(*pf.sheaf, u);
  Matrix m(n->p(), target.ambient, whole.ambient);
  for (std::size_t k = 0; k < target.points.size(); ++k) {
    const auto& sec = pf.stalk_sections[target.points[k]];
    m.set_block(target.offsets[k], 0, pivot_reader(sec.space) * whole.restriction_to(sec));
  }
  return m;
}

Matrix pushforward_sections_inverse(const RingedMap& f, const SheafPtr& n, Open u) {
  const auto pf = pushforward(f, n);
  const auto whole = sections(*n, f.preimage(u));
  const auto source = sections(*pf.sheaf, u);
  Matrix m(n->p(), whole.ambient, source.ambient);
  for (std::size_t k = 0; k < whole.points.size(); ++k) {
    const std::size_t t = whole.points[k];
    const std::size_t s = f.point_map[t];
    const auto& sec = pf.stalk_sections[s];
    m.set_block(whole.offsets[k], source.offsets[source.slot(s)], sec.component(t) * sec.space.basis_matrix());
  }
  return m;
}

SheafMap unit(const RingedMap& f, const SheafPtr& m) {
  const auto pb = pullback(f, m);
  const auto pf = pushforward(f, pb.sheaf);
  const std::uint32_t p = m->p();
  SheafMap eta{m, pf.sheaf, {}};
  for (std::size_t s = 0; s < f.target->size(); ++s) {
    const auto& sec = pf.stalk_sections[s];
    Matrix ambient(p, sec.ambient, m->stalk(s).dim());
    for (std::size_t k = 0; k < sec.points.size(); ++k) {
      const std::size_t t = sec.points[k];
      const Vector one = f.source->stalk(t)->unit();
      const Matrix k1 = Matrix::kron(m->comparison(s, f.point_map[t]), Matrix::from_columns(p, one.size(), {one}));
      ambient.set_block(sec.offsets[k], 0, pb.tensors[t].quotient.projection() * k1);
    }
    eta.components.push_back(pivot_reader(sec.space) * ambient);
  }
  return eta;
}

SheafMap counit(const RingedMap& f, const SheafPtr& n) {
  const auto pf = pushforward(f, n);
  const auto pb = pullback(f, pf.sheaf);
  const std::uint32_t p = n->p();
  SheafMap eps{pb.sheaf, n, {}};
  for (std::size_t t = 0; t < f.source->size(); ++t) {
    const auto& sec = pf.stalk_sections[f.point_map[t]];
    const Matrix at_t = sec.component(t) * sec.space.basis_matrix();
    const std::size_t db = f.source->stalk(t)->dim();
    Matrix e(p, n->stalk(t).dim(), sec.dim() * db);
    for (std::size_t i = 0; i < sec.dim(); ++i)
      for (std::size_t j = 0; j < db; ++j) e.set_column(i * db + j, n->stalk(t).basis_action(j).apply(at_t.column(i)));
    eps.components.push_back(e * pb.tensors[t].quotient.lift());
  }
  return eps;
}

SheafMap adjoint_right(const RingedMap& f, const SheafPtr& m, const SheafMap& psi) {
  return compose(pushforward_map(f, psi), unit(f, m));
}

SheafMap adjoint_left(const RingedMap& f, const SheafPtr& n, const SheafMap& chi) {
  return compose(counit(f, n), pullback_map(f, chi));
}

// ---------------------------------------------------------------------------

SheafMap theta_chain(const RingedMap& f, Open v, const SheafPtr& n, const SheafMap& psi) {
  const Open w = f.preimage(v);
  const Vector s = sigma(psi, w);
  const Vector c = pushforward_sections(f, n, v).apply(s);
  const auto pf = pushforward(f, n);
  const SheafMap chi = sigma_inverse(f.target, v, pf.sheaf, c);
  return adjoint_left(f, n, chi);
}

Theta theta(const RingedMap& f, Open v) {
  const auto n = std::make_shared<const Sheaf>(ext_by_zero(f.source, f.preimage(v)));
  Theta th{theta_chain(f, v, n, SheafMap::identity(n)), {}};
  if (!th.forward.is_iso()) throw InternalError("theta for " + f.name + " over " + f.target->describe(v) + " is not invertible");
  th.inverse = th.forward.inverse();
  return th;
}

CheckReport check_theta_canonical(const RingedMap& f, Open v, const Theta& th) {
  CheckReport r;
  const auto src = std::make_shared<const Sheaf>(ext_by_zero(f.target, v));
  const auto pb = pullback(f, src);
  if (!same_sheaf(pb.sheaf, th.forward.source)) {
    r.fail("theta source is not the pullback of O_V");
    return r;
  }
  const Open w = f.preimage(v);
  const std::uint32_t p = f.source->p();
  for (std::size_t t = 0; t < f.source->size(); ++t) {
    if (!w.contains(t)) {
      if (!th.forward.components[t].is_zero()) r.fail("theta is nonzero off the preimage at " + f.source->points()[t]);
      continue;
    }
    const auto& a = *f.target->stalk(f.point_map[t]);
    const auto& b = *f.source->stalk(t);
    Matrix c(p, b.dim(), a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j)
        c.set_column(i * b.dim() + j, b.multiply(f.sharp[t].apply(a.basis_vector(i)), b.basis_vector(j)));
    if (c * pb.tensors[t].quotient.lift() != th.forward.components[t])
      r.fail("theta disagrees with a ⊗ b -> f#(a) b at " + f.source->points()[t]);
  }
  return r;
}

SheafMap alpha(const RingedMap& f, const RingedMap& g, const SheafPtr& m) {
  const RingedMap fg = compose(f, g);
  const auto fm = pullback(f, m).sheaf;
  const auto x = pullback(g, fm).sheaf;
  const std::uint32_t p = m->p();

  const SheafMap eta_f = unit(f, m);
  const SheafMap pushed_eta_g = pushforward_map(f, unit(g, fm));

  const auto pf_g = pushforward(g, x);
  const auto pf_f = pushforward(f, pf_g.sheaf);
  const auto pf_fg = pushforward(fg, x);
  SheafMap iota{pf_f.sheaf, pf_fg.sheaf, {}};
  for (std::size_t s = 0; s < f.target->size(); ++s) {
    const auto& outer = pf_f.stalk_sections[s];  // families over f^{-1} U_s of g_* X
    const auto& target = pf_fg.stalk_sections[s];
    Matrix ambient(p, target.ambient, outer.ambient);
    for (std::size_t k = 0; k < target.points.size(); ++k) {
      const std::size_t u = target.points[k];
      const std::size_t t = g.point_map[u];
      const auto& inner = pf_g.stalk_sections[t];
      const std::size_t j = outer.slot(t);
      ambient.set_block(target.offsets[k], outer.offsets[j], inner.component(u) * inner.space.basis_matrix());
    }
    iota.components.push_back(pivot_reader(target.space) * ambient * outer.space.basis_matrix());
  }
  const SheafMap chi = compose(iota, compose(pushed_eta_g, eta_f));
  return adjoint_left(fg, x, chi);
}

// ---------------------------------------------------------------------------

SheafMap random_hom(const SheafPtr& m, const SheafPtr& n, std::mt19937_64& rng) {
  const auto basis = hom_sheaves(m, n);
  Vector c(basis.size());
  for (auto& x : c) x = static_cast<Scalar>(rng() % m->p());
  return combine(m, n, basis, c);
}

SheafPtr random_ext_sum(const SpacePtr& s, std::mt19937_64& rng, std::size_t max_parts) {
  const auto os = opens(*s);
  const std::size_t k = 1 + rng() % max_parts;
  std::vector<SheafPtr> parts;
  for (std::size_t i = 0; i < k; ++i) parts.push_back(std::make_shared<const Sheaf>(ext_by_zero(s, os[rng() % os.size()])));
  return direct_sum(s, parts).sum;
}

SheafPtr random_module(const SpacePtr& s, std::mt19937_64& rng) {
  const auto a = random_ext_sum(s, rng);
  const auto b = random_ext_sum(s, rng);
  return cokernel_of(random_hom(a, b, rng)).target;
}

}  // namespace dgperf
