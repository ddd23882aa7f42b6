#include "dgperf/dgcat.hpp"

#include <algorithm>
#include <map>

#include "dgperf/caps.hpp"

namespace dgperf {

namespace {

DObject zero_object(const SpacePtr& s) { return DObject{s, {}}; }

Scalar sign(std::uint32_t p, int n) { return (n % 2 == 0) ? 1 : p - 1; }

Vector random_vector(std::uint32_t p, std::size_t n, std::mt19937_64& rng) {
  Vector v(n);
  for (auto& x : v) x = static_cast<Scalar>(rng() % p);
  return v;
}

Vector combine_columns(const Matrix& cols, std::span<const Scalar> coeffs) { return cols.apply(coeffs); }

/// [[m00, m01], [m10, m11]] from a ⊕ b to c ⊕ d.
DMorphism block2(const DObject& a, const DObject& b, const DObject& c, const DObject& d, const DMorphism& m00,
                 const DMorphism& m01, const DMorphism& m10, const DMorphism& m11) {
  DMorphism out = DMorphism::zero(concat(a, b), concat(c, d));
  const std::size_t na = a.size();
  const std::size_t nc = c.size();
  for (std::size_t k = 0; k < out.target.size(); ++k)
    for (std::size_t j = 0; j < out.source.size(); ++j) {
      const bool top = k < nc, left = j < na;
      const DMorphism& m = top ? (left ? m00 : m01) : (left ? m10 : m11);
      out.entry(k, j) = m.entry(top ? k : k - nc, left ? j : j - na);
    }
  return out;
}

Vector flatten(const DMorphism& m) {
  Vector out;
  for (const auto& e : m.entries) out.insert(out.end(), e.begin(), e.end());
  return out;
}

std::vector<DMorphism> morphism_basis(const DObject& x, const DObject& y) {
  std::vector<DMorphism> out;
  for (std::size_t k = 0; k < y.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto sec = entry_sections(x.base, x.opens[j], y.opens[k]);
      for (const auto& b : sec.space.basis()) {
        DMorphism m = DMorphism::zero(x, y);
        m.entry(k, j) = b;
        out.push_back(std::move(m));
      }
    }
  return out;
}

/// Offset of point x inside an entry living on V ∩ W.
std::size_t entry_offset(const FinRingedSpace& s, Open v, Open w, std::size_t x) {
  std::size_t off = 0;
  for (std::size_t y : s.points_of(v & w)) {
    if (y == x) break;
    off += s.stalk(y)->dim();
  }
  return off;
}

}  // namespace

// ---------------------------------------------------------------------------
// DComplex

DComplex DComplex::zero(const SpacePtr& s) { return DComplex{s, 0, -1, {}, {}}; }

DComplex DComplex::single(const DObject& x, int degree) { return DComplex{x.base, degree, degree, {x}, {}}; }

DComplex DComplex::make(const SpacePtr& s, int lo, std::vector<DObject> components,
                        std::vector<DMorphism> differentials) {
  if (components.empty()) {
    if (!differentials.empty()) throw PreconditionError("DComplex: differentials without components");
    return zero(s);
  }
  if (differentials.size() + 1 != components.size())
    throw PreconditionError("DComplex: need one differential between consecutive components");
  for (const auto& c : components)
    if (c.base != s) throw PreconditionError("DComplex: component on another space");
  for (std::size_t i = 0; i < differentials.size(); ++i)
    if (!(differentials[i].source == components[i]) || !(differentials[i].target == components[i + 1]))
      throw PreconditionError("DComplex: differential " + std::to_string(lo + static_cast<int>(i)) +
                              " has the wrong shape");
  const int hi = lo + static_cast<int>(components.size()) - 1;
  return DComplex{s, lo, hi, std::move(components), std::move(differentials)};
}

DObject DComplex::object(int n) const { return in_window(n) ? components[n - lo] : zero_object(base); }

DMorphism DComplex::d(int n) const {
  if (n >= lo && n < hi) return differentials[n - lo];
  return DMorphism::zero(object(n), object(n + 1));
}

CheckReport DComplex::validate() const {
  CheckReport r;
  if (empty()) {
    if (!components.empty() || !differentials.empty()) r.fail("empty window with data");
    return r;
  }
  if (components.size() != static_cast<std::size_t>(hi - lo + 1) || differentials.size() + 1 != components.size()) {
    r.fail("window does not match the stored data");
    return r;
  }
  for (int n = lo; n < hi; ++n) {
    const auto& dn = differentials[n - lo];
    if (!(dn.source == object(n)) || !(dn.target == object(n + 1))) {
      r.fail("d^" + std::to_string(n) + " has the wrong shape");
      continue;
    }
    r.merge(dn.validate(), "d^" + std::to_string(n) + ": ");
  }
  if (!r.ok()) return r;
  for (int n = lo; n + 1 < hi; ++n)
    if (!compose(d(n + 1), d(n)).is_zero()) r.fail("d^" + std::to_string(n + 1) + " d^" + std::to_string(n) + " != 0");
  return r;
}

DComplex DComplex::trimmed() const {
  int a = lo, b = hi;
  while (a <= b && object(a).size() == 0) ++a;
  while (b >= a && object(b).size() == 0) --b;
  if (a > b) return zero(base);
  std::vector<DObject> comps;
  std::vector<DMorphism> diffs;
  for (int n = a; n <= b; ++n) comps.push_back(object(n));
  for (int n = a; n < b; ++n) diffs.push_back(d(n));
  return DComplex{base, a, b, std::move(comps), std::move(diffs)};
}

bool same_complex(const ComplexPtr& a, const ComplexPtr& b) { return a == b || (a && b && *a == *b); }

// ---------------------------------------------------------------------------
// HomElement

HomElement HomElement::zero(const ComplexPtr& e, const ComplexPtr& f, int degree) {
  if (e->base != f->base) throw PreconditionError("hom: complexes on different spaces");
  HomElement h{e, f, degree, {}};
  for (int p = e->lo; p <= e->hi; ++p) h.components.push_back(DMorphism::zero(e->object(p), f->object(p + degree)));
  return h;
}

HomElement HomElement::identity(const ComplexPtr& e) {
  HomElement h{e, e, 0, {}};
  for (const auto& x : e->components) h.components.push_back(DMorphism::identity(x));
  return h;
}

DMorphism HomElement::component(int p) const {
  if (source->in_window(p)) return components[p - source->lo];
  return DMorphism::zero(source->object(p), target->object(p + degree));
}

HomElement HomElement::operator+(const HomElement& o) const {
  if (degree != o.degree || !same_complex(source, o.source) || !same_complex(target, o.target))
    throw PreconditionError("HomElement +: different hom spaces");
  HomElement h = *this;
  for (std::size_t i = 0; i < components.size(); ++i) h.components[i] = components[i] + o.components[i];
  return h;
}

HomElement HomElement::operator-(const HomElement& o) const { return *this + o.negated(); }

HomElement HomElement::scaled(Scalar s) const {
  HomElement h = *this;
  for (auto& c : h.components) c = c.scaled(s);
  return h;
}

HomElement HomElement::negated() const { return scaled(source->base->p() - 1); }

bool HomElement::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](const DMorphism& m) { return m.is_zero(); });
}

CheckReport HomElement::validate() const {
  CheckReport r;
  if (source->base != target->base) r.fail("source and target on different spaces");
  if (components.size() != source->components.size()) {
    r.fail("one component per degree of the source window expected");
    return r;
  }
  for (int p = source->lo; p <= source->hi; ++p) {
    const auto& c = components[p - source->lo];
    if (!(c.source == source->object(p)) || !(c.target == target->object(p + degree))) {
      r.fail("component " + std::to_string(p) + " has the wrong shape");
      continue;
    }
    r.merge(c.validate(), "component " + std::to_string(p) + ": ");
  }
  return r;
}

HomElement compose(const HomElement& second, const HomElement& first) {
  if (!same_complex(first.target, second.source)) throw PreconditionError("compose: hom elements not composable");
  HomElement h = HomElement::zero(first.source, second.target, first.degree + second.degree);
  for (int p = first.source->lo; p <= first.source->hi; ++p)
    h.components[p - first.source->lo] =
        compose(second.component(p + first.degree), first.components[p - first.source->lo]);
  return h;
}

HomElement differential(const HomElement& phi) {
  const auto& e = *phi.source;
  const auto& f = *phi.target;
  const int n = phi.degree;
  HomElement h = HomElement::zero(phi.source, phi.target, n + 1);
  const Scalar s = sign(e.base->p(), n + 1);  // −(−1)^n
  for (int p = e.lo; p <= e.hi; ++p) {
    const DMorphism left = compose(f.d(p + n), phi.component(p));
    const DMorphism right = compose(phi.component(p + 1), e.d(p));
    h.components[p - e.lo] = left + right.scaled(s);
  }
  return h;
}

// ---------------------------------------------------------------------------
// HomSlice

HomSlice hom_slice(const ComplexPtr& e, const ComplexPtr& f, int n) {
  if (e->base != f->base) throw PreconditionError("hom_slice: complexes on different spaces");
  HomSlice s{e, f, n, {}, 0};
  for (int p = e->lo; p <= e->hi; ++p) {
    if (!f->in_window(p + n)) continue;
    const DObject x = e->object(p), y = f->object(p + n);
    for (std::size_t k = 0; k < y.size(); ++k)
      for (std::size_t j = 0; j < x.size(); ++j) {
        auto sec = entry_sections(e->base, x.opens[j], y.opens[k]);
        if (sec.dim() == 0) continue;
        const std::size_t d = sec.dim();
        s.blocks.push_back({p, k, j, std::move(sec.space), s.dim});
        s.dim += d;
      }
  }
  return s;
}

HomElement HomSlice::element(std::span<const Scalar> coords) const {
  if (coords.size() != dim) throw PreconditionError("HomSlice::element: wrong coordinate count");
  HomElement h = HomElement::zero(source, target, degree);
  for (const auto& b : blocks)
    h.components[b.p - source->lo].entry(b.k, b.j) = b.space.element(coords.subspan(b.offset, b.space.dim()));
  return h;
}

Vector HomSlice::coordinates(const HomElement& phi) const {
  if (phi.degree != degree || !same_complex(phi.source, source) || !same_complex(phi.target, target))
    throw PreconditionError("HomSlice::coordinates: element of another slice");
  Vector out(dim, 0);
  for (const auto& b : blocks) {
    const Vector c = b.space.coordinates(phi.components[b.p - source->lo].entry(b.k, b.j));
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(b.offset));
  }
  return out;
}

std::vector<HomElement> HomSlice::basis() const {
  std::vector<HomElement> out;
  for (std::size_t i = 0; i < dim; ++i) {
    Vector c(dim, 0);
    c[i] = 1;
    out.push_back(element(c));
  }
  return out;
}

Matrix slice_differential(const HomSlice& from, const HomSlice& to) {
  if (to.degree != from.degree + 1) throw PreconditionError("slice_differential: degrees do not match");
  Matrix m(from.source->base->p(), to.dim, from.dim);
  const auto basis = from.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) m.set_column(i, to.coordinates(differential(basis[i])));
  return m;
}

// ---------------------------------------------------------------------------
// shift and cone

DComplex shift(const DComplex& e, int m) {
  if (e.empty()) return DComplex::zero(e.base);
  DComplex out{e.base, e.lo - m, e.hi - m, e.components, {}};
  const Scalar s = sign(e.base->p(), m);
  for (const auto& d : e.differentials) out.differentials.push_back(d.scaled(s));
  return out;
}

Cone cone(const HomElement& phi, bool flip_sign) {
  if (phi.degree != 0) throw PreconditionError("cone: morphism must have degree 0");
  if (!differential(phi).is_zero()) throw PreconditionError("cone: morphism is not a cocycle");
  const auto& e = *phi.source;
  const auto& f = *phi.target;
  const auto& s = e.base;
  const std::uint32_t p = s->p();

  int lo = 0, hi = -1;
  bool any = false;
  auto widen = [&](int a, int b) {
    if (a > b) return;
    lo = any ? std::min(lo, a) : a;
    hi = any ? std::max(hi, b) : b;
    any = true;
  };
  widen(f.lo, f.hi);
  widen(e.lo - 1, e.hi - 1);

  std::vector<DObject> comps;
  std::vector<DMorphism> diffs;
  const Scalar corner = flip_sign ? 1 : p - 1;
  for (int n = lo; n <= hi; ++n) comps.push_back(concat(f.object(n), e.object(n + 1)));
  for (int n = lo; n < hi; ++n) {
    const DObject fn = f.object(n), en = e.object(n + 1), fn1 = f.object(n + 1), en1 = e.object(n + 2);
    diffs.push_back(block2(fn, en, fn1, en1, f.d(n), phi.component(n + 1), DMorphism::zero(fn, en1),
                           e.d(n + 1).scaled(corner)));
  }
  const ComplexPtr c = share(any ? DComplex{s, lo, hi, std::move(comps), std::move(diffs)} : DComplex::zero(s));
  const DObject z = zero_object(s);

  Cone out{c, HomElement::zero(phi.target, c, 0), HomElement::zero(c, phi.target, 0),
           HomElement::zero(phi.source, c, -1), HomElement::zero(c, phi.source, 1)};
  for (int n = f.lo; n <= f.hi; ++n) {
    const DObject fn = f.object(n), en = e.object(n + 1);
    out.in_f.components[n - f.lo] = block2(fn, z, fn, en, DMorphism::identity(fn), DMorphism::zero(z, fn),
                                           DMorphism::zero(fn, en), DMorphism::zero(z, en));
  }
  for (int n = e.lo; n <= e.hi; ++n) {
    const DObject fn = f.object(n - 1), en = e.object(n);
    out.in_e.components[n - e.lo] = block2(en, z, fn, en, DMorphism::zero(en, fn), DMorphism::zero(z, fn),
                                           DMorphism::identity(en), DMorphism::zero(z, en));
  }
  for (int n = c->lo; n <= c->hi; ++n) {
    const DObject fn = f.object(n), en = e.object(n + 1);
    out.pr_f.components[n - c->lo] = block2(fn, en, fn, z, DMorphism::identity(fn), DMorphism::zero(en, fn),
                                            DMorphism::zero(fn, z), DMorphism::zero(en, z));
    out.pr_e.components[n - c->lo] = block2(fn, en, en, z, DMorphism::zero(fn, en), DMorphism::identity(en),
                                            DMorphism::zero(fn, z), DMorphism::zero(en, z));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Homology

std::size_t stalk_dim(const DObject& x, std::size_t point) {
  const std::size_t d = x.base->stalk(point)->dim();
  std::size_t n = 0;
  for (const auto& v : x.opens)
    if (v.contains(point)) n += d;
  return n;
}

Matrix stalk_matrix(const DMorphism& m, std::size_t point) {
  const auto& s = *m.source.base;
  const auto& a = *s.stalk(point);
  const std::size_t d = a.dim();
  Matrix out(s.p(), stalk_dim(m.target, point), stalk_dim(m.source, point));
  std::size_t r = 0;
  for (std::size_t k = 0; k < m.target.size(); ++k) {
    const Open w = m.target.opens[k];
    if (!w.contains(point)) continue;
    std::size_t c = 0;
    for (std::size_t j = 0; j < m.source.size(); ++j) {
      const Open v = m.source.opens[j];
      if (!v.contains(point)) continue;
      const std::size_t off = entry_offset(s, v, w, point);
      const auto& e = m.entry(k, j);
      out.set_block(r, c, a.multiplication_matrix(std::span<const Scalar>(e).subspan(off, d)));
      c += d;
    }
    r += d;
  }
  return out;
}

bool Homology::acyclic() const {
  for (const auto& row : dims)
    for (auto v : row)
      if (v != 0) return false;
  return true;
}

std::size_t Homology::at(int n, std::size_t x) const {
  if (n < lo || n > hi) return 0;
  return dims[n - lo][x];
}

std::int64_t Homology::euler(std::size_t x) const {
  std::int64_t chi = 0;
  for (int n = lo; n <= hi; ++n) chi += (n % 2 == 0 ? 1 : -1) * static_cast<std::int64_t>(at(n, x));
  return chi;
}

Homology homology(const DComplex& e) {
  Homology h{e.lo, e.hi, {}};
  const std::size_t n_pts = e.base->size();
  for (int n = e.lo; n <= e.hi; ++n) {
    std::vector<std::size_t> row;
    for (std::size_t x = 0; x < n_pts; ++x) {
      const std::size_t out_rank = stalk_matrix(e.d(n), x).rank();
      const std::size_t in_rank = stalk_matrix(e.d(n - 1), x).rank();
      row.push_back(stalk_dim(e.object(n), x) - out_rank - in_rank);
    }
    h.dims.push_back(std::move(row));
  }
  return h;
}

bool is_acyclic(const DComplex& e) { return homology(e).acyclic(); }

SheafComplex SheafComplex::single(const SheafPtr& m, int degree) { return SheafComplex{m->base(), degree, {m}, {}}; }

CheckReport SheafComplex::validate() const {
  CheckReport r;
  if (!terms.empty() && d.size() + 1 != terms.size()) {
    r.fail("need one map between consecutive terms");
    return r;
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::string tag = "d^" + std::to_string(lo + static_cast<int>(i)) + ": ";
    if (!same_sheaf(d[i].source, terms[i]) || !same_sheaf(d[i].target, terms[i + 1])) {
      r.fail(tag + "wrong source or target");
      continue;
    }
    r.merge(d[i].validate(), tag);
  }
  if (!r.ok()) return r;
  for (std::size_t i = 0; i + 1 < d.size(); ++i)
    if (!compose(d[i + 1], d[i]).is_zero()) r.fail("d∘d != 0 at degree " + std::to_string(lo + static_cast<int>(i)));
  return r;
}

SheafComplex realize(const DComplex& e) {
  SheafComplex out{e.base, e.empty() ? 0 : e.lo, {}, {}};
  for (int n = e.lo; n < e.hi; ++n) out.d.push_back(to_sheaf(e.d(n)));
  for (int n = e.lo; n <= e.hi; ++n) {
    if (n < e.hi)
      out.terms.push_back(out.d[n - e.lo].source);
    else if (!out.d.empty())
      out.terms.push_back(out.d.back().target);
    else
      out.terms.push_back(to_sheaf(e.object(n)).sum);
  }
  return out;
}

Homology homology(const SheafComplex& e) {
  Homology h{e.lo, e.hi(), {}};
  const std::size_t n_pts = e.base->size();
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    std::vector<std::size_t> row;
    for (std::size_t x = 0; x < n_pts; ++x) {
      const std::size_t out_rank = i < e.d.size() ? e.d[i].components[x].rank() : 0;
      const std::size_t in_rank = i > 0 ? e.d[i - 1].components[x].rank() : 0;
      row.push_back(e.terms[i]->stalk(x).dim() - out_rank - in_rank);
    }
    h.dims.push_back(std::move(row));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Perfectness

std::optional<bool> modules_isomorphic(const FinModule& m, const FinModule& n) {
  if (m.dim() != n.dim()) return false;
  if (m.dim() == 0) return true;
  const auto basis = hom_modules(m, n);
  if (basis.empty()) return false;
  const std::uint32_t p = m.p();
  if (element_count(p, basis.size()) > caps().max_enumeration) return std::nullopt;
  bool found = false;
  for_each_element(p, basis.size(), [&](const Vector& c) {
    if (found) return;
    Matrix acc(p, n.dim(), m.dim());
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) acc = acc + basis[i].matrix.scaled(c[i]);
    if (acc.rank() == m.dim()) found = true;
  });
  return found;
}

namespace {

struct LocalComplex {
  AlgebraPtr ring;
  int lo = 0;
  std::vector<FinModule> terms;
  std::vector<Matrix> d;
};

LocalComplex localize_complex(const SheafComplex& e, std::size_t x, const Localization& loc) {
  LocalComplex out{loc.algebra, e.lo, {}, {}};
  const auto& r = loc.algebra;
  std::vector<Subspace> images;
  for (const auto& t : e.terms) {
    const FinModule& m = t->stalk(x);
    const Subspace img = Subspace::column_span(m.action_of(loc.idempotent));
    const Matrix basis = img.basis_matrix();
    std::vector<Matrix> act;
    for (std::size_t i = 0; i < r->dim(); ++i)
      act.push_back(img.coordinates(m.action_of(loc.inclusion.column(i)) * basis));
    out.terms.emplace_back(r, img.dim(), std::move(act));
    images.push_back(img);
  }
  for (std::size_t i = 0; i < e.d.size(); ++i)
    out.d.push_back(images[i + 1].coordinates(e.d[i].components[x] * images[i].basis_matrix()));
  return out;
}

FinModule direct_sum_module(const AlgebraPtr& r, const FinModule& c, std::size_t free_rank) {
  std::vector<Matrix> act;
  for (std::size_t i = 0; i < r->dim(); ++i)
    act.push_back(Matrix::block_diagonal(
        r->p(), {c.basis_action(i), Matrix::kron(Matrix::identity(r->p(), free_rank), r->basis_action(i))}));
  return FinModule(r, c.dim() + free_rank * r->dim(), std::move(act));
}

LocalResolution resolve_local(const LocalComplex& c, std::size_t depth) {
  const auto& r = c.ring;
  const std::uint32_t p = r->p();
  const std::size_t dr = r->dim();
  const int lo = c.lo;
  const int hi = lo + static_cast<int>(c.terms.size()) - 1;
  const Subspace maximal = nilradical(*r);

  auto term = [&](int n) { return (n >= lo && n <= hi) ? c.terms[n - lo] : FinModule::zero(r); };
  auto dc = [&](int n) {
    if (n >= lo && n < hi) return c.d[n - lo];
    return Matrix(p, term(n + 1).dim(), term(n).dim());
  };

  LocalResolution out;
  out.top = hi;
  std::map<int, std::size_t> rank;
  std::map<int, Matrix> u, dp;
  auto rank_at = [&](int n) { return rank.contains(n) ? rank[n] : std::size_t{0}; };
  auto u_at = [&](int n) { return u.contains(n) ? u[n] : Matrix(p, term(n).dim(), 0); };
  auto dp_at = [&](int n) { return dp.contains(n) ? dp[n] : Matrix(p, rank_at(n + 1) * dr, rank_at(n) * dr); };
  std::vector<std::pair<int, FinModule>> syzygies;

  for (int n = hi;; --n) {
    const FinModule cn = term(n);
    const std::size_t cd = cn.dim(), cd1 = term(n + 1).dim();
    const std::size_t pr1 = rank_at(n + 1) * dr, pr2 = rank_at(n + 2) * dr;
    Matrix big(p, cd1 + pr2, cd + pr1);
    big.set_block(0, 0, dc(n));
    big.set_block(0, cd, u_at(n + 1));
    big.set_block(cd1, cd, dp_at(n + 1).negated());
    const Subspace z = Subspace::column_span(kernel(big));
    const FinModule cone_mod = direct_sum_module(r, cn, rank_at(n + 1));

    std::vector<Vector> rel;
    const Matrix below = dc(n - 1);
    for (std::size_t j = 0; j < below.cols(); ++j) {
      Vector v = below.column(j);
      v.resize(cd + pr1, 0);
      rel.push_back(std::move(v));
    }
    for (const auto& m : maximal.basis()) {
      const Matrix act = cone_mod.action_of(m);
      for (const auto& b : z.basis()) rel.push_back(act.apply(b));
    }
    Subspace covered = Subspace::span(p, cd + pr1, rel);
    std::vector<Vector> gens;
    for (const auto& b : z.basis()) {
      if (covered.contains(b)) continue;
      gens.push_back(b);
      covered = covered.sum(Subspace::span(p, cd + pr1, {b}));
    }

    if (n <= lo) {
      out.syzygy_dims.push_back(z.dim());
      if (z.dim() == 0) {
        out.terminated = true;
        out.reason = "kernel vanishes in degree " + std::to_string(n);
        return out;
      }
      if (z.dim() == gens.size() * dr) {
        out.ranks.push_back(gens.size());
        out.terminated = true;
        out.reason = "kernel is free in degree " + std::to_string(n);
        return out;
      }
      const FinModule zmod = submodule(cone_mod, z);
      if (n < lo)
        for (const auto& [m, earlier] : syzygies)
          if (modules_isomorphic(zmod, earlier).value_or(false)) {
            out.reason = "kernel in degree " + std::to_string(n) + " repeats degree " + std::to_string(m);
            return out;
          }
      if (n <= lo - static_cast<int>(depth)) {
        out.reason = "depth " + std::to_string(depth) + " exhausted";
        return out;
      }
      syzygies.emplace_back(n, zmod);
    }

    rank[n] = gens.size();
    out.ranks.push_back(gens.size());
    Matrix un(p, cd, gens.size() * dr), dpn(p, pr1, gens.size() * dr);
    for (std::size_t g = 0; g < gens.size(); ++g)
      for (std::size_t i = 0; i < dr; ++i) {
        const Vector col = cone_mod.basis_action(i).apply(gens[g]);
        un.set_column(g * dr + i, std::span<const Scalar>(col).subspan(0, cd));
        Vector low(col.begin() + static_cast<std::ptrdiff_t>(cd), col.end());
        dpn.set_column(g * dr + i, scale(PrimeField{p}, p - 1, low));
      }
    u[n] = std::move(un);
    dp[n] = std::move(dpn);
  }
}

}  // namespace

Perfectness is_perfect(const SheafComplex& e, std::size_t depth) {
  Perfectness out{true, depth, {}, {}};
  if (e.terms.empty()) return out;
  for (std::size_t x = 0; x < e.base->size(); ++x) {
    const AlgebraPtr& a = e.base->stalk(x);
    for (const auto& idem : enumerate_idempotents_and_primes(*a).primitive) {
      const Localization loc = corner_algebra(a, idem);
      LocalResolution res = resolve_local(localize_complex(e, x, loc), depth);
      res.point = x;
      res.idempotent = idem;
      if (!res.terminated && out.perfect) {
        out.perfect = false;
        out.reason = "point " + e.base->points()[x] + ": " + res.reason;
      }
      out.witnesses.push_back(std::move(res));
    }
  }
  return out;
}

Perfectness is_perfect(const DComplex& e, std::size_t depth) { return is_perfect(realize(e), depth); }

// ---------------------------------------------------------------------------
// H⁰

Vector H0::class_of(const HomElement& phi) const {
  const Vector v = slice.coordinates(phi);
  if (!cocycles.contains(v)) throw PreconditionError("class_of: not a cocycle");
  std::vector<Vector> cols = representatives;
  for (const auto& b : boundaries.basis()) cols.push_back(b);
  const auto sol = solve(Matrix::from_columns(boundaries.p(), slice.dim, cols), v);
  if (!sol) throw InternalError("class_of: cocycle outside representatives + boundaries");
  return Vector(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(representatives.size()));
}

H0 h0_hom(const ComplexPtr& e, const ComplexPtr& f) {
  const std::uint32_t p = e->base->p();
  HomSlice s0 = hom_slice(e, f, 0);
  const HomSlice sm = hom_slice(e, f, -1), s1 = hom_slice(e, f, 1);
  H0 h{std::move(s0), {}, {}, {}};
  h.cocycles = Subspace::column_span(kernel(slice_differential(h.slice, s1)));
  h.boundaries = Subspace::column_span(slice_differential(sm, h.slice));
  Subspace covered = h.boundaries;
  for (const auto& z : h.cocycles.basis()) {
    if (covered.contains(z)) continue;
    h.representatives.push_back(z);
    covered = covered.sum(Subspace::span(p, h.slice.dim, {z}));
  }
  return h;
}

// ---------------------------------------------------------------------------
// f⋆ on complexes

DComplex apply_f_star(const Rectifier& r, const DComplex& e) {
  const auto& t = r.map().source;
  if (e.base != r.map().target) throw PreconditionError("apply_f_star: complex over another space");
  if (e.empty()) return DComplex::zero(t);
  DComplex out{t, e.lo, e.hi, {}, {}};
  for (const auto& x : e.components) out.components.push_back(r.object(x));
  for (const auto& d : e.differentials) out.differentials.push_back(r.morphism(d));
  return out;
}

HomElement apply_f_star(const Rectifier& r, const HomElement& phi) {
  const ComplexPtr e = share(apply_f_star(r, *phi.source));
  const ComplexPtr f = same_complex(phi.source, phi.target) ? e : share(apply_f_star(r, *phi.target));
  HomElement out{e, f, phi.degree, {}};
  for (const auto& c : phi.components) out.components.push_back(r.morphism(c));
  return out;
}

DComplex apply_f_star(const RingedMap& f, const DComplex& e) { return apply_f_star(Rectifier(f), e); }

HomElement apply_f_star(const RingedMap& f, const HomElement& phi) { return apply_f_star(Rectifier(f), phi); }

// ---------------------------------------------------------------------------
// Flatness

namespace {

FinModule free_module(const AlgebraPtr& a, std::size_t rank) {
  std::vector<Matrix> act;
  for (std::size_t i = 0; i < a->dim(); ++i)
    act.push_back(Matrix::kron(Matrix::identity(a->p(), rank), a->basis_action(i)));
  return FinModule(a, rank * a->dim(), std::move(act));
}

/// (f ⊗ 1) between two tensor products with the same right factor.
Matrix tensor_map(const TensorProduct& from, const TensorProduct& to, const Matrix& f) {
  const Matrix id = Matrix::identity(f.p(), from.right_dim);
  return to.quotient.projection() * Matrix::kron(f, id) * from.quotient.lift();
}

}  // namespace

CheckReport check_flatness(const SpacePtr& s, Open v, std::mt19937_64& rng, std::size_t samples) {
  CheckReport r;
  const std::uint32_t p = s->p();
  for (std::size_t x = 0; x < s->size(); ++x) {
    const AlgebraPtr& a = s->stalk(x);
    const FinModule flat = v.contains(x) ? FinModule::regular(a) : FinModule::zero(a);
    for (std::size_t i = 0; i < samples; ++i) {
      // M = coker(A^ra -> A^rb), K = image of a random endomorphism, Q = M / K
      const std::size_t ra = 1 + rng() % 2, rb = 1 + rng() % 2;
      Matrix pres(p, rb * a->dim(), ra * a->dim());
      for (std::size_t b = 0; b < rb; ++b)
        for (std::size_t c = 0; c < ra; ++c)
          pres.set_block(b * a->dim(), c * a->dim(), a->multiplication_matrix(random_vector(p, a->dim(), rng)));
      const FinModule m = quotient_module(free_module(a, rb), QuotientSpace(Subspace::column_span(pres)));
      const auto ends = hom_modules(m, m);
      Matrix endo(p, m.dim(), m.dim());
      for (const auto& h : ends) endo = endo + h.matrix.scaled(static_cast<Scalar>(rng() % p));
      const Subspace img = Subspace::column_span(endo);
      const FinModule k = submodule(m, img);
      const QuotientSpace qs(img);
      const FinModule q = quotient_module(m, qs);
      const Matrix inc = img.basis_matrix(), proj = qs.projection();

      const TensorProduct tk = tensor_modules(k, flat), tm = tensor_modules(m, flat), tq = tensor_modules(q, flat);
      const Matrix i2 = tensor_map(tk, tm, inc), p2 = tensor_map(tm, tq, proj);
      const std::string tag = s->points()[x] + " sample " + std::to_string(i) + ": ";
      if (!(p2 * i2).is_zero()) r.fail(tag + "composite is not zero");
      if (i2.rank() != tk.module.dim()) r.fail(tag + "left map is not injective");
      if (p2.rank() != tq.module.dim()) r.fail(tag + "right map is not surjective");
      if (i2.rank() + p2.rank() != tm.module.dim()) r.fail(tag + "not exact in the middle");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sampling

DComplex random_dcomplex(const SpacePtr& s, std::mt19937_64& rng, int lo, std::size_t length, std::size_t max_len) {
  if (length == 0) return DComplex::zero(s);
  const std::uint32_t p = s->p();
  std::vector<DObject> comps;
  for (std::size_t i = 0; i < length; ++i) comps.push_back(random_dobject(s, rng, max_len));
  std::vector<DMorphism> diffs;
  for (std::size_t i = 0; i + 1 < length; ++i) {
    if (i == 0) {
      diffs.push_back(random_dmorphism(comps[0], comps[1], rng));
      continue;
    }
    const auto basis = morphism_basis(comps[i], comps[i + 1]);
    DMorphism d = DMorphism::zero(comps[i], comps[i + 1]);
    if (!basis.empty()) {
      const std::size_t rows = flatten(DMorphism::zero(comps[i - 1], comps[i + 1])).size();
      Matrix eq(p, rows, basis.size());
      for (std::size_t b = 0; b < basis.size(); ++b) eq.set_column(b, flatten(compose(basis[b], diffs.back())));
      const Matrix ker = kernel(eq);
      const Vector coeffs = combine_columns(ker, random_vector(p, ker.cols(), rng));
      for (std::size_t b = 0; b < basis.size(); ++b)
        if (coeffs[b] != 0) d = d + basis[b].scaled(coeffs[b]);
    }
    diffs.push_back(std::move(d));
  }
  return DComplex::make(s, lo, std::move(comps), std::move(diffs));
}

HomElement random_hom_element(const ComplexPtr& e, const ComplexPtr& f, int n, std::mt19937_64& rng) {
  const HomSlice s = hom_slice(e, f, n);
  return s.element(random_vector(e->base->p(), s.dim, rng));
}

HomElement random_cocycle(const ComplexPtr& e, const ComplexPtr& f, std::mt19937_64& rng) {
  const HomSlice s0 = hom_slice(e, f, 0), s1 = hom_slice(e, f, 1);
  const Matrix ker = kernel(slice_differential(s0, s1));
  if (ker.cols() == 0) return HomElement::zero(e, f, 0);
  return s0.element(combine_columns(ker, random_vector(e->base->p(), ker.cols(), rng)));
}

}  // namespace dgperf
