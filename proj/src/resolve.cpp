#include "dgperf/resolve.hpp"

#include <algorithm>
#include <map>

#include "dgperf/caps.hpp"

namespace dgperf {

// ---------------------------------------------------------------------------
// Covering epimorphism

CoverResult cover_epi(const SheafMap& pi) {
  if (!pi.is_epi()) throw PreconditionError("cover_epi: map is not an epimorphism");
  const auto& n = pi.source;
  const SpacePtr& s = n->base();
  const std::uint32_t p = s->p();

  CoverResult out;
  for (const Open v : opens(*s)) {
    const auto sec_n = sections(*n, v);
    const Matrix a = sections_map(pi, v) * sec_n.space.basis_matrix();
    const Subspace im = Subspace::column_span(a);
    const Subspace ker = Subspace::column_span(kernel(a));
    if (element_count(p, im.dim()) > caps().max_enumeration)
      throw SizeError("cover_epi: image over " + s->describe(v) + " is too large to enumerate");
    std::size_t count = 0;
    for_each_element(p, im.dim(), [&](const Vector& coords) {
      const Vector sv = im.element(coords);
      const auto c0 = solve(a, sv);
      if (!c0) throw InternalError("cover_epi: image element without preimage");
      out.index.push_back(v);
      out.chosen.push_back(sec_n.space.element(ker.reduce(*c0)));
      out.images.push_back(sv);
      ++count;
    });
    out.image_counts.emplace_back(v, count);
  }

  out.object = DObject{s, out.index};
  const DirectSum ds = to_sheaf(out.object);
  out.to_source = SheafMap::zero(ds.sum, n);
  for (std::size_t j = 0; j < out.size(); ++j)
    out.to_source = out.to_source + compose(sigma_inverse(s, out.index[j], n, out.chosen[j]), ds.projections[j]);
  out.composite = compose(pi, out.to_source);
  if (!out.composite.is_epi()) throw InternalError("cover_epi: composite is not an epimorphism");
  return out;
}

std::vector<std::size_t> essential_indices(const CoverResult& c, const SheafMap& pi) {
  const auto& s = *c.object.base;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < c.size(); ++j) {
    bool still_epi = true;
    for (std::size_t x = 0; x < s.size() && still_epi; ++x) {
      const Matrix& comp = c.composite.components[x];
      const std::size_t d = s.stalk(x)->dim();
      std::vector<std::size_t> keep;
      std::size_t off = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.index[i].contains(x)) continue;
        if (i != j)
          for (std::size_t k = 0; k < d; ++k) keep.push_back(off + k);
        off += d;
      }
      if (comp.select_columns(keep).rank() != pi.target->stalk(x).dim()) still_epi = false;
    }
    if (!still_epi) out.push_back(j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resolution

SheafComplex sheaf_cone(const SheafComplex& f, const SheafComplex& e, const std::vector<SheafMap>& u) {
  const SpacePtr& s = e.base;
  const std::uint32_t p = s->p();
  const auto zero = std::make_shared<const Sheaf>(Sheaf::zero(s));
  auto term = [&](const SheafComplex& c, int n) {
    return (n >= c.lo && n <= c.hi()) ? c.terms[n - c.lo] : zero;
  };
  auto diff = [&](const SheafComplex& c, int n) {
    if (n >= c.lo && n < c.hi()) return c.d[n - c.lo];
    return SheafMap::zero(term(c, n), term(c, n + 1));
  };
  auto u_at = [&](int n) {
    if (n >= f.lo && n <= f.hi()) return u[n - f.lo];
    return SheafMap::zero(term(f, n), term(e, n));
  };

  int lo = 0, hi = -1;
  bool any = false;
  auto widen = [&](int a, int b) {
    if (a > b) return;
    lo = any ? std::min(lo, a) : a;
    hi = any ? std::max(hi, b) : b;
    any = true;
  };
  widen(e.lo, e.hi());
  widen(f.lo - 1, f.hi() - 1);
  SheafComplex out{s, lo, {}, {}};
  if (!any) return out;

  std::vector<DirectSum> sums;
  for (int n = lo; n <= hi + 1; ++n) sums.push_back(direct_sum(s, {term(e, n), term(f, n + 1)}));
  for (int n = lo; n <= hi; ++n) out.terms.push_back(sums[n - lo].sum);
  for (int n = lo; n < hi; ++n) {
    const auto& a = sums[n - lo];
    const auto& b = sums[n - lo + 1];
    const SheafMap top = compose(diff(e, n), a.projections[0]) + compose(u_at(n + 1), a.projections[1]);
    const SheafMap bottom = compose(diff(f, n + 1), a.projections[1]).scaled(p - 1);
    out.d.push_back(compose(b.inclusions[0], top) + compose(b.inclusions[1], bottom));
  }
  return out;
}

SheafMap ResolutionResult::map_at(int n) const {
  if (complex->in_window(n)) return map[n - complex->lo];
  const auto& s = complex->base;
  const SheafPtr e = (n >= target.lo && n <= target.hi()) ? target.terms[n - target.lo]
                                                           : std::make_shared<const Sheaf>(Sheaf::zero(s));
  return SheafMap::zero(to_sheaf(complex->object(n)).sum, e);
}

namespace {

/// O_x-submodule of M_x generated by gens.
Subspace generated(const FinModule& m, const std::vector<Vector>& gens) {
  std::vector<Vector> all;
  for (const auto& g : gens)
    for (const auto& a : m.action()) all.push_back(a.apply(g));
  return Subspace::span(m.p(), m.dim(), all);
}

}  // namespace

ResolutionResult resolve(const SheafComplex& e, std::size_t depth) {
  const SpacePtr& s = e.base;
  const std::uint32_t p = s->p();
  const auto zero = std::make_shared<const Sheaf>(Sheaf::zero(s));
  const int lo = e.lo, hi = e.hi();

  auto term = [&](int n) { return (n >= lo && n <= hi) ? e.terms[n - lo] : zero; };
  auto d_e = [&](int n) {
    if (n >= lo && n < hi) return e.d[n - lo];
    return SheafMap::zero(term(n), term(n + 1));
  };

  std::map<int, DObject> objects;
  std::map<int, SheafMap> u;
  std::map<int, DMorphism> d_f;
  auto object_at = [&](int n) { return objects.contains(n) ? objects.at(n) : DObject{s, {}}; };
  auto sum_at = [&](int n) { return to_sheaf(object_at(n)).sum; };
  auto u_at = [&](int n) { return u.contains(n) ? u.at(n) : SheafMap::zero(sum_at(n), term(n)); };
  auto d_f_at = [&](int n) {
    return d_f.contains(n) ? to_sheaf(d_f.at(n)) : SheafMap::zero(sum_at(n), sum_at(n + 1));
  };

  // closed points first, so generators at a point also serve its generizations
  std::vector<std::size_t> order(s->size());
  for (std::size_t x = 0; x < order.size(); ++x) order[x] = x;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s->minimal_open(a).size() > s->minimal_open(b).size();
  });

  ResolutionResult out;
  out.target = e;
  out.depth = depth;
  int last = hi;
  const int floor = lo - static_cast<int>(depth);

  for (int n = hi; n >= floor && !e.terms.empty(); --n) {
    last = n;
    const DirectSum k = direct_sum(s, {term(n), sum_at(n + 1)});
    const DirectSum t = direct_sum(s, {term(n + 1), sum_at(n + 2)});
    const SheafMap top = compose(d_e(n), k.projections[0]) + compose(u_at(n + 1), k.projections[1]);
    const SheafMap bottom = compose(d_f_at(n + 1), k.projections[1]).scaled(p - 1);
    const SheafMap big = compose(t.inclusions[0], top) + compose(t.inclusions[1], bottom);
    const SheafMap iota = kernel_of(big);
    const SheafPtr z = iota.source;
    if (n <= lo && z->total_dim() == 0) {
      out.complete = true;
      break;
    }
    const SheafMap boundary = compose(k.inclusions[0], d_e(n - 1));

    std::vector<std::pair<std::size_t, Vector>> gens;
    for (std::size_t x : order) {
      const FinModule& zx = z->stalk(x);
      std::vector<Vector> have;
      const Matrix& bx = boundary.components[x];
      for (std::size_t c = 0; c < bx.cols(); ++c) {
        const auto coords = solve(iota.components[x], bx.column(c));
        if (!coords) throw InternalError("resolve: boundary outside the kernel");
        have.push_back(*coords);
      }
      for (const auto& [y, g] : gens)
        if (s->leq(y, x)) have.push_back(z->comparison(y, x).apply(g));
      Subspace covered = generated(zx, have);
      for (std::size_t i = 0; i < zx.dim(); ++i) {
        Vector ei(zx.dim(), 0);
        ei[i] = 1;
        if (covered.contains(ei)) continue;
        gens.emplace_back(x, ei);
        have.push_back(ei);
        covered = generated(zx, have);
      }
    }

    DObject obj{s, {}};
    for (const auto& g : gens) obj.opens.push_back(s->minimal_open(g.first));
    const DirectSum fs = to_sheaf(obj);
    SheafMap into_k = SheafMap::zero(fs.sum, k.sum);
    for (std::size_t j = 0; j < gens.size(); ++j) {
      const auto& [y, g] = gens[j];
      const Open uy = s->minimal_open(y);
      Vector family;
      for (std::size_t x : s->points_of(uy)) {
        const Vector c = z->comparison(y, x).apply(g);
        family.insert(family.end(), c.begin(), c.end());
      }
      into_k = into_k + compose(compose(iota, sigma_inverse(s, uy, z, family)), fs.projections[j]);
    }
    objects[n] = obj;
    u[n] = compose(k.projections[0], into_k);
    d_f[n] = from_sheaf_map(obj, object_at(n + 1), compose(k.projections[1], into_k).scaled(p - 1));
  }

  // assemble F over the stages that produced objects
  DComplex f = DComplex::zero(s);
  if (!objects.empty()) {
    const int f_lo = objects.begin()->first, f_hi = objects.rbegin()->first;
    std::vector<DObject> comps;
    std::vector<DMorphism> diffs;
    for (int n = f_lo; n <= f_hi; ++n) comps.push_back(object_at(n));
    for (int n = f_lo; n < f_hi; ++n) diffs.push_back(d_f.at(n));
    f = DComplex::make(s, f_lo, std::move(comps), std::move(diffs)).trimmed();
  }
  out.complex = share(std::move(f));
  for (int n = out.complex->lo; n <= out.complex->hi; ++n) out.map.push_back(u_at(n));

  out.valid_hi = hi;
  out.valid_lo = last;
  if (e.terms.empty()) {
    out.complete = true;
    out.valid_lo = lo;
  }
  out.note = out.complete ? "complete at stage " + std::to_string(last)
                          : "depth " + std::to_string(depth) + " exhausted at stage " + std::to_string(last);

  const SheafComplex fr = realize(*out.complex);
  const SheafComplex c = sheaf_cone(fr, e, out.map);
  out.cone_homology = homology(c);
  for (int n = out.valid_lo; n <= out.valid_hi; ++n)
    for (std::size_t x = 0; x < s->size(); ++x)
      if (out.cone_homology.at(n, x) != 0)
        throw InternalError("resolve: cone homology in degree " + std::to_string(n) + " at " + s->points()[x]);
  if (out.complete && !out.cone_homology.acyclic()) throw InternalError("resolve: complete but cone not acyclic");
  return out;
}

ResolutionResult resolve(const ComplexPtr& e, std::size_t depth) {
  ResolutionResult out = resolve(realize(*e), depth);
  HomElement h = HomElement::zero(out.complex, e, 0);
  for (int n = out.complex->lo; n <= out.complex->hi; ++n)
    h.components[n - out.complex->lo] = from_sheaf_map(out.complex->object(n), e->object(n), out.map_at(n));
  out.hom = std::move(h);
  return out;
}

// ---------------------------------------------------------------------------
// Cardinality audit

CardinalityAudit cardinality_audit(const SpacePtr& s, const std::vector<std::pair<std::string, SheafPtr>>& sheaves,
                                   const SpecSpace* spec_data) {
  CardinalityAudit out;
  const auto os = opens(*s);
  out.open_count = os.size();
  if (os.size() > (std::size_t{1} << s->size())) out.checks.fail("more opens than subsets");
  for (const auto& [name, m] : sheaves) {
    if (m->base() != s) {
      out.checks.fail(name + ": sheaf on another space");
      continue;
    }
    for (const Open u : os) {
      AuditRow row{name, u, sections(*m, u).dim(), std::nullopt};
      const std::uint64_t c = element_count(s->p(), row.dim);
      if (c <= (std::uint64_t{1} << 62)) row.count = c;
      out.rows.push_back(std::move(row));
    }
  }
  if (spec_data) out.checks.merge(check_distinguished_cover(*spec_data), "distinguished cover: ");
  return out;
}

}  // namespace dgperf
