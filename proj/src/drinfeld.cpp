#include "dgperf/drinfeld.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "dgperf/caps.hpp"

namespace dgperf {

namespace {

Scalar sign_of(std::uint32_t p, int e) { return (((e % 2) + 2) % 2 == 0) ? 1 : p - 1; }

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

Vector kron(const Vector& a, const Vector& b, const PrimeField& f) {
  Vector out(a.size() * b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = f.mul(a[i], b[j]);
  }
  return out;
}

/// Replaces tensor factor i by m (rows of m become the new factor).
Vector apply_factor(const Vector& t, const std::vector<std::size_t>& dims, std::size_t i, const Matrix& m,
                    const PrimeField& f) {
  std::size_t a = 1, b = 1;
  for (std::size_t k = 0; k < i; ++k) a *= dims[k];
  for (std::size_t k = i + 1; k < dims.size(); ++k) b *= dims[k];
  const std::size_t c = dims[i], r = m.rows();
  Vector out(a * r * b, 0);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t y = 0; y < c; ++y)
      for (std::size_t z = 0; z < b; ++z) {
        const Scalar v = t[(x * c + y) * b + z];
        if (v == 0) continue;
        for (std::size_t row = 0; row < r; ++row) {
          const Scalar w = m(row, y);
          if (w == 0) continue;
          Scalar& o = out[(x * r + row) * b + z];
          o = f.add(o, f.mul(v, w));
        }
      }
  return out;
}

/// Replaces factors i and i+1 by m applied to their tensor product.
Vector contract_pair(const Vector& t, const std::vector<std::size_t>& dims, std::size_t i, const Matrix& m,
                     const PrimeField& f) {
  std::vector<std::size_t> merged;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (k == i + 1) continue;
    merged.push_back(k == i ? dims[i] * dims[i + 1] : dims[k]);
  }
  return apply_factor(t, merged, i, m, f);
}

void accumulate(std::map<Sector, Vector>& terms, const Sector& s, const Vector& v, const PrimeField& f) {
  if (is_zero(v)) return;
  auto it = terms.find(s);
  if (it == terms.end()) {
    terms.emplace(s, v);
    return;
  }
  it->second = add(f, it->second, v);
  if (is_zero(it->second)) terms.erase(it);
}

std::size_t entry_offset(const FinRingedSpace& s, Open v, Open w, std::size_t x) {
  std::size_t off = 0;
  for (std::size_t y : s.points_of(v & w)) {
    if (y == x) break;
    off += s.stalk(y)->dim();
  }
  return off;
}

}  // namespace

std::string canonical_string(const DComplex& e) {
  std::ostringstream out;
  out << e.lo << ':' << e.hi;
  for (const auto& c : e.components) {
    out << "|o";
    for (const auto& v : c.opens) out << ',' << v.mask;
  }
  for (const auto& d : e.differentials) {
    out << "|d";
    for (const auto& entry : d.entries) {
      out << ';';
      for (auto x : entry) out << x << ',';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// QuotientMorphism

std::size_t QuotientMorphism::eps_degree() const {
  std::size_t n = 0;
  for (const auto& [s, v] : terms) n = std::max(n, s.eps_degree());
  return n;
}

QuotientMorphism QuotientMorphism::operator+(const QuotientMorphism& o) const {
  if (source != o.source || target != o.target || degree != o.degree)
    throw PreconditionError("QuotientMorphism +: different hom complexes");
  QuotientMorphism out = *this;
  const PrimeField f{p};
  for (const auto& [s, v] : o.terms) accumulate(out.terms, s, v, f);
  return out;
}

QuotientMorphism QuotientMorphism::operator-(const QuotientMorphism& o) const { return *this + o.scaled(p - 1); }

QuotientMorphism QuotientMorphism::scaled(Scalar s) const {
  QuotientMorphism out{p, source, target, degree, {}};
  if (s % p == 0) return out;
  const PrimeField f{p};
  for (const auto& [sec, v] : terms) out.terms.emplace(sec, scale(f, s, v));
  return out;
}

// ---------------------------------------------------------------------------
// Registry

std::size_t DrinfeldQuotient::object(const ComplexPtr& e) {
  if (e->base != base_) throw PreconditionError("DrinfeldQuotient: complex over another space");
  std::string key = canonical_string(*e);
  std::lock_guard lock(mutex_);
  if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  const std::size_t id = objects_.size();
  objects_.push_back(e);
  keys_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::size_t DrinfeldQuotient::adjoin_acyclic(const ComplexPtr& u) {
  if (!is_acyclic(*u)) throw PreconditionError("adjoin_acyclic: complex is not acyclic");
  const std::size_t id = object(u);
  std::lock_guard lock(mutex_);
  acyclic_.insert(id);
  return id;
}

bool DrinfeldQuotient::is_acyclic_id(std::size_t id) const {
  std::lock_guard lock(mutex_);
  return acyclic_.contains(id);
}

std::vector<std::size_t> DrinfeldQuotient::acyclics() const {
  std::lock_guard lock(mutex_);
  return {acyclic_.begin(), acyclic_.end()};
}

ComplexPtr DrinfeldQuotient::complex(std::size_t id) const {
  std::lock_guard lock(mutex_);
  return objects_.at(id);
}

std::string DrinfeldQuotient::serialization(std::size_t id) const {
  std::lock_guard lock(mutex_);
  return keys_.at(id);
}

std::size_t DrinfeldQuotient::size() const {
  std::lock_guard lock(mutex_);
  return objects_.size();
}

const HomSlice& DrinfeldQuotient::slice(std::size_t from, std::size_t to, int degree) {
  const auto key = std::make_tuple(from, to, degree);
  {
    std::lock_guard lock(mutex_);
    if (auto it = slices_.find(key); it != slices_.end()) return it->second;
  }
  HomSlice s = hom_slice(complex(from), complex(to), degree);
  std::lock_guard lock(mutex_);
  return slices_.emplace(key, std::move(s)).first->second;
}

const Matrix& DrinfeldQuotient::slice_d(std::size_t from, std::size_t to, int degree) {
  const auto key = std::make_tuple(from, to, degree);
  {
    std::lock_guard lock(mutex_);
    if (auto it = slice_d_.find(key); it != slice_d_.end()) return it->second;
  }
  Matrix m = slice_differential(slice(from, to, degree), slice(from, to, degree + 1));
  std::lock_guard lock(mutex_);
  return slice_d_.emplace(key, std::move(m)).first->second;
}

const Matrix& DrinfeldQuotient::composition(std::size_t x, std::size_t b, std::size_t c, int a, int d) {
  const auto key = std::make_tuple(x, b, c, a, d);
  {
    std::lock_guard lock(mutex_);
    if (auto it = compositions_.find(key); it != compositions_.end()) return it->second;
  }
  const HomSlice& g = slice(b, c, a);
  const HomSlice& f = slice(x, b, d);
  const HomSlice& out = slice(x, c, a + d);
  const auto gb = g.basis(), fb = f.basis();
  Matrix m(base_->p(), out.dim, g.dim * f.dim);
  for (std::size_t i = 0; i < gb.size(); ++i)
    for (std::size_t j = 0; j < fb.size(); ++j) m.set_column(i * f.dim + j, out.coordinates(dgperf::compose(gb[i], fb[j])));
  std::lock_guard lock(mutex_);
  return compositions_.emplace(key, std::move(m)).first->second;
}

std::vector<std::size_t> DrinfeldQuotient::sector_dims(std::size_t source, std::size_t target, const Sector& s) {
  const std::size_t n = s.chain.size();
  std::vector<std::size_t> obj{target};
  obj.insert(obj.end(), s.chain.begin(), s.chain.end());
  obj.push_back(source);
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i <= n; ++i) dims.push_back(slice(obj[i + 1], obj[i], s.degrees[i]).dim);
  return dims;
}

// ---------------------------------------------------------------------------
// Words

QuotientMorphism DrinfeldQuotient::zero(std::size_t source, std::size_t target, int degree) const {
  return QuotientMorphism{base_->p(), source, target, degree, {}};
}

QuotientMorphism DrinfeldQuotient::from_hom(const HomElement& phi) { return word({phi}, {}); }

QuotientMorphism DrinfeldQuotient::word(const std::vector<HomElement>& fs, const std::vector<std::size_t>& eps) {
  const std::size_t n = eps.size();
  if (fs.size() != n + 1) throw PreconditionError("word: need one more hom element than ε's");
  for (auto id : eps)
    if (!is_acyclic_id(id)) throw PreconditionError("word: ε of an unregistered complex");
  const std::size_t x = object(fs[n].source), y = object(fs[0].target);
  std::vector<std::size_t> obj{y};
  obj.insert(obj.end(), eps.begin(), eps.end());
  obj.push_back(x);
  const PrimeField f{base_->p()};
  Sector s{eps, {}};
  Vector t{1};
  int degree = -static_cast<int>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    if (!same_complex(fs[i].target, complex(obj[i])) || !same_complex(fs[i].source, complex(obj[i + 1])))
      throw PreconditionError("word: factor " + std::to_string(i) + " does not chain");
    s.degrees.push_back(fs[i].degree);
    degree += fs[i].degree;
    t = kron(t, slice(obj[i + 1], obj[i], fs[i].degree).coordinates(fs[i]), f);
  }
  QuotientMorphism out = zero(x, y, degree);
  accumulate(out.terms, s, t, f);
  return out;
}

QuotientMorphism DrinfeldQuotient::epsilon(std::size_t id) {
  const auto u = complex(id);
  return word({HomElement::identity(u), HomElement::identity(u)}, {id});
}

QuotientMorphism DrinfeldQuotient::identity(std::size_t id) { return from_hom(HomElement::identity(complex(id))); }

QuotientMorphism DrinfeldQuotient::compose(const QuotientMorphism& second, const QuotientMorphism& first) {
  if (first.target != second.source) throw PreconditionError("compose: quotient morphisms not composable");
  const PrimeField f{base_->p()};
  QuotientMorphism out = zero(first.source, second.target, first.degree + second.degree);
  for (const auto& [s2, v2] : second.terms)
    for (const auto& [s1, v1] : first.terms) {
      const std::size_t m = s2.chain.size();
      const auto d2 = sector_dims(second.source, second.target, s2);
      const auto d1 = sector_dims(first.source, first.target, s1);
      const std::size_t c = m == 0 ? second.target : s2.chain[m - 1];
      const std::size_t x = s1.chain.empty() ? first.source : s1.chain[0];
      const int a = s2.degrees[m], d = s1.degrees[0];
      const Matrix& comp = composition(x, first.target, c, a, d);

      Sector s{s2.chain, {s2.degrees.begin(), s2.degrees.end() - 1}};
      s.chain.insert(s.chain.end(), s1.chain.begin(), s1.chain.end());
      s.degrees.push_back(a + d);
      s.degrees.insert(s.degrees.end(), s1.degrees.begin() + 1, s1.degrees.end());
      if (comp.rows() == 0) continue;

      const std::size_t dg = d2[m], df = d1[0];
      const std::size_t left = product(d2) / dg, right = product(d1) / df, r = comp.rows();
      Vector t(left * r * right, 0);
      for (std::size_t ai = 0; ai < left; ++ai)
        for (std::size_t i = 0; i < dg; ++i) {
          const Scalar gv = v2[ai * dg + i];
          if (gv == 0) continue;
          for (std::size_t j = 0; j < df; ++j)
            for (std::size_t bi = 0; bi < right; ++bi) {
              const Scalar fv = v1[j * right + bi];
              if (fv == 0) continue;
              const Scalar coef = f.mul(gv, fv);
              for (std::size_t row = 0; row < r; ++row) {
                const Scalar w = comp(row, i * df + j);
                if (w == 0) continue;
                Scalar& o = t[(ai * r + row) * right + bi];
                o = f.add(o, f.mul(coef, w));
              }
            }
        }
      accumulate(out.terms, s, t, f);
    }
  return out;
}

QuotientMorphism DrinfeldQuotient::d(const QuotientMorphism& m) {
  const std::uint32_t p = base_->p();
  const PrimeField f{p};
  QuotientMorphism out = zero(m.source, m.target, m.degree + 1);
  for (const auto& [s, v] : m.terms) {
    const std::size_t n = s.chain.size();
    std::vector<std::size_t> obj{m.target};
    obj.insert(obj.end(), s.chain.begin(), s.chain.end());
    obj.push_back(m.source);
    const auto dims = sector_dims(m.source, m.target, s);

    int before = 0;  // total degree of the letters to the left
    for (std::size_t i = 0; i <= n; ++i) {
      if (i > 0) {
        // d(ε_i) = id merges f_{i-1} and f_i
        const Matrix& comp = composition(obj[i + 1], obj[i], obj[i - 1], s.degrees[i - 1], s.degrees[i]);
        Sector merged{s.chain, s.degrees};
        merged.chain.erase(merged.chain.begin() + static_cast<std::ptrdiff_t>(i - 1));
        merged.degrees[i - 1] += merged.degrees[i];
        merged.degrees.erase(merged.degrees.begin() + static_cast<std::ptrdiff_t>(i));
        if (comp.rows() > 0)
          accumulate(out.terms, merged, scale(f, sign_of(p, before), contract_pair(v, dims, i - 1, comp, f)), f);
        before -= 1;
      }
      const Matrix& dm = slice_d(obj[i + 1], obj[i], s.degrees[i]);
      if (dm.rows() > 0) {
        Sector next{s.chain, s.degrees};
        next.degrees[i] += 1;
        accumulate(out.terms, next, scale(f, sign_of(p, before), apply_factor(v, dims, i, dm, f)), f);
      }
      before += s.degrees[i];
    }
  }
  return out;
}

std::vector<QuotientMorphism> DrinfeldQuotient::word_basis(std::size_t source, std::size_t target, int degree,
                                                           std::size_t bound) {
  std::vector<QuotientMorphism> out;
  std::uint64_t cells = 0;
  const auto acs = acyclics();
  auto range = [&](std::size_t from, std::size_t to) -> std::optional<std::pair<int, int>> {
    const auto a = complex(from), b = complex(to);
    if (a->empty() || b->empty()) return std::nullopt;
    return std::make_pair(b->lo - a->hi, b->hi - a->lo);
  };
  std::vector<std::size_t> chain;
  std::function<void(std::size_t)> chains = [&](std::size_t n) {
    if (chain.size() == n) {
      std::vector<std::size_t> obj{target};
      obj.insert(obj.end(), chain.begin(), chain.end());
      obj.push_back(source);
      std::vector<std::pair<int, int>> ranges;
      for (std::size_t i = 0; i <= n; ++i) {
        const auto r = range(obj[i + 1], obj[i]);
        if (!r) return;
        ranges.push_back(*r);
      }
      std::vector<int> degs;
      std::function<void(std::size_t, int)> pick = [&](std::size_t i, int remaining) {
        if (i == n) {
          if (remaining < ranges[n].first || remaining > ranges[n].second) return;
          degs.push_back(remaining);
          const Sector s{chain, degs};
          const auto dims = sector_dims(source, target, s);
          const std::size_t total = product(dims);
          if (out.size() + total > caps().max_enumeration) throw SizeError("word_basis: too many words");
          cells += std::uint64_t{total} * total;
          if (cells > caps().max_cells) throw SizeError("word_basis: basis too large to hold densely");
          for (std::size_t k = 0; k < total; ++k) {
            QuotientMorphism w = zero(source, target, degree);
            Vector e(total, 0);
            e[k] = 1;
            w.terms.emplace(s, std::move(e));
            out.push_back(std::move(w));
          }
          degs.pop_back();
          return;
        }
        for (int d = ranges[i].first; d <= ranges[i].second; ++d) {
          degs.push_back(d);
          pick(i + 1, remaining - d);
          degs.pop_back();
        }
      };
      pick(0, degree + static_cast<int>(n));
      return;
    }
    for (auto id : acs) {
      chain.push_back(id);
      chains(n);
      chain.pop_back();
    }
  };
  for (std::size_t n = 0; n <= bound; ++n) chains(n);
  return out;
}

Vector DrinfeldQuotient::Flat::flatten(const QuotientMorphism& m) const {
  Vector out(dim, 0);
  for (const auto& [s, v] : m.terms) {
    const auto it = offsets.find(s);
    if (it == offsets.end()) throw PreconditionError("Flat::flatten: sector outside the layout");
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(it->second));
  }
  return out;
}

DrinfeldQuotient::Flat flat_layout(const std::vector<QuotientMorphism>& ms, DrinfeldQuotient& q) {
  DrinfeldQuotient::Flat out;
  std::map<Sector, std::size_t> sizes;
  for (const auto& m : ms)
    for (const auto& [s, v] : m.terms) sizes.emplace(s, v.size());
  for (const auto& [s, n] : sizes) {
    out.offsets.emplace(s, out.dim);
    out.dim += n;
  }
  (void)q;
  return out;
}

// ---------------------------------------------------------------------------
// Quasi-inverses and pullback

QuasiInverse quasi_inverse(DrinfeldQuotient& q, const HomElement& s) {
  const Cone c = cone(s);
  if (!is_acyclic(*c.complex)) throw PreconditionError("quasi_inverse: cone is not acyclic");
  QuasiInverse out{};
  out.cone_id = q.adjoin_acyclic(c.complex);
  const std::size_t id = out.cone_id;
  const std::uint32_t p = q.base()->p();
  out.t = q.word({c.pr_e, c.in_f}, {id});
  out.h1 = q.word({c.pr_e, c.in_e}, {id});
  out.h2 = q.word({c.pr_f, c.in_f}, {id}).scaled(p - 1);

  const auto sq = q.from_hom(s);
  const auto id_e = q.identity(sq.source), id_f = q.identity(sq.target);
  if (!q.d(out.t).is_zero()) out.checks.fail("d(t) != 0");
  if (!(q.compose(out.t, sq) - id_e == q.d(out.h1))) out.checks.fail("t∘s − id != d(h1)");
  if (!(q.compose(sq, out.t) - id_f == q.d(out.h2))) out.checks.fail("s∘t − id != d(h2)");
  return out;
}

QuotientMorphism quotient_f_star(const Rectifier& r, DrinfeldQuotient& from, DrinfeldQuotient& to,
                                 const QuotientMorphism& m) {
  if (from.base() != r.map().target || to.base() != r.map().source)
    throw PreconditionError("quotient_f_star: quotients over the wrong spaces");
  const PrimeField f{to.base()->p()};
  std::map<std::size_t, std::size_t> ids;
  auto image = [&](std::size_t id) {
    if (auto it = ids.find(id); it != ids.end()) return it->second;
    const auto mapped = share(apply_f_star(r, *from.complex(id)));
    std::size_t out;
    if (from.is_acyclic_id(id)) {
      try {
        out = to.adjoin_acyclic(mapped);
      } catch (const PreconditionError&) {
        throw InternalError("quotient_f_star: pullback of a registered acyclic is not acyclic");
      }
    } else {
      out = to.object(mapped);
    }
    ids.emplace(id, out);
    return out;
  };
  std::map<std::tuple<std::size_t, std::size_t, int>, Matrix> factor;
  auto factor_map = [&](std::size_t a, std::size_t b, int deg) -> const Matrix& {
    const auto key = std::make_tuple(a, b, deg);
    if (auto it = factor.find(key); it != factor.end()) return it->second;
    const HomSlice& src = from.slice(a, b, deg);
    const HomSlice& dst = to.slice(image(a), image(b), deg);
    Matrix mat(f.p, dst.dim, src.dim);
    const auto basis = src.basis();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      HomElement h{dst.source, dst.target, deg, {}};
      for (const auto& c : basis[k].components) h.components.push_back(r.morphism(c));
      mat.set_column(k, dst.coordinates(h));
    }
    return factor.emplace(key, std::move(mat)).first->second;
  };

  QuotientMorphism out = to.zero(image(m.source), image(m.target), m.degree);
  for (const auto& [s, v] : m.terms) {
    const std::size_t n = s.chain.size();
    std::vector<std::size_t> obj{m.target};
    obj.insert(obj.end(), s.chain.begin(), s.chain.end());
    obj.push_back(m.source);
    auto dims = from.sector_dims(m.source, m.target, s);
    Vector t = v;
    for (std::size_t i = 0; i <= n; ++i) {
      const Matrix& fm = factor_map(obj[i + 1], obj[i], s.degrees[i]);
      t = apply_factor(t, dims, i, fm, f);
      dims[i] = fm.rows();
    }
    Sector mapped{{}, s.degrees};
    for (auto id : s.chain) mapped.chain.push_back(image(id));
    if (product(dims) > 0) accumulate(out.terms, mapped, t, f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mixed hom and the derived hom oracle

MixedSlice mixed_slice(const ComplexPtr& p, const SheafComplex& g, int n) {
  MixedSlice s{p, g, n, {}, 0};
  for (int q = p->lo; q <= p->hi; ++q) {
    const int t = q + n;
    if (g.terms.empty() || t < g.lo || t > g.hi()) continue;
    const DObject x = p->object(q);
    for (std::size_t j = 0; j < x.size(); ++j) {
      auto sec = sections(*g.terms[t - g.lo], x.opens[j]);
      if (sec.dim() == 0) continue;
      const std::size_t d = sec.dim();
      s.blocks.push_back({q, j, std::move(sec), s.dim});
      s.dim += d;
    }
  }
  return s;
}

Matrix mixed_differential(const MixedSlice& from, const MixedSlice& to) {
  const auto& pc = *from.source;
  const auto& g = from.target;
  const auto& s = *pc.base;
  const std::uint32_t pr = s.p();
  const PrimeField f{pr};
  const int n = from.degree;
  std::map<std::pair<int, std::size_t>, const MixedSlice::Block*> index;
  for (const auto& b : to.blocks) index[{b.p, b.j}] = &b;

  Matrix out(pr, to.dim, from.dim);
  for (const auto& b : from.blocks) {
    const int q = b.p + n;
    const SheafPtr& gq = g.terms[q - g.lo];
    for (std::size_t k = 0; k < b.sections.dim(); ++k) {
      Vector col(to.dim, 0);
      const Vector sec = b.sections.space.basis()[k];
      const Open vj = pc.object(b.p).opens[b.j];
      // d_G ∘ φ
      if (q < g.hi()) {
        const Vector img = sections_map(g.d[q - g.lo], vj).apply(sec);
        if (auto it = index.find({b.p, b.j}); it != index.end()) {
          const Vector c = it->second->sections.space.coordinates(img);
          for (std::size_t i = 0; i < c.size(); ++i) col[it->second->offset + i] = f.add(col[it->second->offset + i], c[i]);
        } else if (!is_zero(img)) {
          throw InternalError("mixed_differential: image outside the target slice");
        }
      }
      // −(−1)^n φ ∘ d_P
      const Scalar sg = sign_of(pr, n + 1);
      const DMorphism dp = pc.d(b.p - 1);
      for (std::size_t i = 0; i < dp.source.size(); ++i) {
        const Open vi = dp.source.opens[i];
        const auto& a = dp.entry(b.j, i);
        const auto it = index.find({b.p - 1, i});
        const SectionModule target_sec = it != index.end() ? it->second->sections : sections(*gq, vi);
        Vector amb;
        for (std::size_t x : target_sec.points) {
          const std::size_t dx = gq->stalk(x).dim();
          if (!vj.contains(x)) {
            amb.insert(amb.end(), dx, 0);
            continue;
          }
          const std::size_t off = entry_offset(s, vi, vj, x);
          const std::size_t ox = s.stalk(x)->dim();
          const Matrix act = gq->stalk(x).action_of(std::span<const Scalar>(a).subspan(off, ox));
          const Vector v = act.apply(b.sections.component_of(sec, x));
          amb.insert(amb.end(), v.begin(), v.end());
        }
        if (it == index.end()) {
          if (!is_zero(amb)) throw InternalError("mixed_differential: image outside the target slice");
          continue;
        }
        const Vector c = it->second->sections.space.coordinates(amb);
        for (std::size_t t = 0; t < c.size(); ++t)
          col[it->second->offset + t] = f.add(col[it->second->offset + t], f.mul(sg, c[t]));
      }
      out.set_column(b.offset + k, col);
    }
  }
  return out;
}

Vector MixedSlice::coordinates(const HomElement& phi) const {
  if (!same_complex(phi.source, source) || phi.degree != degree)
    throw PreconditionError("MixedSlice::coordinates: element of another hom complex");
  const auto& s = *source->base;
  Vector out(dim, 0);
  for (const auto& b : blocks) {
    const DMorphism comp = phi.component(b.p);
    const Open vj = comp.source.opens[b.j];
    Vector amb;
    for (std::size_t x : b.sections.points) {
      const std::size_t ox = s.stalk(x)->dim();
      for (std::size_t k = 0; k < comp.target.size(); ++k) {
        const Open wk = comp.target.opens[k];
        if (!wk.contains(x)) continue;
        const auto& e = comp.entry(k, b.j);
        const std::size_t off = entry_offset(s, vj, wk, x);
        amb.insert(amb.end(), e.begin() + static_cast<std::ptrdiff_t>(off),
                   e.begin() + static_cast<std::ptrdiff_t>(off + ox));
      }
    }
    if (amb.size() != b.sections.ambient) throw PreconditionError("MixedSlice::coordinates: target is not realized");
    const Vector c = b.sections.space.coordinates(amb);
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(b.offset));
  }
  return out;
}

Vector DerivedHom::class_of(std::span<const Scalar> coords) const {
  if (!cocycles.contains(coords)) throw PreconditionError("DerivedHom::class_of: not a cocycle");
  std::vector<Vector> cols = representatives;
  for (const auto& b : boundaries.basis()) cols.push_back(b);
  const auto sol = solve(Matrix::from_columns(cocycles.p(), slice.dim, cols), coords);
  if (!sol) throw InternalError("DerivedHom::class_of: cocycle outside representatives + boundaries");
  return Vector(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(representatives.size()));
}

DerivedHom derived_hom_oracle(const SheafComplex& e, const SheafComplex& f, std::optional<std::size_t> depth) {
  const std::uint32_t p = e.base->p();
  const bool f_empty = f.terms.empty();
  const bool e_empty = e.terms.empty();
  const int needed = f_empty ? 0 : f.lo - 1;
  const std::size_t span = e_empty ? 0 : static_cast<std::size_t>(e.hi() - e.lo);
  const std::size_t reach = (!e_empty && e.lo > needed) ? static_cast<std::size_t>(e.lo - needed) : 0;

  DerivedHom out;
  out.resolution = resolve(e, depth.value_or(std::max(span + 2, reach)));
  out.complete = out.resolution.complete;
  out.truncation = out.resolution.valid_lo;
  out.stabilized = out.complete || f_empty || out.truncation <= needed;
  if (!out.stabilized)
    throw OracleUnavailable("derived_hom_oracle: resolution stops at degree " + std::to_string(out.truncation) +
                            " but H⁰ needs degree " + std::to_string(needed));

  const ComplexPtr& pc = out.resolution.complex;
  out.slice = mixed_slice(pc, f, 0);
  const MixedSlice below = mixed_slice(pc, f, -1), above = mixed_slice(pc, f, 1);
  out.cocycles = Subspace::column_span(kernel(mixed_differential(out.slice, above)));
  out.boundaries = Subspace::column_span(mixed_differential(below, out.slice));
  Subspace covered = out.boundaries;
  for (const auto& z : out.cocycles.basis()) {
    if (covered.contains(z)) continue;
    out.representatives.push_back(z);
    covered = covered.sum(Subspace::span(p, out.slice.dim, {z}));
  }
  out.dim = out.representatives.size();
  return out;
}

// ---------------------------------------------------------------------------
// H⁰ comparison

namespace {

HomElement resolution_hom(const ResolutionResult& r, const ComplexPtr& e) {
  HomElement h = HomElement::zero(r.complex, e, 0);
  for (int n = r.complex->lo; n <= r.complex->hi; ++n)
    h.components[n - r.complex->lo] = from_sheaf_map(r.complex->object(n), e->object(n), r.map_at(n));
  return h;
}

HomElement combination(const HomSlice& s, const std::vector<Vector>& reps, std::span<const Scalar> coeffs) {
  const PrimeField f{s.source->base->p()};
  Vector v(s.dim, 0);
  for (std::size_t i = 0; i < reps.size(); ++i) v = add(f, v, scale(f, coeffs[i], reps[i]));
  return s.element(v);
}

}  // namespace

H0Comparison h0_compare(DrinfeldQuotient& q, const ComplexPtr& e, const ComplexPtr& f, std::size_t bound,
                        const RingedMap* pull, std::uint64_t seed) {
  H0Comparison out;
  out.bound = bound;
  const std::uint32_t p = e->base->p();
  const PrimeField fld{p};
  std::mt19937_64 rng(seed);

  const H0 perf = h0_hom(e, f);
  out.perf_dim = perf.dim();
  const DerivedHom oracle = derived_hom_oracle(realize(*e), realize(*f));
  out.oracle_dim = oracle.dim;
  const HomElement u = resolution_hom(oracle.resolution, e);
  const ComplexPtr& pc = oracle.resolution.complex;

  // H⁰(perf) -> D on class representatives
  Matrix to_d(p, oracle.dim, perf.dim());
  std::vector<HomElement> reps;
  for (std::size_t i = 0; i < perf.dim(); ++i) {
    reps.push_back(perf.representative(i));
    to_d.set_column(i, oracle.class_of(oracle.slice.coordinates(compose(reps.back(), u))));
  }
  out.image_rank = to_d.rank();

  // (i)
  const std::size_t x = q.object(e), y = q.object(f);
  std::vector<QuotientMorphism> survivors;
  {
    std::vector<Vector> chosen;
    for (std::size_t i = 0; i < perf.dim(); ++i) {
      std::vector<Vector> trial = chosen;
      trial.push_back(to_d.column(i));
      if (Subspace::span(p, oracle.dim, trial).dim() == trial.size()) {
        chosen = std::move(trial);
        survivors.push_back(q.from_hom(reps[i]));
      }
    }
  }
  std::vector<QuotientMorphism> cobounds;
  {
    std::uint64_t cells = 0;
    for (const auto& w : q.word_basis(x, y, -1, bound)) {
      cobounds.push_back(q.d(w));
      for (const auto& [s, v] : cobounds.back().terms) cells += v.size();
      if (cells > caps().max_cells) throw SizeError("h0_compare: coboundaries too large to hold densely");
    }
  }
  std::vector<QuotientMorphism> all = survivors;
  all.insert(all.end(), cobounds.begin(), cobounds.end());
  const auto layout = flat_layout(all, q);
  if (std::uint64_t{all.size()} * layout.dim > caps().max_cells)
    throw SizeError("h0_compare: coboundary matrix too large to hold densely");
  std::vector<Vector> sv, bv;
  for (const auto& m : survivors) sv.push_back(layout.flatten(m));
  for (const auto& m : cobounds) bv.push_back(layout.flatten(m));
  const std::size_t rank_s = Subspace::span(p, layout.dim, sv).dim();
  const std::size_t rank_b = Subspace::span(p, layout.dim, bv).dim();
  std::vector<Vector> both = sv;
  both.insert(both.end(), bv.begin(), bv.end());
  out.coboundary_dim = rank_b;
  out.consistent = rank_s == survivors.size() && Subspace::span(p, layout.dim, both).dim() == rank_s + rank_b;
  if (!out.consistent) out.checks.fail("(i) an independent class is identified by a coboundary within the bound");

  // (ii) homotopic maps
  const HomSlice minus = hom_slice(e, f, -1);
  for (const auto& phi : reps) {
    Vector c(minus.dim);
    for (auto& v : c) v = static_cast<Scalar>(rng() % p);
    const HomElement h = minus.element(c);
    const HomElement psi = phi + differential(h);
    if (q.from_hom(psi) - q.from_hom(phi) == q.d(q.from_hom(h)))
      ++out.witnesses;
    else
      out.checks.fail("(ii) homotopy witness does not normalize");
  }
  // (ii) classes that die in D
  if (oracle.complete) {
    const Matrix dead = kernel(to_d);
    if (dead.cols() > 0) {
      const QuasiInverse qi = quasi_inverse(q, u);
      out.checks.merge(qi.checks, "(ii) quasi-inverse: ");
      const HomSlice pm = hom_slice(pc, f, -1), p0 = hom_slice(pc, f, 0);
      const Matrix dm = slice_differential(pm, p0);
      for (std::size_t k = 0; k < dead.cols(); ++k) {
        const HomElement phi = combination(perf.slice, perf.representatives, dead.column(k));
        const auto hc = solve(dm, p0.coordinates(compose(phi, u)));
        if (!hc) {
          out.checks.fail("(ii) dead class without a homotopy after resolving");
          continue;
        }
        const QuotientMorphism w =
            q.compose(q.from_hom(pm.element(*hc)), qi.t) - q.compose(q.from_hom(phi), qi.h2);
        if (q.d(w) == q.from_hom(phi))
          ++out.witnesses;
        else
          out.checks.fail("(ii) witness for a dead class does not normalize");
      }
    }
  }

  // (iii)
  if (pull) {
    const Rectifier r(*pull);
    const ComplexPtr fe = share(apply_f_star(r, *e)), ff = share(apply_f_star(r, *f)), fp = share(apply_f_star(r, *pc));
    const HomElement fu = apply_f_star(r, u);
    const ResolutionResult rt = resolve(fe, static_cast<std::size_t>(std::max(0, fe->hi - fe->lo)) + 2);
    if (!oracle.complete || !rt.complete) {
      out.checks.fail("(iii) needs complete resolutions on both sides");
      out.square = false;
    } else {
      const HomElement ut = resolution_hom(rt, fe);
      const ComplexPtr& qc = rt.complex;
      const HomSlice v0 = hom_slice(qc, fp, 0), v1 = hom_slice(qc, fp, 1), hm = hom_slice(qc, fe, -1),
                     t0 = hom_slice(qc, fe, 0);
      // unknowns (v, h): d(v) = 0 and f⋆u ∘ v − d(h) = u_T
      Matrix sys(p, v1.dim + t0.dim, v0.dim + hm.dim);
      sys.set_block(0, 0, slice_differential(v0, v1));
      const auto vb = v0.basis();
      for (std::size_t k = 0; k < vb.size(); ++k) {
        const Vector c = t0.coordinates(compose(fu, vb[k]));
        for (std::size_t i = 0; i < c.size(); ++i) sys(v1.dim + i, k) = c[i];
      }
      sys.set_block(v1.dim, v0.dim, slice_differential(hm, t0).negated());
      Vector rhs(v1.dim, 0);
      const Vector ut_c = t0.coordinates(ut);
      rhs.insert(rhs.end(), ut_c.begin(), ut_c.end());
      const auto sol = solve(sys, rhs);
      if (!sol) {
        out.checks.fail("(iii) no lift of the resolution through f⋆u");
        out.square = false;
      } else {
        const HomElement v = v0.element(std::span<const Scalar>(*sol).subspan(0, v0.dim));
        const H0 target = h0_hom(qc, ff);
        bool agree = true;
        for (const auto& phi : reps) {
          const Vector a = target.class_of(compose(apply_f_star(r, phi), ut));
          const Vector b = target.class_of(compose(apply_f_star(r, compose(phi, u)), v));
          if (a != b) agree = false;
        }
        out.square = agree;
        if (!agree) out.checks.fail("(iii) pullback square does not commute on classes");
      }
    }
  }
  (void)fld;
  return out;
}

}  // namespace dgperf
