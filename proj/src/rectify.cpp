#include "dgperf/rectify.hpp"

namespace dgperf {

DObject concat(const DObject& x, const DObject& y) {
  if (x.base != y.base) throw PreconditionError("concat: different bases");
  DObject out{x.base, x.opens};
  out.opens.insert(out.opens.end(), y.opens.begin(), y.opens.end());
  return out;
}

SectionModule entry_sections(const SpacePtr& s, Open v, Open w) { return sections(ext_by_zero(s, w), v); }

namespace {

std::size_t entry_ambient(const FinRingedSpace& s, Open v, Open w) {
  std::size_t d = 0;
  for (std::size_t x : s.points_of(v))
    if (w.contains(x)) d += s.stalk(x)->dim();
  return d;
}

}  // namespace

DMorphism DMorphism::zero(const DObject& x, const DObject& y) {
  if (x.base != y.base) throw PreconditionError("DMorphism::zero: different bases");
  DMorphism m{x, y, {}};
  for (std::size_t k = 0; k < y.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j) m.entries.emplace_back(entry_ambient(*x.base, x.opens[j], y.opens[k]), 0);
  return m;
}

DMorphism DMorphism::identity(const DObject& x) {
  DMorphism m = zero(x, x);
  const auto& s = *x.base;
  for (std::size_t j = 0; j < x.size(); ++j) {
    Vector one;
    for (std::size_t p : s.points_of(x.opens[j])) {
      const Vector u = s.stalk(p)->unit();
      one.insert(one.end(), u.begin(), u.end());
    }
    m.entry(j, j) = std::move(one);
  }
  return m;
}

DMorphism DMorphism::operator+(const DMorphism& o) const {
  if (!(source == o.source) || !(target == o.target)) throw PreconditionError("DMorphism +: shapes differ");
  const PrimeField f{source.base->p()};
  DMorphism r = *this;
  for (std::size_t i = 0; i < entries.size(); ++i) r.entries[i] = add(f, entries[i], o.entries[i]);
  return r;
}

DMorphism DMorphism::scaled(Scalar s) const {
  const PrimeField f{source.base->p()};
  DMorphism r = *this;
  for (auto& e : r.entries) e = scale(f, s, e);
  return r;
}

bool DMorphism::is_zero() const {
  for (const auto& e : entries)
    if (!dgperf::is_zero(e)) return false;
  return true;
}

CheckReport DMorphism::validate() const {
  CheckReport r;
  if (source.base != target.base) {
    r.fail("source and target on different spaces");
    return r;
  }
  if (entries.size() != source.size() * target.size()) {
    r.fail("entry count does not match the shape");
    return r;
  }
  for (std::size_t k = 0; k < target.size(); ++k)
    for (std::size_t j = 0; j < source.size(); ++j) {
      const auto sec = entry_sections(source.base, source.opens[j], target.opens[k]);
      const auto& e = entry(k, j);
      if (e.size() != sec.ambient || !sec.space.contains(e))
        r.fail("entry (" + std::to_string(k) + "," + std::to_string(j) + ") is not a section");
    }
  return r;
}

Vector compose_entries(const FinRingedSpace& s, Open v, Open w, Open x, std::span<const Scalar> first,
                       std::span<const Scalar> second) {
  // first lives on V with blocks at points of V ∩ W; second on W with blocks at W ∩ X.
  Vector out;
  std::size_t a = 0;
  for (std::size_t p : s.points_of(v)) {
    const std::size_t d = s.stalk(p)->dim();
    const bool in_w = w.contains(p), in_x = x.contains(p);
    if (in_w && in_x) {
      std::size_t b = 0;
      for (std::size_t q : s.points_of(w)) {
        if (q == p) break;
        if (x.contains(q)) b += s.stalk(q)->dim();
      }
      const Vector prod = s.stalk(p)->multiply(first.subspan(a, d), second.subspan(b, d));
      out.insert(out.end(), prod.begin(), prod.end());
    } else if (in_x) {
      out.insert(out.end(), d, 0);
    }
    if (in_w) a += d;
  }
  return out;
}

DMorphism compose(const DMorphism& second, const DMorphism& first) {
  if (!(first.target == second.source)) throw PreconditionError("compose: DMorphisms not composable");
  const auto& s = *first.source.base;
  const PrimeField f{s.p()};
  DMorphism out = DMorphism::zero(first.source, second.target);
  for (std::size_t k = 0; k < second.target.size(); ++k)
    for (std::size_t j = 0; j < first.source.size(); ++j) {
      Vector& acc = out.entry(k, j);
      for (std::size_t i = 0; i < first.target.size(); ++i)
        acc = add(f, acc,
                  compose_entries(s, first.source.opens[j], first.target.opens[i], second.target.opens[k],
                                  first.entry(i, j), second.entry(k, i)));
    }
  return out;
}

DirectSum to_sheaf(const DObject& x) {
  std::vector<SheafPtr> parts;
  for (const auto& v : x.opens) parts.push_back(std::make_shared<const Sheaf>(ext_by_zero(x.base, v)));
  return direct_sum(x.base, parts);
}

SheafMap to_sheaf(const DMorphism& m) {
  const auto src = to_sheaf(m.source);
  const auto tgt = to_sheaf(m.target);
  SheafMap out = SheafMap::zero(src.sum, tgt.sum);
  for (std::size_t k = 0; k < m.target.size(); ++k)
    for (std::size_t j = 0; j < m.source.size(); ++j) {
      const auto piece = sigma_inverse(m.source.base, m.source.opens[j], tgt.projections[k].target, m.entry(k, j));
      SheafMap placed = compose(tgt.inclusions[k], compose(piece, src.projections[j]));
      out = out + placed;
    }
  return out;
}

DMorphism from_sheaf_map(const DObject& x, const DObject& y, const SheafMap& phi) {
  const auto src = to_sheaf(x);
  const auto tgt = to_sheaf(y);
  DMorphism m = DMorphism::zero(x, y);
  for (std::size_t k = 0; k < y.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j)
      m.entry(k, j) = sigma(compose(tgt.projections[k], compose(phi, src.inclusions[j])), x.opens[j]);
  if (!(to_sheaf(m) == phi)) throw InternalError("from_sheaf_map: map is not of matrix form");
  return m;
}

// ---------------------------------------------------------------------------

const Theta& Rectifier::theta_at(Open v) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(v.mask);
  if (it == cache_.end()) it = cache_.emplace(v.mask, std::make_shared<const Theta>(theta(f_, v))).first;
  return *it->second;
}

DObject Rectifier::object(const DObject& x) const {
  if (x.base != f_.target) throw PreconditionError("f_star_object: object is not over the target of " + f_.name);
  DObject out{f_.source, {}};
  for (const auto& v : x.opens) out.opens.push_back(f_.preimage(v));
  return out;
}

DMorphism Rectifier::morphism(const DMorphism& m) const {
  if (m.source.base != f_.target) throw PreconditionError("f_star_morphism: morphism is not over the target");
  DMorphism out = DMorphism::zero(object(m.source), object(m.target));
  for (std::size_t k = 0; k < m.target.size(); ++k) {
    const Open w = m.target.opens[k];
    const auto ow = std::make_shared<const Sheaf>(ext_by_zero(f_.target, w));
    const Theta& tw = theta_at(w);
    for (std::size_t j = 0; j < m.source.size(); ++j) {
      const Open v = m.source.opens[j];
      const SheafMap phi = sigma_inverse(f_.target, v, ow, m.entry(k, j));
      const SheafMap conj = compose(tw.forward, compose(pullback_map(f_, phi), theta_at(v).inverse));
      out.entry(k, j) = sigma(conj, f_.preimage(v));
    }
  }
  return out;
}

CheckReport Rectifier::check_theta_naturality(const DMorphism& m) const {
  CheckReport r;
  const DMorphism image = morphism(m);
  for (std::size_t k = 0; k < m.target.size(); ++k)
    for (std::size_t j = 0; j < m.source.size(); ++j) {
      const Open v = m.source.opens[j], w = m.target.opens[k];
      const auto ow = std::make_shared<const Sheaf>(ext_by_zero(f_.target, w));
      const auto tw = std::make_shared<const Sheaf>(ext_by_zero(f_.source, f_.preimage(w)));
      const SheafMap phi = sigma_inverse(f_.target, v, ow, m.entry(k, j));
      const SheafMap star = sigma_inverse(f_.source, f_.preimage(v), tw, image.entry(k, j));
      if (!(compose(theta_at(w).forward, pullback_map(f_, phi)) == compose(star, theta_at(v).forward)))
        r.fail("theta naturality fails on entry (" + std::to_string(k) + "," + std::to_string(j) + ")");
    }
  return r;
}

DObject f_star_object(const RingedMap& f, const DObject& x) { return Rectifier(f).object(x); }

DMorphism f_star_morphism(const RingedMap& f, const DMorphism& m) { return Rectifier(f).morphism(m); }

CheckReport check_strict_functoriality(const RingedMap& f, const RingedMap& g, const std::vector<DObject>& objects,
                                       const std::vector<DMorphism>& morphisms) {
  CheckReport r;
  const Rectifier rf(f), rg(g), rfg(compose(f, g));
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& x = objects[i];
    if (!(rg.object(rf.object(x)) == rfg.object(x))) r.fail("object " + std::to_string(i) + ": g*f*X != (fg)*X");
    if (!(rf.morphism(DMorphism::identity(x)) == DMorphism::identity(rf.object(x))))
      r.fail("object " + std::to_string(i) + ": f* does not preserve the identity");
  }
  for (std::size_t i = 0; i < morphisms.size(); ++i) {
    const auto& m = morphisms[i];
    const DMorphism two_step = rg.morphism(rf.morphism(m));
    const DMorphism one_step = rfg.morphism(m);
    if (!(two_step == one_step)) r.fail("morphism " + std::to_string(i) + ": g*f*m != (fg)*m");
    if (i + 1 < morphisms.size() && morphisms[i + 1].source == m.target) {
      const auto& m2 = morphisms[i + 1];
      if (!(rf.morphism(compose(m2, m)) == compose(rf.morphism(m2), rf.morphism(m))))
        r.fail("morphism " + std::to_string(i) + ": f* does not respect composition");
    }
  }
  return r;
}

CheckReport check_theta_cocycle(const RingedMap& f, const RingedMap& g, Open w, const std::vector<SheafPtr>& probes) {
  CheckReport r;
  const RingedMap fg = compose(f, g);
  const std::string where = " at W=" + f.target->describe(w);
  const auto ow = std::make_shared<const Sheaf>(ext_by_zero(f.target, w));
  const Theta tf = theta(f, w);
  const Theta tg = theta(g, f.preimage(w));
  const Theta tfg = theta(fg, w);
  const SheafMap a = alpha(f, g, ow);
  const SheafMap middle = compose(pullback_map(g, tf.forward), a);
  const SheafMap lhs = compose(tg.forward, middle);
  if (!(lhs == tfg.forward)) r.fail("cocycle identity fails" + where);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& n = probes[i];
    for (const auto& psi : hom_sheaves(tfg.forward.target, n)) {
      const SheafMap via_fg = theta_chain(fg, w, n, psi);
      const SheafMap via_g = compose(theta_chain(g, f.preimage(w), n, psi), middle);
      if (!(via_fg == via_g)) {
        r.fail("hom(-, N) images differ for probe " + std::to_string(i) + where);
        break;
      }
    }
  }
  return r;
}

DObject random_dobject(const SpacePtr& s, std::mt19937_64& rng, std::size_t max_len) {
  const auto os = opens(*s);
  DObject x{s, {}};
  const std::size_t len = 1 + rng() % max_len;
  for (std::size_t i = 0; i < len; ++i) x.opens.push_back(os[rng() % os.size()]);
  return x;
}

DMorphism random_dmorphism(const DObject& x, const DObject& y, std::mt19937_64& rng) {
  const std::uint32_t p = x.base->p();
  DMorphism m = DMorphism::zero(x, y);
  for (std::size_t k = 0; k < y.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const auto sec = entry_sections(x.base, x.opens[j], y.opens[k]);
      Vector c(sec.dim());
      for (auto& v : c) v = static_cast<Scalar>(rng() % p);
      m.entry(k, j) = sec.space.element(c);
    }
  return m;
}

}  // namespace dgperf
