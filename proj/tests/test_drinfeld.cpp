#include <doctest.h>

#include "dgperf/drinfeld.hpp"
#include "support.hpp"

using namespace dgperf;
using namespace support;

namespace {

Scalar sgn(std::uint32_t p, int e) { return (((e % 2) + 2) % 2 == 0) ? 1 : p - 1; }

DObject whole(const SpacePtr& s) { return DObject{s, {s->all()}}; }

SpecSpace spec_ff(std::uint32_t p) { return spec(product_algebra(field(p), field(p)), "ff"); }

/// a, b <= c with all stalks F_p.
SpacePtr vee(std::uint32_t p) {
  const auto k = field(p);
  return std::make_shared<const FinRingedSpace>(FinRingedSpace(
      "V", {"a", "b", "c"}, {{0, 2}, {1, 2}}, {k, k, k},
      {{{0, 2}, AlgebraMap::identity(k)}, {{1, 2}, AlgebraMap::identity(k)}}));
}

/// O_{c} -> O_{U_a} ⊕ O_{U_b} -> O_X: exact on stalks, not split.
ComplexPtr vee_cech(const SpacePtr& s) {
  const std::uint32_t p = s->p();
  const DObject c{s, {Open{4}}}, ab{s, {Open{5}, Open{6}}}, x = whole(s);
  DMorphism d0{c, ab, {{1}, {p - 1}}};
  DMorphism d1{ab, x, {{1, 1}, {1, 1}}};
  return share(DComplex::make(s, -2, {c, ab, x}, {d0, d1}));
}

SheafPtr closed_skyscraper(const SpacePtr& x) {
  const auto& r = x->stalk(0);
  std::vector<Matrix> act;
  for (std::size_t i = 0; i < r->dim(); ++i) act.push_back(Matrix::from_rows(r->p(), {{i == 0 ? 1 : 0}}));
  std::vector<FinModule> stalks{FinModule(r, 1, act)};
  for (std::size_t y = 1; y < x->size(); ++y) stalks.push_back(FinModule::zero(x->stalk(y)));
  return std::make_shared<const Sheaf>(Sheaf::from_pairs(x, stalks, {}));
}

struct Fixture {
  SpacePtr s;
  DrinfeldQuotient q;
  std::vector<std::size_t> objects;
  std::vector<std::size_t> acyclic;

  Fixture(SpacePtr base, std::mt19937_64& rng) : s(base), q(base) {
    for (int i = 0; i < 3; ++i) objects.push_back(q.object(share(random_dcomplex(s, rng, -1, 2))));
    for (int i = 0; i < 2; ++i) {
      const auto e = share(random_dcomplex(s, rng, -1, 2));
      const auto u = cone(HomElement::identity(e)).complex;
      acyclic.push_back(q.adjoin_acyclic(u));
      objects.push_back(acyclic.back());
    }
  }

  std::size_t pick(std::mt19937_64& rng) { return objects[rng() % objects.size()]; }

  QuotientMorphism random_word(std::size_t x, std::size_t y, std::size_t n, std::mt19937_64& rng,
                               std::optional<int> degree = std::nullopt) {
    std::vector<std::size_t> eps;
    for (std::size_t i = 0; i < n; ++i) eps.push_back(acyclic[rng() % acyclic.size()]);
    std::vector<std::size_t> obj{y};
    obj.insert(obj.end(), eps.begin(), eps.end());
    obj.push_back(x);
    std::vector<HomElement> fs;
    int total = -static_cast<int>(n);
    for (std::size_t i = 0; i <= n; ++i) {
      const auto a = q.complex(obj[i + 1]), b = q.complex(obj[i]);
      int deg = static_cast<int>(rng() % 3) - 1;
      if (degree && i == n) deg = *degree - total;
      total += deg;
      fs.push_back(random_hom_element(a, b, deg, rng));
    }
    return q.word(fs, eps);
  }
};

std::vector<SpacePtr> sample_spaces() { return {spec(field(2)).space, sierpinski(2), spec(dual(3)).space, spec_ff(2).space}; }

}  // namespace

TEST_CASE("registry examples") {
  const auto k = spec(field(2)).space;
  DrinfeldQuotient q(k);
  const auto o = share(DComplex::single(whole(k), 0));
  const auto o2 = share(DComplex::single(whole(k), 0));
  const std::size_t id = q.object(o);
  CHECK(q.object(o2) == id);
  CHECK(q.serialization(id) == canonical_string(*o2));
  CHECK(q.size() == 1);
  CHECK_THROWS_AS(q.adjoin_acyclic(o), PreconditionError);
  CHECK_THROWS_AS(q.epsilon(id), PreconditionError);

  const auto u = cone(HomElement::identity(o)).complex;
  const std::size_t uid = q.adjoin_acyclic(u);
  CHECK(q.adjoin_acyclic(share(DComplex(*u))) == uid);
  CHECK(q.is_acyclic_id(uid));
  CHECK_FALSE(q.is_acyclic_id(id));
  CHECK(q.d(q.epsilon(uid)) == q.identity(uid));
  CHECK(q.epsilon(uid).eps_degree() == 1);
  CHECK(q.compose(q.epsilon(uid), q.epsilon(uid)).eps_degree() == 2);

  // ε_0 exists once 0 is registered, and is a cycle since id_0 = 0
  const auto zero = share(DComplex::zero(k));
  const std::size_t zid = q.adjoin_acyclic(zero);
  CHECK(q.epsilon(zid).is_zero());
  CHECK(q.identity(zid).is_zero());
}

TEST_CASE("d on words of ε-degree 1 and 2 matches the expanded formula") {
  std::mt19937_64 rng(5);
  std::size_t checked = 0;
  for (const auto& s : sample_spaces()) {
    Fixture fx(s, rng);
    auto& q = fx.q;
    const std::uint32_t p = s->p();
    for (int i = 0; i < 6; ++i) {
      const std::size_t x = fx.pick(rng), y = fx.pick(rng);
      const std::size_t u = fx.acyclic[rng() % 2], w = fx.acyclic[rng() % 2];
      const auto cx = q.complex(x), cy = q.complex(y), cu = q.complex(u), cw = q.complex(w);
      const int a = static_cast<int>(rng() % 3) - 1, b = static_cast<int>(rng() % 3) - 1, c = static_cast<int>(rng() % 3) - 1;

      const HomElement f = random_hom_element(cu, cy, a, rng), g = random_hom_element(cx, cu, b, rng);
      const auto lhs = q.d(q.word({f, g}, {u}));
      const auto rhs = q.word({differential(f), g}, {u}) + q.from_hom(compose(f, g)).scaled(sgn(p, a)) +
                       q.word({f, differential(g)}, {u}).scaled(sgn(p, a - 1));
      CHECK(lhs == rhs);

      const HomElement f0 = random_hom_element(cu, cy, a, rng), f1 = random_hom_element(cw, cu, b, rng),
                       f2 = random_hom_element(cx, cw, c, rng);
      const auto lhs2 = q.d(q.word({f0, f1, f2}, {u, w}));
      const auto rhs2 = q.word({differential(f0), f1, f2}, {u, w}) +
                        q.word({compose(f0, f1), f2}, {w}).scaled(sgn(p, a)) +
                        q.word({f0, differential(f1), f2}, {u, w}).scaled(sgn(p, a - 1)) +
                        q.word({f0, compose(f1, f2)}, {u}).scaled(sgn(p, a + b - 1)) +
                        q.word({f0, f1, differential(f2)}, {u, w}).scaled(sgn(p, a + b - 2));
      CHECK(lhs2 == rhs2);
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("d squares to zero on random words") {
  std::mt19937_64 rng(11);
  std::size_t samples = 0;
  for (const auto& s : sample_spaces()) {
    Fixture fx(s, rng);
    for (int i = 0; i < 16; ++i) {
      const std::size_t n = static_cast<std::size_t>(i % 4);
      const auto m = fx.random_word(fx.pick(rng), fx.pick(rng), n, rng);
      CHECK(fx.q.d(fx.q.d(m)).is_zero());
      ++samples;
    }
  }
  CHECK(samples >= 50);
}

TEST_CASE("composition is associative and satisfies Leibniz") {
  std::mt19937_64 rng(12);
  std::size_t samples = 0;
  for (const auto& s : sample_spaces()) {
    Fixture fx(s, rng);
    auto& q = fx.q;
    const std::uint32_t p = s->p();
    for (int i = 0; i < 10; ++i) {
      const std::size_t w = fx.pick(rng), x = fx.pick(rng), y = fx.pick(rng), z = fx.pick(rng);
      const int deg = static_cast<int>(rng() % 3) - 1;
      const auto m1 = fx.random_word(w, x, rng() % 2, rng, deg) + fx.random_word(w, x, rng() % 3, rng, deg);
      const auto m2 = fx.random_word(x, y, rng() % 2, rng);
      const auto m3 = fx.random_word(y, z, rng() % 2, rng);
      CHECK(q.compose(m3, q.compose(m2, m1)) == q.compose(q.compose(m3, m2), m1));
      const auto lhs = q.d(q.compose(m2, m1));
      const auto rhs = q.compose(q.d(m2), m1) + q.compose(m2, q.d(m1)).scaled(sgn(p, m2.degree));
      CHECK(lhs == rhs);
      CHECK(q.compose(q.identity(x), m1) == m1);
      CHECK(q.compose(m1, q.identity(w)) == m1);
      ++samples;
    }
  }
  CHECK(samples >= 40);
}

TEST_CASE("perf embeds as a dg subcategory") {
  std::mt19937_64 rng(13);
  for (const auto& s : sample_spaces()) {
    Fixture fx(s, rng);
    auto& q = fx.q;
    for (int i = 0; i < 8; ++i) {
      const auto x = q.complex(fx.pick(rng)), y = q.complex(fx.pick(rng)), z = q.complex(fx.pick(rng));
      const HomElement f = random_hom_element(x, y, static_cast<int>(rng() % 3) - 1, rng);
      const HomElement g = random_hom_element(y, z, static_cast<int>(rng() % 3) - 1, rng);
      CHECK(q.compose(q.from_hom(g), q.from_hom(f)) == q.from_hom(compose(g, f)));
      CHECK(q.d(q.from_hom(f)) == q.from_hom(differential(f)));
      CHECK((q.from_hom(f) + q.from_hom(f)) == q.from_hom(f + f));
    }
  }
}

TEST_CASE("quasi-inverses of quasi-isomorphisms") {
  const auto k = spec(field(2)).space;
  DrinfeldQuotient q(k);
  const auto o = share(DComplex::single(whole(k), 0));
  const auto qi = quasi_inverse(q, HomElement::identity(o));
  CHECK(qi.checks.ok());
  CHECK(qi.t.eps_degree() == 1);

  // U -> 0 for U acyclic: t∘s = 0, so d(h1) = −id_U
  const auto u = cone(HomElement::identity(o)).complex;
  const auto zero = share(DComplex::zero(k));
  const auto qz = quasi_inverse(q, HomElement::zero(u, zero, 0));
  CHECK(qz.checks.ok());
  const std::size_t uid = q.object(u);
  CHECK(q.d(qz.h1) == q.identity(uid).scaled(1));

  CHECK_THROWS_AS(quasi_inverse(q, HomElement::zero(o, zero, 0)), PreconditionError);

  std::mt19937_64 rng(31);
  std::size_t checked = 0;
  for (const auto& s : {spec_ff(2).space, spec(field(3)).space, spec(dual(2)).space, sierpinski(2)}) {
    DrinfeldQuotient qs(s);
    for (int i = 0; i < 4; ++i) {
      const auto e = share(random_dcomplex(s, rng, -1, 2));
      const auto r = resolve(e, 3);
      if (!r.complete) continue;
      const auto qr = quasi_inverse(qs, *r.hom);
      CHECK(qr.checks.ok());
      ++checked;
    }
  }
  CHECK(checked >= 4);
}

TEST_CASE("pullback on the quotient is a strict dg functor") {
  std::mt19937_64 rng(41);
  for (const auto& ch : all_chains()) {
    const auto& f = ch.f;  // T -> S
    const auto& g = ch.g;  // U -> T
    const Rectifier rf(f), rg(g), rfg(compose(f, g));
    Fixture fx(f.target, rng);
    DrinfeldQuotient qt(f.source), qu(g.source);
    for (int i = 0; i < 4; ++i) {
      const std::size_t x = fx.pick(rng), y = fx.pick(rng), z = fx.pick(rng);
      const auto m = fx.random_word(x, y, rng() % 3, rng);
      const auto m2 = fx.random_word(y, z, rng() % 2, rng);
      const auto fm = quotient_f_star(rf, fx.q, qt, m);
      CHECK(quotient_f_star(rf, fx.q, qt, fx.q.d(m)) == qt.d(fm));
      CHECK(quotient_f_star(rf, fx.q, qt, fx.q.compose(m2, m)) ==
            qt.compose(quotient_f_star(rf, fx.q, qt, m2), fm));
      CHECK(quotient_f_star(rf, fx.q, qt, fx.q.identity(x)) == qt.identity(fm.source));
      CHECK(quotient_f_star(rg, qt, qu, fm) == quotient_f_star(rfg, fx.q, qu, m));
    }
    const auto e = quotient_f_star(rf, fx.q, qt, fx.q.epsilon(fx.acyclic[0]));
    REQUIRE(e.terms.size() <= 1);
    CHECK(qt.is_acyclic_id(e.source));
    CHECK(e == qt.epsilon(e.source));
  }
}

TEST_CASE("derived hom oracle examples") {
  const auto k = spec(field(2)).space;
  const auto o = share(DComplex::single(whole(k), 0));
  const auto d = derived_hom_oracle(realize(*o), realize(*o));
  CHECK(d.complete);
  CHECK(d.dim == 1);

  const auto r = spec(dual(2)).space;
  const auto sky = closed_skyscraper(r);
  const auto ds = derived_hom_oracle(SheafComplex::single(sky, 0), SheafComplex::single(sky, 0));
  CHECK_FALSE(ds.complete);
  CHECK(ds.stabilized);
  CHECK(ds.dim == hom_sheaves(sky, sky).size());
  CHECK(ds.dim == 1);
  CHECK_THROWS_AS(derived_hom_oracle(SheafComplex::single(sky, 0), SheafComplex::single(sky, 0), 0),
                  OracleUnavailable);
  // Ext¹(k, k) = Hom(k, k[1]) = k
  const auto shifted = derived_hom_oracle(SheafComplex::single(sky, 0), SheafComplex::single(sky, -1));
  CHECK(shifted.dim == 1);

  const auto u = cone(HomElement::identity(o)).complex;
  CHECK(derived_hom_oracle(realize(*u), realize(*o)).dim == 0);
  CHECK(derived_hom_oracle(realize(*o), realize(*u)).dim == 0);

  const auto v = vee(2);
  CHECK(derived_hom_oracle(realize(*vee_cech(v)), realize(*vee_cech(v))).dim == 0);
}

TEST_CASE("oracle H⁰ of sheaves is Hom") {
  std::mt19937_64 rng(51);
  std::size_t samples = 0;
  for (const auto& s : {sierpinski(2), spec(dual(2)).space, vee(2), spec_ff(3).space}) {
    for (int i = 0; i < 4; ++i) {
      const auto m = random_module(s, rng), n = random_module(s, rng);
      const auto dh = derived_hom_oracle(SheafComplex::single(m, 0), SheafComplex::single(n, 0));
      CHECK(dh.dim == hom_sheaves(m, n).size());
      ++samples;
    }
  }
  CHECK(samples >= 16);
}

TEST_CASE("mixed hom agrees with the D_S hom complex") {
  std::mt19937_64 rng(52);
  for (const auto& s : {sierpinski(2), spec(dual(2)).space, vee(2), spec_ff(2).space}) {
    for (int i = 0; i < 3; ++i) {
      const auto e = share(random_dcomplex(s, rng, -1, 2));
      const auto f = share(random_dcomplex(s, rng, -1, 2));
      const auto pc = resolve(e, 2).complex;
      const auto g = realize(*f);
      for (int n = -1; n <= 1; ++n) {
        const auto ms = mixed_slice(pc, g, n), next = mixed_slice(pc, g, n + 1);
        const auto hs = hom_slice(pc, f, n);
        CHECK(ms.dim == hs.dim);
        const Matrix md = mixed_differential(ms, next);
        for (int t = 0; t < 3; ++t) {
          const HomElement h = random_hom_element(pc, f, n, rng);
          CHECK(md.apply(ms.coordinates(h)) == next.coordinates(differential(h)));
        }
      }
    }
  }
}

TEST_CASE("H⁰ comparison examples") {
  const auto k = spec(field(2)).space;
  DrinfeldQuotient q(k);
  const auto o = share(DComplex::single(whole(k), 0));
  q.adjoin_acyclic(cone(HomElement::identity(o)).complex);
  const auto c = h0_compare(q, o, o, 2);
  CHECK(c.perf_dim == 1);
  CHECK(c.oracle_dim == 1);
  CHECK(c.image_rank == 1);
  CHECK(c.consistent);
  CHECK(c.checks.ok());

  // the non-split Čech complex: id is nonzero in perf and dies in D
  const auto v = vee(2);
  DrinfeldQuotient qv(v);
  const auto e = vee_cech(v);
  REQUIRE(is_acyclic(*e));
  const auto cv = h0_compare(qv, e, e, 1);
  CHECK(cv.perf_dim >= 1);
  CHECK(cv.oracle_dim == 0);
  CHECK(cv.image_rank == 0);
  CHECK(cv.witnesses >= 2 * cv.perf_dim);
  CHECK(cv.consistent);
  CHECK(cv.checks.ok());
}

TEST_CASE("H⁰ comparison on semisimple bases and under pullback") {
  std::mt19937_64 rng(61);
  const auto ff = spec_ff(2);
  DrinfeldQuotient q(ff.space);
  for (int i = 0; i < 4; ++i) {
    const auto e = share(random_dcomplex(ff.space, rng, -1, 2));
    const auto f = share(random_dcomplex(ff.space, rng, -1, 2));
    const auto c = h0_compare(q, e, f, 1);
    CHECK(c.perf_dim == c.oracle_dim);
    CHECK(c.image_rank == c.oracle_dim);
    CHECK(c.consistent);
    CHECK(c.checks.ok());
  }
  for (const auto& ch : {split_chain(2), split_chain(3)}) {
    DrinfeldQuotient qs(ch.f.target);
    for (int i = 0; i < 3; ++i) {
      const auto e = share(random_dcomplex(ch.f.target, rng, -1, 2));
      const auto f = share(random_dcomplex(ch.f.target, rng, -1, 2));
      const auto c = h0_compare(qs, e, f, 1, &ch.f, 7);
      REQUIRE(c.square);
      CHECK(*c.square);
      CHECK(c.checks.ok());
    }
  }
}
