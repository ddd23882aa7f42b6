#include <doctest.h>

#include "support.hpp"

using namespace dgperf;
using namespace support;

TEST_CASE("sections examples") {
  const auto d = std::make_shared<const FinRingedSpace>(FinRingedSpace::discrete("D", {"a", "b"}, {dual(2), field(2)}));
  CHECK(sections(Sheaf::structure(d), d->all()).dim() == 3);

  const auto x = sierpinski(2);
  const auto m = ext_by_zero(x, Open{2});
  CHECK(m.validate().ok());
  CHECK(sections(m, x->all()).dim() == 0);
  CHECK(sections(m, Open{2}).dim() == 1);
  CHECK(sections(Sheaf::zero(x), x->all()).dim() == 0);
  CHECK(sections(Sheaf::structure(x), Open{}).dim() == 0);
  CHECK_THROWS_AS(sections(m, Open{1}), PreconditionError);
}

TEST_CASE("section counts agree with enumeration of families") {
  std::mt19937_64 rng(3);
  for (const auto& s : {sierpinski(2), sierpinski(3), split_chain(2).f.source, dual_chain(2).f.source}) {
    for (int i = 0; i < 6; ++i) {
      const auto m = random_module(s, rng);
      REQUIRE(m->validate().ok());
      CHECK(check_stalk_sections(*m).ok());
      for (const auto& u : opens(*s))
        CHECK(element_count(m->p(), sections(*m, u).dim()) == count_sections_brute(*m, u));
    }
  }
}

TEST_CASE("ext_by_zero examples") {
  const auto x = sierpinski(2);
  CHECK(ext_by_zero(x, x->all()) == Sheaf::structure(x));
  CHECK(ext_by_zero(x, Open{}).total_dim() == 0);
  const auto e = ext_by_zero(x, Open{2});
  CHECK(e.stalk(0).dim() == 0);
  CHECK(e.stalk(1).dim() == 1);
  for (const auto& u : opens(*x)) CHECK(check_ext_by_zero_structure(*x, u).ok());
  CHECK_THROWS_AS(ext_by_zero(x, Open{1}), PreconditionError);
}

TEST_CASE("hom_sheaves agrees with brute force on the Sierpinski space") {
  const auto x = sierpinski(2);
  const std::vector<SheafPtr> sheaves{ext(x, x->all()), ext(x, Open{2}), ext(x, Open{})};
  for (const auto& m : sheaves)
    for (const auto& n : sheaves) {
      const auto basis = hom_sheaves(m, n);
      std::size_t unknowns = 0;
      for (std::size_t p = 0; p < 2; ++p) unknowns += m->stalk(p).dim() * n->stalk(p).dim();
      std::uint64_t count = 0;
      for_each_element(2, unknowns, [&](const Vector& v) {
        SheafMap f{m, n, {}};
        std::size_t k = 0;
        for (std::size_t p = 0; p < 2; ++p) {
          Matrix c(2, n->stalk(p).dim(), m->stalk(p).dim());
          for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = v[k++];
          f.components.push_back(c);
        }
        if (f.validate().ok()) ++count;
      });
      CHECK(count == element_count(2, basis.size()));
    }
}

TEST_CASE("sigma examples and round trips") {
  const auto x = sierpinski(2);
  const auto o = ext(x, x->all());
  // id -> 1
  const Vector one = sigma(SheafMap::identity(o), x->all());
  CHECK(one == Vector{1, 0, 1});
  CHECK(sigma_inverse(x, x->all(), o, one) == SheafMap::identity(o));

  const auto eta_only = Open{2};
  CHECK(hom_sheaves(ext(x, eta_only), o).size() == 1);
  CHECK(sections(*o, eta_only).dim() == 1);

  const auto z = ext(x, Open{});
  CHECK(hom_sheaves(ext(x, x->all()), z).empty());

  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const auto m = random_module(x, rng);
    for (const auto& v : opens(*x)) {
      const auto src = ext(x, v);
      for (const auto& phi : hom_sheaves(src, m)) {
        const Vector s = sigma(phi, v);
        CHECK(sections(*m, v).space.contains(s));
        CHECK(sigma_inverse(x, v, m, s) == phi);
      }
      CHECK(hom_sheaves(src, m).size() == sections(*m, v).dim());
    }
  }
}

TEST_CASE("sigma is natural in M") {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (const auto& c : all_chains()) {
    const auto s = c.f.target;
    for (int i = 0; i < 6; ++i) {
      const auto m = random_module(s, rng);
      const auto m2 = random_module(s, rng);
      const auto chi = random_hom(m, m2, rng);
      REQUIRE(chi.validate().ok());
      for (const auto& v : opens(*s)) {
        const auto phi = random_hom(ext(s, v), m, rng);
        CHECK(sigma(compose(chi, phi), v) == sections_map(chi, v).apply(sigma(phi, v)));
        ++checked;
      }
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("pushforward examples and section identity") {
  const auto c = split_chain(2);
  const auto o_t = Sheaf::structure(c.f.source);
  const auto pf = pushforward(c.f, std::make_shared<const Sheaf>(o_t));
  CHECK(pf.sheaf->stalk(0).dim() == 2);
  CHECK(pf.sheaf->validate().ok());
  CHECK(pushforward(c.f, ext(c.f.source, Open{})).sheaf->total_dim() == 0);

  std::mt19937_64 rng(5);
  for (const auto& ch : all_chains())
    for (const RingedMap* f : {&ch.f, &ch.g}) {
      const auto n = random_module(f->source, rng);
      const auto push = pushforward(*f, n);
      REQUIRE(push.sheaf->validate().ok());
      for (const auto& u : opens(*f->target)) {
        const auto sec_t = sections(*n, f->preimage(u));
        const auto sec_s = sections(*push.sheaf, u);
        CHECK(sec_t.dim() == sec_s.dim());
        const Matrix fwd = pushforward_sections(*f, n, u);
        const Matrix back = pushforward_sections_inverse(*f, n, u);
        for (const auto& b : sec_t.space.basis()) {
          CHECK(sec_s.space.contains(fwd.apply(b)));
          CHECK(back.apply(fwd.apply(b)) == b);
        }
      }
      const auto id = RingedMap::identity(f->source);
      const auto same = pushforward(id, n).sheaf;
      for (std::size_t x = 0; x < n->size(); ++x) CHECK(same->stalk(x).dim() == n->stalk(x).dim());
    }
}

TEST_CASE("pullback examples") {
  const auto c = split_chain(2);
  // g: Spec F2 -> Spec(F2 x F2) hits exactly one point
  const auto t = c.g.target;
  const std::size_t hit = c.g.point_map[0];
  const auto hit_sheaf = pullback(c.g, ext(t, Open{std::uint64_t{1} << hit})).sheaf;
  const auto miss_sheaf = pullback(c.g, ext(t, Open{std::uint64_t{1} << (1 - hit)})).sheaf;
  CHECK(hit_sheaf->stalk(0).dim() == 1);
  CHECK(miss_sheaf->stalk(0).dim() == 0);

  for (const auto& ch : all_chains())
    for (const RingedMap* f : {&ch.f, &ch.g}) {
      const auto pb = pullback(*f, ext(f->target, f->target->all())).sheaf;
      REQUIRE(pb->validate().ok());
      for (std::size_t x = 0; x < pb->size(); ++x) CHECK(pb->stalk(x).dim() == f->source->stalk(x)->dim());
    }
}

TEST_CASE("adjunction round trips and triangle identities") {
  std::mt19937_64 rng(77);
  for (const auto& ch : all_chains())
    for (const RingedMap* f : {&ch.f, &ch.g}) {
      for (int i = 0; i < 3; ++i) {
        const auto m = random_module(f->target, rng);
        const auto n = random_module(f->source, rng);
        const auto fm = pullback(*f, m).sheaf;
        const auto fn = pushforward(*f, n).sheaf;
        const auto left = hom_sheaves(fm, n);
        const auto right = hom_sheaves(m, fn);
        CHECK(left.size() == right.size());
        for (const auto& psi : left) {
          const auto chi = adjoint_right(*f, m, psi);
          CHECK(chi.validate().ok());
          CHECK(adjoint_left(*f, n, chi) == psi);
        }
        for (const auto& chi : right) CHECK(adjoint_right(*f, m, adjoint_left(*f, n, chi)) == chi);

        // ε_{f^*M} ∘ f^*(η_M) = id and f_*(ε_N) ∘ η_{f_*N} = id
        CHECK(compose(counit(*f, fm), pullback_map(*f, unit(*f, m))) == SheafMap::identity(fm));
        CHECK(compose(pushforward_map(*f, counit(*f, n)), unit(*f, fn)) == SheafMap::identity(fn));

        // unit is natural
        const auto m2 = random_module(f->target, rng);
        const auto phi = random_hom(m, m2, rng);
        CHECK(compose(pushforward_map(*f, pullback_map(*f, phi)), unit(*f, m)) == compose(unit(*f, m2), phi));
      }
    }
}

TEST_CASE("theta examples") {
  const auto x = sierpinski(2);
  const auto id = RingedMap::identity(x);
  for (const auto& v : opens(*x)) {
    const auto th = theta(id, v);
    CHECK(th.forward.validate().ok());
    CHECK(check_theta_canonical(id, v, th).ok());
  }

  const auto c = split_chain(2);
  const std::size_t hit = c.g.point_map[0];
  const Open unhit{std::uint64_t{1} << (1 - hit)};
  const auto th = theta(c.g, unhit);
  CHECK(th.forward.source->total_dim() == 0);
  CHECK(th.forward.target->total_dim() == 0);
}

TEST_CASE("theta is invertible, canonical and satisfies its defining property") {
  std::mt19937_64 rng(13);
  for (const auto& ch : all_chains())
    for (const RingedMap& fg : {ch.f, ch.g, compose(ch.f, ch.g)}) {
      for (const auto& v : opens(*fg.target)) {
        const auto th = theta(fg, v);
        CHECK(th.forward.validate().ok());
        CHECK(compose(th.inverse, th.forward) == SheafMap::identity(th.forward.source));
        CHECK(check_theta_canonical(fg, v, th).ok());
        for (int i = 0; i < 2; ++i) {
          const auto n = random_module(fg.source, rng);
          for (const auto& psi : hom_sheaves(th.forward.target, n))
            CHECK(compose(psi, th.forward) == theta_chain(fg, v, n, psi));
        }
      }
    }
}

TEST_CASE("alpha is invertible and natural") {
  std::mt19937_64 rng(31);
  for (const auto& ch : all_chains()) {
    const auto s = ch.f.target;
    for (int i = 0; i < 3; ++i) {
      const auto m = random_module(s, rng);
      const auto a = alpha(ch.f, ch.g, m);
      CHECK(a.validate().ok());
      CHECK(a.is_iso());
      const auto m2 = random_module(s, rng);
      const auto phi = random_hom(m, m2, rng);
      const auto fg = compose(ch.f, ch.g);
      CHECK(compose(alpha(ch.f, ch.g, m2), pullback_map(fg, phi)) ==
            compose(pullback_map(ch.g, pullback_map(ch.f, phi)), a));
    }
    // g = id
    const auto o = ext(s, s->all());
    const auto ida = alpha(ch.f, RingedMap::identity(ch.f.source), o);
    CHECK(ida.is_iso());
  }
}

TEST_CASE("kernel and cokernel sheaves are exact stalkwise") {
  std::mt19937_64 rng(2);
  const auto x = sierpinski(3);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_ext_sum(x, rng, 3);
    const auto b = random_ext_sum(x, rng, 3);
    const auto phi = random_hom(a, b, rng);
    const auto k = kernel_of(phi);
    const auto q = cokernel_of(phi);
    CHECK(k.source->validate().ok());
    CHECK(q.target->validate().ok());
    CHECK(k.validate().ok());
    CHECK(q.validate().ok());
    CHECK(compose(phi, k).is_zero());
    CHECK(compose(q, phi).is_zero());
    CHECK(k.is_mono());
    CHECK(q.is_epi());
    for (std::size_t p = 0; p < 2; ++p)
      CHECK(k.source->stalk(p).dim() + b->stalk(p).dim() == a->stalk(p).dim() + q.target->stalk(p).dim());
  }
}
