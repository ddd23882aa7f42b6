#include <doctest.h>

#include "dgperf/rectify.hpp"
#include "support.hpp"

using namespace dgperf;
using namespace support;

TEST_CASE("realization examples and round trips") {
  const auto x = sierpinski(2);
  const DObject empty{x, {}};
  CHECK(to_sheaf(empty).sum->total_dim() == 0);
  const DObject whole{x, {x->all()}};
  CHECK(*to_sheaf(whole).sum == Sheaf::structure(x));
  const DObject pair{x, {x->all(), Open{2}}};
  CHECK(to_sheaf(DMorphism::identity(pair)) == SheafMap::identity(to_sheaf(pair).sum));

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_dobject(x, rng), b = random_dobject(x, rng);
    const auto m = random_dmorphism(a, b, rng);
    CHECK(m.validate().ok());
    const auto phi = to_sheaf(m);
    CHECK(phi.validate().ok());
    CHECK(from_sheaf_map(a, b, phi) == m);
  }
}

TEST_CASE("entry composition matches composition of realized sheaf maps") {
  std::mt19937_64 rng(8);
  for (const auto& ch : all_chains())
    for (const auto& s : {ch.f.target, ch.f.source, ch.g.source}) {
      for (int i = 0; i < 8; ++i) {
        const auto a = random_dobject(s, rng), b = random_dobject(s, rng), c = random_dobject(s, rng);
        const auto m1 = random_dmorphism(a, b, rng);
        const auto m2 = random_dmorphism(b, c, rng);
        const auto m3 = random_dmorphism(c, a, rng);
        CHECK(to_sheaf(compose(m2, m1)) == compose(to_sheaf(m2), to_sheaf(m1)));
        CHECK(compose(m3, compose(m2, m1)) == compose(compose(m3, m2), m1));
        CHECK(compose(DMorphism::identity(b), m1) == m1);
        CHECK(compose(m1, DMorphism::identity(a)) == m1);
      }
    }
}

TEST_CASE("f_star_object examples") {
  const auto c = split_chain(2);
  const auto x = sierpinski(2);
  const DObject xs{x, {x->all(), Open{2}}};
  CHECK(f_star_object(RingedMap::identity(x), xs) == xs);

  const DObject whole{c.f.target, {c.f.target->all()}};
  CHECK(f_star_object(c.f, whole).opens == std::vector<Open>{c.f.source->all()});

  const std::size_t hit = c.g.point_map[0];
  const Open p_hit{std::uint64_t{1} << hit}, p_miss{std::uint64_t{1} << (1 - hit)};
  const DObject singles{c.g.target, {p_hit, p_miss}};
  CHECK(f_star_object(c.g, singles).opens == std::vector<Open>{c.g.source->all(), Open{}});
}

TEST_CASE("f_star_morphism examples") {
  std::mt19937_64 rng(6);
  const auto x = sierpinski(3);
  const auto id = RingedMap::identity(x);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_dobject(x, rng), b = random_dobject(x, rng);
    const auto m = random_dmorphism(a, b, rng);
    CHECK(f_star_morphism(id, m) == m);
    CHECK(f_star_morphism(id, DMorphism::identity(a)) == DMorphism::identity(a));
  }

  // multiplication by a global section a on [S] goes to multiplication by f#(a)
  const auto c = dual_chain(3);
  const auto& f = c.f;  // Spec(R x R) -> Spec R
  const DObject whole{f.target, {f.target->all()}};
  for_each_element(3, 2, [&](const Vector& a) {
    DMorphism m = DMorphism::zero(whole, whole);
    m.entry(0, 0) = a;
    const auto image = f_star_morphism(f, m);
    Vector expect;
    for (std::size_t t = 0; t < f.source->size(); ++t) {
      const Vector v = f.sharp[t].apply(a);
      expect.insert(expect.end(), v.begin(), v.end());
    }
    CHECK(image.entry(0, 0) == expect);
  });
}

TEST_CASE("strict functoriality on all singleton objects of the split chain") {
  const auto c = split_chain(2);
  std::vector<DObject> objects;
  std::vector<DMorphism> morphisms;
  for (const auto& v : opens(*c.f.target)) objects.push_back(DObject{c.f.target, {v}});
  for (const auto& a : objects)
    for (const auto& b : objects) {
      const auto sec = entry_sections(c.f.target, a.opens[0], b.opens[0]);
      for_each_element(2, sec.dim(), [&](const Vector& coords) {
        DMorphism m = DMorphism::zero(a, b);
        m.entry(0, 0) = sec.space.element(coords);
        morphisms.push_back(m);
      });
    }
  const auto report = check_strict_functoriality(c.f, c.g, objects, morphisms);
  CHECK(report.ok());
  for (const auto& f : report.failures) MESSAGE(f);
}

TEST_CASE("strict functoriality on random samples over every chain") {
  std::mt19937_64 rng(2024);
  for (const auto& ch : all_chains()) {
    std::vector<DObject> objects;
    std::vector<DMorphism> morphisms;
    for (int i = 0; i < 20; ++i) {
      const auto a = random_dobject(ch.f.target, rng), b = random_dobject(ch.f.target, rng);
      objects.push_back(a);
      morphisms.push_back(random_dmorphism(a, b, rng));
      morphisms.push_back(random_dmorphism(b, random_dobject(ch.f.target, rng), rng));
    }
    const auto report = check_strict_functoriality(ch.f, ch.g, objects, morphisms);
    CHECK_MESSAGE(report.ok(), ch.name);
    // g = id
    CHECK(check_strict_functoriality(ch.f, RingedMap::identity(ch.f.source), objects, morphisms).ok());
  }
}

TEST_CASE("theta cocycle on every open of every chain") {
  std::mt19937_64 rng(99);
  for (const auto& ch : all_chains()) {
    std::vector<SheafPtr> probes;
    for (int i = 0; i < 3; ++i) probes.push_back(random_module(ch.g.source, rng));
    for (const auto& w : opens(*ch.f.target)) {
      const auto report = check_theta_cocycle(ch.f, ch.g, w, probes);
      CHECK_MESSAGE(report.ok(), ch.name);
      for (const auto& f : report.failures) MESSAGE(f);
    }
    const auto id_t = RingedMap::identity(ch.f.source);
    for (const auto& w : opens(*ch.f.target)) CHECK(check_theta_cocycle(ch.f, id_t, w, {}).ok());
  }
}

TEST_CASE("theta is natural and f_star is linear") {
  std::mt19937_64 rng(15);
  for (const auto& ch : all_chains()) {
    const Rectifier r(ch.f);
    for (int i = 0; i < 6; ++i) {
      const auto a = random_dobject(ch.f.target, rng), b = random_dobject(ch.f.target, rng);
      const auto m1 = random_dmorphism(a, b, rng), m2 = random_dmorphism(a, b, rng);
      CHECK(r.check_theta_naturality(m1).ok());
      CHECK(r.morphism(m1 + m2.scaled(2)) == r.morphism(m1) + r.morphism(m2).scaled(2));
    }
  }
}
