#include "suites.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <set>
#include <sstream>

#include "dgperf/caps.hpp"

namespace dgperf::cli {

namespace {

std::string ser(const Matrix& m) {
  std::ostringstream out;
  out << m.rows() << 'x' << m.cols() << ':';
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out << m(r, c) << ',';
  return out.str();
}

std::string ser(const DObject& x) {
  std::ostringstream out;
  out << '[';
  for (const Open v : x.opens) out << v.mask << ',';
  out << ']';
  return out.str();
}

std::string ser(const DMorphism& m) {
  std::ostringstream out;
  out << ser(m.source) << "->" << ser(m.target) << '{';
  for (const auto& e : m.entries) {
    for (auto v : e) out << v << ',';
    out << ';';
  }
  out << '}';
  return out.str();
}

std::string ser(const SheafMap& m) {
  std::string out;
  for (const auto& c : m.components) out += ser(c) + '|';
  return out;
}

std::string ser(const Sheaf& m) {
  std::string out;
  for (std::size_t x = 0; x < m.size(); ++x) {
    out += std::to_string(m.stalk(x).dim()) + '<';
    for (const auto& a : m.stalk(x).action()) out += ser(a);
    out += '>';
  }
  return out;
}

std::string ser(const HomElement& h) {
  std::string out = canonical_string(*h.source) + "=>" + canonical_string(*h.target) + '@' + std::to_string(h.degree);
  for (const auto& c : h.components) out += ser(c);
  return out;
}

json failures_of(const CheckReport& r) {
  json out = json::array();
  for (std::size_t i = 0; i < r.failures.size() && i < 5; ++i) out.push_back(r.failures[i]);
  return out;
}

void fail(Case& c, const CheckReport& r, json witness = nullptr) {
  c.verdict = Verdict::fail;
  c.counterexample["failures"] = failures_of(r);
  if (!witness.is_null()) c.counterexample["witness"] = std::move(witness);
}

bool has_field_stalks(const FinRingedSpace& s) {
  for (std::size_t x = 0; x < s.size(); ++x) {
    const auto& a = *s.stalk(x);
    if (nilradical(a).dim() != 0 || enumerate_idempotents_and_primes(a).primitive.size() != 1) return false;
  }
  return true;
}

std::vector<ComplexPtr> complexes_on(const Workspace& w, const SpacePtr& s) {
  std::vector<ComplexPtr> out;
  for (const auto& [id, e] : w.complexes)
    if (e->base == s) out.push_back(e);
  return out;
}

std::vector<std::pair<std::string, SheafPtr>> sheaves_on(const Workspace& w, const SpacePtr& s) {
  std::vector<std::pair<std::string, SheafPtr>> out;
  for (const auto& [id, m] : w.sheaves)
    if (m->base() == s) out.emplace_back(id, m);
  return out;
}

/// Ambient coordinates of the compatible families over u, by enumeration.
template <typename Fn>
void for_each_family(const Sheaf& m, Open u, Fn&& fn) {
  const auto& s = *m.base();
  const auto pts = s.points_of(u);
  std::vector<std::size_t> off;
  std::size_t ambient = 0;
  for (auto x : pts) {
    off.push_back(ambient);
    ambient += m.stalk(x).dim();
  }
  if (element_count(m.p(), ambient) > caps().max_enumeration) throw SizeError("family enumeration past the cap");
  auto part = [&](const Vector& v, std::size_t a) {
    return Vector(v.begin() + static_cast<std::ptrdiff_t>(off[a]),
                  v.begin() + static_cast<std::ptrdiff_t>(off[a] + m.stalk(pts[a]).dim()));
  };
  for_each_element(m.p(), ambient, [&](const Vector& v) {
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b)
        if (a != b && s.leq(pts[a], pts[b]) && m.comparison(pts[a], pts[b]).apply(part(v, a)) != part(v, b)) return;
    fn(v, pts, part);
  });
}

std::uint64_t count_families(const Sheaf& m, Open u) {
  std::uint64_t n = 0;
  for_each_family(m, u, [&](const Vector&, const auto&, const auto&) { ++n; });
  return n;
}

std::size_t image_count_brute(const SheafMap& pi, Open v) {
  std::set<Vector> seen;
  for_each_family(*pi.source, v, [&](const Vector& t, const std::vector<std::size_t>& pts, const auto& part) {
    Vector img;
    for (std::size_t a = 0; a < pts.size(); ++a) {
      const Vector ia = pi.components[pts[a]].apply(part(t, a));
      img.insert(img.end(), ia.begin(), ia.end());
    }
    seen.insert(img);
  });
  return seen.size();
}

std::size_t count_opens_brute(const FinRingedSpace& s) {
  std::size_t n = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << s.size()); ++m) {
    bool open = true;
    for (std::size_t x = 0; x < s.size() && open; ++x)
      for (std::size_t y = 0; y < s.size() && open; ++y)
        if (((m >> x) & 1U) && s.leq(x, y) && !((m >> y) & 1U)) open = false;
    n += open;
  }
  return n;
}

Scalar sign(std::uint32_t p, int e) { return (((e % 2) + 2) % 2 == 0) ? 1 : p - 1; }

class Runner {
 public:
  Runner(std::string suite, const RunOptions& opts) : suite_(std::move(suite)), opts_(opts) {}

  template <typename Body>
  void run(const std::string& id, Body&& body) {
    Case c;
    c.id = id;
    std::mt19937_64 rng(opts_.seed ^ fnv1a(suite_ + "/" + id));
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(c, rng);
    } catch (const OracleUnavailable& e) {
      c.verdict = Verdict::unavailable;
      c.detail["reason"] = e.what();
    } catch (const SizeError& e) {
      c.verdict = Verdict::unavailable;
      c.detail["reason"] = std::string("size cap: ") + e.what();
    } catch (const std::exception& e) {
      c.verdict = Verdict::fail;
      c.counterexample["error"] = e.what();
    }
    if (c.verdict == Verdict::fail)
      c.counterexample["replay"] = {{"suite", suite_}, {"case", id}, {"seed", opts_.seed}};
    if (opts_.timing) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      std::cerr << suite_ << '/' << id << ' ' << dt.count() << " s\n";
    }
    cases_.push_back(std::move(c));
  }

  std::vector<Case> take() { return std::move(cases_); }
  const RunOptions& options() const { return opts_; }

 private:
  std::string suite_;
  const RunOptions& opts_;
  std::vector<Case> cases_;
};

// ---------------------------------------------------------------------------

void functoriality(const Workspace& w, Runner& run) {
  for (const auto& [id, ch] : w.chains)
    run.run(id, [&, &ch = ch](Case& c, std::mt19937_64& rng) {
      const auto& s = ch.f.target;
      std::vector<DObject> objects;
      std::vector<DMorphism> morphisms;
      std::string input;
      for (int i = 0; i < 60; ++i) {
        const auto a = random_dobject(s, rng), b = random_dobject(s, rng), e = random_dobject(s, rng);
        objects.push_back(a);
        morphisms.push_back(random_dmorphism(a, b, rng));
        morphisms.push_back(random_dmorphism(b, e, rng));
      }
      for (const auto& m : morphisms) input += ser(m);
      c.digest = fnv1a_hex(input);
      c.detail = {{"objects", objects.size()}, {"morphisms", morphisms.size()}};
      const auto r = check_strict_functoriality(ch.f, ch.g, objects, morphisms);
      if (!r.ok()) {
        json witness;
        for (const auto& m : morphisms)
          if (!check_strict_functoriality(ch.f, ch.g, {}, {m}).ok()) {
            witness = {{"morphism", ser(m)}};
            break;
          }
        fail(c, r, witness);
      }
    });
}

void theta_cocycle(const Workspace& w, Runner& run) {
  for (const auto& [id, ch] : w.chains)
    run.run(id, [&, &ch = ch](Case& c, std::mt19937_64& rng) {
      std::vector<SheafPtr> probes;
      std::string input;
      for (int i = 0; i < 10; ++i) {
        probes.push_back(random_module(ch.g.source, rng));
        input += ser(*probes.back());
      }
      c.digest = fnv1a_hex(input);
      const auto ws = opens(*ch.f.target);
      c.detail = {{"opens", ws.size()}, {"probes", probes.size()}};
      for (const Open v : ws) {
        const auto r = check_theta_cocycle(ch.f, ch.g, v, probes);
        if (!r.ok()) {
          fail(c, r, {{"open", ch.f.target->describe(v)}});
          return;
        }
      }
    });
}

void sigma_naturality(const Workspace& w, Runner& run) {
  for (const auto& [id, e] : w.spaces)
    run.run("sigma/" + id, [&, &s = e.space](Case& c, std::mt19937_64& rng) {
      const auto ws = opens(*s);
      CheckReport r;
      std::string input;
      std::size_t samples = 0;
      json witness;
      for (int i = 0; i < 100; ++i) {
        const Open v = ws[rng() % ws.size()];
        const auto o = std::make_shared<const Sheaf>(ext_by_zero(s, v));
        const auto m = random_module(s, rng), n = random_module(s, rng);
        const auto phi = random_hom(o, m, rng), chi = random_hom(m, n, rng);
        input += ser(phi) + ser(chi);
        ++samples;
        const Vector a = sigma(compose(chi, phi), v), b = sections_map(chi, v).apply(sigma(phi, v));
        if (a != b) {
          r.fail("σ(χ∘φ) != Γ(χ)σ(φ) over " + s->describe(v));
          if (witness.is_null()) witness = {{"phi", ser(phi)}, {"chi", ser(chi)}};
        }
        if (!(sigma_inverse(s, v, m, sigma(phi, v)) == phi)) r.fail("σ⁻¹σ(φ) != φ over " + s->describe(v));
      }
      c.digest = fnv1a_hex(input);
      c.detail = {{"samples", samples}};
      if (!r.ok()) fail(c, r, witness);
    });
  for (const auto& [id, ch] : w.chains)
    run.run("theta/" + id, [&, &ch = ch](Case& c, std::mt19937_64& rng) {
      const Rectifier rect(ch.f);
      CheckReport r;
      std::string input;
      json witness;
      for (int i = 0; i < 100; ++i) {
        const auto a = random_dobject(ch.f.target, rng), b = random_dobject(ch.f.target, rng);
        const auto m = random_dmorphism(a, b, rng);
        input += ser(m);
        const auto ri = rect.check_theta_naturality(m);
        if (!ri.ok() && witness.is_null()) witness = {{"morphism", ser(m)}};
        r.merge(ri);
      }
      c.digest = fnv1a_hex(input);
      c.detail = {{"samples", 100}};
      if (!r.ok()) fail(c, r, witness);
    });
}

void dg_laws(const Workspace& w, Runner& run) {
  const bool flip = run.options().flip_cone_sign;
  for (const auto& [id, e] : w.spaces)
    run.run(id, [&, &s = e.space](Case& c, std::mt19937_64& rng) {
      auto cx = complexes_on(w, s);
      for (int i = 0; i < 3; ++i) cx.push_back(share(random_dcomplex(s, rng, -1, 3)));
      std::string input;
      for (const auto& x : cx) input += canonical_string(*x) + ';';
      const std::uint32_t p = s->p();
      CheckReport r;
      json witness;
      std::size_t samples = 0, cones = 0;
      auto pick = [&] { return cx[rng() % cx.size()]; };
      for (int i = 0; i < 60; ++i) {
        const auto a = pick(), b = pick(), d = pick();
        const int da = static_cast<int>(rng() % 3) - 1, db = static_cast<int>(rng() % 3) - 1;
        const HomElement h = random_hom_element(a, b, da, rng), k = random_hom_element(b, d, db, rng);
        input += ser(h) + ser(k);
        samples += 2;
        if (!differential(differential(h)).is_zero()) {
          r.fail("d² != 0");
          if (witness.is_null()) witness = {{"element", ser(h)}};
        }
        const HomElement lhs = differential(compose(k, h));
        const HomElement rhs = compose(differential(k), h) + compose(k, differential(h)).scaled(sign(p, db));
        if (!(lhs == rhs)) {
          r.fail("Leibniz fails");
          if (witness.is_null()) witness = {{"first", ser(h)}, {"second", ser(k)}};
        }
      }
      auto check_cone = [&](const HomElement& phi, bool expect_acyclic) {
        const Cone cn = cone(phi, flip);
        ++cones;
        const auto v = cn.complex->validate();
        if (!v.ok()) {
          r.merge(v, "cone: ");
          if (witness.is_null()) witness = {{"cone_of", ser(phi)}, {"cone", canonical_string(*cn.complex)}};
          return;
        }
        const auto hc = homology(*cn.complex), he = homology(*phi.source), hf = homology(*phi.target);
        if (expect_acyclic && !hc.acyclic()) r.fail("cone(id) is not acyclic");
        for (std::size_t x = 0; x < s->size(); ++x)
          if (hc.euler(x) != hf.euler(x) - he.euler(x)) r.fail("Euler characteristic of a cone");
      };
      for (const auto& x : cx) {
        check_cone(HomElement::identity(x), true);
        for (int t = 0; t < 2; ++t) check_cone(random_cocycle(x, pick(), rng), false);
        const auto sh = shift(*x, 1);
        if (!sh.validate().ok()) r.fail("shift breaks d²");
        const auto h0 = homology(*x), h1 = homology(sh);
        for (int n = h1.lo; n <= h1.hi; ++n)
          for (std::size_t y = 0; y < s->size(); ++y)
            if (h1.at(n, y) != h0.at(n + 1, y)) r.fail("homology of E[1] is not shifted");
      }
      c.digest = fnv1a_hex(input);
      c.detail = {{"complexes", cx.size()}, {"hom_elements", samples}, {"cones", cones}};
      if (!r.ok()) fail(c, r, witness);
    });
}

void cover(const Workspace& w, Runner& run) {
  for (const auto& [id, e] : w.spaces)
    run.run(id, [&, &s = e.space](Case& c, std::mt19937_64& rng) {
      std::vector<SheafMap> epis;
      for (const auto& [mid, m] : sheaves_on(w, s)) epis.push_back(SheafMap::identity(m));
      for (int i = 0; i < 6; ++i) {
        const auto n = random_ext_sum(s, rng, 3);
        epis.push_back(cokernel_of(random_hom(random_ext_sum(s, rng), n, rng)));
      }
      std::string input;
      CheckReport r;
      json sizes = json::array();
      for (const auto& pi : epis) {
        input += ser(*pi.source) + ser(pi);
        const auto cv = cover_epi(pi);
        if (!cv.composite.is_epi()) r.fail("composite is not an epimorphism");
        std::size_t brute = 0;
        for (const Open v : opens(*s)) brute += image_count_brute(pi, v);
        if (brute != cv.size()) r.fail("|J| = " + std::to_string(cv.size()) + " but enumeration gives " + std::to_string(brute));
        sizes.push_back(cv.size());
      }
      c.digest = fnv1a_hex(input);
      c.detail = {{"epimorphisms", epis.size()}, {"index_sizes", sizes}};
      if (!r.ok()) fail(c, r);
    });
}

void resolve_suite(const Workspace& w, Runner& run) {
  for (const auto& [id, e] : w.spaces)
    run.run(id, [&, &s = e.space](Case& c, std::mt19937_64& rng) {
      auto cx = complexes_on(w, s);
      for (int i = 0; i < 5; ++i) cx.push_back(share(random_dcomplex(s, rng, -1, 3)));
      const bool fields = has_field_stalks(*s);
      std::string input;
      CheckReport r;
      std::size_t complete = 0;
      for (const auto& x : cx) {
        input += canonical_string(*x) + ';';
        const auto res = resolve(x, run.options().depth.value_or(2));
        complete += res.complete;
        if (!res.complex->validate().ok()) r.fail("resolution is not a complex");
        for (const auto& obj : res.complex->components)
          for (const Open v : obj.opens) {
            bool minimal = false;
            for (std::size_t y = 0; y < s->size(); ++y) minimal = minimal || s->minimal_open(y) == v;
            if (!minimal) r.fail("generator over a non-minimal open");
          }
        if (!res.hom || !differential(*res.hom).is_zero()) {
          r.fail("resolution map is not a chain map");
          continue;
        }
        const auto h = homology(*cone(*res.hom).complex);
        for (int n = res.valid_lo; n <= res.valid_hi; ++n)
          for (std::size_t y = 0; y < s->size(); ++y)
            if (h.at(n, y) != 0) r.fail("cone homology in degree " + std::to_string(n) + " inside the validity range");
        if (fields && !x->empty()) {
          const auto span = static_cast<std::size_t>(x->hi - x->lo);
          if (!resolve(x, span + 1).complete) r.fail("field stalks but incomplete within span + 1");
        }
      }
      c.digest = fnv1a_hex(input);
      c.detail = {{"inputs", cx.size()}, {"complete", complete}, {"field_stalks", fields}};
      if (!r.ok()) fail(c, r);
    });
}

void audit(const Workspace& w, Runner& run) {
  for (const auto& [id, e] : w.spaces)
    run.run(id, [&, &e = e](Case& c, std::mt19937_64&) {
      const auto& s = e.space;
      auto sheaves = sheaves_on(w, s);
      sheaves.emplace_back("O", std::make_shared<const Sheaf>(Sheaf::structure(s)));
      std::string input;
      for (const auto& [n, m] : sheaves) input += n + ser(*m);
      c.digest = fnv1a_hex(input);
      const auto a = cardinality_audit(s, sheaves, e.spec ? &*e.spec : nullptr);
      CheckReport r = a.checks;
      if (a.open_count != count_opens_brute(*s)) r.fail("|Op(S)| disagrees with subset enumeration");
      json rows = json::array();
      for (const auto& row : a.rows) {
        const auto it = std::find_if(sheaves.begin(), sheaves.end(), [&](const auto& pr) { return pr.first == row.sheaf; });
        const std::uint64_t brute = count_families(*it->second, row.open);
        if (!row.count || *row.count != brute)
          r.fail("|Γ(" + s->describe(row.open) + ", " + row.sheaf + ")| disagrees with enumeration");
        rows.push_back({{"sheaf", row.sheaf}, {"open", s->describe(row.open)}, {"count", brute}});
      }
      if (e.spec) r.merge(check_distinguished_cover(*e.spec), "distinguished cover: ");
      c.detail = {{"opens", a.open_count}, {"rows", rows}, {"spec", e.spec.has_value()}};
      if (!r.ok()) fail(c, r);
    });
}

void quotient(const Workspace& w, Runner& run) {
  for (const auto& [id, e] : w.spaces) {
    const auto cx = complexes_on(w, e.space);
    if (cx.empty()) continue;
    run.run(id, [&, &s = e.space, cx](Case& c, std::mt19937_64&) {
      DrinfeldQuotient q(s);
      std::string input;
      CheckReport r;
      std::size_t quasi = 0, from_resolve = 0;
      const auto zero = share(DComplex::zero(s));
      for (const auto& x : cx) {
        input += canonical_string(*x) + ';';
        q.adjoin_acyclic(cone(HomElement::identity(x)).complex);
        if (is_acyclic(*x)) {
          q.adjoin_acyclic(x);
          const auto qi = quasi_inverse(q, HomElement::zero(x, zero, 0));
          r.merge(qi.checks, "U -> 0: ");
          ++quasi;
        }
        r.merge(quasi_inverse(q, HomElement::identity(x)).checks, "identity: ");
        ++quasi;
        const std::size_t span = x->empty() ? 0 : static_cast<std::size_t>(x->hi - x->lo);
        const auto res = resolve(x, run.options().depth.value_or(span + 2));
        if (res.complete) {
          r.merge(quasi_inverse(q, *res.hom).checks, "resolution: ");
          ++quasi;
          ++from_resolve;
        }
      }
      const auto acs = q.acyclics();
      for (auto u : acs)
        if (!(q.d(q.epsilon(u)) == q.identity(u))) r.fail("d(ε_U) != id_U for object " + std::to_string(u));
      c.digest = fnv1a_hex(input);
      c.detail = {{"registered_acyclics", acs.size()}, {"quasi_isomorphisms", quasi}, {"from_resolve", from_resolve}};
      if (!r.ok()) fail(c, r);
    });
  }
}

void h0(const Workspace& w, Runner& run) {
  const auto& opts = run.options();
  for (const auto& [id, e] : w.spaces) {
    const auto& s = e.space;
    if (!s->given_pairs().empty()) continue;
    auto q = std::make_shared<DrinfeldQuotient>(s);
    const auto cx = complexes_on(w, s);
    for (const auto& x : cx) q->adjoin_acyclic(cone(HomElement::identity(x)).complex);
    std::vector<std::pair<ComplexPtr, ComplexPtr>> pairs;
    for (const auto& a : cx)
      for (const auto& b : cx)
        if (pairs.size() < 6) pairs.emplace_back(a, b);
    std::mt19937_64 gen(opts.seed ^ fnv1a("h0-compare/" + id));
    while (pairs.size() < 3) pairs.emplace_back(share(random_dcomplex(s, gen, -1, 2)), share(random_dcomplex(s, gen, -1, 2)));
    for (std::size_t i = 0; i < pairs.size(); ++i)
      run.run("pair/" + id + "/" + std::to_string(i), [&, q, pr = pairs[i]](Case& c, std::mt19937_64& rng) {
        c.digest = fnv1a_hex(id + ':' + canonical_string(*pr.first) + "=>" + canonical_string(*pr.second));
        const auto cmp = h0_compare(*q, pr.first, pr.second, opts.eps_bound, nullptr, rng());
        c.detail = {{"perf_dim", cmp.perf_dim},       {"oracle_dim", cmp.oracle_dim},
                    {"image_rank", cmp.image_rank},   {"coboundary_dim", cmp.coboundary_dim},
                    {"eps_bound", cmp.bound},         {"consistent_up_to_bound", cmp.consistent},
                    {"witnesses", cmp.witnesses}};
        CheckReport r = cmp.checks;
        if (cmp.perf_dim != cmp.oracle_dim || cmp.image_rank != cmp.oracle_dim)
          r.fail("H⁰ dimensions disagree with the oracle on a discrete space");
        if (!r.ok()) fail(c, r);
      });
  }
  for (const auto& [id, e] : w.spaces) {
    if (e.space->given_pairs().empty()) continue;
    for (const auto& x : complexes_on(w, e.space)) {
      if (!is_acyclic(*x)) continue;
      run.run("dead/" + id + "/" + fnv1a_hex(canonical_string(*x)).substr(0, 8), [&, &s = e.space, x](Case& c, std::mt19937_64& rng) {
        c.digest = fnv1a_hex(id + ':' + canonical_string(*x));
        DrinfeldQuotient q(s);
        const auto cmp = h0_compare(q, x, x, opts.eps_bound, nullptr, rng());
        c.detail = {{"perf_dim", cmp.perf_dim}, {"oracle_dim", cmp.oracle_dim}, {"witnesses", cmp.witnesses}};
        CheckReport r = cmp.checks;
        if (cmp.oracle_dim != 0) r.fail("acyclic complex with nonzero derived endomorphisms");
        if (cmp.witnesses < 2 * cmp.perf_dim) r.fail("classes dying in D without explicit witnesses");
        if (!r.ok()) fail(c, r);
      });
    }
  }
  for (const auto& [id, ch] : w.chains) {
    const auto cx = complexes_on(w, ch.f.target);
    if (cx.empty()) continue;
    run.run("square/" + id, [&, &ch = ch, cx](Case& c, std::mt19937_64& rng) {
      DrinfeldQuotient q(ch.f.target);
      std::string input;
      CheckReport r;
      std::size_t squares = 0;
      for (const auto& a : cx)
        for (const auto& b : cx) {
          input += id + ':' + canonical_string(*a) + "=>" + canonical_string(*b) + ';';
          const auto cmp = h0_compare(q, a, b, opts.eps_bound, &ch.f, rng());
          r.merge(cmp.checks);
          squares += cmp.square.value_or(false);
        }
      c.digest = fnv1a_hex(input);
      c.detail = {{"pairs", cx.size() * cx.size()}, {"squares_commuting", squares}};
      if (!r.ok()) fail(c, r);
    });
  }
  for (const auto& [id, m] : w.sheaves)
    run.run("oracle/" + id, [&, m = m](Case& c, std::mt19937_64&) {
      c.digest = fnv1a_hex(ser(*m));
      const auto single = SheafComplex::single(m, 0);
      const auto d = derived_hom_oracle(single, single, opts.depth.value_or(2));
      const std::size_t expected = hom_sheaves(m, m).size();
      c.detail = {{"dim", d.dim}, {"hom_dim", expected}, {"complete", d.complete}, {"truncation", d.truncation}};
      if (d.dim != expected) {
        CheckReport r;
        r.fail("oracle H⁰ differs from Hom");
        fail(c, r);
      } else if (!d.complete) {
        c.verdict = Verdict::unavailable;
        c.detail["reason"] = "resolution does not terminate; degree-0 answer stabilized";
      }
    });
}

using SuiteFn = void (*)(const Workspace&, Runner&);

const std::vector<std::pair<std::string, SuiteFn>>& table() {
  static const std::vector<std::pair<std::string, SuiteFn>> t{
      {"functoriality", functoriality}, {"theta-cocycle", theta_cocycle}, {"sigma-naturality", sigma_naturality},
      {"dg-laws", dg_laws},             {"resolve", resolve_suite},       {"cover", cover},
      {"audit", audit},                 {"quotient", quotient},           {"h0-compare", h0}};
  return t;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::unavailable: return "unavailable";
  }
  return {};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : table()) n.push_back(name);
    return n;
  }();
  return names;
}

Report run_suite(const Workspace& w, const std::string& suite, const RunOptions& options) {
  const auto& t = table();
  const auto it = std::find_if(t.begin(), t.end(), [&](const auto& e) { return e.first == suite; });
  if (it == t.end()) throw DocumentError("", "unknown suite '" + suite + "'");
  Runner run(suite, options);
  it->second(w, run);
  Report r{suite, w.digest, options, run.take()};
  std::sort(r.cases.begin(), r.cases.end(), [](const Case& a, const Case& b) { return a.id < b.id; });
  return r;
}

bool Report::ok() const { return count(Verdict::fail) == 0; }

std::size_t Report::count(Verdict v) const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [&](const Case& c) { return c.verdict == v; }));
}

json Report::to_json() const {
  json out;
  out["suite"] = suite;
  out["document"] = document;
  out["seed"] = options.seed;
  out["eps_bound"] = options.eps_bound;
  out["depth"] = options.depth ? json(*options.depth) : json(nullptr);
  out["flip_cone_sign"] = options.flip_cone_sign;
  json cs = json::array();
  for (const auto& c : cases) {
    json j{{"id", c.id}, {"digest", c.digest}, {"verdict", to_string(c.verdict)}, {"detail", c.detail}};
    if (!c.counterexample.is_null()) j["counterexample"] = c.counterexample;
    cs.push_back(std::move(j));
  }
  out["cases"] = std::move(cs);
  out["summary"] = {{"cases", cases.size()},
                    {"pass", count(Verdict::pass)},
                    {"fail", count(Verdict::fail)},
                    {"unavailable", count(Verdict::unavailable)}};
  return out;
}

std::string Report::log() const {
  std::ostringstream out;
  out << "suite " << suite << " seed " << options.seed << " eps-bound " << options.eps_bound << " document " << document
      << '\n';
  for (const auto& c : cases) {
    out << '[' << to_string(c.verdict) << "] " << c.id << ' ' << c.digest << ' ' << c.detail.dump() << '\n';
    if (!c.counterexample.is_null()) out << "  counterexample " << c.counterexample.dump() << '\n';
  }
  out << "summary: " << cases.size() << " cases, " << count(Verdict::pass) << " pass, " << count(Verdict::fail)
      << " fail, " << count(Verdict::unavailable) << " unavailable\n";
  return out.str();
}

}  // namespace dgperf::cli
