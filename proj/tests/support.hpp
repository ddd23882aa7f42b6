#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dgperf/sheaf.hpp"

namespace support {

using namespace dgperf;

inline AlgebraPtr field(std::uint32_t p) { return algebra_from_poly(p, {0, 1}); }
inline AlgebraPtr dual(std::uint32_t p) { return algebra_from_poly(p, {0, 0, 1}); }

/// U --g--> T --f--> S
struct Chain {
  std::string name;
  RingedMap f;
  RingedMap g;
};

/// Spec F_p -> Spec(F_p x F_p) -> Spec F_p through a projection and the diagonal.
inline Chain split_chain(std::uint32_t p) {
  const auto k = field(p);
  const auto kk = product_algebra(k, k);
  const auto sk = spec(k, "pt"), skk = spec(kk, "two"), su = spec(k, "u");
  const AlgebraMap diag{k, kk, Matrix::from_rows(p, {{1}, {1}})};
  const AlgebraMap proj{kk, k, Matrix::from_rows(p, {{0, 1}})};
  return {"split" + std::to_string(p), spec_map(diag, sk, skk, "diag"), spec_map(proj, skk, su, "proj")};
}

/// Spec F_p -> Spec(R x R) -> Spec R for R = F_p[t]/t^2.
inline Chain dual_chain(std::uint32_t p) {
  const auto r = dual(p);
  const auto k = field(p);
  const auto rr = product_algebra(r, r);
  const auto sr = spec(r, "R"), srr = spec(rr, "RR"), sk = spec(k, "k");
  const AlgebraMap diag{r, rr, Matrix::from_rows(p, {{1, 0}, {0, 1}, {1, 0}, {0, 1}})};
  const AlgebraMap to_k{rr, k, Matrix::from_rows(p, {{1, 0, 0, 0}})};
  return {"dual" + std::to_string(p), spec_map(diag, sr, srr, "diag"), spec_map(to_k, srr, sk, "res")};
}

/// Sierpinski space X = {s <= eta} with O_s = F_p[t]/t^2, O_eta = F_p.
inline SpacePtr sierpinski(std::uint32_t p) {
  const auto r = dual(p);
  const auto k = field(p);
  return std::make_shared<const FinRingedSpace>(
      FinRingedSpace("X", {"s", "eta"}, {{0, 1}}, {r, k}, {{{0, 1}, AlgebraMap{r, k, Matrix::from_rows(p, {{1, 0}})}}}));
}

/// {eta} -> X -> Spec R
inline Chain sierpinski_chain(std::uint32_t p) {
  const auto x = sierpinski(p);
  const auto r = x->stalk(0);
  const auto k = x->stalk(1);
  const auto sr = spec(r, "R");
  const auto eta = std::make_shared<const FinRingedSpace>(FinRingedSpace::discrete("eta", {"eta"}, {k}));
  RingedMap to_r{"c", x, sr.space, {0, 0}, {AlgebraMap::identity(r), x->res(0, 1)}};
  RingedMap j{"j", eta, x, {1}, {AlgebraMap::identity(k)}};
  return {"sierpinski" + std::to_string(p), std::move(to_r), std::move(j)};
}

inline std::vector<Chain> all_chains() {
  return {split_chain(2), split_chain(3), dual_chain(2), sierpinski_chain(2), sierpinski_chain(3)};
}

inline SheafPtr ext(const SpacePtr& s, Open v) { return std::make_shared<const Sheaf>(ext_by_zero(s, v)); }

/// Number of compatible families, counted by enumerating the ambient space.
inline std::uint64_t count_sections_brute(const Sheaf& m, Open u) {
  const auto& s = *m.base();
  const auto pts = s.points_of(u);
  std::size_t ambient = 0;
  std::vector<std::size_t> off;
  for (auto x : pts) {
    off.push_back(ambient);
    ambient += m.stalk(x).dim();
  }
  std::uint64_t count = 0;
  for_each_element(m.p(), ambient, [&](const Vector& v) {
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b) {
        if (a == b || !s.leq(pts[a], pts[b])) continue;
        const Vector sa(v.begin() + off[a], v.begin() + off[a] + m.stalk(pts[a]).dim());
        const Vector sb(v.begin() + off[b], v.begin() + off[b] + m.stalk(pts[b]).dim());
        if (m.comparison(pts[a], pts[b]).apply(sa) != sb) return;
      }
    ++count;
  });
  return count;
}

}  // namespace support
