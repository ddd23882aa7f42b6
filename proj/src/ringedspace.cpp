#include "dgperf/ringedspace.hpp"

#include <algorithm>
#include <functional>

#include "dgperf/caps.hpp"

namespace dgperf {

namespace {

std::string pair_name(const FinRingedSpace& s, std::size_t x, std::size_t y) {
  return s.points()[x] + "->" + s.points()[y];
}

}  // namespace

FinRingedSpace::FinRingedSpace(std::string name, std::vector<std::string> points,
                               const std::vector<std::pair<std::size_t, std::size_t>>& order,
                               std::vector<AlgebraPtr> stalks,
                               const std::vector<std::pair<std::pair<std::size_t, std::size_t>, AlgebraMap>>& res)
    : name_(std::move(name)), points_(std::move(points)), stalks_(std::move(stalks)) {
  const std::size_t n = points_.size();
  if (n > caps().max_points) throw SizeError(name_ + ": " + std::to_string(n) + " points exceeds cap");
  if (stalks_.size() != n) throw ValidationError(name_, "one stalk per point required");
  for (const auto& a : stalks_) {
    if (!a) throw ValidationError(name_, "missing stalk");
    check_caps(*a);
  }
  leq_.assign(n * n, false);
  for (std::size_t x = 0; x < n; ++x) leq_[x * n + x] = true;
  for (auto [x, y] : order) {
    if (x >= n || y >= n) throw ValidationError(name_, "order pair out of range");
    leq_[x * n + y] = true;
    if (x != y) given_.emplace_back(x, y);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq_[k * n + j]) leq_[i * n + j] = true;

  res_.assign(n * n, std::nullopt);
  for (std::size_t x = 0; x < n; ++x) res_[x * n + x] = AlgebraMap::identity(stalks_[x]);
  for (const auto& [xy, m] : res) {
    const auto [x, y] = xy;
    if (x >= n || y >= n || !leq_[x * n + y]) throw ValidationError(name_, "res map for a pair outside the order");
    if (!same_algebra(m.source, stalks_[x]) || !same_algebra(m.target, stalks_[y]))
      throw ValidationError(name_, "res map " + pair_name(*this, x, y) + " has the wrong stalks");
    if (x == y) continue;
    res_[x * n + y] = m;
  }
  // Fill implied pairs by composing along a path; repeat until stable.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (!leq_[x * n + y] || res_[x * n + y]) continue;
        for (std::size_t k = 0; k < n; ++k) {
          if (res_[x * n + k] && res_[k * n + y] && k != x && k != y) {
            res_[x * n + y] = compose(*res_[k * n + y], *res_[x * n + k]);
            changed = true;
            break;
          }
        }
      }
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (leq_[x * n + y] && !res_[x * n + y])
        throw ValidationError(name_, "missing res map " + pair_name(*this, x, y));
}

FinRingedSpace FinRingedSpace::discrete(std::string name, std::vector<std::string> points,
                                        std::vector<AlgebraPtr> stalks) {
  return FinRingedSpace(std::move(name), std::move(points), {}, std::move(stalks), {});
}

std::size_t FinRingedSpace::index_of(const std::string& point) const {
  const auto it = std::find(points_.begin(), points_.end(), point);
  if (it == points_.end()) throw PreconditionError(name_ + ": unknown point " + point);
  return static_cast<std::size_t>(it - points_.begin());
}

const AlgebraMap& FinRingedSpace::res(std::size_t x, std::size_t y) const {
  if (!leq(x, y)) throw PreconditionError(name_ + ": no generization " + pair_name(*this, x, y));
  return *res_[x * size() + y];
}

Open FinRingedSpace::minimal_open(std::size_t x) const {
  Open u;
  for (std::size_t y = 0; y < size(); ++y)
    if (leq(x, y)) u.mask |= std::uint64_t{1} << y;
  return u;
}

bool FinRingedSpace::is_open(Open u) const {
  if (!u.subset_of(all())) return false;
  for (std::size_t x = 0; x < size(); ++x)
    if (u.contains(x) && !minimal_open(x).subset_of(u)) return false;
  return true;
}

std::vector<std::size_t> FinRingedSpace::points_of(Open u) const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < size(); ++x)
    if (u.contains(x)) out.push_back(x);
  return out;
}

Open FinRingedSpace::open_of(const std::vector<std::string>& names) const {
  Open u;
  for (const auto& s : names) u.mask |= std::uint64_t{1} << index_of(s);
  if (!is_open(u)) throw ValidationError(name_, "subset " + describe(u) + " is not open");
  return u;
}

std::string FinRingedSpace::describe(Open u) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t x : points_of(u)) {
    if (!first) out += ",";
    out += points_[x];
    first = false;
  }
  return out + "}";
}

CheckReport FinRingedSpace::validate() const {
  CheckReport r;
  const std::size_t n = size();
  for (std::size_t x = 0; x < n; ++x) {
    if (!leq(x, x)) r.fail("order not reflexive at " + points_[x]);
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z)
        if (leq(x, y) && leq(y, z) && !leq(x, z)) r.fail("order not transitive at " + pair_name(*this, x, z));
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (stalks_[x]->p() != p()) r.fail("stalk at " + points_[x] + " has a different characteristic");
    r.merge(stalks_[x]->validate(), "stalk " + points_[x] + ": ");
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!res(x, x).matrix.is_identity()) r.fail("res " + pair_name(*this, x, x) + " is not the identity");
    for (std::size_t y = 0; y < n; ++y) {
      if (!leq(x, y)) continue;
      r.merge(res(x, y).validate(), "res " + pair_name(*this, x, y) + ": ");
      for (std::size_t z = 0; z < n; ++z) {
        if (!leq(y, z)) continue;
        if (!(compose(res(y, z), res(x, y)).matrix == res(x, z).matrix))
          r.fail("res not functorial on " + points_[x] + "<=" + points_[y] + "<=" + points_[z]);
      }
    }
  }
  if (n <= caps().max_points) {
    const auto all_opens = opens(*this);
    for (const auto& u : all_opens)
      for (const auto& v : all_opens) {
        if (!is_open(u | v)) r.fail("union " + describe(u) + " | " + describe(v) + " is not open");
        if (!is_open(u & v)) r.fail("intersection " + describe(u) + " & " + describe(v) + " is not open");
      }
  }
  return r;
}

std::vector<Open> opens(const FinRingedSpace& s) {
  if (s.size() > caps().max_points)
    throw SizeError(s.name() + ": " + std::to_string(s.size()) + " points exceeds cap");
  std::vector<Open> out;
  const std::uint64_t limit = std::uint64_t{1} << s.size();
  for (std::uint64_t m = 0; m < limit; ++m)
    if (s.is_open(Open{m})) out.push_back(Open{m});
  return out;
}

RingedMap RingedMap::identity(const SpacePtr& s) {
  RingedMap f{"id_" + s->name(), s, s, {}, {}};
  for (std::size_t x = 0; x < s->size(); ++x) {
    f.point_map.push_back(x);
    f.sharp.push_back(AlgebraMap::identity(s->stalk(x)));
  }
  return f;
}

Open RingedMap::preimage(Open v) const {
  Open u;
  for (std::size_t t = 0; t < point_map.size(); ++t)
    if (v.contains(point_map[t])) u.mask |= std::uint64_t{1} << t;
  return u;
}

CheckReport RingedMap::validate() const {
  CheckReport r;
  const auto& t_space = *source;
  const auto& s_space = *target;
  if (point_map.size() != t_space.size() || sharp.size() != t_space.size()) {
    r.fail("point map or sharp has the wrong length");
    return r;
  }
  if (t_space.size() > 0 && s_space.size() > 0 && t_space.p() != s_space.p()) r.fail("characteristic mismatch");
  for (std::size_t t = 0; t < t_space.size(); ++t) {
    if (point_map[t] >= s_space.size()) {
      r.fail("point " + t_space.points()[t] + " maps out of range");
      return r;
    }
  }
  for (std::size_t t = 0; t < t_space.size(); ++t) {
    const std::size_t s = point_map[t];
    if (!same_algebra(sharp[t].source, s_space.stalk(s)) || !same_algebra(sharp[t].target, t_space.stalk(t))) {
      r.fail("sharp at " + t_space.points()[t] + " has the wrong stalks");
      continue;
    }
    r.merge(sharp[t].validate(), "sharp at " + t_space.points()[t] + ": ");
  }
  if (!r.ok()) return r;
  for (std::size_t t = 0; t < t_space.size(); ++t)
    for (std::size_t u = 0; u < t_space.size(); ++u) {
      if (!t_space.leq(t, u)) continue;
      const std::size_t s = point_map[t], s2 = point_map[u];
      if (!s_space.leq(s, s2)) {
        r.fail("not monotone on " + t_space.points()[t] + "<=" + t_space.points()[u]);
        continue;
      }
      const Matrix lhs = t_space.res(t, u).matrix * sharp[t].matrix;
      const Matrix rhs = sharp[u].matrix * s_space.res(s, s2).matrix;
      if (!(lhs == rhs)) r.fail("naturality square fails on " + t_space.points()[t] + "<=" + t_space.points()[u]);
    }
  if (s_space.size() <= caps().max_points)
    for (const auto& v : opens(s_space))
      if (!t_space.is_open(preimage(v))) r.fail("preimage of " + s_space.describe(v) + " is not open");
  return r;
}

RingedMap compose(const RingedMap& f, const RingedMap& g) {
  if (g.target != f.source) throw PreconditionError("compose: " + f.name + " after " + g.name + " not composable");
  RingedMap fg{f.name + "." + g.name, g.source, f.target, {}, {}};
  for (std::size_t u = 0; u < g.source->size(); ++u) {
    const std::size_t t = g.point_map[u];
    fg.point_map.push_back(f.point_map[t]);
    fg.sharp.push_back(compose(g.sharp[u], f.sharp[t]));
  }
  return fg;
}

SpecSpace spec(const AlgebraPtr& a, std::string name) {
  check_caps(*a);
  auto ip = enumerate_idempotents_and_primes(*a);
  SpecSpace s;
  s.ring = a;
  std::vector<std::string> points;
  std::vector<AlgebraPtr> stalks;
  for (std::size_t i = 0; i < ip.primitive.size(); ++i) {
    auto loc = corner_algebra(a, ip.primitive[i]);
    points.push_back("m" + std::to_string(i));
    stalks.push_back(loc.algebra);
    s.factor_maps.push_back(loc.structure);
    s.factor_inclusions.push_back(loc.inclusion);
  }
  s.idempotents = std::move(ip.primitive);
  s.primes = std::move(ip.primes);
  if (name.empty()) name = "Spec";
  s.space = std::make_shared<const FinRingedSpace>(
      FinRingedSpace::discrete(std::move(name), std::move(points), std::move(stalks)));
  return s;
}

RingedMap spec_map(const AlgebraMap& phi, const SpecSpace& spec_a, const SpecSpace& spec_b, std::string name) {
  if (!same_algebra(phi.source, spec_a.ring) || !same_algebra(phi.target, spec_b.ring))
    throw PreconditionError("spec_map: spectra do not match the map");
  RingedMap f{name.empty() ? "Spec(map)" : std::move(name), spec_b.space, spec_a.space, {}, {}};
  for (std::size_t j = 0; j < spec_b.primes.size(); ++j) {
    // contraction: kernel of A -> B -> B / q_j
    const QuotientSpace q(spec_b.primes[j]);
    const Subspace contraction = Subspace::column_span(kernel(q.projection() * phi.matrix));
    std::size_t found = spec_a.primes.size();
    for (std::size_t i = 0; i < spec_a.primes.size(); ++i)
      if (spec_a.primes[i] == contraction) found = i;
    if (found == spec_a.primes.size())
      throw InternalError("spec_map: contraction of prime " + std::to_string(j) + " is not an enumerated prime");
    f.point_map.push_back(found);
    Matrix m = spec_b.factor_maps[j].matrix * phi.matrix * spec_a.factor_inclusions[found];
    f.sharp.push_back(AlgebraMap{spec_a.space->stalk(found), spec_b.space->stalk(j), std::move(m)});
  }
  return f;
}

Open distinguished_open(const SpecSpace& s, std::span<const Scalar> f) {
  Open u;
  for (std::size_t x = 0; x < s.primes.size(); ++x)
    if (!s.primes[x].contains(f)) u.mask |= std::uint64_t{1} << x;
  return u;
}

CheckReport check_distinguished_cover(const SpecSpace& s) {
  CheckReport r;
  const auto& a = *s.ring;
  if (element_count(a.p(), a.dim()) > caps().max_enumeration) throw SizeError("distinguished cover: too many elements");
  std::vector<Open> ds;
  for_each_element(a.p(), a.dim(), [&](const Vector& f) { ds.push_back(distinguished_open(s, f)); });
  for (const auto& u : opens(*s.space)) {
    Open covered;
    for (const auto& d : ds)
      if (d.subset_of(u)) covered = covered | d;
    if (covered != u) r.fail("open " + s.space->describe(u) + " is not a union of distinguished opens");
  }
  return r;
}

}  // namespace dgperf
