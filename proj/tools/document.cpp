#include "document.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace dgperf::cli {

namespace {

const json& field(const json& rec, const std::string& key, const std::string& id) {
  if (!rec.contains(key)) throw DocumentError(id, "missing field '" + key + "'");
  return rec.at(key);
}

std::string id_of(const json& rec, const std::string& section) {
  if (!rec.is_object() || !rec.contains("id") || !rec.at("id").is_string())
    throw DocumentError("", section + ": every record needs a string id");
  return rec.at("id").get<std::string>();
}

template <typename Map>
const typename Map::mapped_type& lookup(const Map& m, const json& ref, const std::string& what, const std::string& id) {
  if (!ref.is_string()) throw DocumentError(id, what + " reference must be a string");
  const auto it = m.find(ref.get<std::string>());
  if (it == m.end()) throw DocumentError(id, "unknown " + what + " '" + ref.get<std::string>() + "'");
  return it->second;
}

Matrix matrix_of(std::uint32_t p, const json& rows, std::size_t cols_if_empty, const std::string& id) {
  try {
    return Matrix::from_rows(p, rows.get<std::vector<std::vector<std::int64_t>>>(), cols_if_empty);
  } catch (const json::exception& e) {
    throw DocumentError(id, std::string("matrix: ") + e.what());
  }
}

void require_ok(const CheckReport& r, const std::string& id) {
  if (!r.ok()) throw DocumentError(id, r.failures.front());
}

Open open_of(const FinRingedSpace& s, const json& names, const std::string& id) {
  Open v;
  for (const auto& n : names) {
    try {
      v.mask |= std::uint64_t{1} << s.index_of(n.get<std::string>());
    } catch (const Error& e) {
      throw DocumentError(id, e.what());
    }
  }
  if (!s.is_open(v)) throw DocumentError(id, "not open: " + names.dump());
  return v;
}

AlgebraMap algebra_map_ref(const Workspace& w, const json& ref, const AlgebraPtr& identity_on, const std::string& id) {
  if (ref.is_string() && ref.get<std::string>() == "identity") return AlgebraMap::identity(identity_on);
  return lookup(w.algebra_maps, ref, "algebra map", id);
}

void load_algebras(Workspace& w, const json& list) {
  for (const auto& rec : list) {
    const std::string id = id_of(rec, "algebras");
    const std::string kind = field(rec, "kind", id).get<std::string>();
    AlgebraPtr a;
    try {
      if (kind == "poly") {
        a = algebra_from_poly(field(rec, "p", id).get<std::uint32_t>(),
                              field(rec, "coefficients", id).get<std::vector<std::int64_t>>());
      } else if (kind == "product") {
        const auto& fs = field(rec, "factors", id);
        if (!fs.is_array() || fs.empty()) throw DocumentError(id, "product needs factors");
        a = lookup(w.algebras, fs[0], "algebra", id);
        for (std::size_t i = 1; i < fs.size(); ++i) a = product_algebra(a, lookup(w.algebras, fs[i], "algebra", id));
      } else if (kind == "structure") {
        const auto p = field(rec, "p", id).get<std::uint32_t>();
        const PrimeField f{p};
        Vector structure, unit;
        for (auto v : field(rec, "structure", id).get<std::vector<std::int64_t>>()) structure.push_back(f.normalize(v));
        for (auto v : field(rec, "unit", id).get<std::vector<std::int64_t>>()) unit.push_back(f.normalize(v));
        a = std::make_shared<const FinAlgebra>(p, field(rec, "labels", id).get<std::vector<std::string>>(),
                                               std::move(structure), std::move(unit));
      } else {
        throw DocumentError(id, "unknown algebra kind '" + kind + "'");
      }
      check_caps(*a);
    } catch (const DocumentError&) {
      throw;
    } catch (const std::exception& e) {
      throw DocumentError(id, e.what());
    }
    require_ok(a->validate(), id);
    w.algebras.emplace(id, a);
  }
}

void load_algebra_maps(Workspace& w, const json& list) {
  for (const auto& rec : list) {
    const std::string id = id_of(rec, "algebra_maps");
    const auto src = lookup(w.algebras, field(rec, "source", id), "algebra", id);
    const auto tgt = lookup(w.algebras, field(rec, "target", id), "algebra", id);
    AlgebraMap m{src, tgt, matrix_of(src->p(), field(rec, "matrix", id), src->dim(), id)};
    if (m.matrix.rows() != tgt->dim() || m.matrix.cols() != src->dim())
      throw DocumentError(id, "matrix must be dim(target) x dim(source)");
    require_ok(m.validate(), id);
    w.algebra_maps.emplace(id, std::move(m));
  }
}

void load_spaces(Workspace& w, const json& list) {
  for (const auto& rec : list) {
    const std::string id = id_of(rec, "spaces");
    const std::string kind = field(rec, "kind", id).get<std::string>();
    SpaceEntry e;
    try {
      if (kind == "spec") {
        e.spec = spec(lookup(w.algebras, field(rec, "ring", id), "algebra", id), id);
        e.space = e.spec->space;
      } else if (kind == "finite") {
        const auto points = field(rec, "points", id).get<std::vector<std::string>>();
        auto index = [&](const json& n) {
          const auto it = std::find(points.begin(), points.end(), n.get<std::string>());
          if (it == points.end()) throw DocumentError(id, "unknown point " + n.dump());
          return static_cast<std::size_t>(it - points.begin());
        };
        std::vector<std::pair<std::size_t, std::size_t>> order;
        for (const auto& pr : rec.value("order", json::array())) order.emplace_back(index(pr.at(0)), index(pr.at(1)));
        std::vector<AlgebraPtr> stalks;
        for (const auto& r : field(rec, "stalks", id)) stalks.push_back(lookup(w.algebras, r, "algebra", id));
        if (stalks.size() != points.size()) throw DocumentError(id, "one stalk per point");
        std::vector<std::pair<std::pair<std::size_t, std::size_t>, AlgebraMap>> res;
        for (const auto& r : rec.value("res", json::array())) {
          const auto x = index(field(r, "from", id)), y = index(field(r, "to", id));
          res.push_back({{x, y}, algebra_map_ref(w, field(r, "map", id), stalks[x], id)});
        }
        e.space = std::make_shared<const FinRingedSpace>(FinRingedSpace(id, points, order, stalks, res));
      } else {
        throw DocumentError(id, "unknown space kind '" + kind + "'");
      }
    } catch (const DocumentError&) {
      throw;
    } catch (const std::exception& ex) {
      throw DocumentError(id, ex.what());
    }
    require_ok(e.space->validate(), id);
    w.spaces.emplace(id, std::move(e));
  }
}

void load_maps(Workspace& w, const json& list) {
  for (const auto& rec : list) {
    const std::string id = id_of(rec, "maps");
    const std::string kind = field(rec, "kind", id).get<std::string>();
    const auto& src = lookup(w.spaces, field(rec, "source", id), "space", id);
    const auto& tgt = lookup(w.spaces, field(rec, "target", id), "space", id);
    RingedMap f;
    try {
      if (kind == "spec") {
        const auto& phi = lookup(w.algebra_maps, field(rec, "ring_map", id), "algebra map", id);
        if (!src.spec || !tgt.spec) throw DocumentError(id, "spec maps need spec spaces");
        if (!same_algebra(phi.source, tgt.spec->ring) || !same_algebra(phi.target, src.spec->ring))
          throw DocumentError(id, "ring map must go from the target's ring to the source's ring");
        f = spec_map(phi, *tgt.spec, *src.spec, id);
      } else if (kind == "finite") {
        f.name = id;
        f.source = src.space;
        f.target = tgt.space;
        const auto& pts = field(rec, "points", id);
        const auto& sharp = field(rec, "sharp", id);
        if (pts.size() != src.space->size() || sharp.size() != src.space->size())
          throw DocumentError(id, "one image point and one stalk map per source point");
        for (std::size_t t = 0; t < pts.size(); ++t) {
          const std::size_t s = tgt.space->index_of(pts[t].get<std::string>());
          f.point_map.push_back(s);
          f.sharp.push_back(algebra_map_ref(w, sharp[t], tgt.space->stalk(s), id));
        }
      } else {
        throw DocumentError(id, "unknown map kind '" + kind + "'");
      }
    } catch (const DocumentError&) {
      throw;
    } catch (const std::exception& ex) {
      throw DocumentError(id, ex.what());
    }
    require_ok(f.validate(), id);
    w.maps.emplace(id, std::move(f));
  }
}

void load_chains(Workspace& w, const json& list) {
  for (const auto& rec : list) {
    const std::string id = id_of(rec, "chains");
    const auto& f = lookup(w.maps, field(rec, "f", id), "map", id);
    const auto& g = lookup(w.maps, field(rec, "g", id), "map", id);
    if (g.target != f.source) throw DocumentError(id, "g must land in the source of f");
    w.chains.emplace(id, ChainEntry{f, g});
  }
}

void load_sheaves(Workspace& w, const json& list) {
  for (const auto& rec : list) {
    const std::string id = id_of(rec, "sheaves");
    const auto& s = lookup(w.spaces, field(rec, "space", id), "space", id).space;
    const std::string kind = field(rec, "kind", id).get<std::string>();
    SheafPtr m;
    try {
      if (kind == "structure") {
        m = std::make_shared<const Sheaf>(Sheaf::structure(s));
      } else if (kind == "zero") {
        m = std::make_shared<const Sheaf>(Sheaf::zero(s));
      } else if (kind == "ext") {
        m = std::make_shared<const Sheaf>(ext_by_zero(s, open_of(*s, field(rec, "open", id), id)));
      } else if (kind == "explicit") {
        const auto& st = field(rec, "stalks", id);
        if (st.size() != s->size()) throw DocumentError(id, "one stalk per point");
        std::vector<FinModule> stalks;
        for (std::size_t x = 0; x < s->size(); ++x) {
          const std::size_t d = field(st[x], "dim", id).get<std::size_t>();
          if (d == 0) {
            stalks.push_back(FinModule::zero(s->stalk(x)));
            continue;
          }
          std::vector<Matrix> act;
          for (const auto& a : field(st[x], "action", id)) act.push_back(matrix_of(s->p(), a, d, id));
          stalks.emplace_back(s->stalk(x), d, std::move(act));
        }
        std::vector<std::pair<std::pair<std::size_t, std::size_t>, Matrix>> cmp;
        for (const auto& c : rec.value("comparisons", json::array())) {
          const auto x = s->index_of(field(c, "from", id).get<std::string>());
          const auto y = s->index_of(field(c, "to", id).get<std::string>());
          cmp.push_back({{x, y}, matrix_of(s->p(), field(c, "matrix", id), stalks[x].dim(), id)});
        }
        m = std::make_shared<const Sheaf>(Sheaf::from_pairs(s, std::move(stalks), cmp));
      } else {
        throw DocumentError(id, "unknown sheaf kind '" + kind + "'");
      }
    } catch (const DocumentError&) {
      throw;
    } catch (const std::exception& ex) {
      throw DocumentError(id, ex.what());
    }
    require_ok(m->validate(), id);
    w.sheaves.emplace(id, m);
  }
}

void load_complexes(Workspace& w, const json& list) {
  for (const auto& rec : list) {
    const std::string id = id_of(rec, "complexes");
    const auto& s = lookup(w.spaces, field(rec, "space", id), "space", id).space;
    const int lo = field(rec, "lo", id).get<int>();
    std::vector<DObject> comps;
    for (const auto& c : field(rec, "components", id)) {
      DObject x{s, {}};
      for (const auto& v : c) x.opens.push_back(open_of(*s, v, id));
      comps.push_back(std::move(x));
    }
    const auto& ds = rec.value("differentials", json::array());
    if (!comps.empty() && ds.size() + 1 != comps.size())
      throw DocumentError(id, "need one differential between consecutive components");
    const PrimeField f{s->p()};
    std::vector<DMorphism> diffs;
    for (std::size_t n = 0; n < ds.size(); ++n) {
      DMorphism m{comps[n], comps[n + 1], {}};
      if (ds[n].size() != comps[n + 1].size()) throw DocumentError(id, "differential " + std::to_string(n) + ": wrong row count");
      for (const auto& row : ds[n]) {
        if (row.size() != comps[n].size())
          throw DocumentError(id, "differential " + std::to_string(n) + ": wrong column count");
        for (const auto& cell : row) {
          Vector v;
          for (auto c : cell.get<std::vector<std::int64_t>>()) v.push_back(f.normalize(c));
          m.entries.push_back(std::move(v));
        }
      }
      require_ok(m.validate(), id);
      diffs.push_back(std::move(m));
    }
    ComplexPtr e;
    try {
      e = share(comps.empty() ? DComplex::zero(s) : DComplex::make(s, lo, comps, diffs));
    } catch (const std::exception& ex) {
      throw DocumentError(id, ex.what());
    }
    require_ok(e->validate(), id);
    w.complexes.emplace(id, e);
  }
}

}  // namespace

std::string Workspace::kind_of(const std::string& id) const {
  if (algebras.contains(id)) return "algebra";
  if (algebra_maps.contains(id)) return "algebra_map";
  if (spaces.contains(id)) return "space";
  if (maps.contains(id)) return "map";
  if (chains.contains(id)) return "chain";
  if (sheaves.contains(id)) return "sheaf";
  if (complexes.contains(id)) return "complex";
  return {};
}

std::string Workspace::space_of(const SpacePtr& s) const {
  for (const auto& [id, e] : spaces)
    if (e.space == s) return id;
  return {};
}

Workspace load_document(const json& doc, std::string source) {
  Workspace w;
  w.source = std::move(source);
  w.digest = fnv1a_hex(doc.dump());
  if (doc.is_null()) return w;
  if (!doc.is_object()) throw DocumentError("", "document must be a JSON object");
  if (doc.contains("version") && doc.at("version") != 1) throw DocumentError("", "unsupported version");
  try {
    load_algebras(w, doc.value("algebras", json::array()));
    load_algebra_maps(w, doc.value("algebra_maps", json::array()));
    load_spaces(w, doc.value("spaces", json::array()));
    load_maps(w, doc.value("maps", json::array()));
    load_chains(w, doc.value("chains", json::array()));
    load_sheaves(w, doc.value("sheaves", json::array()));
    load_complexes(w, doc.value("complexes", json::array()));
  } catch (const json::exception& e) {
    throw DocumentError("", std::string("malformed document: ") + e.what());
  }
  std::set<std::string> seen;
  for (const auto& [kind, list] : doc.items()) {
    if (!list.is_array()) continue;
    for (const auto& rec : list)
      if (rec.is_object() && rec.contains("id") && !seen.insert(rec.at("id").get<std::string>()).second)
        throw DocumentError(rec.at("id").get<std::string>(), "duplicate id");
  }
  if (doc.contains("config")) {
    const auto& c = doc.at("config");
    w.config.seed = c.value("seed", w.config.seed);
    w.config.eps_bound = c.value("eps_bound", w.config.eps_bound);
    if (c.contains("depth") && !c.at("depth").is_null()) w.config.depth = c.at("depth").get<std::size_t>();
  }
  return w;
}

Workspace load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DocumentError("", std::string("parse error: ") + e.what());
    }
  }
  Workspace w = load_document(doc, path);
  w.digest = fnv1a_hex(text);
  return w;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(const std::string& data) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a(data);
  return out.str();
}

std::string describe(const Workspace& w, const std::string& id) {
  std::ostringstream out;
  const std::string kind = w.kind_of(id);
  if (kind.empty()) throw DocumentError(id, "no such record in " + w.source);
  out << id << ": " << kind << '\n';
  if (kind == "algebra") {
    const auto& a = *w.algebras.at(id);
    out << "  p = " << a.p() << ", dim = " << a.dim() << ", elements = " << element_count(a.p(), a.dim()) << '\n';
    out << "  local factors = " << enumerate_idempotents_and_primes(a).primitive.size() << '\n';
  } else if (kind == "algebra_map") {
    const auto& m = w.algebra_maps.at(id);
    out << "  " << m.source->dim() << "-dim -> " << m.target->dim() << "-dim\n";
  } else if (kind == "space") {
    const auto& e = w.spaces.at(id);
    const auto& s = *e.space;
    out << "  points:";
    for (std::size_t x = 0; x < s.size(); ++x) out << ' ' << s.points()[x] << "(dim O = " << s.stalk(x)->dim() << ')';
    out << "\n  opens = " << opens(s).size() << (e.spec ? ", spec of a finite algebra" : "") << '\n';
    for (const auto& [x, y] : s.given_pairs()) out << "  " << s.points()[x] << " <= " << s.points()[y] << '\n';
  } else if (kind == "map") {
    const auto& f = w.maps.at(id);
    out << "  " << w.space_of(f.source) << " -> " << w.space_of(f.target) << '\n';
    for (std::size_t t = 0; t < f.point_map.size(); ++t)
      out << "  " << f.source->points()[t] << " |-> " << f.target->points()[f.point_map[t]] << '\n';
  } else if (kind == "chain") {
    const auto& c = w.chains.at(id);
    out << "  " << c.g.name << ": " << w.space_of(c.g.source) << " -> " << w.space_of(c.g.target) << ", " << c.f.name
        << ": " << w.space_of(c.f.source) << " -> " << w.space_of(c.f.target) << '\n';
  } else if (kind == "sheaf") {
    const auto& m = *w.sheaves.at(id);
    const auto& s = *m.base();
    out << "  on " << w.space_of(m.base()) << ", stalk dims:";
    for (std::size_t x = 0; x < s.size(); ++x) out << ' ' << m.stalk(x).dim();
    out << '\n';
    for (const Open v : opens(s)) out << "  Γ(" << s.describe(v) << ") dim " << sections(m, v).dim() << '\n';
  } else if (kind == "complex") {
    const auto& e = *w.complexes.at(id);
    const auto& s = *e.base;
    out << "  on " << w.space_of(e.base) << ", window [" << e.lo << ", " << e.hi << "]\n";
    for (int n = e.lo; n <= e.hi; ++n) {
      out << "  degree " << n << ':';
      for (const Open v : e.object(n).opens) out << " O_" << s.describe(v);
      out << '\n';
    }
    const auto h = homology(e);
    for (int n = h.lo; n <= h.hi; ++n) {
      out << "  H^" << n << " stalk dims:";
      for (std::size_t x = 0; x < s.size(); ++x) out << ' ' << h.at(n, x);
      out << '\n';
    }
    out << "  acyclic: " << (h.acyclic() ? "yes" : "no") << '\n';
    out << "  serialization digest: " << fnv1a_hex(canonical_string(e)) << '\n';
  }
  return out.str();
}

}  // namespace dgperf::cli
