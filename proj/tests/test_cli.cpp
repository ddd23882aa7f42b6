#include <doctest.h>

#include "suites.hpp"

using namespace dgperf;
using namespace dgperf::cli;

namespace {

std::string fixture(const std::string& name) { return std::string(DGPERF_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("load examples") {
  const auto w = load_file(fixture("spec_f2xf2.json"));
  REQUIRE(w.spaces.contains("two"));
  const auto& s = *w.spaces.at("two").space;
  CHECK(s.size() == 2);
  CHECK(opens(s).size() == 4);
  CHECK(w.kind_of("E") == "complex");

  try {
    load_file(fixture("bad_ring_map.json"));
    FAIL("non-multiplicative ring map accepted");
  } catch (const DocumentError& e) {
    CHECK(e.record() == "shift_t");
    CHECK(std::string(e.what()).find("basis pair") != std::string::npos);
  }

  const auto empty = load_file(fixture("empty.json"));
  CHECK(empty.spaces.empty());
  CHECK(empty.complexes.empty());
  CHECK(load_document(json()).algebras.empty());
}

TEST_CASE("load rejects broken references and invariants") {
  const json base = json::parse(R"({
    "algebras": [{"id": "k", "kind": "poly", "p": 2, "coefficients": [0, 1]}],
    "spaces": [{"id": "pt", "kind": "spec", "ring": "k"}]
  })");
  CHECK(load_document(base).spaces.size() == 1);

  json dangling = base;
  dangling["sheaves"] = json::parse(R"([{"id": "m", "space": "nowhere", "kind": "structure"}])");
  CHECK_THROWS_WITH_AS(load_document(dangling), doctest::Contains("unknown space"), DocumentError);

  json not_square = base;
  not_square["complexes"] = json::parse(R"([{"id": "e", "space": "pt", "lo": -2,
    "components": [[["m0"]], [["m0"]], [["m0"]]], "differentials": [[[[1]]], [[[1]]]]}])");
  CHECK_THROWS_AS(load_document(not_square), DocumentError);

  json duplicate = base;
  duplicate["sheaves"] = json::parse(R"([{"id": "k", "space": "pt", "kind": "structure"}])");
  CHECK_THROWS_WITH_AS(load_document(duplicate), doctest::Contains("duplicate"), DocumentError);
}

TEST_CASE("suites on the default fixture") {
  const auto w = load_file(fixture("default.json"));
  RunOptions opts;
  opts.seed = 7;
  for (const std::string suite : {"functoriality", "theta-cocycle"}) {
    const auto r = run_suite(w, suite, opts);
    CHECK_MESSAGE(r.ok(), r.log());
    CHECK(r.count(Verdict::fail) == 0);
    CHECK(r.cases.size() == w.chains.size());
  }
  CHECK_THROWS_AS(run_suite(w, "no-such-suite", opts), DocumentError);
}

TEST_CASE("reports are deterministic and sorted") {
  const auto w = load_file(fixture("default.json"));
  RunOptions opts;
  opts.seed = 3;
  const auto a = run_suite(w, "cover", opts).to_json().dump();
  const auto b = run_suite(w, "cover", opts).to_json().dump();
  CHECK(a == b);
  opts.seed = 4;
  CHECK(run_suite(w, "cover", opts).to_json().dump() != a);
  const auto r = run_suite(w, "audit", opts);
  for (std::size_t i = 1; i < r.cases.size(); ++i) CHECK(r.cases[i - 1].id < r.cases[i].id);
}

TEST_CASE("sign-flipped cones are caught with witnesses") {
  const auto w = load_file(fixture("default.json"));
  RunOptions opts;
  opts.flip_cone_sign = true;
  const auto r = run_suite(w, "dg-laws", opts);
  CHECK_FALSE(r.ok());
  for (const auto& c : r.cases) {
    if (c.verdict != Verdict::fail) continue;
    CHECK(c.counterexample.contains("witness"));
    CHECK(c.counterexample.at("replay").at("suite") == "dg-laws");
    const auto& sp = w.spaces.at(c.id).space;
    CHECK(sp->p() != 2);
  }
}

TEST_CASE("describe examples") {
  const auto w = load_file(fixture("default.json"));
  CHECK(describe(w, "V2").find("opens = 5") != std::string::npos);
  CHECK(describe(w, "vee_cech").find("acyclic: yes") != std::string::npos);
  CHECK(describe(w, "t_mult").find("acyclic: no") != std::string::npos);
  CHECK_THROWS_AS(describe(w, "missing"), DocumentError);
}
