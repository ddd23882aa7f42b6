// One line per acceptance criterion, evaluated on the bundled fixture document.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>

#include "suites.hpp"

using namespace dgperf;
using namespace dgperf::cli;

namespace {

constexpr double functoriality_limit_s = 10.0;
constexpr double theta_limit_s = 5.0;
constexpr double audit_limit_s = 5.0;
constexpr std::size_t functoriality_chains = 3;
constexpr std::size_t morphisms_per_chain = 100;
constexpr std::size_t theta_probes = 10;
constexpr std::size_t naturality_samples = 100;
constexpr std::size_t dg_elements = 200;
constexpr std::size_t dg_complexes = 5;
constexpr std::size_t cover_epis = 20;
constexpr std::size_t resolve_inputs = 20;
constexpr std::size_t oracle_pairs = 10;

struct Timed {
  Report report;
  double seconds;
};

Timed timed(const Workspace& w, const std::string& suite, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r = run_suite(w, suite, opts);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  return {std::move(r), dt.count()};
}

std::size_t sum(const Report& r, const std::string& key, const std::string& prefix = {}) {
  std::size_t n = 0;
  for (const auto& c : r.cases)
    if (c.id.starts_with(prefix) && c.detail.contains(key)) n += c.detail.at(key).get<std::size_t>();
  return n;
}

int failures = 0;

void line(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

}  // namespace

int main() {
  const Workspace w = load_file(std::string(DGPERF_FIXTURES) + "/default.json");
  RunOptions opts;
  opts.seed = w.config.seed;
  opts.eps_bound = w.config.eps_bound;

  {
    const auto t = timed(w, "functoriality", opts);
    bool enough = t.report.cases.size() >= functoriality_chains && t.report.cases.size() == w.chains.size();
    bool has_split = false;
    for (const auto& c : t.report.cases) {
      enough = enough && c.detail.at("morphisms").get<std::size_t>() >= morphisms_per_chain;
      has_split = has_split || c.id == "split2";
    }
    line("strict functoriality", t.report.ok() && enough && has_split && t.seconds < functoriality_limit_s,
         fmt("%zu chains, %zu morphisms, exact, %.2f s (limit %.0f s)", t.report.cases.size(),
             sum(t.report, "morphisms"), t.seconds, functoriality_limit_s));
  }
  {
    const auto t = timed(w, "theta-cocycle", opts);
    bool enough = t.report.cases.size() == w.chains.size();
    for (const auto& c : t.report.cases) {
      const auto& f = w.chains.at(c.id).f;
      enough = enough && c.detail.at("probes").get<std::size_t>() >= theta_probes &&
               c.detail.at("opens").get<std::size_t>() == opens(*f.target).size();
    }
    line("theta cocycle", t.report.ok() && enough && t.seconds < theta_limit_s,
         fmt("%zu chains, %zu opens, %zu probes each, exact, %.2f s (limit %.0f s)", t.report.cases.size(),
             sum(t.report, "opens"), theta_probes, t.seconds, theta_limit_s));
  }
  {
    const auto t = timed(w, "sigma-naturality", opts);
    bool enough = !t.report.cases.empty();
    for (const auto& c : t.report.cases)
      enough = enough && c.detail.at("samples").get<std::size_t>() >= naturality_samples;
    line("sigma and theta naturality", t.report.ok() && enough,
         fmt("%zu sigma samples, %zu theta samples, exact", sum(t.report, "samples", "sigma/"),
             sum(t.report, "samples", "theta/")));
  }
  {
    const auto t = timed(w, "dg-laws", opts);
    RunOptions flipped = opts;
    flipped.flip_cone_sign = true;
    const auto neg = run_suite(w, "dg-laws", flipped);
    const std::size_t elems = sum(t.report, "hom_elements"), cx = sum(t.report, "complexes");
    line("dg laws", t.report.ok() && elems >= dg_elements && cx >= dg_complexes && !neg.ok(),
         fmt("%zu hom elements over %zu complexes, %zu cones, sign-flipped control fails in %zu cases", elems, cx,
             sum(t.report, "cones"), neg.count(Verdict::fail)));
  }
  {
    const auto t = timed(w, "cover", opts);
    const std::size_t n = sum(t.report, "epimorphisms");
    line("cover_epi", t.report.ok() && n >= cover_epis, fmt("%zu epimorphisms, |J| equals enumerated images", n));
  }
  {
    const auto t = timed(w, "resolve", opts);
    const std::size_t n = sum(t.report, "inputs");
    bool field_case = false;
    for (const auto& c : t.report.cases) field_case = field_case || c.detail.at("field_stalks").get<bool>();
    line("resolve", t.report.ok() && n >= resolve_inputs && field_case,
         fmt("%zu inputs, %zu complete, cone homology zero on validity ranges", n, sum(t.report, "complete")));
  }
  {
    const auto t = timed(w, "quotient", opts);
    const std::size_t from_resolve = sum(t.report, "from_resolve");
    line("drinfeld layer", t.report.ok() && from_resolve >= 1 && sum(t.report, "registered_acyclics") >= 1,
         fmt("%zu acyclics with d(eps) = id, %zu quasi-inverses exact, %zu from resolve",
             sum(t.report, "registered_acyclics"), sum(t.report, "quasi_isomorphisms"), from_resolve));
  }
  {
    const auto t = timed(w, "h0-compare", opts);
    std::size_t pairs = 0, consistent = 0, squares = 0, square_pairs = 0;
    std::set<std::string> unavailable;
    bool split_square = false;
    for (const auto& c : t.report.cases) {
      if (c.verdict == Verdict::unavailable) unavailable.insert(c.id);
      if (c.id.starts_with("pair/")) {
        ++pairs;
        consistent += c.verdict == Verdict::pass && c.detail.at("consistent_up_to_bound").get<bool>();
      }
      if (c.id.starts_with("square/")) {
        squares += c.detail.at("squares_commuting").get<std::size_t>();
        square_pairs += c.detail.at("pairs").get<std::size_t>();
        split_square = split_square || (c.id == "square/split2" && c.verdict == Verdict::pass);
      }
    }
    const bool ok = t.report.ok() && pairs >= oracle_pairs && consistent == pairs && squares == square_pairs &&
                    split_square && unavailable == std::set<std::string>{"oracle/sky"};
    line("oracle consistency", ok,
         fmt("%zu/%zu pairs consistent up to eps-degree %zu, %zu/%zu squares commute, unavailable only: %s", consistent,
             pairs, opts.eps_bound, squares, square_pairs, unavailable.empty() ? "-" : unavailable.begin()->c_str()));
  }
  {
    const auto t = timed(w, "audit", opts);
    std::size_t specs = 0;
    for (const auto& c : t.report.cases) specs += c.detail.at("spec").get<bool>();
    line("cardinality audits", t.report.ok() && t.seconds < audit_limit_s,
         fmt("%zu spaces, %zu spec covers by distinguished opens, exact, %.2f s (limit %.0f s)",
             t.report.cases.size(), specs, t.seconds, audit_limit_s));
  }
  return failures == 0 ? 0 : 1;
}
