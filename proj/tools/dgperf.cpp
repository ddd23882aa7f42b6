#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "suites.hpp"

using namespace dgperf;
using namespace dgperf::cli;

namespace {

int emit(const std::vector<Report>& reports, const std::string& report_path) {
  bool ok = true;
  json all = json::array();
  for (const auto& r : reports) {
    std::cout << r.log();
    ok = ok && r.ok();
    all.push_back(r.to_json());
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << (reports.size() == 1 ? all[0] : all).dump(2) << '\n';
    if (!out) {
      std::cerr << "cannot write " << report_path << '\n';
      return 2;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dgperf: exact checks for the strictly functorial dg-enhancement of perfect complexes"};
  app.require_subcommand(1);

  std::string file;
  auto* load = app.add_subcommand("load", "Load and validate a document");
  load->add_option("file", file, "document path")->required();

  std::string suite, doc = DGPERF_DEFAULT_DOC, report_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> eps_bound, depth;
  bool flip = false, timing = false;
  auto* run = app.add_subcommand("run", "Run a verification suite (or 'all')");
  run->add_option("suite", suite, "suite name")->required();
  run->add_option("--doc", doc, "document path")->capture_default_str();
  run->add_option("--seed", seed, "seed of the case generators");
  run->add_option("--eps-bound", eps_bound, "largest ε-degree searched for coboundaries");
  run->add_option("--depth", depth, "resolution depth below the window");
  run->add_option("--report", report_path, "write the JSON report here");
  run->add_flag("--flip-cone-sign", flip, "negative control: build cones with the wrong corner sign");
  run->add_flag("--timing", timing, "per-case wall time on stderr");

  auto* audit = app.add_subcommand("audit", "Cardinality audit of a document");
  audit->add_option("file", file, "document path")->required();
  audit->add_option("--report", report_path, "write the JSON report here");

  std::string id;
  auto* describe_cmd = app.add_subcommand("describe", "Describe one record");
  describe_cmd->add_option("id", id, "record id")->required();
  describe_cmd->add_option("--doc", doc, "document path")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*load) {
      const Workspace w = load_file(file);
      std::cout << "loaded " << w.source << " (" << w.digest << ")\n"
                << "  algebras " << w.algebras.size() << ", algebra maps " << w.algebra_maps.size() << ", spaces "
                << w.spaces.size() << ", maps " << w.maps.size() << ", chains " << w.chains.size() << ", sheaves "
                << w.sheaves.size() << ", complexes " << w.complexes.size() << '\n';
      for (const auto& [sid, e] : w.spaces)
        std::cout << "  space " << sid << ": " << e.space->size() << " points, " << opens(*e.space).size() << " opens\n";
      return 0;
    }
    if (*run) {
      const Workspace w = load_file(doc);
      RunOptions opts;
      opts.seed = seed.value_or(w.config.seed);
      opts.eps_bound = eps_bound.value_or(w.config.eps_bound);
      opts.depth = depth ? depth : w.config.depth;
      opts.flip_cone_sign = flip;
      opts.timing = timing;
      std::vector<Report> reports;
      if (suite == "all") {
        for (const auto& name : suite_names()) reports.push_back(run_suite(w, name, opts));
      } else {
        reports.push_back(run_suite(w, suite, opts));
      }
      return emit(reports, report_path);
    }
    if (*audit) {
      const Workspace w = load_file(file);
      RunOptions opts;
      opts.seed = w.config.seed;
      return emit({run_suite(w, "audit", opts)}, report_path);
    }
    if (*describe_cmd) {
      const Workspace w = load_file(doc);
      std::cout << describe(w, id);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
