#pragma once

// Deterministic verification suites over a loaded workspace.

#include <string>
#include <vector>

#include "document.hpp"

namespace dgperf::cli {

struct RunOptions {
  std::uint64_t seed = 7;
  std::size_t eps_bound = 2;
  std::optional<std::size_t> depth;
  bool flip_cone_sign = false;
  bool timing = false;  // per-case wall time on stderr, never in the report
};

enum class Verdict { pass, fail, unavailable };

struct Case {
  std::string id;
  std::string digest;  // of the generated inputs
  Verdict verdict = Verdict::pass;
  json detail = json::object();
  json counterexample;  // null unless the case failed
};

struct Report {
  std::string suite;
  std::string document;  // digest of the document text
  RunOptions options;
  std::vector<Case> cases;  // sorted by id

  bool ok() const;
  std::size_t count(Verdict v) const;
  json to_json() const;
  std::string log() const;
};

const std::vector<std::string>& suite_names();
/// Throws DocumentError for an unknown suite.
Report run_suite(const Workspace& w, const std::string& suite, const RunOptions& options);

std::string to_string(Verdict v);

}  // namespace dgperf::cli
