#pragma once

// JSON documents describing algebras, spaces, maps, sheaves and complexes,
// loaded into a validated workspace.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgperf/drinfeld.hpp"

namespace dgperf::cli {

using nlohmann::json;

class DocumentError : public Error {
 public:
  DocumentError(const std::string& record, const std::string& message)
      : Error(record.empty() ? message : "record '" + record + "': " + message), record_(record) {}
  const std::string& record() const noexcept { return record_; }

 private:
  std::string record_;
};

struct SpaceEntry {
  SpacePtr space;
  std::optional<SpecSpace> spec;
};

struct ChainEntry {
  RingedMap f;  // T -> S
  RingedMap g;  // U -> T
};

struct Config {
  std::uint64_t seed = 7;
  std::size_t eps_bound = 2;
  std::optional<std::size_t> depth;
};

struct Workspace {
  std::string source;  // path or "<memory>"
  std::string digest;  // FNV-1a of the document text
  std::map<std::string, AlgebraPtr> algebras;
  std::map<std::string, AlgebraMap> algebra_maps;
  std::map<std::string, SpaceEntry> spaces;
  std::map<std::string, RingedMap> maps;
  std::map<std::string, ChainEntry> chains;
  std::map<std::string, SheafPtr> sheaves;
  std::map<std::string, ComplexPtr> complexes;
  Config config;

  std::string kind_of(const std::string& id) const;
  /// Space id of a sheaf or complex record.
  std::string space_of(const SpacePtr& s) const;
};

Workspace load_document(const json& doc, std::string source = "<memory>");
Workspace load_file(const std::string& path);

/// Human-readable summary of one record.
std::string describe(const Workspace& w, const std::string& id);

std::uint64_t fnv1a(const std::string& data);
std::string fnv1a_hex(const std::string& data);

}  // namespace dgperf::cli
