#pragma once

// Covering epimorphisms by sums of O_{S,V}, resolutions by the projective
// generators O_{S,U_x}, and exact section counts.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgperf/dgcat.hpp"

namespace dgperf {

struct CoverResult {
  std::vector<Open> index;       // V_j for j in J
  std::vector<Vector> chosen;    // t_j in Γ(V_j, N), ambient family
  std::vector<Vector> images;    // s_j = π(t_j) in Γ(V_j, M), ambient family
  std::vector<std::pair<Open, std::size_t>> image_counts;  // |im π_V| per open
  DObject object;                // ⊕_j O_{S,V_j}
  SheafMap to_source;            // ⊕_j O_{S,V_j} -> N
  SheafMap composite;            // ⊕_j O_{S,V_j} -> M

  std::size_t size() const noexcept { return index.size(); }
};

/// For every open V and every s in im π_V, the lexicographically least t_s with π(t_s) = s.
CoverResult cover_epi(const SheafMap& pi);

/// Indices j whose removal leaves the composite non-surjective.
std::vector<std::size_t> essential_indices(const CoverResult& c, const SheafMap& pi);

struct ResolutionResult {
  ComplexPtr complex;            // F, components made of minimal opens
  SheafComplex target;           // E
  std::vector<SheafMap> map;     // u^n: F^n -> E^n for n in F's window
  std::optional<HomElement> hom; // the same map when E was given as a DComplex
  int valid_lo = 0;
  int valid_hi = -1;
  bool complete = false;
  std::size_t depth = 0;
  Homology cone_homology;        // of cone(u), over its whole window
  std::string note;

  SheafMap map_at(int n) const;
};

/// Top-down resolution; depth counts stages below the bottom of E's window.
ResolutionResult resolve(const SheafComplex& e, std::size_t depth);
ResolutionResult resolve(const ComplexPtr& e, std::size_t depth);

/// Mapping cone of u: F -> E as a sheaf complex, C^n = E^n ⊕ F^{n+1}.
SheafComplex sheaf_cone(const SheafComplex& f, const SheafComplex& e, const std::vector<SheafMap>& u);

struct AuditRow {
  std::string sheaf;
  Open open;
  std::size_t dim = 0;
  std::optional<std::uint64_t> count;  // p^dim when it fits
};

struct CardinalityAudit {
  std::size_t open_count = 0;
  std::vector<AuditRow> rows;
  CheckReport checks;
};

CardinalityAudit cardinality_audit(const SpacePtr& s, const std::vector<std::pair<std::string, SheafPtr>>& sheaves,
                                   const SpecSpace* spec_data = nullptr);

}  // namespace dgperf
