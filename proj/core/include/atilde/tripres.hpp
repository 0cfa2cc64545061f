#pragma once

// Triangle presentations: triple systems T over the geometry Pi, compatible
// with a dimension-reversing involution lambda. Each valid T defines a group
// acting simply transitively on the vertices of an A~_n building.

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "atilde/pgeom.hpp"

namespace atilde::tripres {

using pgeom::Duality;
using pgeom::ElementId;
using pgeom::Geometry;

struct Triple {
  ElementId u = 0, v = 0, w = 0;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

class TrianglePresentation {
 public:
  /// Triples are sorted and de-duplicated. Throws UsageError on ids outside
  /// the geometry or a lambda of the wrong length; axioms are not checked
  /// here (see validate_presentation).
  TrianglePresentation(std::shared_ptr<const Geometry> geometry, Duality lambda,
                       std::vector<Triple> triples);

  const Geometry& geometry() const { return *geometry_; }
  const std::shared_ptr<const Geometry>& geometry_ptr() const { return geometry_; }
  const Duality& lambda() const { return lambda_; }
  std::span<const Triple> triples() const { return triples_; }

  /// The w with (u, v, w) in T, if any (the first one when axiom 3 fails).
  std::optional<ElementId> third(ElementId u, ElementId v) const;

  friend bool operator==(const TrianglePresentation& a, const TrianglePresentation& b) {
    return a.geometry_->same_as(*b.geometry_) && a.lambda_ == b.lambda_ && a.triples_ == b.triples_;
  }

 private:
  std::shared_ptr<const Geometry> geometry_;
  Duality lambda_;
  std::vector<Triple> triples_;
  std::vector<ElementId> third_;  // size^2 lookup, kNone when absent
};

struct AxiomResult {
  bool pass = true;
  std::vector<std::string> witnesses;  // capped at a few dozen entries
  std::size_t failures = 0;
};

struct PresentationReport {
  // Index i holds axiom i+1:
  //  1 existence exactly on pairs (u, v) with lambda(u), v distinct and incident
  //  2 closure under rotation
  //  3 the third entry is a function of the first two
  //  4 closure under (u, v, w) -> (lambda w, lambda v, lambda u)
  //  5 dim u + dim v + dim w = 0 mod n+1
  std::array<AxiomResult, 5> axioms;
  bool duality_valid = false;
  std::size_t triple_count = 0;
  std::size_t required_pairs = 0;
  bool valid() const;
};

PresentationReport validate_presentation(const TrianglePresentation& p);

/// The pairs (u, v) that must start a triple, in search order.
std::vector<std::pair<ElementId, ElementId>> required_pairs(const Geometry& g, const Duality& lambda);

struct SearchOptions {
  std::size_t limit = 1;
  /// 0 keeps candidates in index order; any other value shuffles them
  /// deterministically.
  std::uint64_t seed = 0;
  /// Maximum number of search nodes; 0 means unbounded.
  std::uint64_t node_budget = 0;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::size_t pairs = 0;
  bool exhausted = false;   // whole tree explored
  bool budget_hit = false;  // stopped by node_budget
};

struct SearchResult {
  std::vector<TrianglePresentation> presentations;
  SearchStats stats;
  std::string diagnostic;
};

/// Deterministic backtracking with closure propagation. Throws UsageError if
/// lambda is not a valid duality of the geometry.
SearchResult search_presentations(const std::shared_ptr<const Geometry>& geometry,
                                  const Duality& lambda, const SearchOptions& options);

struct SweepResult {
  std::optional<TrianglePresentation> presentation;
  /// line_of_point for the duality that succeeded (see pgeom::pairing_duality).
  std::vector<std::size_t> pairing;
  std::uint64_t dualities_tried = 0;
  std::uint64_t nodes = 0;
};

/// Planes only. Walks the point-line pairings in lexicographic order,
/// starting from the index pairing, and runs search_presentations on each
/// until one yields a presentation or max_dualities have been tried.
SweepResult sweep_dualities(const std::shared_ptr<const Geometry>& geometry, const SearchOptions& options,
                            std::uint64_t max_dualities);

// --- Serialization -------------------------------------------------------

nlohmann::json geometry_to_json(const Geometry& g);
std::shared_ptr<const Geometry> geometry_from_json(const nlohmann::json& j);

/// Deterministic text rendering; load(save(P)) == P.
std::string presentation_to_string(const TrianglePresentation& p,
                                   const nlohmann::json& meta = nlohmann::json::object());
TrianglePresentation presentation_from_string(const std::string& text);

void save_presentation(const TrianglePresentation& p, const std::string& path,
                       const nlohmann::json& meta = nlohmann::json::object());
TrianglePresentation load_presentation(const std::string& path);

/// FNV-1a over the canonical rendering without metadata.
std::uint64_t presentation_hash(const TrianglePresentation& p);
std::string hash_hex(std::uint64_t h);

}  // namespace atilde::tripres
