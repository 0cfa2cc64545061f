#pragma once

// Shared fixtures: presentations found by the duality sweep, their groups and
// balls, built once per process.

#include <map>
#include <memory>
#include <utility>

#include "atilde/pgeom.hpp"
#include "atilde/tripres.hpp"
#include "atilde/wordcore.hpp"

namespace testsupport {

using namespace atilde;

inline const tripres::TrianglePresentation& plane_presentation(int q) {
  static std::map<int, tripres::TrianglePresentation> cache;
  auto it = cache.find(q);
  if (it == cache.end()) {
    auto sw = tripres::sweep_dualities(pgeom::Geometry::vector_space(2, q), {}, 100000);
    it = cache.emplace(q, std::move(*sw.presentation)).first;
  }
  return it->second;
}

inline const wordcore::Group& plane_group(int q) {
  static std::map<int, std::unique_ptr<wordcore::Group>> cache;
  auto& slot = cache[q];
  if (!slot) slot = std::make_unique<wordcore::Group>(plane_presentation(q));
  return *slot;
}

inline const wordcore::CayleyBall& plane_ball(int q, int radius) {
  static std::map<std::pair<int, int>, std::unique_ptr<wordcore::CayleyBall>> cache;
  auto& slot = cache[{q, radius}];
  if (!slot) slot = std::make_unique<wordcore::CayleyBall>(wordcore::build_ball(plane_group(q), radius));
  return *slot;
}

}  // namespace testsupport
