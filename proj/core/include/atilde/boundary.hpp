#pragma once

// Cylinder sets of the boundary and the quantities that are locally constant
// on them: the measures nu_y, the displacement m(x,y;omega) and the
// Radon-Nikodym derivative. Boundary points are never materialized; every
// statement is about a cylinder, i.e. a pair of vertices.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atilde/counting.hpp"
#include "atilde/wordcore.hpp"

namespace atilde::boundary {

using wordcore::CayleyBall;
using wordcore::Group;
using wordcore::NormalWord;

/// Omega_base^target: boundary points whose sector from base passes
/// through target. shape = shape(base^{-1} target).
struct CylinderSet {
  NormalWord base;
  NormalWord target;
  SphereIndex shape;

  friend bool operator==(const CylinderSet&, const CylinderSet&) = default;
};

CylinderSet make_cylinder(const Group& g, const NormalWord& base, const NormalWord& target);

/// nu_base(Omega_base^target) = 1 / |S_shape|.
Rational cylinder_measure(const Group& g, const CylinderSet& c);

/// Same base, and inner lies inside outer: the sector from the base passes
/// through outer.target and then inner.target, i.e. the shapes add up.
bool cylinder_contains(const Group& g, const CylinderSet& outer, const CylinderSet& inner);

/// Children Omega_base^{x1} for x1 in S_delta(target) with x1 in
/// S_{shape+delta}(base), generated as target * w over the normal words w
/// of shape delta. Throws ConsistencyError unless the child measures add up
/// to the parent's.
std::vector<CylinderSet> refine_cylinder(const Group& g, const CylinderSet& c, const SphereIndex& delta);

/// One child, without enumerating the rest (the first one met by the walk).
std::optional<CylinderSet> some_child(const Group& g, const CylinderSet& c, const SphereIndex& delta);

/// Same children, found instead by walking the ball's adjacency from the
/// target. RangeError if the walk would leave the ball.
std::vector<CylinderSet> refine_cylinder(const Group& g, const CylinderSet& c, const SphereIndex& delta,
                                         const CayleyBall& ball);

struct MVector {
  std::vector<int> m;
  friend bool operator==(const MVector&, const MVector&) = default;
};

/// m(x,y;omega) for omega in Omega_x^z: shape(y^{-1}z) - shape(x^{-1}z).
/// Requires every component of shape(x^{-1}z) to be at least d(x,y);
/// DepthError otherwise.
MVector m_vector(const Group& g, const NormalWord& x, const NormalWord& y, const NormalWord& z);

/// The exponent e with d nu_y / d nu_x = q^e, namely -sum i(n+1-i) m_i.
std::int64_t rn_exponent(const MVector& m);
Rational rn_value(std::int64_t exponent, int q);

/// d nu_y / d nu_x on Omega_x^z.
Rational rn_derivative(const Group& g, const NormalWord& x, const NormalWord& y, const NormalWord& z);

/// Vertices at graph distance exactly d from `from`, by BFS over the ball's
/// adjacency. RangeError if the walk could reach beyond the radius.
std::vector<std::uint32_t> graph_sphere(const CayleyBall& ball, std::uint32_t from, int d);

struct PartitionReport {
  std::size_t cylinders = 0;
  QInt formula;          // |S_k|
  Rational each;         // 1 / |S_k|
  Rational total;        // cylinders * each
  bool distinct = true;  // no target listed twice
  bool ok() const { return distinct && total == 1 && QInt(cylinders) == formula; }
};

/// Checks that {Omega_base^x : x in S_k(base)} covers the boundary with
/// total measure 1. S_k(base) is read off the ball.
PartitionReport partition_check(const Group& g, const CayleyBall& ball, const NormalWord& base,
                                const SphereIndex& k);

}  // namespace atilde::boundary
