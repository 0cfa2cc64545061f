#include "atilde/boundary.hpp"

#include <algorithm>
#include <limits>

#include "atilde/errors.hpp"

namespace atilde::boundary {

namespace {

SphereIndex add(SphereIndex a, const SphereIndex& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

void check_index(const Group& g, const SphereIndex& k, const char* what) {
  if (k.size() != static_cast<std::size_t>(g.n()))
    throw UsageError(std::string(what) + " has " + std::to_string(k.size()) + " entries, expected " +
                     std::to_string(g.n()));
  for (int v : k)
    if (v < 0) throw UsageError(std::string(what) + " has a negative entry");
}

void check_additivity(const Group& g, const CylinderSet& parent, const std::vector<CylinderSet>& children) {
  Rational sum = 0;
  for (const auto& c : children) sum += cylinder_measure(g, c);
  if (sum != cylinder_measure(g, parent))
    throw ConsistencyError("children of Omega_" + wordcore::format_word(parent.base) + "^" +
                           wordcore::format_word(parent.target) + " carry measure " + to_string(sum) +
                           " instead of " + to_string(cylinder_measure(g, parent)));
}

}  // namespace

CylinderSet make_cylinder(const Group& g, const NormalWord& base, const NormalWord& target) {
  return {base, target, g.relative_shape(base, target)};
}

Rational cylinder_measure(const Group& g, const CylinderSet& c) {
  return Rational(QInt(1), counting::sphere_size(c.shape, g.n(), g.q()));
}

bool cylinder_contains(const Group& g, const CylinderSet& outer, const CylinderSet& inner) {
  if (outer.base != inner.base) throw UsageError("cylinders have different base vertices");
  return add(outer.shape, g.relative_shape(outer.target, inner.target)) == inner.shape;
}

namespace {

// Walks the normal words w of shape delta letter by letter. A child
// target*w lies in the sector from the base, and so does every vertex on
// the way, so a prefix whose shape seen from the base stops growing in step
// with w is abandoned early. Stops after `limit` children.
std::vector<CylinderSet> walk_children(const Group& g, const CylinderSet& c, const SphereIndex& delta,
                                       std::size_t limit) {
  check_index(g, delta, "refinement step");
  const SphereIndex goal = add(c.shape, delta);
  std::vector<int> dims;
  for (int j = 1; j <= g.n(); ++j)
    dims.insert(dims.end(), static_cast<std::size_t>(delta[static_cast<std::size_t>(j - 1)]), j);

  const bool at_identity = c.base.empty();
  std::vector<CylinderSet> out;
  SphereIndex partial = c.shape;
  auto dfs = [&](auto&& self, std::size_t pos, const NormalWord& cur, const NormalWord& rel,
                 std::optional<wordcore::Letter> prev) -> void {
    if (pos == dims.size()) {
      out.push_back({c.base, cur, goal});
      return;
    }
    const int d = dims[pos];
    ++partial[static_cast<std::size_t>(d - 1)];
    for (wordcore::Letter l : g.letters_of_dim(d)) {
      if (out.size() >= limit) break;
      if (prev && g.rule(*prev, l).kind != wordcore::PairKind::normal) continue;
      NormalWord nrel = g.multiply(rel, l);
      if (nrel.size() != rel.size() + 1 || g.shape(nrel) != partial) continue;
      if (at_identity)
        self(self, pos + 1, nrel, nrel, l);
      else
        self(self, pos + 1, g.multiply(cur, l), nrel, l);
    }
    --partial[static_cast<std::size_t>(d - 1)];
  };
  dfs(dfs, 0, c.target, at_identity ? c.target : g.multiply(g.inverse(c.base), c.target), std::nullopt);
  return out;
}

}  // namespace

std::vector<CylinderSet> refine_cylinder(const Group& g, const CylinderSet& c, const SphereIndex& delta) {
  auto out = walk_children(g, c, delta, std::numeric_limits<std::size_t>::max());
  std::sort(out.begin(), out.end(), [](const CylinderSet& a, const CylinderSet& b) { return a.target < b.target; });
  check_additivity(g, c, out);
  return out;
}

std::optional<CylinderSet> some_child(const Group& g, const CylinderSet& c, const SphereIndex& delta) {
  auto out = walk_children(g, c, delta, 1);
  if (out.empty()) return std::nullopt;
  return out.front();
}

std::vector<std::uint32_t> graph_sphere(const CayleyBall& ball, std::uint32_t from, int d) {
  if (from >= ball.size()) throw UsageError("vertex id out of range");
  if (static_cast<int>(ball.vertices[from].size()) + d > ball.radius)
    throw RangeError("walking " + std::to_string(d) + " steps from a vertex of length " +
                     std::to_string(ball.vertices[from].size()) + " leaves the radius-" +
                     std::to_string(ball.radius) + " ball");
  std::vector<int> dist(ball.size(), -1);
  std::vector<std::uint32_t> frontier{from}, next;
  dist[from] = 0;
  for (int step = 0; step < d; ++step) {
    next.clear();
    for (std::uint32_t v : frontier)
      for (std::size_t s = 0; s < ball.generators; ++s) {
        std::int32_t u = ball.adjacency[v * ball.generators + s];
        if (u < 0) throw ConsistencyError("ball adjacency incomplete inside the radius");
        if (dist[static_cast<std::size_t>(u)] >= 0) continue;
        dist[static_cast<std::size_t>(u)] = step + 1;
        next.push_back(static_cast<std::uint32_t>(u));
      }
    frontier.swap(next);
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

std::vector<CylinderSet> refine_cylinder(const Group& g, const CylinderSet& c, const SphereIndex& delta,
                                         const CayleyBall& ball) {
  check_index(g, delta, "refinement step");
  int norm = 0;
  for (int v : delta) norm += v;
  auto id = ball.find(c.target);
  if (!id) throw RangeError("cylinder target " + wordcore::format_word(c.target) + " is outside the ball");
  const SphereIndex goal = add(c.shape, delta);
  std::vector<CylinderSet> out;
  for (std::uint32_t v : graph_sphere(ball, *id, norm)) {
    const NormalWord& x = ball.vertices[v];
    if (g.relative_shape(c.target, x) == delta && g.relative_shape(c.base, x) == goal)
      out.push_back({c.base, x, goal});
  }
  std::sort(out.begin(), out.end(), [](const CylinderSet& a, const CylinderSet& b) { return a.target < b.target; });
  check_additivity(g, c, out);
  return out;
}

MVector m_vector(const Group& g, const NormalWord& x, const NormalWord& y, const NormalWord& z) {
  const SphereIndex l = g.relative_shape(x, z);
  const int dxy = g.distance(x, y);
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i] < dxy)
      throw DepthError("component " + std::to_string(i + 1) + " of shape(x^-1 z) is " + std::to_string(l[i]) +
                       ", below d(x,y) = " + std::to_string(dxy));
  const SphereIndex lp = g.relative_shape(y, z);
  MVector m;
  m.m.resize(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) m.m[i] = lp[i] - l[i];
  return m;
}

std::int64_t rn_exponent(const MVector& m) { return -counting::weighted_exponent(m.m); }

Rational rn_value(std::int64_t exponent, int q) {
  const QInt p = counting::ipow(QInt(q), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  return exponent >= 0 ? Rational(p) : Rational(QInt(1), p);
}

Rational rn_derivative(const Group& g, const NormalWord& x, const NormalWord& y, const NormalWord& z) {
  return rn_value(rn_exponent(m_vector(g, x, y, z)), g.q());
}

PartitionReport partition_check(const Group& g, const CayleyBall& ball, const NormalWord& base,
                                const SphereIndex& k) {
  check_index(g, k, "sphere index");
  int norm = 0;
  for (int v : k) norm += v;
  auto id = ball.find(base);
  if (!id) throw RangeError("base vertex " + wordcore::format_word(base) + " is outside the ball");
  PartitionReport rep;
  rep.formula = counting::sphere_size(k, g.n(), g.q());
  rep.each = Rational(QInt(1), rep.formula);
  std::vector<NormalWord> targets;
  for (std::uint32_t v : graph_sphere(ball, *id, norm))
    if (g.relative_shape(base, ball.vertices[v]) == k) targets.push_back(ball.vertices[v]);
  rep.cylinders = targets.size();
  std::sort(targets.begin(), targets.end());
  rep.distinct = std::adjacent_find(targets.begin(), targets.end()) == targets.end();
  for (const auto& t : targets) rep.total += cylinder_measure(g, make_cylinder(g, base, t));
  return rep;
}

}  // namespace atilde::boundary
