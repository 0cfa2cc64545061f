#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <set>

#include "atilde/counting.hpp"
#include "atilde/errors.hpp"
#include "atilde/pgeom.hpp"

using namespace atilde;
using namespace atilde::pgeom;

TEST_CASE("field axioms hold exhaustively up to order 9") {
  for (int q : FiniteField::supported_orders()) {
    if (q > 9) continue;
    FiniteField f(q);
    CAPTURE(q);
    for (int a = 0; a < q; ++a) {
      const auto x = static_cast<std::uint8_t>(a);
      CHECK(f.add(x, 0) == x);
      CHECK(f.mul(x, 1) == x);
      CHECK(f.add(x, f.neg(x)) == 0);
      if (a) CHECK(f.mul(x, f.inv(x)) == 1);
      for (int b = 0; b < q; ++b) {
        const auto y = static_cast<std::uint8_t>(b);
        CHECK(f.add(x, y) == f.add(y, x));
        CHECK(f.mul(x, y) == f.mul(y, x));
        if (a && b) CHECK(f.mul(x, y) != 0);
        for (int c = 0; c < q; ++c) {
          const auto z = static_cast<std::uint8_t>(c);
          CHECK(f.mul(x, f.add(y, z)) == f.add(f.mul(x, y), f.mul(x, z)));
          CHECK(f.mul(f.mul(x, y), z) == f.mul(x, f.mul(y, z)));
          CHECK(f.add(f.add(x, y), z) == f.add(x, f.add(y, z)));
        }
      }
    }
  }
  CHECK_THROWS_AS(FiniteField(6), ConfigError);
  CHECK_THROWS_AS(FiniteField(16), ConfigError);
  CHECK_THROWS_AS(FiniteField(2).inv(0), UsageError);
}

TEST_CASE("subspace enumeration") {
  CHECK(enumerate_subspaces(2, 2, 1).size() == 7);
  CHECK(enumerate_subspaces(2, 2, 2).size() == 7);
  CHECK(enumerate_subspaces(1, 2, 1).size() == 3);
  for (int n = 1; n <= 3; ++n)
    for (int q : {2, 3, 4})
      for (int d = 1; d <= n; ++d) {
        auto subs = enumerate_subspaces(n, q, d);
        std::set<ProjSubspace> unique(subs.begin(), subs.end());
        CHECK(unique.size() == subs.size());
        CHECK(std::is_sorted(subs.begin(), subs.end()));
        CHECK(QInt(subs.size()) == counting::gaussian_binomial(n + 1, d, q));
      }
  CHECK_THROWS_AS(enumerate_subspaces(2, 6, 1), ConfigError);
}

TEST_CASE("canonical forms do not depend on the spanning set") {
  FiniteField f(3);
  const std::uint8_t a[] = {1, 2, 0, 0, 1, 1};
  const std::uint8_t b[] = {1, 0, 1, 0, 1, 1};  // first row replaced by the sum of both
  const std::uint8_t c[] = {0, 1, 1, 1, 2, 0};
  CHECK(span_of(f, 3, a) == span_of(f, 3, b));
  CHECK(span_of(f, 3, a) == span_of(f, 3, c));
  const std::uint8_t dependent[] = {1, 1, 0, 2, 2, 0};
  CHECK(span_of(f, 3, dependent).dim == 1);
}

TEST_CASE("incidence and join") {
  auto g = Geometry::vector_space(2, 2);
  auto points = g->elements_of_dim(1);
  auto lines = g->elements_of_dim(2);
  REQUIRE(points.size() == 7);
  REQUIRE(lines.size() == 7);
  for (auto u : points) {
    CHECK(g->incident(u, u));
    int on = 0;
    for (auto l : lines) on += g->incident(u, l);
    CHECK(on == 3);
    for (auto v : points)
      if (u != v) {
        CHECK_FALSE(g->incident(u, v));
        auto j = g->join(u, v);
        REQUIRE(j.has_value());
        CHECK(g->dim(*j) == 2);
        CHECK(g->contains(u, *j));
        CHECK(g->contains(v, *j));
      }
    for (auto l : lines) {
      if (g->incident(u, l))
        CHECK(g->join(u, l) == l);
      else
        CHECK(g->join_is_whole(u, l));
    }
  }
  // commutative, idempotent, associative with Whole absorbing
  for (auto g3 : {Geometry::vector_space(2, 3), Geometry::vector_space(3, 2)}) {
    const auto N = static_cast<ElementId>(g3->size());
    for (ElementId u = 0; u < N; ++u) {
      CHECK(g3->join(u, u) == u);
      for (ElementId v = 0; v < N; ++v) {
        CHECK(g3->join(u, v) == g3->join(v, u));
        for (ElementId w = 0; w < N; w += 3) {
          auto uv = g3->join(u, v), vw = g3->join(v, w);
          auto left = uv ? g3->join(*uv, w) : std::nullopt;
          auto right = vw ? g3->join(u, *vw) : std::nullopt;
          CHECK(left == right);
        }
      }
    }
  }
}

TEST_CASE("incidence counts") {
  CHECK(count_incident(2, 2, 1, 2) == 3);
  CHECK(count_incident(3, 2, 1, 3) == 7);
  CHECK(count_incident(2, 2, 0, 2) == 7);
  CHECK(count_incident(3, 3, 0, 1) == 40);
  // against the tables
  auto g = Geometry::vector_space(3, 2);
  for (int b = 1; b <= 3; ++b)
    for (int r = 1; r <= 3; ++r) {
      if (r == b) continue;
      auto u = g->elements_of_dim(b).front();
      std::size_t count = 0;
      for (auto v : g->elements_of_dim(r)) count += g->incident(u, v);
      CHECK(QInt(count) == count_incident(3, 2, b, r));
    }
}

TEST_CASE("dualities") {
  auto g = Geometry::vector_space(2, 2);
  auto ann = annihilator_duality(*g);
  auto rep = validate_duality(*g, ann);
  CHECK(rep.valid());
  CHECK(rep.correlation);
  const auto N = static_cast<ElementId>(g->size());
  for (ElementId u = 0; u < N; ++u)
    for (ElementId v = 0; v < N; ++v) CHECK(g->incident(u, v) == g->incident(ann(v), ann(u)));

  Duality id;
  id.map.resize(g->size());
  std::iota(id.map.begin(), id.map.end(), 0u);
  CHECK_FALSE(validate_duality(*g, id).valid());
  CHECK_FALSE(validate_duality(*g, id).dimension_rule);

  // swap two images: still dimension-reversing, no longer an involution
  Duality broken = ann;
  std::swap(broken.map[0], broken.map[1]);
  auto br = validate_duality(*g, broken);
  CHECK(br.dimension_rule);
  CHECK_FALSE(br.involutive);
  CHECK_FALSE(br.valid());
  CHECK_FALSE(br.violations.empty());

  Duality shortmap;
  shortmap.map = {0, 1};
  CHECK_FALSE(validate_duality(*g, shortmap).valid());

  // every point-line pairing is a duality; most are not correlations
  std::vector<std::size_t> perm(7);
  std::iota(perm.begin(), perm.end(), 0u);
  int correlations = 0, total = 0;
  do {
    auto d = pairing_duality(*g, perm);
    auto r = validate_duality(*g, d);
    CHECK(r.valid());
    correlations += r.correlation;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(total == 5040);
  CHECK(correlations > 0);
  CHECK(correlations < total);
  CHECK(validate_duality(*g, index_pairing_duality(*g)).valid());
  const std::size_t bad[] = {0, 0, 1, 2, 3, 4, 5};
  CHECK_THROWS_AS(pairing_duality(*g, bad), UsageError);

  auto g3 = Geometry::vector_space(3, 2);
  auto ann3 = annihilator_duality(*g3);
  CHECK(validate_duality(*g3, ann3).valid());
  for (ElementId u = 0; u < g3->size(); ++u) CHECK(g3->dim(ann3(u)) == 4 - g3->dim(u));
}

TEST_CASE("abstract planes") {
  for (int q : {2, 3, 4}) {
    auto plane = desarguesian_plane(q);
    auto rep = validate_plane(plane);
    CHECK(rep.ok);
    CHECK(rep.order == q);
    auto g = Geometry::from_plane(plane);
    CHECK(g->n() == 2);
    CHECK(g->q() == q);
    CHECK(g->size() == static_cast<std::size_t>(2 * (q * q + q + 1)));
    CHECK(g->complete_flags().size() == static_cast<std::size_t>((q * q + q + 1) * (q + 1)));
  }
  auto plane = desarguesian_plane(2);
  plane.incidence[0][0] ^= 1;
  auto rep = validate_plane(plane);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.problems.empty());
  CHECK_THROWS_AS(Geometry::from_plane(plane), UsageError);
}

TEST_CASE("complete flags") {
  CHECK(Geometry::vector_space(2, 2)->complete_flags().size() == 21);
  CHECK(QInt(Geometry::vector_space(3, 2)->complete_flags().size()) == counting::flag_count(3, 2));
  CHECK(QInt(Geometry::vector_space(2, 3)->complete_flags().size()) == counting::flag_count(2, 3));
}
