#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "atilde/errors.hpp"
#include "atilde/tripres.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace atilde;
using namespace atilde::tripres;
using pgeom::Geometry;

namespace {

std::set<Triple> triple_set(const TrianglePresentation& p) { return {p.triples().begin(), p.triples().end()}; }

// Bit-vector label of a PG(2,2) element: the point itself, or a line's normal.
int fano_label(const Geometry& g, ElementId u) {
  const auto& s = g.subspace(u);
  auto bits = [](std::span<const std::uint8_t> r) { return r[0] | r[1] << 1 | r[2] << 2; };
  if (s.dim == 1) return bits(s.row(0));
  for (int a = 1; a <= 7; ++a)
    if (oracle::on_line(a, bits(s.row(0))) && oracle::on_line(a, bits(s.row(1)))) return a;
  return 0;
}

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("searched plane presentations satisfy every axiom") {
  for (int q : {2, 3}) {
    const auto& p = testsupport::plane_presentation(q);
    auto rep = validate_presentation(p);
    CAPTURE(q);
    CHECK(rep.valid());
    CHECK(rep.duality_valid);
    for (const auto& a : rep.axioms) {
      CHECK(a.pass);
      CHECK(a.failures == 0);
    }
    // one triple per required pair
    CHECK(rep.triple_count == rep.required_pairs);
    CHECK(rep.triple_count == static_cast<std::size_t>(2 * (q * q + q + 1) * (q + 1)));

    // closure under rotation and under the lambda-reversal
    auto set = triple_set(p);
    const auto& lam = p.lambda();
    for (const auto& t : set) {
      CHECK(set.count({t.v, t.w, t.u}) == 1);
      CHECK(set.count({lam(t.w), lam(t.v), lam(t.u)}) == 1);
      CHECK((p.geometry().dim(t.u) + p.geometry().dim(t.v) + p.geometry().dim(t.w)) % 3 == 0);
      CHECK(p.third(t.u, t.v) == t.w);
    }
  }
}

TEST_CASE("the annihilator duality of PG(2,2) admits no presentation") {
  auto g = Geometry::vector_space(2, 2);
  auto res = search_presentations(g, pgeom::annihilator_duality(*g), {});
  CHECK(res.presentations.empty());
  CHECK(res.stats.exhausted);
  CHECK_FALSE(res.stats.budget_hit);
  CHECK_FALSE(res.diagnostic.empty());

  // independent exact-cover oracle on x -> x^perp
  std::array<int, 8> perp{};
  for (int x = 1; x <= 7; ++x) perp[static_cast<std::size_t>(x)] = x;
  CHECK_FALSE(oracle::fano_pairing_admits(perp));
}

TEST_CASE("exactly 624 of the 5040 point-line pairings of PG(2,2) admit a presentation") {
  auto g = Geometry::vector_space(2, 2);
  auto points = g->elements_of_dim(1);
  auto lines = g->elements_of_dim(2);
  std::vector<std::size_t> perm(7);
  std::iota(perm.begin(), perm.end(), 0u);
  int library = 0, reference = 0, disagreements = 0;
  do {
    auto res = search_presentations(g, pgeom::pairing_duality(*g, perm), {});
    const bool found = !res.presentations.empty();
    if (found) CHECK(validate_presentation(res.presentations.front()).valid());
    std::array<int, 8> pair{};
    for (std::size_t i = 0; i < 7; ++i)
      pair[static_cast<std::size_t>(fano_label(*g, points[i]))] = fano_label(*g, lines[perm[i]]);
    const bool expected = oracle::fano_pairing_admits(pair);
    library += found;
    reference += expected;
    disagreements += found != expected;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(library == 624);
  CHECK(reference == 624);
  CHECK(disagreements == 0);
}

TEST_CASE("the duality sweep") {
  auto g = Geometry::vector_space(2, 2);
  auto sw = sweep_dualities(g, {}, 100000);
  REQUIRE(sw.presentation.has_value());
  CHECK(sw.dualities_tried == 4);
  CHECK(sw.pairing == std::vector<std::size_t>{0, 1, 2, 3, 5, 6, 4});
  CHECK(validate_presentation(*sw.presentation).valid());
  CHECK(sw.presentation->lambda() == pgeom::pairing_duality(*g, sw.pairing));

  auto none = sweep_dualities(g, {}, 3);
  CHECK_FALSE(none.presentation.has_value());
  CHECK(none.dualities_tried == 3);

  CHECK_THROWS_AS(sweep_dualities(Geometry::vector_space(3, 2), {}, 10), ConfigError);

  // a non-Desarguesian-capable input path: the plane given as a table
  auto table = Geometry::from_plane(pgeom::desarguesian_plane(2));
  auto sw2 = sweep_dualities(table, {}, 100000);
  REQUIRE(sw2.presentation.has_value());
  CHECK(validate_presentation(*sw2.presentation).valid());
}

TEST_CASE("search options") {
  const auto& p = testsupport::plane_presentation(2);
  auto geom = p.geometry_ptr();
  SearchOptions zero;
  zero.limit = 0;
  CHECK(search_presentations(geom, p.lambda(), zero).presentations.empty());

  SearchOptions many;
  many.limit = 1000;
  auto all = search_presentations(geom, p.lambda(), many);
  CHECK(all.stats.exhausted);
  CHECK(!all.presentations.empty());
  std::set<std::set<Triple>> distinct;
  for (const auto& x : all.presentations) {
    CHECK(validate_presentation(x).valid());
    distinct.insert(triple_set(x));
  }
  CHECK(distinct.size() == all.presentations.size());

  SearchOptions seeded;
  seeded.seed = 17;
  auto a = search_presentations(geom, p.lambda(), seeded);
  auto b = search_presentations(geom, p.lambda(), seeded);
  REQUIRE(a.presentations.size() == 1);
  CHECK(a.presentations.front() == b.presentations.front());
  CHECK(distinct.count(triple_set(a.presentations.front())) == 1);

  SearchOptions tight;
  tight.node_budget = 1;
  auto cut = search_presentations(geom, p.lambda(), tight);
  CHECK(cut.stats.budget_hit);
  CHECK(cut.stats.nodes <= 1);

  pgeom::Duality bad;
  bad.map.resize(geom->size());
  std::iota(bad.map.begin(), bad.map.end(), 0u);
  CHECK_THROWS_AS(search_presentations(geom, bad, {}), UsageError);
}

TEST_CASE("rank 3 search reports instead of failing") {
  auto g = Geometry::vector_space(3, 2);
  SearchOptions o;
  o.node_budget = 1'000'000;
  auto res = search_presentations(g, pgeom::annihilator_duality(*g), o);
  CHECK(res.presentations.empty());
  CHECK(res.stats.exhausted != res.stats.budget_hit);
  CHECK_FALSE(res.diagnostic.empty());
}

TEST_CASE("axiom failures carry witnesses") {
  const auto& p = testsupport::plane_presentation(2);

  TrianglePresentation empty(p.geometry_ptr(), p.lambda(), {});
  auto rep = validate_presentation(empty);
  CHECK_FALSE(rep.valid());
  CHECK_FALSE(rep.axioms[0].pass);
  CHECK_FALSE(rep.axioms[0].witnesses.empty());

  // a second third entry for an existing pair
  auto triples = std::vector<Triple>(p.triples().begin(), p.triples().end());
  Triple t = triples.front();
  ElementId other = t.w;
  for (auto w : p.geometry().elements_of_dim(p.geometry().dim(t.w)))
    if (w != t.w) {
      other = w;
      break;
    }
  triples.push_back({t.u, t.v, other});
  auto rep3 = validate_presentation(TrianglePresentation(p.geometry_ptr(), p.lambda(), triples));
  CHECK_FALSE(rep3.axioms[2].pass);
  CHECK_FALSE(rep3.axioms[2].witnesses.empty());

  // dropping one triple breaks rotation closure
  auto fewer = std::vector<Triple>(p.triples().begin() + 1, p.triples().end());
  auto rep2 = validate_presentation(TrianglePresentation(p.geometry_ptr(), p.lambda(), fewer));
  CHECK_FALSE(rep2.axioms[1].pass);
  CHECK_FALSE(rep2.axioms[0].pass);

  // a mixed point-point-line triple violates the dimension rule
  auto geo = p.geometry_ptr();
  auto pts = geo->elements_of_dim(1);
  auto lns = geo->elements_of_dim(2);
  auto rep5 = validate_presentation(TrianglePresentation(geo, p.lambda(), {{pts[0], pts[1], lns[0]}}));
  CHECK_FALSE(rep5.axioms[4].pass);

  CHECK_THROWS_AS(TrianglePresentation(geo, p.lambda(), {{0, 1, 99}}), UsageError);
}

TEST_CASE("presentation files") {
  const auto& p = testsupport::plane_presentation(2);
  const std::string path = temp_path("atilde_test_presentation.json");
  save_presentation(p, path, {{"note", "round trip"}});
  auto back = load_presentation(path);
  CHECK(back == p);
  CHECK(validate_presentation(back).valid());
  CHECK(presentation_hash(back) == presentation_hash(p));
  CHECK(presentation_to_string(back) == presentation_to_string(p));
  // metadata does not enter the hash
  CHECK(presentation_hash(presentation_from_string(presentation_to_string(p, {{"x", 1}}))) == presentation_hash(p));
  CHECK(hash_hex(presentation_hash(p)).size() == 16);

  const auto& p3 = testsupport::plane_presentation(3);
  CHECK(presentation_from_string(presentation_to_string(p3)) == p3);

  auto j = nlohmann::json::parse(presentation_to_string(p));
  j["triples"][0][2] = 9999;
  try {
    presentation_from_string(j.dump());
    FAIL("out-of-range triple accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("triples[0][2]") != std::string::npos);
  }
  auto k = nlohmann::json::parse(presentation_to_string(p));
  k["lambda"].erase(0);
  CHECK_THROWS_AS(presentation_from_string(k.dump()), ParseError);
  auto m = nlohmann::json::parse(presentation_to_string(p));
  m.erase("geometry");
  CHECK_THROWS_AS(presentation_from_string(m.dump()), ParseError);
  CHECK_THROWS_AS(presentation_from_string("{\n\"geometry\": [1,\n"), ParseError);
  CHECK_THROWS_AS(load_presentation(temp_path("atilde_no_such_file.json")), ParseError);

  // geometry blocks
  auto gv = geometry_from_json(nlohmann::json{{"kind", "vector"}, {"n", 2}, {"q", 3}});
  CHECK(gv->size() == 26);
  auto gi = geometry_from_json(geometry_to_json(*Geometry::from_plane(pgeom::desarguesian_plane(2))));
  CHECK(gi->kind() == Geometry::Kind::incidence);
  CHECK(gi->size() == 14);
  std::remove(path.c_str());
}
