// One PASS/FAIL line per acceptance criterion. Arguments: the unit-test
// executables whose success criterion 7 depends on.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "atilde/boundary.hpp"
#include "atilde/counting.hpp"
#include "atilde/dynamics.hpp"
#include "atilde/errors.hpp"
#include "atilde/pgeom.hpp"
#include "atilde/tripres.hpp"
#include "atilde/wordcore.hpp"
#include "oracle.hpp"

using namespace atilde;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::unique_ptr<wordcore::Group> q2_group;
double search_seconds = 0;

Outcome presentation_search() {
  auto t0 = Clock::now();
  auto geom = pgeom::Geometry::vector_space(2, 2);
  auto sw = tripres::sweep_dualities(geom, {}, 5040);
  search_seconds = seconds_since(t0);
  if (!sw.presentation) return {false, "no pairing of PG(2,2) yielded a presentation"};
  auto rep = tripres::validate_presentation(*sw.presentation);
  std::ostringstream s;
  bool all = rep.valid() && pgeom::validate_duality(*geom, sw.presentation->lambda()).valid();
  s << "duality #" << sw.dualities_tried << " of the pairing sweep, " << rep.triple_count << " triples, axioms";
  for (std::size_t i = 0; i < rep.axioms.size(); ++i) s << " " << i + 1 << (rep.axioms[i].pass ? ":ok" : ":FAIL");
  s << ", " << search_seconds << " s";
  q2_group = std::make_unique<wordcore::Group>(*sw.presentation);
  return {all && search_seconds < 600, s.str()};
}

Outcome sphere_oracle() {
  const auto& g = *q2_group;
  auto t0 = Clock::now();
  auto ball = wordcore::build_ball(g, 4, 10'000'000, std::max(1u, std::thread::hardware_concurrency()));
  int rows = 0, bad = 0;
  std::size_t largest = 0;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      const SphereIndex k{a, b};
      const auto found = wordcore::sphere(g, ball, k).size();
      const QInt formula = counting::sphere_size(k, 2, 2);
      const bool ok = QInt(found) == formula && oracle::str(oracle::sphere(k, 2)) == formula.str();
      bad += !ok;
      ++rows;
      largest = std::max(largest, found);
    }
  std::ostringstream s;
  s << rows << " spheres with |k| <= 4, " << bad << " mismatches, largest " << largest << ", ball of "
    << ball.size() << " vertices, " << seconds_since(t0) << " s";
  return {bad == 0 && seconds_since(t0) < 60, s.str()};
}

Outcome known_counts() {
  const auto& g = *q2_group;
  auto ball = wordcore::build_ball(g, 2);
  std::vector<std::string> fails;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) fails.push_back(what);
  };
  expect(wordcore::sphere(g, ball, {1, 0}).size() == 7, "|S_(1,0)| enumerated");
  expect(counting::sphere_size(SphereIndex{1, 0}, 2, 2) == 7, "|S_(1,0)| formula");
  expect(g.chambers_at_identity().size() == 21, "chambers at a vertex");
  expect(counting::flag_count(2, 2) == 21, "flag count");
  expect(dynamics::triangle_census(g, ball, 1) == 21, "triangles of side 1 enumerated");
  expect(dynamics::triangle_census(g, ball, 2) == 168, "triangles of side 2 enumerated");
  expect(counting::triangle_count(1, 2, 2) == 21 && counting::triangle_count(2, 2, 2) == 168, "triangle formula");
  for (int q : {2, 3, 4, 5})
    for (int m = 1; m <= 12; ++m) {
      expect(counting::wall_triangle_count(m, q) == 3 * (q + 1) * oracle::pw(q, m - 1),
             "wall triangles m=" + std::to_string(m));
      expect(counting::freeness_step_ratio(m, q) == Rational(QInt(1), QInt(q * q)), "step ratio m=" + std::to_string(m));
      expect(counting::freeness_bound(m + 1, q) / counting::freeness_bound(m, q) == Rational(QInt(1), QInt(q * q)),
             "bound ratio m=" + std::to_string(m));
    }
  expect(counting::wall_triangle_count(1, 2) == 9 && counting::freeness_bound(1, 2) == Rational(3, 7), "bound m=1");
  std::string detail = "|S_(1,0)|=7, chambers=21, |S_1|=21, |S_2|=168 (enumerated), |S_m^W|=3(q+1)q^(m-1), ratio q^-2";
  if (!fails.empty()) detail = "failed: " + fails.front();
  return {fails.empty(), detail};
}

Outcome rn_census() {
  const auto& g = *q2_group;
  auto ball = wordcore::build_ball(g, 2);
  auto c = dynamics::generator_rn_census(g, ball, 2);
  bool gens = !c.generators.empty();
  for (const auto& r : c.generators)
    gens = gens && r.matches() && boundary::rn_value(r.exponent, 2) == 4;

  // cocycle on every triple of the radius-2 ball, over several deep cylinders
  const std::size_t N = ball.size();
  std::size_t triples = 0, bad = 0;
  for (std::size_t s = 0; s < N; s += 16) {
    auto z = dynamics::deepen(g, ball.vertices[s], SphereIndex{6, 6});
    std::vector<std::int64_t> e(N * N);
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        e[a * N + b] = boundary::rn_exponent(boundary::m_vector(g, ball.vertices[a], ball.vertices[b], z));
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        for (std::size_t d = 0; d < N; ++d, ++triples) bad += e[a * N + d] != e[a * N + b] + e[b * N + d];
  }
  std::ostringstream s;
  s << c.generators.size() << " generators at q^{i(n+1-i)} = 4: " << (gens ? "all" : "NOT all") << "; cocycle on "
    << triples << " triples, " << bad << " failures";
  return {gens && bad == 0 && triples > 0, s.str()};
}

Outcome type_classification() {
  bool ok = true;
  std::ostringstream s;
  for (int q : {2, 3, 5})
    for (int n = 1; n <= 10; ++n) {
      auto d = dynamics::ratio_descriptor(n, q);
      const Rational want = n % 2 ? Rational(QInt(1), QInt(q)) : Rational(QInt(1), QInt(q * q));
      ok = ok && d.lambda == want && dynamics::classify_descriptor(n, q).passed();
      if (q == 2) s << (n > 1 ? " " : "") << "n=" << n << ":" << to_string(d.lambda);
    }
  // For even n, i and n+1-i have opposite parity, so i(n+1-i) is even. On
  // residues mod 2 that is i(1-i) = 0 for i in {0, 1}.
  for (int i : {0, 1}) ok = ok && (i * (1 - i)) % 2 == 0;
  for (int n = 2; n <= 200; n += 2)
    for (int i = 1; i <= n; ++i) ok = ok && (i * (n + 1 - i)) % 2 == 0;
  return {ok, "lambda at q=2:" + std::string(" ") + s.str() + "; parity argument checked mod 2"};
}

Outcome phi_construction() {
  const auto& g = *q2_group;
  auto t0 = Clock::now();
  const SphereIndex k{1, 0};
  auto rep = dynamics::transitivity_witnesses(g, k, 3, std::max(1u, std::thread::hardware_concurrency()));
  // K from the refinement counts: children of a node under delta + e_n
  auto x = g.enumerate_shape(k).front();
  auto kids = boundary::refine_cylinder(g, boundary::make_cylinder(g, g.identity(), x), SphereIndex{1, 1});
  auto grand = boundary::refine_cylinder(g, kids.front(), SphereIndex{1, 2});
  const std::uint64_t K = grand.size();
  Rational miss = 1 - Rational(QInt(1), QInt(K)), expected = 1 - miss * miss * miss;
  bool ok = rep.witnesses.size() == 42 && rep.all_ok() && rep.K == K && rep.expected == expected;
  for (const auto& w : rep.witnesses) ok = ok && w.covered == expected && w.findings.empty();
  std::ostringstream s;
  s << rep.witnesses.size() << " ordered pairs of S_(1,0), N=3, K=" << K << ", coverage " << to_string(expected)
    << " each, " << (rep.all_ok() ? "all" : "NOT all") << " disjoint/genuine/measure-preserving, "
    << seconds_since(t0) << " s";
  return {ok, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<int, std::function<Outcome()>>> order{
      {6, presentation_search}, {1, sphere_oracle},       {2, known_counts},
      {3, rn_census},           {4, type_classification}, {5, phi_construction}};
  std::vector<Outcome> results(8);
  for (auto& [id, fn] : order) {
    try {
      results[static_cast<std::size_t>(id)] = fn();
    } catch (const std::exception& e) {
      results[static_cast<std::size_t>(id)] = {false, std::string("exception: ") + e.what()};
    }
    if (id == 6 && !q2_group) {
      for (int j : {1, 2, 3, 5}) results[static_cast<std::size_t>(j)] = {false, "no presentation to work with"};
      results[4] = type_classification();
      break;
    }
  }

  int suites_failed = 0;
  std::string failed_names;
  for (int i = 1; i < argc; ++i) {
    const std::string cmd = std::string("\"") + argv[i] + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      ++suites_failed;
      failed_names += std::string(" ") + argv[i];
    }
  }
  const bool finite = results[2].pass && results[3].pass && results[4].pass && results[5].pass;
  results[7].pass = finite && suites_failed == 0 && argc > 1;
  results[7].detail = "ergodicity, type III as an orbit-equivalence invariant, amenability and freeness are not "
                      "checked as stated; in their place: finite-depth witnesses, exact ratio-set arithmetic, "
                      "exact triangle and wall counts, and " +
                      std::to_string(argc - 1) + " property suites (" + std::to_string(suites_failed) + " failed" +
                      failed_names + ")";

  bool all = true;
  for (int id = 1; id <= 7; ++id) {
    const auto& r = results[static_cast<std::size_t>(id)];
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << r.detail << "\n";
  }
  return all ? 0 : 1;
}
