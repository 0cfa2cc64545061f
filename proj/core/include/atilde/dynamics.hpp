#pragma once

// Ratio-set arithmetic, the Radon-Nikodym census of the generators, the
// piecewise maps that carry one cylinder onto another through elements of
// the group, and the apex-1 triangle census. Every statement here is a
// finite-depth check; nothing claims an almost-everywhere result.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "atilde/boundary.hpp"
#include "atilde/counting.hpp"
#include "atilde/wordcore.hpp"

namespace atilde::dynamics {

using boundary::CylinderSet;
using wordcore::CayleyBall;
using wordcore::Group;
using wordcore::NormalWord;

struct RatioSetDescriptor {
  int n = 0;
  int q = 0;
  std::vector<std::int64_t> exponents;  // i(n+1-i), i = 1..n
  std::int64_t gcd = 0;
  Rational lambda;                      // q^{-gcd}
  /// The ratio set is {q^(gcd*m) : m in Z} together with 0.
  std::string ratio_set() const;
};

/// UsageError unless n >= 1 and q >= 2.
RatioSetDescriptor ratio_descriptor(int n, int q);

/// Some child of Omega_1^t after refining by delta: a vertex deeper than t
/// in the same sector.
NormalWord deepen(const Group& g, const NormalWord& t, const SphereIndex& delta);

struct GeneratorRn {
  wordcore::Letter generator;
  int type = 0;                 // dim of the generator
  NormalWord cylinder;          // z with the generator on [1, z)
  std::int64_t exponent = 0;    // attained: value = q^exponent
  std::int64_t expected = 0;    // i(n+1-i)
  bool matches() const { return exponent == expected; }
};

struct RnCensus {
  int n = 0;
  int q = 0;
  std::vector<GeneratorRn> generators;
  /// Exponents attained by dnu_h/dnu_1 for h in the radius-2 ball over the
  /// cylinders Omega_1^z, z in S_{(2,...,2)}.
  std::set<std::int64_t> attained;
  std::size_t pairs_checked = 0;
};

/// Each generator s against the cylinder Omega_1^z with z = deepen(s, depth
/// in every coordinate); then the ball-wide exponent scan.
RnCensus generator_rn_census(const Group& g, const CayleyBall& ball, int depth);

struct Piece {
  CylinderSet source;  // Omega_1^{x3}
  NormalWord mover;    // y2 x2^{-1}
  CylinderSet target;  // Omega_1^{y3}
  int level = 0;
};

struct PiecewiseMap {
  NormalWord x, y;
  int levels = 0;
  std::size_t root_children = 0;
  std::uint64_t K = 0;               // children per node, counted at every refined node
  std::vector<Piece> pieces;         // empty when pieces were not kept
  std::size_t piece_count = 0;
  Rational covered;                  // sum of source measures / nu(Omega_1^x)
  Rational target_covered;           // sum of target measures / nu(Omega_1^y)
  Rational expected;                 // 1 - (1 - 1/K)^levels
  bool sources_disjoint = true;
  bool targets_disjoint = true;
  bool movers_ok = true;             // mover * x2 = y2 and mover * x3 = y3
  bool measure_preserving = true;    // per piece, source and target shapes agree
  bool identity_movers = true;       // every mover is the empty word
  std::vector<std::string> findings; // first few violations, if any
  bool ok(bool same_shape) const {
    return sources_disjoint && targets_disjoint && movers_ok && covered == expected &&
           target_covered == expected && (!same_shape || measure_preserving) && findings.empty();
  }
};

/// Builds the map piece by piece for `levels` refinement rounds. The root
/// refinement of Omega_1^x and Omega_1^y (by e_1 + e_n) must produce the
/// same number of children. Ambiguous choices are resolved in index order;
/// if some admissible set turns out empty the failure is recorded in
/// `findings` instead of being thrown.
PiecewiseMap phi_construct(const Group& g, const NormalWord& x, const NormalWord& y, int levels,
                           bool keep_pieces = false);

struct WitnessSummary {
  NormalWord x, y;
  std::size_t pieces = 0;
  std::uint64_t K = 0;
  Rational covered;
  bool ok = false;
  bool identity_movers = false;
  std::vector<std::string> findings;
};

struct WitnessReport {
  SphereIndex k;
  int levels = 0;
  std::uint64_t K = 0;
  Rational expected;
  std::vector<WitnessSummary> witnesses;  // ordered pairs (x, y) of S_k in lexicographic order
  bool all_ok() const;
};

/// phi_construct for every ordered pair x != y of S_k (or the single pair
/// (1,1) when k = 0). Pairs are spread over `threads` workers; the report
/// does not depend on the thread count.
WitnessReport transitivity_witnesses(const Group& g, const SphereIndex& k, int levels, unsigned threads = 1);

struct CertificateSection {
  std::string name;
  bool pass = false;
  std::string detail;
  bool finite_evidence = false;  // true for the sections that are not proofs
};

struct Certificate {
  RatioSetDescriptor descriptor;
  bool descriptor_only = false;
  std::vector<CertificateSection> sections;
  bool passed() const;
};

/// Checks the census against the generator values and the descriptor's gcd,
/// and records the witness catalog as finite-depth evidence.
Certificate classify(const RnCensus& census, const WitnessReport& witnesses);
/// Arithmetic only, for ranks without a presentation at hand.
Certificate classify_descriptor(int n, int q);

/// Apex-1 triangles of side m in an A~_2 building, enumerated row by row:
/// the vertices s_(a,b) with a + b = r are chosen after those with
/// a + b = r - 1, each new vertex one e_1 step or e_2 step further out and
/// adjacent to its neighbor in the row. Needs a ball of radius at least m.
QInt triangle_census(const Group& g, const CayleyBall& ball, int m);

}  // namespace atilde::dynamics
