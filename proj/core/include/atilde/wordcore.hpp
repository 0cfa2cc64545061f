#pragma once

// Group elements of Gamma_T as normal-form words. A word u_1 ... u_l is
// normal when dims are non-decreasing and lambda(u_i) v u_{i+1} is all of Pi
// for each consecutive pair. Normal words double as vertices of the
// building; the identity (empty word) is the base vertex.

#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "atilde/counting.hpp"
#include "atilde/tripres.hpp"

namespace atilde::wordcore {

using pgeom::ElementId;
using tripres::TrianglePresentation;

/// A generator a_u, named by the dense index of u in Pi.
struct Letter {
  std::uint16_t gen = 0;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

class Group;

class NormalWord {
 public:
  NormalWord() = default;

  std::span<const Letter> letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter back() const { return letters_.back(); }

  friend bool operator==(const NormalWord&, const NormalWord&) = default;
  /// Shorter words first, then lexicographic.
  friend std::strong_ordering operator<=>(const NormalWord& a, const NormalWord& b) {
    if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
    return a.letters_ <=> b.letters_;
  }

 private:
  friend class Group;
  explicit NormalWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  std::vector<Letter> letters_;
};

struct NormalWordHash {
  std::size_t operator()(const NormalWord& w) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (Letter l : w.letters()) {
      h ^= l.gen;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// "g3,g11" <-> letters. The empty string and "e" denote the identity.
std::vector<Letter> parse_word(std::string_view text);
std::string format_word(std::span<const Letter> letters);
inline std::string format_word(const NormalWord& w) { return format_word(w.letters()); }

enum class PairKind : std::uint8_t { normal, cancel, contract, exchange };

/// How the two-letter word (u, v) rewrites.
struct PairRule {
  PairKind kind = PairKind::normal;
  Letter first;   // contract: the single letter; exchange: first of the pair
  Letter second;  // exchange: second of the pair
};

struct ExchangeEntry {
  Letter u, v;  // non-normal input pair
  Letter a, b;  // its normal form: a_u a_v = a_a a_b
};

/// Normal forms of every two-letter word that neither cancels, contracts,
/// nor is already normal. Built by testing, for each such (u, v) and each
/// normal candidate (a, b), whether lambda(a) u v lambda(b) collapses to the
/// identity under cancellation and contraction alone.
struct ExchangeTable {
  std::vector<ExchangeEntry> entries;
};

/// Throws ConsistencyError naming the offending pair when some pair has zero
/// or several candidates.
ExchangeTable build_two_letter_table(const TrianglePresentation& p);

/// Chamber at the identity: letters p_1 ... p_n with dim p_i = i forming a
/// complete flag.
struct Chamber {
  std::vector<Letter> vertices;
};

class Group {
 public:
  /// Validates the presentation (UsageError if an axiom fails) and builds
  /// the rewriting tables (ConsistencyError if normal forms are not unique).
  explicit Group(TrianglePresentation presentation);

  const TrianglePresentation& presentation() const { return presentation_; }
  const pgeom::Geometry& geometry() const { return presentation_.geometry(); }
  int n() const { return n_; }
  int q() const { return q_; }
  std::size_t generator_count() const { return gens_; }
  int dim(Letter l) const { return dims_[l.gen]; }
  Letter inverse(Letter l) const { return Letter{inv_[l.gen]}; }
  const PairRule& rule(Letter u, Letter v) const { return rules_[u.gen * gens_ + v.gen]; }
  const ExchangeTable& exchange_table() const { return exchange_; }
  /// Letters of dimension d, in index order.
  std::span<const Letter> letters_of_dim(int d) const { return by_dim_[static_cast<std::size_t>(d)]; }

  bool is_normal(std::span<const Letter> word) const;
  /// Wraps letters already in normal form; UsageError otherwise.
  NormalWord assume_normal(std::vector<Letter> letters) const;
  NormalWord identity() const { return NormalWord(); }
  NormalWord letter(Letter l) const { return NormalWord({l}); }

  /// Normal form of an arbitrary word.
  NormalWord reduce(std::span<const Letter> word) const;
  /// Same result, with rewrite positions picked at random (used to check
  /// that the outcome does not depend on the order of rule application).
  NormalWord reduce_random_order(std::span<const Letter> word, std::mt19937_64& rng) const;

  NormalWord multiply(const NormalWord& x, Letter g) const;
  NormalWord multiply(const NormalWord& x, const NormalWord& y) const;
  NormalWord left_multiply(Letter g, const NormalWord& x) const;
  NormalWord inverse(const NormalWord& x) const;

  /// k_j = number of letters of dimension j.
  SphereIndex shape(const NormalWord& x) const;
  /// shape(x^{-1} y): the sector coordinate of y seen from x.
  SphereIndex relative_shape(const NormalWord& x, const NormalWord& y) const;
  int vertex_type(const NormalWord& x) const;
  int distance(const NormalWord& x, const NormalWord& y) const;
  bool adjacent(const NormalWord& x, const NormalWord& y) const { return distance(x, y) == 1; }

  /// Every normal word of shape k, generated directly from the normal-form
  /// conditions (no multiplication involved), in lexicographic order.
  std::vector<NormalWord> enumerate_shape(const SphereIndex& k) const;

  /// Chambers {1, u_1, ..., u_n} for every complete flag of Pi.
  std::vector<Chamber> chambers_at_identity() const;
  /// The q vertices opposite the identity across the face {p_1, ..., p_n}.
  std::vector<NormalWord> opposite_vertices(const Chamber& c) const;

 private:
  void settle(std::vector<Letter>& w, std::vector<std::uint8_t>& dirty, std::mt19937_64* rng) const;

  TrianglePresentation presentation_;
  int n_ = 0;
  int q_ = 0;
  std::size_t gens_ = 0;
  std::vector<int> dims_;
  std::vector<std::uint16_t> inv_;
  std::vector<std::vector<Letter>> by_dim_;
  std::vector<PairRule> rules_;
  ExchangeTable exchange_;
};

/// Radius-R ball around the identity in the Cayley graph (= the building's
/// 1-skeleton). Vertex ids are ordered by length, then lexicographically, so
/// the layout does not depend on how the ball was built.
struct CayleyBall {
  int radius = 0;
  std::size_t generators = 0;
  std::vector<NormalWord> vertices;
  std::vector<std::size_t> layer_offsets;  // vertices of length d: [off[d], off[d+1])
  std::vector<std::int32_t> adjacency;     // vertices x generators, -1 outside the ball
  std::unordered_map<NormalWord, std::uint32_t, NormalWordHash> index;

  std::size_t size() const { return vertices.size(); }
  std::int32_t neighbor(std::uint32_t id, Letter g) const { return adjacency[id * generators + g.gen]; }
  std::optional<std::uint32_t> find(const NormalWord& w) const;
};

/// BFS from the identity. Throws BudgetError when more than max_vertices
/// would be stored; RangeError on negative radius.
CayleyBall build_ball(const Group& g, int radius, std::size_t max_vertices = 10'000'000,
                      unsigned threads = 1);

/// Vertices of the ball with shape k. RangeError if |k| exceeds the radius.
std::vector<NormalWord> sphere(const Group& g, const CayleyBall& ball, const SphereIndex& k);

/// Binary ball file (see docs/formats.md).
void save_ball(const CayleyBall& ball, const Group& g, const std::string& path);
CayleyBall load_ball(const Group& g, const std::string& path);

}  // namespace atilde::wordcore
