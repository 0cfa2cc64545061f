#pragma once

// Finite fields and the finite projective geometry whose elements label the
// generators of an A~_n group.
//
// Dimensions follow the vector-space convention: a point has dim 1, a line
// dim 2, a hyperplane dim n. The empty subspace and the whole space are not
// elements of the geometry; the latter shows up only as the result of join.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "atilde/counting.hpp"

namespace atilde::pgeom {

using ElementId = std::uint32_t;

class FiniteField {
 public:
  /// Primes up to 13, plus 4, 8 and 9 through fixed irreducible polynomials.
  static bool supported(int q);
  static std::vector<int> supported_orders();

  /// Throws ConfigError when q is not supported.
  explicit FiniteField(int q);

  int order() const { return q_; }
  int characteristic() const { return p_; }
  int degree() const { return degree_; }
  /// Monic modulus coefficients, constant term first (empty for prime fields).
  const std::vector<int>& modulus() const { return modulus_; }

  std::uint8_t add(std::uint8_t a, std::uint8_t b) const { return add_[idx(a, b)]; }
  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const { return mul_[idx(a, b)]; }
  std::uint8_t neg(std::uint8_t a) const { return neg_[a]; }
  std::uint8_t sub(std::uint8_t a, std::uint8_t b) const { return add(a, neg(b)); }
  /// Multiplicative inverse; UsageError on zero.
  std::uint8_t inv(std::uint8_t a) const;

 private:
  std::size_t idx(std::uint8_t a, std::uint8_t b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(q_) + b;
  }

  int q_ = 0;
  int p_ = 0;
  int degree_ = 1;
  std::vector<int> modulus_;
  std::vector<std::uint8_t> add_, mul_, neg_, inv_;
};

/// A subspace of F_q^{ambient} held in reduced row echelon form, so equal
/// subspaces have identical representations.
struct ProjSubspace {
  int dim = 0;
  int ambient = 0;
  std::vector<std::uint8_t> basis;  // dim rows of `ambient` entries

  std::span<const std::uint8_t> row(int i) const {
    return {basis.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(ambient),
            static_cast<std::size_t>(ambient)};
  }

  friend bool operator==(const ProjSubspace&, const ProjSubspace&) = default;
  friend std::strong_ordering operator<=>(const ProjSubspace& a, const ProjSubspace& b) {
    if (auto c = a.dim <=> b.dim; c != 0) return c;
    if (auto c = a.ambient <=> b.ambient; c != 0) return c;
    return a.basis <=> b.basis;
  }
};

/// Canonical span of `rows` (each of length `ambient`); may have dimension 0
/// or `ambient`.
ProjSubspace span_of(const FiniteField& field, int ambient,
                     std::span<const std::uint8_t> rows);

/// All subspaces of projective dimension d in PG(n, q), sorted.
std::vector<ProjSubspace> enumerate_subspaces(int n, int q, int d);

/// Number of r-dimensional subspaces of PG(n, q) containing a fixed
/// b-dimensional one (r >= b), or contained in it (r < b). b = 0 counts all
/// r-dimensional subspaces.
QInt count_incident(int n, int q, int b_dim, int r);

/// Explicit point/line incidence structure, used for planes that need not
/// come from a vector space.
struct AbstractPlane {
  int points = 0;
  int lines = 0;
  std::vector<std::vector<std::uint8_t>> incidence;  // [point][line]
};

struct PlaneReport {
  bool ok = false;
  int order = 0;  // q, when ok
  std::vector<std::string> problems;
};

PlaneReport validate_plane(const AbstractPlane& plane);

/// Point-line incidence table of PG(2, q).
AbstractPlane desarguesian_plane(int q);

/// The geometry Pi: a dense index over all proper non-trivial elements,
/// sorted by dimension and then by canonical basis.
class Geometry {
 public:
  enum class Kind { vector, incidence };

  /// PG(n, q) built from F_q^{n+1}.
  static std::shared_ptr<const Geometry> vector_space(int n, int q);
  /// A projective plane given by its incidence table (n = 2). Throws
  /// UsageError if the table is not a projective plane.
  static std::shared_ptr<const Geometry> from_plane(const AbstractPlane& plane);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int q() const { return q_; }
  std::size_t size() const { return dims_.size(); }
  int dim(ElementId u) const { return dims_[u]; }
  std::span<const ElementId> elements_of_dim(int d) const;

  /// u is a subspace of v (reflexive).
  bool contains(ElementId u, ElementId v) const { return subset_[u * size() + v] != 0; }
  /// One of u, v contains the other.
  bool incident(ElementId u, ElementId v) const { return contains(u, v) || contains(v, u); }
  /// Least upper bound; nullopt denotes the whole geometry.
  std::optional<ElementId> join(ElementId u, ElementId v) const;
  bool join_is_whole(ElementId u, ElementId v) const { return join_[u * size() + v] == kWholeSlot; }

  /// Vector-kind only.
  const ProjSubspace& subspace(ElementId u) const;
  std::optional<ElementId> find(const ProjSubspace& s) const;
  const FiniteField& field() const;
  /// Incidence-kind only.
  const AbstractPlane& plane() const;

  /// All complete flags u_1 < u_2 < ... < u_n, lexicographic in ids.
  std::vector<std::vector<ElementId>> complete_flags() const;

  /// Same kind, parameters and incidence relation.
  bool same_as(const Geometry& other) const;

 private:
  static constexpr ElementId kWholeSlot = 0xFFFFFFFFu;
  Geometry() = default;
  void build_tables();

  Kind kind_ = Kind::vector;
  int n_ = 0;
  int q_ = 0;
  std::vector<int> dims_;
  std::vector<std::vector<ElementId>> by_dim_;
  std::vector<std::uint8_t> subset_;
  std::vector<ElementId> join_;
  std::unique_ptr<FiniteField> field_;
  std::vector<ProjSubspace> subspaces_;
  std::unordered_map<std::string, ElementId> lookup_;
  AbstractPlane plane_;
};

/// An involution of Pi that reverses dimension: dim(l(u)) = n+1-dim(u).
struct Duality {
  std::vector<ElementId> map;
  ElementId operator()(ElementId u) const { return map[u]; }
  friend bool operator==(const Duality&, const Duality&) = default;
};

struct DualityReport {
  bool total = false;
  bool involutive = false;
  bool dimension_rule = false;
  /// Also incidence-reversing (a polarity). Not required of a duality.
  bool correlation = false;
  std::vector<std::string> violations;
  bool valid() const { return total && involutive && dimension_rule; }
};

DualityReport validate_duality(const Geometry& geometry, const Duality& lambda);

/// U -> U^perp for the standard dot product (vector kind only).
Duality annihilator_duality(const Geometry& geometry);

/// For PG(2, q) or an abstract plane: point i <-> line i in index order.
Duality index_pairing_duality(const Geometry& geometry);

/// For planes: the i-th point <-> the line_of_point[i]-th line. Every such
/// permutation gives a duality; not every one admits a presentation.
Duality pairing_duality(const Geometry& geometry, std::span<const std::size_t> line_of_point);

}  // namespace atilde::pgeom
