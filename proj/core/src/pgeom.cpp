#include "atilde/pgeom.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "atilde/errors.hpp"

namespace atilde::pgeom {

namespace {

struct FieldDef {
  int q;
  int p;
  std::vector<int> modulus;  // monic, constant term first
};

const std::vector<FieldDef>& field_table() {
  static const std::vector<FieldDef> table = {
      {2, 2, {}},  {3, 3, {}},           {4, 2, {1, 1, 1}}, {5, 5, {}},
      {7, 7, {}},  {8, 2, {1, 1, 0, 1}}, {9, 3, {1, 0, 1}}, {11, 11, {}},
      {13, 13, {}},
  };
  return table;
}

constexpr std::size_t kMaxElements = 2048;

std::string basis_key(const ProjSubspace& s) {
  return std::string(s.basis.begin(), s.basis.end());
}

}  // namespace

bool FiniteField::supported(int q) {
  const auto& t = field_table();
  return std::any_of(t.begin(), t.end(), [q](const FieldDef& d) { return d.q == q; });
}

std::vector<int> FiniteField::supported_orders() {
  std::vector<int> out;
  for (const auto& d : field_table()) out.push_back(d.q);
  return out;
}

FiniteField::FiniteField(int q) {
  const auto& t = field_table();
  auto it = std::find_if(t.begin(), t.end(), [q](const FieldDef& d) { return d.q == q; });
  if (it == t.end()) throw ConfigError("unsupported field order q = " + std::to_string(q));
  q_ = q;
  p_ = it->p;
  modulus_ = it->modulus;
  degree_ = modulus_.empty() ? 1 : static_cast<int>(modulus_.size()) - 1;

  auto digits = [&](int a) {
    std::vector<int> d(static_cast<std::size_t>(degree_), 0);
    for (int i = 0; i < degree_; ++i) {
      d[static_cast<std::size_t>(i)] = a % p_;
      a /= p_;
    }
    return d;
  };
  auto encode = [&](const std::vector<int>& d) {
    int a = 0;
    for (int i = degree_ - 1; i >= 0; --i) a = a * p_ + d[static_cast<std::size_t>(i)];
    return a;
  };

  const auto qq = static_cast<std::size_t>(q_);
  add_.assign(qq * qq, 0);
  mul_.assign(qq * qq, 0);
  neg_.assign(qq, 0);
  inv_.assign(qq, 0);
  for (int a = 0; a < q_; ++a) {
    const auto da = digits(a);
    std::vector<int> dn(da.size());
    for (std::size_t i = 0; i < da.size(); ++i) dn[i] = (p_ - da[i]) % p_;
    neg_[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(encode(dn));
    for (int b = 0; b < q_; ++b) {
      const auto db = digits(b);
      std::vector<int> ds(da.size());
      for (std::size_t i = 0; i < da.size(); ++i) ds[i] = (da[i] + db[i]) % p_;
      add_[idx(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b))] =
          static_cast<std::uint8_t>(encode(ds));

      // Schoolbook product, then reduce by the monic modulus.
      std::vector<int> prod(static_cast<std::size_t>(2 * degree_ - 1), 0);
      for (int i = 0; i < degree_; ++i)
        for (int j = 0; j < degree_; ++j)
          prod[static_cast<std::size_t>(i + j)] =
              (prod[static_cast<std::size_t>(i + j)] +
               da[static_cast<std::size_t>(i)] * db[static_cast<std::size_t>(j)]) % p_;
      for (int top = 2 * degree_ - 2; top >= degree_; --top) {
        const int c = prod[static_cast<std::size_t>(top)];
        if (c == 0) continue;
        for (int i = 0; i <= degree_; ++i) {
          auto& slot = prod[static_cast<std::size_t>(top - degree_ + i)];
          slot = ((slot - c * modulus_[static_cast<std::size_t>(i)]) % p_ + p_) % p_;
        }
      }
      prod.resize(static_cast<std::size_t>(degree_));
      mul_[idx(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b))] =
          static_cast<std::uint8_t>(encode(prod));
    }
  }
  for (int a = 1; a < q_; ++a)
    for (int b = 1; b < q_; ++b)
      if (mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) == 1)
        inv_[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(b);
}

std::uint8_t FiniteField::inv(std::uint8_t a) const {
  if (a == 0) throw UsageError("FiniteField::inv: zero has no inverse");
  return inv_[a];
}

ProjSubspace span_of(const FiniteField& field, int ambient, std::span<const std::uint8_t> rows) {
  const auto cols = static_cast<std::size_t>(ambient);
  std::vector<std::uint8_t> m(rows.begin(), rows.end());
  const std::size_t nrows = cols == 0 ? 0 : m.size() / cols;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < nrows; ++c) {
    std::size_t pivot = rank;
    while (pivot < nrows && m[pivot * cols + c] == 0) ++pivot;
    if (pivot == nrows) continue;
    if (pivot != rank)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m[pivot * cols + j], m[rank * cols + j]);
    const std::uint8_t s = field.inv(m[rank * cols + c]);
    for (std::size_t j = 0; j < cols; ++j) m[rank * cols + j] = field.mul(m[rank * cols + j], s);
    for (std::size_t r = 0; r < nrows; ++r) {
      if (r == rank || m[r * cols + c] == 0) continue;
      const std::uint8_t f = m[r * cols + c];
      for (std::size_t j = 0; j < cols; ++j)
        m[r * cols + j] = field.sub(m[r * cols + j], field.mul(f, m[rank * cols + j]));
    }
    ++rank;
  }
  m.resize(rank * cols);
  return ProjSubspace{static_cast<int>(rank), ambient, std::move(m)};
}

std::vector<ProjSubspace> enumerate_subspaces(int n, int q, int d) {
  if (n < 1) throw UsageError("enumerate_subspaces: n must be >= 1");
  if (d < 1 || d > n) throw UsageError("enumerate_subspaces: dimension out of range 1..n");
  const FiniteField field(q);
  const int cols = n + 1;
  std::vector<ProjSubspace> out;

  std::vector<int> pivots(static_cast<std::size_t>(d));
  std::function<void(int, int)> choose = [&](int i, int start) {
    if (i == d) {
      // Free entries: row r, column c > pivots[r], c not a pivot column.
      std::vector<std::pair<int, int>> free;
      for (int r = 0; r < d; ++r)
        for (int c = pivots[static_cast<std::size_t>(r)] + 1; c < cols; ++c)
          if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.emplace_back(r, c);
      std::vector<int> values(free.size(), 0);
      while (true) {
        ProjSubspace s{d, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(d * cols), 0)};
        for (int r = 0; r < d; ++r)
          s.basis[static_cast<std::size_t>(r * cols + pivots[static_cast<std::size_t>(r)])] = 1;
        for (std::size_t f = 0; f < free.size(); ++f)
          s.basis[static_cast<std::size_t>(free[f].first * cols + free[f].second)] =
              static_cast<std::uint8_t>(values[f]);
        out.push_back(std::move(s));
        std::size_t pos = 0;
        while (pos < values.size() && ++values[pos] == q) values[pos++] = 0;
        if (pos == values.size()) break;
      }
      return;
    }
    for (int c = start; c <= cols - (d - i); ++c) {
      pivots[static_cast<std::size_t>(i)] = c;
      choose(i + 1, c + 1);
    }
  };
  choose(0, 0);
  (void)field;
  std::sort(out.begin(), out.end());
  return out;
}

QInt count_incident(int n, int q, int b_dim, int r) {
  if (b_dim < 0 || b_dim > n + 1 || r < 0 || r > n + 1)
    throw UsageError("count_incident: dimension out of range");
  if (r >= b_dim) return counting::gaussian_binomial(n + 1 - b_dim, r - b_dim, q);
  return counting::gaussian_binomial(b_dim, r, q);
}

PlaneReport validate_plane(const AbstractPlane& plane) {
  PlaneReport rep;
  if (plane.points < 4 || plane.points != plane.lines) {
    rep.problems.push_back("point and line counts must agree and be at least 4");
    return rep;
  }
  if (static_cast<int>(plane.incidence.size()) != plane.points) {
    rep.problems.push_back("incidence matrix has wrong number of rows");
    return rep;
  }
  for (const auto& row : plane.incidence)
    if (static_cast<int>(row.size()) != plane.lines) {
      rep.problems.push_back("incidence matrix has a row of wrong length");
      return rep;
    }
  const int np = plane.points;
  int q = -1;
  for (int l = 0; l < plane.lines; ++l) {
    int c = 0;
    for (int p = 0; p < np; ++p) c += plane.incidence[static_cast<std::size_t>(p)][static_cast<std::size_t>(l)] ? 1 : 0;
    if (q < 0) q = c - 1;
    if (c - 1 != q) rep.problems.push_back("line " + std::to_string(l) + " has " + std::to_string(c) + " points");
  }
  if (q < 2 || q * q + q + 1 != np) rep.problems.push_back("point count is not q^2+q+1 for the line size");
  for (int a = 0; a < np; ++a)
    for (int b = a + 1; b < np; ++b) {
      int common = 0;
      for (int l = 0; l < plane.lines; ++l)
        if (plane.incidence[static_cast<std::size_t>(a)][static_cast<std::size_t>(l)] &&
            plane.incidence[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)])
          ++common;
      if (common != 1)
        rep.problems.push_back("points " + std::to_string(a) + "," + std::to_string(b) + " lie on " +
                               std::to_string(common) + " common lines");
    }
  for (int a = 0; a < plane.lines; ++a)
    for (int b = a + 1; b < plane.lines; ++b) {
      int common = 0;
      for (int p = 0; p < np; ++p)
        if (plane.incidence[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)] &&
            plane.incidence[static_cast<std::size_t>(p)][static_cast<std::size_t>(b)])
          ++common;
      if (common != 1)
        rep.problems.push_back("lines " + std::to_string(a) + "," + std::to_string(b) + " meet in " +
                               std::to_string(common) + " points");
    }
  rep.ok = rep.problems.empty();
  if (rep.ok) rep.order = q;
  return rep;
}

AbstractPlane desarguesian_plane(int q) {
  auto g = Geometry::vector_space(2, q);
  const auto pts = g->elements_of_dim(1);
  const auto lns = g->elements_of_dim(2);
  AbstractPlane plane;
  plane.points = static_cast<int>(pts.size());
  plane.lines = static_cast<int>(lns.size());
  plane.incidence.assign(pts.size(), std::vector<std::uint8_t>(lns.size(), 0));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < lns.size(); ++j) plane.incidence[i][j] = g->contains(pts[i], lns[j]) ? 1 : 0;
  return plane;
}

std::shared_ptr<const Geometry> Geometry::vector_space(int n, int q) {
  if (n < 1) throw ConfigError("geometry rank n must be >= 1");
  std::shared_ptr<Geometry> g(new Geometry());
  g->kind_ = Kind::vector;
  g->n_ = n;
  g->q_ = q;
  g->field_ = std::make_unique<FiniteField>(q);
  for (int d = 1; d <= n; ++d) {
    auto subs = enumerate_subspaces(n, q, d);
    if (g->subspaces_.size() + subs.size() > kMaxElements)
      throw ConfigError("PG(" + std::to_string(n) + "," + std::to_string(q) + ") exceeds " +
                        std::to_string(kMaxElements) + " elements");
    for (auto& s : subs) g->subspaces_.push_back(std::move(s));
  }
  g->dims_.reserve(g->subspaces_.size());
  for (std::size_t i = 0; i < g->subspaces_.size(); ++i) {
    g->dims_.push_back(g->subspaces_[i].dim);
    g->lookup_.emplace(basis_key(g->subspaces_[i]), static_cast<ElementId>(i));
  }
  g->build_tables();
  return g;
}

std::shared_ptr<const Geometry> Geometry::from_plane(const AbstractPlane& plane) {
  const auto rep = validate_plane(plane);
  if (!rep.ok) throw UsageError("incidence table is not a projective plane: " + rep.problems.front());
  std::shared_ptr<Geometry> g(new Geometry());
  g->kind_ = Kind::incidence;
  g->n_ = 2;
  g->q_ = rep.order;
  g->plane_ = plane;
  g->dims_.assign(static_cast<std::size_t>(plane.points), 1);
  g->dims_.resize(static_cast<std::size_t>(plane.points + plane.lines), 2);
  g->build_tables();
  return g;
}

void Geometry::build_tables() {
  const std::size_t sz = dims_.size();
  by_dim_.assign(static_cast<std::size_t>(n_) + 1, {});
  for (std::size_t i = 0; i < sz; ++i) by_dim_[static_cast<std::size_t>(dims_[i])].push_back(static_cast<ElementId>(i));
  subset_.assign(sz * sz, 0);
  join_.assign(sz * sz, kWholeSlot);

  if (kind_ == Kind::vector) {
    for (std::size_t a = 0; a < sz; ++a) {
      for (std::size_t b = a; b < sz; ++b) {
        std::vector<std::uint8_t> rows = subspaces_[a].basis;
        rows.insert(rows.end(), subspaces_[b].basis.begin(), subspaces_[b].basis.end());
        const ProjSubspace s = span_of(*field_, n_ + 1, rows);
        ElementId j = kWholeSlot;
        if (s.dim <= n_) j = lookup_.at(basis_key(s));
        join_[a * sz + b] = join_[b * sz + a] = j;
        if (s.dim == subspaces_[b].dim) subset_[a * sz + b] = 1;
        if (s.dim == subspaces_[a].dim) subset_[b * sz + a] = 1;
      }
    }
    return;
  }

  const auto np = static_cast<std::size_t>(plane_.points);
  auto on = [&](std::size_t p, std::size_t l) { return plane_.incidence[p][l] != 0; };
  for (std::size_t i = 0; i < sz; ++i) {
    subset_[i * sz + i] = 1;
    join_[i * sz + i] = static_cast<ElementId>(i);
  }
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t l = 0; l < np; ++l)
      if (on(p, l)) subset_[p * sz + (np + l)] = 1;
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = 0; b < np; ++b) {
      if (a == b) continue;
      for (std::size_t l = 0; l < np; ++l)
        if (on(a, l) && on(b, l)) join_[a * sz + b] = static_cast<ElementId>(np + l);
    }
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t l = 0; l < np; ++l)
      if (on(p, l)) join_[p * sz + np + l] = join_[(np + l) * sz + p] = static_cast<ElementId>(np + l);
}

std::span<const ElementId> Geometry::elements_of_dim(int d) const {
  if (d < 1 || d > n_) return {};
  return by_dim_[static_cast<std::size_t>(d)];
}

std::optional<ElementId> Geometry::join(ElementId u, ElementId v) const {
  const ElementId j = join_[u * size() + v];
  if (j == kWholeSlot) return std::nullopt;
  return j;
}

const ProjSubspace& Geometry::subspace(ElementId u) const {
  if (kind_ != Kind::vector) throw UsageError("subspace(): geometry is not a vector-space geometry");
  return subspaces_.at(u);
}

std::optional<ElementId> Geometry::find(const ProjSubspace& s) const {
  if (kind_ != Kind::vector || s.ambient != n_ + 1) return std::nullopt;
  auto it = lookup_.find(basis_key(s));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

const FiniteField& Geometry::field() const {
  if (kind_ != Kind::vector) throw UsageError("field(): geometry is not a vector-space geometry");
  return *field_;
}

const AbstractPlane& Geometry::plane() const {
  if (kind_ != Kind::incidence) throw UsageError("plane(): geometry is not an incidence geometry");
  return plane_;
}

std::vector<std::vector<ElementId>> Geometry::complete_flags() const {
  std::vector<std::vector<ElementId>> out;
  std::vector<ElementId> cur;
  std::function<void(int)> extend = [&](int d) {
    if (d > n_) {
      out.push_back(cur);
      return;
    }
    for (ElementId e : elements_of_dim(d)) {
      if (!cur.empty() && !contains(cur.back(), e)) continue;
      cur.push_back(e);
      extend(d + 1);
      cur.pop_back();
    }
  };
  extend(1);
  return out;
}

bool Geometry::same_as(const Geometry& other) const {
  return kind_ == other.kind_ && n_ == other.n_ && q_ == other.q_ && dims_ == other.dims_ &&
         subset_ == other.subset_;
}

DualityReport validate_duality(const Geometry& geometry, const Duality& lambda) {
  DualityReport rep;
  const std::size_t sz = geometry.size();
  rep.total = lambda.map.size() == sz &&
              std::all_of(lambda.map.begin(), lambda.map.end(), [sz](ElementId e) { return e < sz; });
  if (!rep.total) {
    rep.violations.push_back("map is not a total function on the " + std::to_string(sz) + " elements");
    return rep;
  }
  rep.involutive = true;
  rep.dimension_rule = true;
  const int n = geometry.n();
  for (ElementId u = 0; u < sz; ++u) {
    if (lambda(lambda(u)) != u) {
      rep.involutive = false;
      rep.violations.push_back("lambda(lambda(" + std::to_string(u) + ")) = " +
                               std::to_string(lambda(lambda(u))));
    }
    if (geometry.dim(lambda(u)) != n + 1 - geometry.dim(u)) {
      rep.dimension_rule = false;
      rep.violations.push_back("dim(lambda(" + std::to_string(u) + ")) = " +
                               std::to_string(geometry.dim(lambda(u))) + ", expected " +
                               std::to_string(n + 1 - geometry.dim(u)));
    }
  }
  rep.correlation = rep.involutive && rep.dimension_rule;
  for (ElementId u = 0; u < sz && rep.correlation; ++u)
    for (ElementId v = 0; v < sz; ++v)
      if (geometry.contains(u, v) != geometry.contains(lambda(v), lambda(u))) {
        rep.correlation = false;
        break;
      }
  return rep;
}

Duality annihilator_duality(const Geometry& geometry) {
  if (geometry.kind() != Geometry::Kind::vector)
    throw UsageError("annihilator duality needs a vector-space geometry");
  const auto& field = geometry.field();
  const int cols = geometry.n() + 1;
  Duality lambda;
  lambda.map.resize(geometry.size());
  for (ElementId u = 0; u < geometry.size(); ++u) {
    const auto& s = geometry.subspace(u);
    // Orthogonal complement: null space of the basis matrix, read off the RREF.
    std::vector<int> pivot_cols;
    for (int r = 0; r < s.dim; ++r) {
      const auto row = s.row(r);
      int c = 0;
      while (row[static_cast<std::size_t>(c)] == 0) ++c;
      pivot_cols.push_back(c);
    }
    std::vector<std::uint8_t> rows;
    for (int f = 0; f < cols; ++f) {
      if (std::find(pivot_cols.begin(), pivot_cols.end(), f) != pivot_cols.end()) continue;
      std::vector<std::uint8_t> v(static_cast<std::size_t>(cols), 0);
      v[static_cast<std::size_t>(f)] = 1;
      for (int r = 0; r < s.dim; ++r)
        v[static_cast<std::size_t>(pivot_cols[static_cast<std::size_t>(r)])] =
            field.neg(s.row(r)[static_cast<std::size_t>(f)]);
      rows.insert(rows.end(), v.begin(), v.end());
    }
    const auto perp = span_of(field, cols, rows);
    lambda.map[u] = *geometry.find(perp);
  }
  return lambda;
}

Duality index_pairing_duality(const Geometry& geometry) {
  std::vector<std::size_t> identity(geometry.elements_of_dim(1).size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return pairing_duality(geometry, identity);
}

Duality pairing_duality(const Geometry& geometry, std::span<const std::size_t> line_of_point) {
  if (geometry.n() != 2) throw UsageError("pairing dualities are defined for planes only");
  const auto pts = geometry.elements_of_dim(1);
  const auto lns = geometry.elements_of_dim(2);
  if (line_of_point.size() != pts.size()) throw UsageError("pairing must assign a line to every point");
  std::vector<std::uint8_t> used(lns.size(), 0);
  Duality lambda;
  lambda.map.resize(geometry.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t l = line_of_point[i];
    if (l >= lns.size() || used[l]) throw UsageError("pairing is not a permutation of the lines");
    used[l] = 1;
    lambda.map[pts[i]] = lns[l];
    lambda.map[lns[l]] = pts[i];
  }
  return lambda;
}

}  // namespace atilde::pgeom
