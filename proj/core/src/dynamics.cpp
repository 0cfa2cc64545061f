#include "atilde/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "atilde/errors.hpp"

namespace atilde::dynamics {

using wordcore::format_word;
using wordcore::Letter;
using wordcore::NormalWordHash;
using wordcore::PairKind;

namespace {

SphereIndex unit(int n, int i) {
  SphereIndex e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i - 1)] = 1;
  return e;
}

SphereIndex plus(SphereIndex a, const SphereIndex& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

std::string shape_str(const SphereIndex& k) {
  std::string s = "(";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + ")";
}

CylinderSet at_identity(const Group& g, const NormalWord& t) { return {g.identity(), t, g.shape(t)}; }

// One round of the construction for the node (Omega_1^{x1}, Omega_1^{y1}).
struct Step {
  NormalWord x2, y2, x3, y3;
};

std::optional<Step> e8_step(const Group& g, const NormalWord& x1, const NormalWord& y1, std::string& why) {
  const int n = g.n();
  const auto& geo = g.geometry();
  const SphereIndex en = unit(n, n);
  SphereIndex delta = unit(n, 1);
  delta[static_cast<std::size_t>(n - 1)] += 1;

  // x2 in S_{e_n}(x1), one step further out.
  const SphereIndex kx2 = plus(g.shape(x1), en);
  std::optional<Letter> a;
  NormalWord x2;
  for (Letter l : g.letters_of_dim(n)) {
    x2 = g.multiply(x1, l);
    if (g.shape(x2) == kx2) {
      a = l;
      break;
    }
  }
  if (!a) {
    why = "no x2 extends " + format_word(x1) + " by e_n";
    return std::nullopt;
  }

  // v_n with x2 v_n in S_{2e_n}(x1).
  const SphereIndex kxv = plus(kx2, en);
  std::optional<Letter> v;
  NormalWord xv;
  for (Letter l : g.letters_of_dim(n)) {
    if (g.rule(*a, l).kind != PairKind::normal) continue;
    xv = g.multiply(x2, l);
    if (g.shape(xv) == kxv) {
      v = l;
      break;
    }
  }
  if (!v) {
    why = "no v_n continues " + format_word(x2);
    return std::nullopt;
  }

  // z with lambda(u_l) v z = Pi and lambda(z) v v_n = Pi; a is tried first
  // so that equal nodes get the identity as mover.
  if (y1.empty()) {
    why = "y1 is the identity";
    return std::nullopt;
  }
  const Letter ul = y1.back();
  auto admissible = [&](Letter z) {
    return g.rule(ul, z).kind == PairKind::normal && g.rule(z, *v).kind == PairKind::normal;
  };
  std::optional<Letter> z;
  if (admissible(*a)) z = *a;
  for (Letter l : g.letters_of_dim(n)) {
    if (z) break;
    if (admissible(l)) z = l;
  }
  if (!z) {
    why = "no z satisfies both join conditions after " + format_word(y1);
    return std::nullopt;
  }
  NormalWord y2 = g.multiply(y1, *z);
  NormalWord yv = g.multiply(y2, *v);
  if (yv.size() != y1.size() + 2) {
    why = "y1 z v_n is not normal";
    return std::nullopt;
  }

  // Flag lambda(v_n) < p_2 < ... < p_n keeping |x2 v_n p_i| and |y2 v_n p_i|.
  std::vector<Letter> flag;
  auto extend = [&](auto&& self, pgeom::ElementId prev, int dim) -> bool {
    if (dim > n) return true;
    for (Letter p : g.letters_of_dim(dim)) {
      if (!geo.contains(prev, p.gen)) continue;
      if (g.multiply(xv, p).size() != xv.size() || g.multiply(yv, p).size() != yv.size()) continue;
      flag.push_back(p);
      if (self(self, p.gen, dim + 1)) return true;
      flag.pop_back();
    }
    return false;
  };
  if (!extend(extend, g.inverse(*v).gen, 2)) {
    why = "no flag through lambda(v_n) preserves both lengths";
    return std::nullopt;
  }

  // Chamber {1, v_n p_2, ..., v_n p_n, v_n}, listed by dimension.
  wordcore::Chamber chamber;
  for (Letter p : flag) {
    const auto& r = g.rule(*v, p);
    if (r.kind != PairKind::contract) {
      why = "v_n p_i is not a single letter";
      return std::nullopt;
    }
    chamber.vertices.push_back(r.first);
  }
  chamber.vertices.push_back(*v);

  const SphereIndex kx3 = plus(kx2, delta), ky3 = plus(g.shape(y2), delta);
  for (const NormalWord& w : g.opposite_vertices(chamber)) {
    NormalWord x3 = g.multiply(x2, w);
    NormalWord y3 = g.multiply(y2, w);
    if (g.shape(x3) == kx3 && g.shape(y3) == ky3) return Step{std::move(x2), std::move(y2), std::move(x3), std::move(y3)};
  }
  why = "no opposite vertex w extends both x2 and y2 by e_1 + e_n";
  return std::nullopt;
}

class PhiBuilder {
 public:
  PhiBuilder(const Group& g, PiecewiseMap& out, bool keep) : g_(g), out_(out), keep_(keep) {
    const int n = g.n();
    delta_ = unit(n, 1);
    delta_[static_cast<std::size_t>(n - 1)] += 1;
    step_ = plus(delta_, unit(n, n));
    sources_.resize(static_cast<std::size_t>(out.levels) + 1);
    targets_.resize(static_cast<std::size_t>(out.levels) + 1);
  }

  void run() {
    const CylinderSet rx = at_identity(g_, out_.x), ry = at_identity(g_, out_.y);
    auto xs = boundary::refine_cylinder(g_, rx, delta_);
    auto ys = boundary::refine_cylinder(g_, ry, delta_);
    if (xs.size() != ys.size())
      throw UsageError("refining by e_1 + e_n gives " + std::to_string(xs.size()) + " cylinders under " +
                       format_word(out_.x) + " but " + std::to_string(ys.size()) + " under " + format_word(out_.y));
    out_.root_children = xs.size();
    mx_ = boundary::cylinder_measure(g_, rx);
    my_ = boundary::cylinder_measure(g_, ry);
    for (std::size_t i = 0; i < xs.size(); ++i) node(xs[i], ys[i], 1);
    out_.covered = sx_ / mx_;
    out_.target_covered = sy_ / my_;
    if (out_.K == 0) out_.K = boundary::refine_cylinder(g_, xs.front(), step_).size();
    const Rational miss = 1 - Rational(QInt(1), QInt(out_.K));
    Rational rest = 1;
    for (int i = 0; i < out_.levels; ++i) rest *= miss;
    out_.expected = 1 - rest;
  }

 private:
  void finding(std::string s) {
    if (out_.findings.size() < 8) out_.findings.push_back(std::move(s));
  }

  void node(const CylinderSet& nx, const CylinderSet& ny, int level) {
    std::string why;
    auto step = e8_step(g_, nx.target, ny.target, why);
    if (!step) {
      finding("level " + std::to_string(level) + " at (" + format_word(nx.target) + ", " + format_word(ny.target) +
              "): " + why);
      return;
    }
    CylinderSet src = at_identity(g_, step->x3), dst = at_identity(g_, step->y3);
    if (!boundary::cylinder_contains(g_, nx, src)) {
      out_.sources_disjoint = false;
      finding("piece " + format_word(src.target) + " escapes its node " + format_word(nx.target));
    }
    if (!boundary::cylinder_contains(g_, ny, dst)) {
      out_.targets_disjoint = false;
      finding("target " + format_word(dst.target) + " escapes its node " + format_word(ny.target));
    }
    if (!sources_[static_cast<std::size_t>(level)].insert(src.target).second) out_.sources_disjoint = false;
    if (!targets_[static_cast<std::size_t>(level)].insert(dst.target).second) out_.targets_disjoint = false;

    NormalWord mover = g_.multiply(step->y2, g_.inverse(step->x2));
    if (g_.multiply(mover, step->x2) != step->y2 || g_.multiply(mover, step->x3) != step->y3) {
      out_.movers_ok = false;
      finding("mover " + format_word(mover) + " does not carry " + format_word(step->x3) + " to " +
              format_word(step->y3));
    }
    if (!mover.empty()) out_.identity_movers = false;
    if (src.shape != dst.shape) out_.measure_preserving = false;
    sx_ += boundary::cylinder_measure(g_, src);
    sy_ += boundary::cylinder_measure(g_, dst);
    ++out_.piece_count;

    if (level < out_.levels) {
      auto xs = boundary::refine_cylinder(g_, nx, step_);
      auto ys = boundary::refine_cylinder(g_, ny, step_);
      if (out_.K == 0) out_.K = xs.size();
      if (xs.size() != out_.K || ys.size() != out_.K)
        finding("node " + format_word(nx.target) + " has " + std::to_string(xs.size()) + " children, expected " +
                std::to_string(out_.K));
      auto drop = [](std::vector<CylinderSet>& v, const NormalWord& t) {
        auto it = std::lower_bound(v.begin(), v.end(), t,
                                   [](const CylinderSet& c, const NormalWord& w) { return c.target < w; });
        if (it == v.end() || it->target != t) return false;
        v.erase(it);
        return true;
      };
      if (!drop(xs, src.target)) {
        out_.sources_disjoint = false;
        finding("piece " + format_word(src.target) + " is not among the children of " + format_word(nx.target));
      }
      if (!drop(ys, dst.target)) {
        out_.targets_disjoint = false;
        finding("target " + format_word(dst.target) + " is not among the children of " + format_word(ny.target));
      }
      const std::size_t m = std::min(xs.size(), ys.size());
      for (std::size_t i = 0; i < m; ++i) node(xs[i], ys[i], level + 1);
    }
    if (keep_) out_.pieces.push_back({std::move(src), std::move(mover), std::move(dst), level});
  }

  const Group& g_;
  PiecewiseMap& out_;
  bool keep_;
  SphereIndex delta_, step_;
  Rational mx_, my_, sx_, sy_;
  std::vector<std::unordered_set<NormalWord, NormalWordHash>> sources_, targets_;
};

}  // namespace

std::string RatioSetDescriptor::ratio_set() const {
  return "{0} u {" + counting::ipow(QInt(q), static_cast<unsigned>(gcd)).str() + "^m : m in Z}";
}

RatioSetDescriptor ratio_descriptor(int n, int q) {
  if (n < 1) throw UsageError("rank n must be at least 1");
  if (q < 2) throw UsageError("order q must be at least 2");
  RatioSetDescriptor d;
  d.n = n;
  d.q = q;
  for (std::int64_t i = 1; i <= n; ++i) {
    d.exponents.push_back(i * (n + 1 - i));
    d.gcd = std::gcd(d.gcd, d.exponents.back());
  }
  d.lambda = Rational(QInt(1), counting::ipow(QInt(q), static_cast<unsigned>(d.gcd)));
  return d;
}

NormalWord deepen(const Group& g, const NormalWord& t, const SphereIndex& delta) {
  auto kid = boundary::some_child(g, at_identity(g, t), delta);
  if (!kid) throw ConsistencyError("cylinder " + format_word(t) + " has no children");
  return kid->target;
}

RnCensus generator_rn_census(const Group& g, const CayleyBall& ball, int depth) {
  if (depth < 1) throw UsageError("census depth must be at least 1");
  if (ball.radius < 2) throw RangeError("the exponent scan needs a ball of radius at least 2");
  const int n = g.n();
  RnCensus c;
  c.n = n;
  c.q = g.q();
  const SphereIndex deep(static_cast<std::size_t>(n), depth);
  const NormalWord one = g.identity();
  for (std::size_t s = 0; s < g.generator_count(); ++s) {
    const Letter l{static_cast<std::uint16_t>(s)};
    const NormalWord y = g.letter(l);
    GeneratorRn r;
    r.generator = l;
    r.type = g.dim(l);
    r.cylinder = deepen(g, y, deep);
    r.exponent = boundary::rn_exponent(boundary::m_vector(g, one, y, r.cylinder));
    r.expected = static_cast<std::int64_t>(r.type) * (n + 1 - r.type);
    c.generators.push_back(r);
  }
  const auto zs = g.enumerate_shape(SphereIndex(static_cast<std::size_t>(n), 2));
  for (std::size_t i = 0; i < ball.layer_offsets[3]; ++i)
    for (const auto& z : zs) {
      c.attained.insert(boundary::rn_exponent(boundary::m_vector(g, one, ball.vertices[i], z)));
      ++c.pairs_checked;
    }
  return c;
}

PiecewiseMap phi_construct(const Group& g, const NormalWord& x, const NormalWord& y, int levels, bool keep_pieces) {
  if (levels < 1) throw UsageError("phi_construct needs at least one level");
  PiecewiseMap out;
  out.x = x;
  out.y = y;
  out.levels = levels;
  PhiBuilder(g, out, keep_pieces).run();
  std::sort(out.pieces.begin(), out.pieces.end(),
            [](const Piece& a, const Piece& b) { return a.source.target < b.source.target; });
  return out;
}

bool WitnessReport::all_ok() const {
  return !witnesses.empty() && std::all_of(witnesses.begin(), witnesses.end(), [](const auto& w) { return w.ok; });
}

WitnessReport transitivity_witnesses(const Group& g, const SphereIndex& k, int levels, unsigned threads) {
  WitnessReport rep;
  rep.k = k;
  rep.levels = levels;
  const auto sphere = g.enumerate_shape(k);
  std::vector<std::pair<NormalWord, NormalWord>> pairs;
  for (const auto& a : sphere)
    for (const auto& b : sphere)
      if (a != b || sphere.size() == 1) pairs.emplace_back(a, b);
  rep.witnesses.resize(pairs.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pairs.size();) {
      try {
        auto map = phi_construct(g, pairs[i].first, pairs[i].second, levels);
        auto& w = rep.witnesses[i];
        w.x = map.x;
        w.y = map.y;
        w.pieces = map.piece_count;
        w.K = map.K;
        w.covered = map.covered;
        w.ok = map.ok(true);
        w.identity_movers = map.identity_movers;
        w.findings = map.findings;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pairs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  if (!rep.witnesses.empty()) {
    rep.K = rep.witnesses.front().K;
    const Rational miss = 1 - Rational(QInt(1), QInt(rep.K));
    Rational rest = 1;
    for (int i = 0; i < levels; ++i) rest *= miss;
    rep.expected = 1 - rest;
  }
  return rep;
}

bool Certificate::passed() const {
  return !sections.empty() && std::all_of(sections.begin(), sections.end(), [](const auto& s) { return s.pass; });
}

Certificate classify(const RnCensus& census, const WitnessReport& witnesses) {
  Certificate cert;
  cert.descriptor = ratio_descriptor(census.n, census.q);
  const auto& d = cert.descriptor;

  CertificateSection a{"generator census", true, "", false};
  for (const auto& r : census.generators)
    if (!r.matches()) {
      a.pass = false;
      a.detail = "generator g" + std::to_string(r.generator.gen) + " of type " + std::to_string(r.type) +
                 " attains q^" + std::to_string(r.exponent) + ", expected q^" + std::to_string(r.expected);
      break;
    }
  if (census.generators.empty()) {
    a.pass = false;
    a.detail = "empty census";
  }
  if (a.pass) a.detail = std::to_string(census.generators.size()) + " generators attain q^{i(n+1-i)}";
  cert.sections.push_back(a);

  CertificateSection b{"exponent lattice", true, "", false};
  std::int64_t gcd = 0;
  for (auto e : census.attained) gcd = std::gcd(gcd, e < 0 ? -e : e);
  for (const auto& r : census.generators) gcd = std::gcd(gcd, r.exponent < 0 ? -r.exponent : r.exponent);
  for (auto e : census.attained)
    if (e % d.gcd != 0) {
      b.pass = false;
      b.detail = "attained exponent " + std::to_string(e) + " is not a multiple of " + std::to_string(d.gcd);
      break;
    }
  if (b.pass && gcd != d.gcd) {
    b.pass = false;
    b.detail = "attained exponents generate " + std::to_string(gcd) + "Z, expected " + std::to_string(d.gcd) + "Z";
  }
  if (b.pass) b.detail = "attained exponents generate " + std::to_string(gcd) + "Z";
  cert.sections.push_back(b);

  CertificateSection c{"transitivity witnesses", witnesses.all_ok(), "", true};
  c.detail = std::to_string(witnesses.witnesses.size()) + " witnesses at shape " + shape_str(witnesses.k) + ", " +
             std::to_string(witnesses.levels) + " levels, coverage " + to_string(witnesses.expected) +
             " each; finite-depth evidence, not a proof of ergodicity";
  cert.sections.push_back(c);

  CertificateSection t{"type", a.pass && b.pass, "III_" + to_string(d.lambda), false};
  cert.sections.push_back(t);
  return cert;
}

Certificate classify_descriptor(int n, int q) {
  Certificate cert;
  cert.descriptor = ratio_descriptor(n, q);
  cert.descriptor_only = true;
  const std::int64_t want = n % 2 ? 1 : 2;
  CertificateSection s{"exponent lattice", cert.descriptor.gcd == want,
                       "gcd of i(n+1-i) is " + std::to_string(cert.descriptor.gcd), false};
  cert.sections.push_back(s);
  cert.sections.push_back({"type", s.pass, "III_" + to_string(cert.descriptor.lambda), false});
  return cert;
}

QInt triangle_census(const Group& g, const CayleyBall& ball, int m) {
  if (g.n() != 2) throw ConfigError("the triangle census is implemented for A~_2 only");
  if (m < 1) throw UsageError("triangle side must be at least 1");
  if (ball.radius < m) throw RangeError("triangles of side " + std::to_string(m) + " need a ball of radius " +
                                        std::to_string(m) + ", got " + std::to_string(ball.radius));
  const SphereIndex e1{1, 0}, e2{0, 1};
  auto neighbors = [&](std::uint32_t v) {
    std::vector<std::uint32_t> out;
    for (std::size_t s = 0; s < ball.generators; ++s) {
      auto u = ball.adjacency[v * ball.generators + s];
      if (u >= 0) out.push_back(static_cast<std::uint32_t>(u));
    }
    return out;
  };
  auto adjacent = [&](std::uint32_t a, std::uint32_t b) {
    for (std::size_t s = 0; s < ball.generators; ++s)
      if (ball.adjacency[a * ball.generators + s] == static_cast<std::int32_t>(b)) return true;
    return false;
  };
  auto rel = [&](std::uint32_t a, std::uint32_t b) { return g.relative_shape(ball.vertices[a], ball.vertices[b]); };

  // rows[r][j] is the vertex of shape (r - j, j).
  std::vector<std::vector<std::uint32_t>> rows(static_cast<std::size_t>(m) + 1);
  rows[0] = {0};
  QInt count = 0;
  auto place = [&](auto&& self, int r, int j) -> void {
    if (r > m) {
      ++count;
      return;
    }
    if (j > r) {
      self(self, r + 1, 0);
      return;
    }
    auto& row = rows[static_cast<std::size_t>(r)];
    const auto& prev = rows[static_cast<std::size_t>(r - 1)];
    const SphereIndex want{r - j, j};
    // The e_1 step from prev[j] exists for j < r, the e_2 step from prev[j-1] for j > 0.
    const std::uint32_t anchor = j < r ? prev[static_cast<std::size_t>(j)] : prev[static_cast<std::size_t>(j - 1)];
    for (std::uint32_t c : neighbors(anchor)) {
      if (g.shape(ball.vertices[c]) != want) continue;
      if (j < r && rel(prev[static_cast<std::size_t>(j)], c) != e1) continue;
      if (j > 0 && rel(prev[static_cast<std::size_t>(j - 1)], c) != e2) continue;
      if (j > 0 && !adjacent(row.back(), c)) continue;
      row.push_back(c);
      self(self, r, j + 1);
      row.pop_back();
    }
  };
  place(place, 1, 0);
  return count;
}

}  // namespace atilde::dynamics
