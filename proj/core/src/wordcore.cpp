#include "atilde/wordcore.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <thread>

#include "atilde/errors.hpp"

namespace atilde::wordcore {

namespace {

constexpr std::size_t kStepCap = 1u << 22;

std::string pair_name(ElementId u, ElementId v) {
  return "(g" + std::to_string(u) + ",g" + std::to_string(v) + ")";
}

// Length-reducing rules only: cancellation and contraction.
bool collapses(const TrianglePresentation& p, std::vector<ElementId>& w) {
  if (w.empty()) return true;
  const auto& lambda = p.lambda();
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    ElementId u = w[i], v = w[i + 1];
    if (v == lambda(u)) {
      std::vector<ElementId> next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
      next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(i) + 2, w.end());
      if (collapses(p, next)) return true;
    } else if (auto t = p.third(u, v)) {
      std::vector<ElementId> next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
      next.push_back(lambda(*t));
      next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(i) + 2, w.end());
      if (collapses(p, next)) return true;
    }
  }
  return false;
}

bool normal_pair(const pgeom::Geometry& g, const pgeom::Duality& lambda, ElementId u, ElementId v) {
  return g.dim(u) <= g.dim(v) && g.join_is_whole(lambda(u), v);
}

template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count / 64 + 1)));
  if (threads == 1) {
    fn(std::size_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t b = std::min(count, t * chunk), e = std::min(count, b + chunk);
    pool.emplace_back([&fn, b, e, t] { fn(b, e, t); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<Letter> parse_word(std::string_view text) {
  std::vector<Letter> out;
  if (text.empty() || text == "e") return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    if (tok.size() < 2 || tok[0] != 'g')
      throw ParseError("bad letter '" + std::string(tok) + "' in word '" + std::string(text) + "'");
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || value > 0xFFFF)
      throw ParseError("bad letter '" + std::string(tok) + "' in word '" + std::string(text) + "'");
    out.push_back(Letter{static_cast<std::uint16_t>(value)});
    pos = end + 1;
  }
  return out;
}

std::string format_word(std::span<const Letter> letters) {
  if (letters.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) s += ',';
    s += 'g';
    s += std::to_string(letters[i].gen);
  }
  return s;
}

ExchangeTable build_two_letter_table(const TrianglePresentation& p) {
  const auto& g = p.geometry();
  const auto& lambda = p.lambda();
  const int n = g.n();
  const auto size = static_cast<ElementId>(g.size());

  std::vector<std::pair<ElementId, ElementId>> normals;
  for (ElementId a = 0; a < size; ++a)
    for (ElementId b = 0; b < size; ++b)
      if (normal_pair(g, lambda, a, b)) normals.emplace_back(a, b);

  ExchangeTable table;
  std::vector<ElementId> w(4);
  for (ElementId u = 0; u < size; ++u) {
    for (ElementId v = 0; v < size; ++v) {
      if (v == lambda(u) || p.third(u, v) || normal_pair(g, lambda, u, v)) continue;
      int type = (g.dim(u) + g.dim(v)) % (n + 1);
      std::vector<std::pair<ElementId, ElementId>> found;
      for (auto [a, b] : normals) {
        if ((g.dim(a) + g.dim(b)) % (n + 1) != type) continue;
        w = {lambda(a), u, v, lambda(b)};
        if (collapses(p, w)) found.emplace_back(a, b);
      }
      if (found.size() != 1) {
        std::ostringstream os;
        os << "two-letter word " << pair_name(u, v) << " has " << found.size() << " normal-form candidates";
        for (std::size_t i = 0; i < found.size() && i < 4; ++i)
          os << (i ? ", " : ": ") << pair_name(found[i].first, found[i].second);
        throw ConsistencyError(os.str());
      }
      table.entries.push_back({Letter{static_cast<std::uint16_t>(u)}, Letter{static_cast<std::uint16_t>(v)},
                               Letter{static_cast<std::uint16_t>(found[0].first)},
                               Letter{static_cast<std::uint16_t>(found[0].second)}});
    }
  }
  return table;
}

Group::Group(TrianglePresentation presentation) : presentation_(std::move(presentation)) {
  const auto& g = presentation_.geometry();
  const auto& lambda = presentation_.lambda();
  auto report = tripres::validate_presentation(presentation_);
  if (!report.valid()) {
    std::string msg = "presentation is not valid";
    if (!report.duality_valid) msg += ": lambda is not a duality";
    for (std::size_t i = 0; i < report.axioms.size(); ++i) {
      if (report.axioms[i].pass) continue;
      msg += "; axiom " + std::to_string(i + 1) + " fails";
      if (!report.axioms[i].witnesses.empty()) msg += " (" + report.axioms[i].witnesses.front() + ")";
    }
    throw UsageError(msg);
  }
  if (g.size() > 0xFFFF) throw ConfigError("geometry too large for 16-bit letters");

  n_ = g.n();
  q_ = g.q();
  gens_ = g.size();
  dims_.resize(gens_);
  inv_.resize(gens_);
  by_dim_.assign(static_cast<std::size_t>(n_) + 1, {});
  for (ElementId u = 0; u < gens_; ++u) {
    dims_[u] = g.dim(u);
    inv_[u] = static_cast<std::uint16_t>(lambda(u));
    by_dim_[static_cast<std::size_t>(dims_[u])].push_back(Letter{static_cast<std::uint16_t>(u)});
  }

  rules_.assign(gens_ * gens_, PairRule{});
  for (ElementId u = 0; u < gens_; ++u) {
    for (ElementId v = 0; v < gens_; ++v) {
      PairRule& r = rules_[u * gens_ + v];
      if (v == lambda(u)) {
        r.kind = PairKind::cancel;
      } else if (auto t = presentation_.third(u, v)) {
        r.kind = PairKind::contract;
        r.first = Letter{static_cast<std::uint16_t>(lambda(*t))};
      } else if (normal_pair(g, lambda, u, v)) {
        r.kind = PairKind::normal;
      } else {
        r.kind = PairKind::exchange;  // filled below
      }
    }
  }
  exchange_ = build_two_letter_table(presentation_);
  std::vector<std::uint8_t> filled(gens_ * gens_, 0);
  for (const auto& e : exchange_.entries) {
    PairRule& r = rules_[e.u.gen * gens_ + e.v.gen];
    r.first = e.a;
    r.second = e.b;
    filled[e.u.gen * gens_ + e.v.gen] = 1;
  }
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (rules_[i].kind == PairKind::exchange && !filled[i])
      throw ConsistencyError("exchange table misses " + pair_name(static_cast<ElementId>(i / gens_),
                                                                  static_cast<ElementId>(i % gens_)));
}

bool Group::is_normal(std::span<const Letter> word) const {
  for (Letter l : word)
    if (l.gen >= gens_) return false;
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (rule(word[i], word[i + 1]).kind != PairKind::normal) return false;
  return true;
}

NormalWord Group::assume_normal(std::vector<Letter> letters) const {
  if (!is_normal(letters)) throw UsageError("word " + format_word(letters) + " is not in normal form");
  return NormalWord(std::move(letters));
}

// Rewrites w to normal form. dirty[i] flags the pair (w[i], w[i+1]) as
// possibly non-normal; every other pair must already be normal.
void Group::settle(std::vector<Letter>& w, std::vector<std::uint8_t>& dirty, std::mt19937_64* rng) const {
  std::vector<std::size_t> pending;
  for (std::size_t steps = 0;; ++steps) {
    if (steps > kStepCap) throw ConsistencyError("reduction of " + format_word(w) + " does not terminate");
    std::size_t i = w.size();
    if (rng) {
      pending.clear();
      for (std::size_t j = 0; j + 1 < w.size(); ++j)
        if (dirty[j]) pending.push_back(j);
      if (pending.empty()) break;
      i = pending[std::uniform_int_distribution<std::size_t>(0, pending.size() - 1)(*rng)];
    } else {
      for (std::size_t j = w.size(); j-- > 0;)
        if (dirty[j]) {
          i = j;
          break;
        }
      if (i == w.size()) break;
    }
    dirty[i] = 0;
    if (i + 1 >= w.size()) continue;
    const PairRule& r = rule(w[i], w[i + 1]);
    auto at = [](std::size_t k) { return static_cast<std::ptrdiff_t>(k); };
    switch (r.kind) {
      case PairKind::normal:
        break;
      case PairKind::cancel:
        w.erase(w.begin() + at(i), w.begin() + at(i) + 2);
        dirty.erase(dirty.begin() + at(i), dirty.begin() + at(i) + 2);
        if (i > 0) dirty[i - 1] = 1;
        break;
      case PairKind::contract:
        w[i] = r.first;
        w.erase(w.begin() + at(i) + 1);
        dirty.erase(dirty.begin() + at(i) + 1);
        dirty[i] = 1;
        if (i > 0) dirty[i - 1] = 1;
        break;
      case PairKind::exchange:
        w[i] = r.first;
        w[i + 1] = r.second;
        dirty[i + 1] = 1;
        if (i > 0) dirty[i - 1] = 1;
        break;
    }
  }
}

NormalWord Group::reduce(std::span<const Letter> word) const {
  for (Letter l : word)
    if (l.gen >= gens_) throw UsageError("letter g" + std::to_string(l.gen) + " is not a generator");
  std::vector<Letter> w;
  std::vector<std::uint8_t> dirty;
  w.reserve(word.size());
  dirty.reserve(word.size());
  for (Letter l : word) {
    w.push_back(l);
    dirty.push_back(0);
    if (w.size() >= 2) dirty[w.size() - 2] = 1;
    settle(w, dirty, nullptr);
  }
  return NormalWord(std::move(w));
}

NormalWord Group::reduce_random_order(std::span<const Letter> word, std::mt19937_64& rng) const {
  for (Letter l : word)
    if (l.gen >= gens_) throw UsageError("letter g" + std::to_string(l.gen) + " is not a generator");
  std::vector<Letter> w(word.begin(), word.end());
  std::vector<std::uint8_t> dirty(w.size(), 1);
  settle(w, dirty, &rng);
  return NormalWord(std::move(w));
}

NormalWord Group::multiply(const NormalWord& x, Letter g) const {
  if (g.gen >= gens_) throw UsageError("letter g" + std::to_string(g.gen) + " is not a generator");
  std::vector<Letter> w(x.letters_);
  w.push_back(g);
  std::vector<std::uint8_t> dirty(w.size(), 0);
  if (w.size() >= 2) dirty[w.size() - 2] = 1;
  settle(w, dirty, nullptr);
  return NormalWord(std::move(w));
}

NormalWord Group::multiply(const NormalWord& x, const NormalWord& y) const {
  std::vector<Letter> w(x.letters_);
  std::vector<std::uint8_t> dirty(w.size(), 0);
  for (Letter l : y.letters_) {
    w.push_back(l);
    dirty.push_back(0);
    if (w.size() >= 2) dirty[w.size() - 2] = 1;
    settle(w, dirty, nullptr);
  }
  return NormalWord(std::move(w));
}

NormalWord Group::left_multiply(Letter g, const NormalWord& x) const {
  if (g.gen >= gens_) throw UsageError("letter g" + std::to_string(g.gen) + " is not a generator");
  std::vector<Letter> w;
  w.reserve(x.size() + 1);
  w.push_back(g);
  w.insert(w.end(), x.letters_.begin(), x.letters_.end());
  std::vector<std::uint8_t> dirty(w.size(), 0);
  dirty[0] = 1;
  settle(w, dirty, nullptr);
  return NormalWord(std::move(w));
}

// The reversed word of inverses is again normal: dims reverse under lambda
// and the join condition is symmetric in the pair.
NormalWord Group::inverse(const NormalWord& x) const {
  std::vector<Letter> w;
  w.reserve(x.size());
  for (auto it = x.letters_.rbegin(); it != x.letters_.rend(); ++it) w.push_back(inverse(*it));
  return NormalWord(std::move(w));
}

SphereIndex Group::shape(const NormalWord& x) const {
  SphereIndex k(static_cast<std::size_t>(n_), 0);
  for (Letter l : x.letters_) ++k[static_cast<std::size_t>(dims_[l.gen] - 1)];
  return k;
}

SphereIndex Group::relative_shape(const NormalWord& x, const NormalWord& y) const {
  return shape(multiply(inverse(x), y));
}

int Group::vertex_type(const NormalWord& x) const {
  int t = 0;
  for (Letter l : x.letters_) t += dims_[l.gen];
  return t % (n_ + 1);
}

int Group::distance(const NormalWord& x, const NormalWord& y) const {
  return static_cast<int>(multiply(inverse(x), y).size());
}

std::vector<NormalWord> Group::enumerate_shape(const SphereIndex& k) const {
  if (k.size() != static_cast<std::size_t>(n_))
    throw UsageError("sphere index has " + std::to_string(k.size()) + " entries, expected " + std::to_string(n_));
  std::vector<int> dims;
  for (int j = 1; j <= n_; ++j) {
    if (k[static_cast<std::size_t>(j - 1)] < 0) throw UsageError("sphere index has a negative entry");
    dims.insert(dims.end(), static_cast<std::size_t>(k[static_cast<std::size_t>(j - 1)]), j);
  }
  std::vector<NormalWord> out;
  std::vector<Letter> cur;
  auto dfs = [&](auto&& self, std::size_t pos) -> void {
    if (pos == dims.size()) {
      out.push_back(NormalWord(cur));
      return;
    }
    for (Letter l : letters_of_dim(dims[pos])) {
      if (pos > 0 && rule(cur.back(), l).kind != PairKind::normal) continue;
      cur.push_back(l);
      self(self, pos + 1);
      cur.pop_back();
    }
  };
  dfs(dfs, 0);
  return out;
}

std::vector<Chamber> Group::chambers_at_identity() const {
  std::vector<Chamber> out;
  for (const auto& flag : geometry().complete_flags()) {
    Chamber c;
    for (ElementId u : flag) c.vertices.push_back(Letter{static_cast<std::uint16_t>(u)});
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<NormalWord> Group::opposite_vertices(const Chamber& c) const {
  const auto& g = geometry();
  if (c.vertices.size() != static_cast<std::size_t>(n_)) throw UsageError("chamber must list n vertices besides 1");
  for (int i = 0; i < n_; ++i) {
    Letter p = c.vertices[static_cast<std::size_t>(i)];
    if (p.gen >= gens_ || dims_[p.gen] != i + 1)
      throw UsageError("chamber vertex " + std::to_string(i + 1) + " must be a generator of dim " + std::to_string(i + 1));
    if (i > 0 && !g.contains(c.vertices[static_cast<std::size_t>(i - 1)].gen, p.gen))
      throw UsageError("chamber vertices do not form a complete flag");
  }
  Letter p1 = c.vertices[0];
  // Seen from p_1, p_i = p_1 u_{i-1} with u_1 < ... < u_{n-1}.
  std::optional<Letter> top;
  if (n_ >= 2) {
    NormalWord u = multiply(letter(inverse(p1)), c.vertices.back());
    if (u.size() != 1) throw ConsistencyError("chamber vertex p_n is not adjacent to p_1");
    top = u[0];
  }
  std::vector<NormalWord> out;
  for (Letter un : letters_of_dim(n_)) {
    if (un == inverse(p1)) continue;
    if (top && !g.contains(top->gen, un.gen)) continue;
    std::vector<Letter> w{p1, un};
    if (!is_normal(w)) throw ConsistencyError("opposite vertex " + format_word(w) + " is not normal");
    out.push_back(NormalWord(std::move(w)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::uint32_t> CayleyBall::find(const NormalWord& w) const {
  auto it = index.find(w);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

CayleyBall build_ball(const Group& g, int radius, std::size_t max_vertices, unsigned threads) {
  if (radius < 0) throw RangeError("ball radius must be non-negative");
  CayleyBall ball;
  ball.radius = radius;
  ball.generators = g.generator_count();
  ball.vertices.push_back(g.identity());
  ball.layer_offsets = {0, 1};
  const std::size_t gens = ball.generators;

  for (int d = 0; d < radius; ++d) {
    std::size_t lo = ball.layer_offsets[static_cast<std::size_t>(d)];
    std::size_t hi = ball.layer_offsets[static_cast<std::size_t>(d) + 1];
    std::vector<std::vector<NormalWord>> found(std::max(1u, threads));
    parallel_chunks(hi - lo, threads, [&](std::size_t b, std::size_t e, unsigned t) {
      for (std::size_t i = lo + b; i < lo + e; ++i)
        for (std::size_t s = 0; s < gens; ++s) {
          NormalWord y = g.multiply(ball.vertices[i], Letter{static_cast<std::uint16_t>(s)});
          if (y.size() == static_cast<std::size_t>(d) + 1) found[t].push_back(std::move(y));
        }
    });
    std::vector<NormalWord> layer;
    for (auto& f : found) layer.insert(layer.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
    if (ball.vertices.size() + layer.size() > max_vertices)
      throw BudgetError("ball of radius " + std::to_string(radius) + " exceeds " + std::to_string(max_vertices) +
                            " vertices at distance " + std::to_string(d + 1),
                        ball.vertices.size() + layer.size());
    ball.vertices.insert(ball.vertices.end(), std::make_move_iterator(layer.begin()),
                         std::make_move_iterator(layer.end()));
    ball.layer_offsets.push_back(ball.vertices.size());
  }

  ball.index.reserve(ball.vertices.size());
  for (std::uint32_t i = 0; i < ball.vertices.size(); ++i) ball.index.emplace(ball.vertices[i], i);

  ball.adjacency.assign(ball.vertices.size() * gens, -1);
  parallel_chunks(ball.vertices.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t s = 0; s < gens; ++s) {
        NormalWord y = g.multiply(ball.vertices[i], Letter{static_cast<std::uint16_t>(s)});
        if (y.size() > static_cast<std::size_t>(radius)) continue;
        auto it = ball.index.find(y);
        if (it == ball.index.end()) throw ConsistencyError("neighbor " + format_word(y) + " missing from ball");
        ball.adjacency[i * gens + s] = static_cast<std::int32_t>(it->second);
      }
  });
  return ball;
}

std::vector<NormalWord> sphere(const Group& g, const CayleyBall& ball, const SphereIndex& k) {
  if (k.size() != static_cast<std::size_t>(g.n()))
    throw UsageError("sphere index has " + std::to_string(k.size()) + " entries, expected " + std::to_string(g.n()));
  int norm = 0;
  for (int v : k) {
    if (v < 0) throw UsageError("sphere index has a negative entry");
    norm += v;
  }
  if (norm > ball.radius)
    throw RangeError("|k| = " + std::to_string(norm) + " exceeds ball radius " + std::to_string(ball.radius));
  std::vector<NormalWord> out;
  for (std::size_t i = ball.layer_offsets[static_cast<std::size_t>(norm)];
       i < ball.layer_offsets[static_cast<std::size_t>(norm) + 1]; ++i)
    if (g.shape(ball.vertices[i]) == k) out.push_back(ball.vertices[i]);
  return out;
}

}  // namespace atilde::wordcore
