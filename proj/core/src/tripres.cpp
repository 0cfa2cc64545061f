#include "atilde/tripres.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "atilde/errors.hpp"

namespace atilde::tripres {

namespace {

constexpr ElementId kNone = 0xFFFFFFFFu;
constexpr std::size_t kMaxWitnesses = 32;

std::string triple_str(ElementId u, ElementId v, ElementId w) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + "," + std::to_string(w) + ")";
}

void fail(AxiomResult& r, std::string witness) {
  r.pass = false;
  ++r.failures;
  if (r.witnesses.size() < kMaxWitnesses) r.witnesses.push_back(std::move(witness));
}

bool pair_required(const Geometry& g, const Duality& lambda, ElementId u, ElementId v) {
  const ElementId lu = lambda(u);
  return lu != v && g.incident(lu, v);
}

}  // namespace

TrianglePresentation::TrianglePresentation(std::shared_ptr<const Geometry> geometry, Duality lambda,
                                           std::vector<Triple> triples)
    : geometry_(std::move(geometry)), lambda_(std::move(lambda)), triples_(std::move(triples)) {
  if (!geometry_) throw UsageError("presentation needs a geometry");
  const std::size_t sz = geometry_->size();
  if (lambda_.map.size() != sz)
    throw UsageError("lambda has " + std::to_string(lambda_.map.size()) + " entries, geometry has " +
                     std::to_string(sz));
  for (ElementId e : lambda_.map)
    if (e >= sz) throw UsageError("lambda maps to out-of-range index " + std::to_string(e));
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
  third_.assign(sz * sz, kNone);
  for (const auto& t : triples_) {
    if (t.u >= sz || t.v >= sz || t.w >= sz)
      throw UsageError("triple " + triple_str(t.u, t.v, t.w) + " has an index out of range");
    auto& slot = third_[t.u * sz + t.v];
    if (slot == kNone) slot = t.w;
  }
}

std::optional<ElementId> TrianglePresentation::third(ElementId u, ElementId v) const {
  const ElementId w = third_[u * geometry_->size() + v];
  if (w == kNone) return std::nullopt;
  return w;
}

bool PresentationReport::valid() const {
  return duality_valid && std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.pass; });
}

std::vector<std::pair<ElementId, ElementId>> required_pairs(const Geometry& g, const Duality& lambda) {
  std::vector<std::pair<ElementId, ElementId>> out;
  for (ElementId u = 0; u < g.size(); ++u)
    for (ElementId v = 0; v < g.size(); ++v)
      if (pair_required(g, lambda, u, v)) out.emplace_back(u, v);
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    const auto ka = std::tuple(g.dim(a.first), g.dim(a.second), a.first, a.second);
    const auto kb = std::tuple(g.dim(b.first), g.dim(b.second), b.first, b.second);
    return ka < kb;
  });
  return out;
}

PresentationReport validate_presentation(const TrianglePresentation& p) {
  PresentationReport rep;
  const auto& g = p.geometry();
  const auto& lambda = p.lambda();
  rep.duality_valid = pgeom::validate_duality(g, lambda).valid();
  rep.triple_count = p.triples().size();
  const int n = g.n();

  std::vector<Triple> sorted(p.triples().begin(), p.triples().end());
  auto member = [&](ElementId u, ElementId v, ElementId w) {
    return std::binary_search(sorted.begin(), sorted.end(), Triple{u, v, w});
  };

  for (ElementId u = 0; u < g.size(); ++u)
    for (ElementId v = 0; v < g.size(); ++v) {
      const bool need = pair_required(g, lambda, u, v);
      if (need) ++rep.required_pairs;
      const bool have = p.third(u, v).has_value();
      if (need && !have)
        fail(rep.axioms[0], "no triple starts with (" + std::to_string(u) + "," + std::to_string(v) +
                                ") although lambda(u) and v are distinct and incident");
      if (!need && have)
        fail(rep.axioms[0], "triple " + triple_str(u, v, *p.third(u, v)) +
                                " present but lambda(u) and v are not distinct and incident");
    }

  for (auto it = sorted.begin(); it != sorted.end(); ++it) {
    const auto& t = *it;
    if (!member(t.v, t.w, t.u))
      fail(rep.axioms[1], triple_str(t.u, t.v, t.w) + " in T but " + triple_str(t.v, t.w, t.u) + " missing");
    auto next = it + 1;
    if (next != sorted.end() && next->u == t.u && next->v == t.v)
      fail(rep.axioms[2], triple_str(t.u, t.v, t.w) + " and " + triple_str(next->u, next->v, next->w));
    if (!member(lambda(t.w), lambda(t.v), lambda(t.u)))
      fail(rep.axioms[3], triple_str(t.u, t.v, t.w) + " in T but " +
                              triple_str(lambda(t.w), lambda(t.v), lambda(t.u)) + " missing");
    if ((g.dim(t.u) + g.dim(t.v) + g.dim(t.w)) % (n + 1) != 0)
      fail(rep.axioms[4], triple_str(t.u, t.v, t.w) + " has dimension sum " +
                              std::to_string(g.dim(t.u) + g.dim(t.v) + g.dim(t.w)));
  }
  return rep;
}

// --- Search --------------------------------------------------------------

namespace {

class Searcher {
 public:
  Searcher(const std::shared_ptr<const Geometry>& g, const Duality& lambda, const SearchOptions& opt)
      : g_(g), lambda_(lambda), opt_(opt), size_(g->size()) {
    pairs_ = required_pairs(*g_, lambda_);
    required_.assign(size_ * size_, 0);
    for (const auto& [u, v] : pairs_) required_[u * size_ + v] = 1;
    assigned_.assign(size_ * size_, kNone);

    const int n = g_->n();
    std::mt19937_64 rng(opt_.seed);
    candidates_.resize(pairs_.size());
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto [u, v] = pairs_[i];
      for (ElementId w = 0; w < size_; ++w) {
        if ((g_->dim(u) + g_->dim(v) + g_->dim(w)) % (n + 1) != 0) continue;
        if (!required_[v * size_ + w] || !required_[w * size_ + u]) continue;
        candidates_[i].push_back(w);
      }
      if (opt_.seed != 0) std::shuffle(candidates_[i].begin(), candidates_[i].end(), rng);
    }
  }

  SearchResult run() {
    SearchResult result;
    result.stats.pairs = pairs_.size();
    const bool complete = recurse(0, result);
    result.stats.exhausted = complete && !stopped_by_limit_;
    result.stats.budget_hit = budget_hit_;
    result.stats.nodes = nodes_;
    if (budget_hit_)
      result.diagnostic = "node budget of " + std::to_string(opt_.node_budget) +
                          " exhausted; search incomplete";
    else if (result.presentations.empty())
      result.diagnostic = "search space exhausted without a presentation";
    return result;
  }

 private:
  // Returns false when the search must stop (limit reached or budget hit).
  bool recurse(std::size_t from, SearchResult& result) {
    if (result.presentations.size() >= opt_.limit) {
      stopped_by_limit_ = true;
      return false;
    }
    std::size_t i = from;
    while (i < pairs_.size() && assigned_[pairs_[i].first * size_ + pairs_[i].second] != kNone) ++i;
    if (i == pairs_.size()) {
      emit(result);
      if (result.presentations.size() >= opt_.limit) {
        stopped_by_limit_ = true;
        return false;
      }
      return true;
    }
    const auto [u, v] = pairs_[i];
    for (ElementId w : candidates_[i]) {
      if (opt_.node_budget != 0 && nodes_ >= opt_.node_budget) {
        budget_hit_ = true;
        return false;
      }
      ++nodes_;
      const std::size_t mark = trail_.size();
      if (assign_orbit(u, v, w)) {
        if (!recurse(i + 1, result)) {
          undo(mark);
          return false;
        }
      }
      undo(mark);
    }
    return true;
  }

  bool set(ElementId a, ElementId b, ElementId c) {
    const std::size_t slot = a * size_ + b;
    if (!required_[slot]) return false;
    if ((g_->dim(a) + g_->dim(b) + g_->dim(c)) % (g_->n() + 1) != 0) return false;
    if (assigned_[slot] == c) return true;
    if (assigned_[slot] != kNone) return false;
    assigned_[slot] = c;
    trail_.push_back(slot);
    return true;
  }

  // Closes (u, v, w) under rotation and the lambda-reversal.
  bool assign_orbit(ElementId u, ElementId v, ElementId w) {
    const ElementId lu = lambda_(u), lv = lambda_(v), lw = lambda_(w);
    return set(u, v, w) && set(v, w, u) && set(w, u, v) && set(lw, lv, lu) && set(lv, lu, lw) &&
           set(lu, lw, lv);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      assigned_[trail_.back()] = kNone;
      trail_.pop_back();
    }
  }

  void emit(SearchResult& result) {
    std::vector<Triple> triples;
    for (const auto& [u, v] : pairs_) triples.push_back({u, v, assigned_[u * size_ + v]});
    result.presentations.emplace_back(g_, lambda_, std::move(triples));
  }

  std::shared_ptr<const Geometry> g_;
  Duality lambda_;
  SearchOptions opt_;
  std::size_t size_;
  std::vector<std::pair<ElementId, ElementId>> pairs_;
  std::vector<std::uint8_t> required_;
  std::vector<ElementId> assigned_;
  std::vector<std::vector<ElementId>> candidates_;
  std::vector<std::size_t> trail_;
  std::uint64_t nodes_ = 0;
  bool budget_hit_ = false;
  bool stopped_by_limit_ = false;
};

}  // namespace

SearchResult search_presentations(const std::shared_ptr<const Geometry>& geometry, const Duality& lambda,
                                  const SearchOptions& options) {
  if (!geometry) throw UsageError("search_presentations: null geometry");
  const auto drep = pgeom::validate_duality(*geometry, lambda);
  if (!drep.valid())
    throw UsageError("search_presentations: lambda is not a valid duality (" +
                     (drep.violations.empty() ? std::string("invalid") : drep.violations.front()) + ")");
  if (options.limit == 0) {
    SearchResult r;
    r.stats.pairs = required_pairs(*geometry, lambda).size();
    return r;
  }
  return Searcher(geometry, lambda, options).run();
}

SweepResult sweep_dualities(const std::shared_ptr<const Geometry>& geometry, const SearchOptions& options,
                            std::uint64_t max_dualities) {
  if (!geometry) throw UsageError("sweep_dualities: null geometry");
  if (geometry->n() != 2) throw ConfigError("duality sweep is implemented for planes only");
  SearchOptions one = options;
  one.limit = 1;
  std::vector<std::size_t> perm(geometry->elements_of_dim(1).size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SweepResult out;
  do {
    if (out.dualities_tried >= max_dualities) break;
    ++out.dualities_tried;
    auto res = search_presentations(geometry, pgeom::pairing_duality(*geometry, perm), one);
    out.nodes += res.stats.nodes;
    if (!res.presentations.empty()) {
      out.presentation = std::move(res.presentations.front());
      out.pairing = perm;
      break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// --- Serialization -------------------------------------------------------

nlohmann::json geometry_to_json(const Geometry& g) {
  if (g.kind() == Geometry::Kind::vector) return {{"kind", "vector"}, {"n", g.n()}, {"q", g.q()}};
  const auto& pl = g.plane();
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : pl.incidence) {
    nlohmann::json r = nlohmann::json::array();
    for (auto b : row) r.push_back(static_cast<int>(b));
    matrix.push_back(std::move(r));
  }
  return {{"kind", "incidence"}, {"points", pl.points}, {"lines", pl.lines}, {"matrix", matrix}};
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError("field '" + where + key + "': missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("field '" + where + key + "': " + e.what());
  }
}

}  // namespace

std::shared_ptr<const Geometry> geometry_from_json(const nlohmann::json& j) {
  const auto kind = field<std::string>(j, "kind", "geometry.");
  try {
    if (kind == "vector") {
      const int n = field<int>(j, "n", "geometry.");
      const int q = field<int>(j, "q", "geometry.");
      return Geometry::vector_space(n, q);
    }
    if (kind == "incidence") {
      pgeom::AbstractPlane pl;
      pl.points = field<int>(j, "points", "geometry.");
      pl.lines = field<int>(j, "lines", "geometry.");
      const auto m = field<std::vector<std::vector<int>>>(j, "matrix", "geometry.");
      for (const auto& row : m) {
        std::vector<std::uint8_t> r;
        for (int b : row) {
          if (b != 0 && b != 1) throw ParseError("field 'geometry.matrix': entries must be 0 or 1");
          r.push_back(static_cast<std::uint8_t>(b));
        }
        pl.incidence.push_back(std::move(r));
      }
      return Geometry::from_plane(pl);
    }
  } catch (const ConfigError& e) {
    throw ParseError(std::string("field 'geometry': ") + e.what());
  } catch (const UsageError& e) {
    throw ParseError(std::string("field 'geometry': ") + e.what());
  }
  throw ParseError("field 'geometry.kind': unknown kind '" + kind + "'");
}

std::string presentation_to_string(const TrianglePresentation& p, const nlohmann::json& meta) {
  std::ostringstream os;
  nlohmann::json lambda = p.lambda().map;
  os << "{\n";
  os << "  \"format\": \"atilde-presentation\",\n";
  os << "  \"version\": 1,\n";
  os << "  \"geometry\": " << geometry_to_json(p.geometry()).dump() << ",\n";
  os << "  \"lambda\": " << lambda.dump() << ",\n";
  os << "  \"triples\": [";
  bool first = true;
  for (const auto& t : p.triples()) {
    os << (first ? "\n    " : ",\n    ") << "[" << t.u << "," << t.v << "," << t.w << "]";
    first = false;
  }
  os << (first ? "],\n" : "\n  ],\n");
  os << "  \"meta\": " << (meta.is_null() ? nlohmann::json::object() : meta).dump() << "\n";
  os << "}\n";
  return os.str();
}

TrianglePresentation presentation_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
  if (j.contains("format") && j["format"] != "atilde-presentation")
    throw ParseError("field 'format': expected \"atilde-presentation\"");
  if (j.contains("version") && j["version"] != 1) throw ParseError("field 'version': unsupported version");
  if (!j.contains("geometry")) throw ParseError("field 'geometry': missing");
  auto g = geometry_from_json(j["geometry"]);
  const auto lam = field<std::vector<long long>>(j, "lambda", "");
  const auto raw = field<std::vector<std::vector<long long>>>(j, "triples", "");
  const auto sz = static_cast<long long>(g->size());
  pgeom::Duality lambda;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (lam[i] < 0 || lam[i] >= sz)
      throw ParseError("field 'lambda[" + std::to_string(i) + "]': index " + std::to_string(lam[i]) +
                       " out of range 0.." + std::to_string(sz - 1));
    lambda.map.push_back(static_cast<ElementId>(lam[i]));
  }
  if (static_cast<long long>(lambda.map.size()) != sz)
    throw ParseError("field 'lambda': has " + std::to_string(lambda.map.size()) + " entries, expected " +
                     std::to_string(sz));
  std::vector<Triple> triples;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].size() != 3)
      throw ParseError("field 'triples[" + std::to_string(i) + "]': expected 3 indices");
    for (std::size_t c = 0; c < 3; ++c)
      if (raw[i][c] < 0 || raw[i][c] >= sz)
        throw ParseError("field 'triples[" + std::to_string(i) + "][" + std::to_string(c) + "]': index " +
                         std::to_string(raw[i][c]) + " out of range 0.." + std::to_string(sz - 1));
    triples.push_back({static_cast<ElementId>(raw[i][0]), static_cast<ElementId>(raw[i][1]),
                       static_cast<ElementId>(raw[i][2])});
  }
  return TrianglePresentation(std::move(g), std::move(lambda), std::move(triples));
}

void save_presentation(const TrianglePresentation& p, const std::string& path, const nlohmann::json& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << presentation_to_string(p, meta);
  if (!out) throw UsageError("write to '" + path + "' failed");
}

TrianglePresentation load_presentation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open presentation file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return presentation_from_string(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::uint64_t presentation_hash(const TrianglePresentation& p) {
  const std::string s = presentation_to_string(p, nlohmann::json::object());
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace atilde::tripres
