#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "atilde/boundary.hpp"
#include "atilde/counting.hpp"
#include "atilde/dynamics.hpp"
#include "atilde/errors.hpp"
#include "atilde/pgeom.hpp"
#include "atilde/tripres.hpp"
#include "atilde/wordcore.hpp"

#ifndef ATILDE_VERSION
#define ATILDE_VERSION "0.0.0"
#endif

namespace atilde::cli {

using nlohmann::json;
using wordcore::CayleyBall;
using wordcore::Group;
using wordcore::NormalWord;

namespace {

// Raised when a computed check does not hold; carries the section name.
struct CheckFailure {
  std::string section;
  std::string detail;
};

struct Options {
  std::string presentation;
  std::string ball;
  std::string out;
  int radius = -1;
  int n = 2;
  int q = 2;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t max_vertices = 10'000'000;
};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw UsageError("--out: cannot write " + path);
  o << bytes;
}

json shape_json(const SphereIndex& k) { return json(k); }

std::string shape_text(const SphereIndex& k) {
  std::string s;
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s;
}

// All k in Z_+^n with |k| = total, lexicographically descending.
void compositions(int n, int total, SphereIndex& cur, std::vector<SphereIndex>& out) {
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur.push_back(v);
    compositions(n, total - v, cur, out);
    cur.pop_back();
  }
}

class Session {
 public:
  Session(Options& o, std::string command, std::vector<std::string> argv)
      : o_(o), command_(std::move(command)), argv_(std::move(argv)) {}

  const Group& group() {
    if (!group_) {
      if (o_.presentation.empty()) throw UsageError("--presentation is required for " + command_);
      try {
        group_.emplace(tripres::load_presentation(o_.presentation));
      } catch (const UsageError& e) {
        throw UsageError("--presentation: " + std::string(e.what()));
      } catch (const ParseError& e) {
        throw UsageError("--presentation: " + std::string(e.what()));
      }
      inputs_["presentation"] = tripres::hash_hex(tripres::presentation_hash(group_->presentation()));
    }
    return *group_;
  }

  // The ball from --ball, or one of radius max(--radius, need) built here.
  const CayleyBall& ball(int need) {
    if (ball_) return *ball_;
    const Group& g = group();
    if (!o_.ball.empty()) {
      try {
        ball_ = std::make_unique<CayleyBall>(wordcore::load_ball(g, o_.ball));
      } catch (const ParseError& e) {
        throw UsageError("--ball: " + std::string(e.what()));
      }
      inputs_["ball"] = tripres::hash_hex(fnv1a(read_file(o_.ball)));
    } else {
      int r = std::max(o_.radius, need);
      ball_ = std::make_unique<CayleyBall>(wordcore::build_ball(g, r, o_.max_vertices, o_.threads));
    }
    return *ball_;
  }

  NormalWord word(const std::string& text, const char* flag) {
    const Group& g = group();
    std::vector<wordcore::Letter> letters;
    try {
      letters = wordcore::parse_word(text);
    } catch (const ParseError& e) {
      throw UsageError(std::string(flag) + ": " + e.what());
    }
    for (auto l : letters)
      if (l.gen >= g.generator_count())
        throw UsageError(std::string(flag) + ": generator g" + std::to_string(l.gen) + " out of range (" +
                         std::to_string(g.generator_count()) + " generators)");
    return g.reduce(letters);
  }

  SphereIndex index(const std::vector<int>& k, const char* flag) {
    if (k.size() != static_cast<std::size_t>(group().n()))
      throw UsageError(std::string(flag) + ": expected " + std::to_string(group().n()) + " entries");
    for (int v : k)
      if (v < 0) throw UsageError(std::string(flag) + ": entries must be non-negative");
    return k;
  }

  // Finishes the run: the artifact goes to --out (and the manifest next to
  // it); the report always goes to stdout.
  void emit(json report, std::ostream& out, const std::string* artifact = nullptr, bool write = true) {
    report["command"] = command_;
    if (!inputs_.empty()) report["inputs"] = inputs_;
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (o_.out.empty() || !write) return;
    const std::string bytes = artifact ? *artifact : text;
    if (!artifact || !artifact->empty()) write_file(o_.out, bytes);
    write_manifest(artifact && artifact->empty() ? read_file(o_.out) : bytes);
  }

  void write_manifest(const std::string& artifact_bytes) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
    json m;
    m["command"] = command_;
    m["argv"] = argv_;
    m["inputs"] = inputs_.empty() ? json::object() : inputs_;
    m["versions"] = {{"atilde", ATILDE_VERSION}, {"ball_format", 1}, {"presentation_format", 1}};
    m["seed"] = o_.seed;
    m["threads"] = o_.threads;
    m["timing_ms"] = ms.count();
    m["artifact"] = {{"path", o_.out}, {"fnv1a", tripres::hash_hex(fnv1a(artifact_bytes))}};
    write_file(o_.out + ".manifest.json", m.dump(2) + "\n");
  }

  const Options& options() const { return o_; }

 private:
  Options& o_;
  std::string command_;
  std::vector<std::string> argv_;
  std::optional<Group> group_;
  std::unique_ptr<CayleyBall> ball_;
  json inputs_ = json::object();
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// --- subcommands -------------------------------------------------------------

void cmd_validate(Session& s, std::ostream& out) {
  const auto& o = s.options();
  if (o.presentation.empty()) throw UsageError("--presentation is required for tripres validate");
  tripres::TrianglePresentation p = [&] {
    try {
      return tripres::load_presentation(o.presentation);
    } catch (const ParseError& e) {
      throw UsageError("--presentation: " + std::string(e.what()));
    }
  }();
  auto rep = tripres::validate_presentation(p);
  json r;
  r["presentation_hash"] = tripres::hash_hex(tripres::presentation_hash(p));
  r["triples"] = rep.triple_count;
  r["required_pairs"] = rep.required_pairs;
  r["duality_valid"] = rep.duality_valid;
  json axioms = json::array();
  for (std::size_t i = 0; i < rep.axioms.size(); ++i)
    axioms.push_back({{"axiom", i + 1},
                      {"pass", rep.axioms[i].pass},
                      {"failures", rep.axioms[i].failures},
                      {"witnesses", rep.axioms[i].witnesses}});
  r["axioms"] = axioms;
  std::optional<CheckFailure> fail;
  if (!rep.valid()) {
    for (std::size_t i = 0; i < rep.axioms.size() && !fail; ++i)
      if (!rep.axioms[i].pass)
        fail = CheckFailure{"axiom " + std::to_string(i + 1),
                            rep.axioms[i].witnesses.empty() ? "" : rep.axioms[i].witnesses.front()};
    if (!fail) fail = CheckFailure{"duality", "lambda is not a valid duality"};
    r["normal_forms"] = "not checked";
  } else {
    try {
      Group g(p);
      r["normal_forms"] = "unique";
      r["exchange_entries"] = g.exchange_table().entries.size();
    } catch (const ConsistencyError& e) {
      r["normal_forms"] = e.what();
      fail = CheckFailure{"normal forms", e.what()};
    }
  }
  r["valid"] = !fail.has_value();
  s.emit(r, out);
  if (fail) throw *fail;
}

struct SearchFlags {
  std::string duality;
  std::uint64_t node_budget = 0;
  std::uint64_t max_dualities = 100000;
};

void cmd_search(Session& s, const SearchFlags& f, std::ostream& out) {
  const auto& o = s.options();
  if (o.n < 2) throw UsageError("--n: must be at least 2");
  auto geom = [&] {
    try {
      return pgeom::Geometry::vector_space(o.n, o.q);
    } catch (const ConfigError& e) {
      throw UsageError("--q: " + std::string(e.what()));
    }
  }();
  std::string mode = f.duality.empty() ? (o.n == 2 ? "sweep" : "annihilator") : f.duality;
  if (mode == "sweep" && o.n != 2) throw UsageError("--duality: the sweep is defined for planes (--n 2) only");
  if (mode == "index" && o.n != 2) throw UsageError("--duality: the index pairing is defined for planes only");
  tripres::SearchOptions so;
  so.seed = o.seed;
  so.node_budget = f.node_budget;
  json r;
  r["n"] = o.n;
  r["q"] = o.q;
  r["duality"] = mode;
  std::optional<tripres::TrianglePresentation> found;
  json meta;
  if (mode == "sweep") {
    auto sw = tripres::sweep_dualities(geom, so, f.max_dualities);
    r["dualities_tried"] = sw.dualities_tried;
    r["nodes"] = sw.nodes;
    if (sw.presentation) {
      r["line_of_point"] = sw.pairing;
      found = sw.presentation;
    }
  } else {
    auto lambda = mode == "annihilator" ? pgeom::annihilator_duality(*geom) : pgeom::index_pairing_duality(*geom);
    auto res = tripres::search_presentations(geom, lambda, so);
    r["nodes"] = res.stats.nodes;
    r["exhausted"] = res.stats.exhausted;
    r["budget_hit"] = res.stats.budget_hit;
    if (!res.diagnostic.empty()) r["diagnostic"] = res.diagnostic;
    if (!res.presentations.empty()) found = res.presentations.front();
  }
  r["found"] = found.has_value();
  std::string artifact;
  if (found) {
    auto rep = tripres::validate_presentation(*found);
    r["valid"] = rep.valid();
    r["triples"] = rep.triple_count;
    r["presentation_hash"] = tripres::hash_hex(tripres::presentation_hash(*found));
    meta = {{"duality", mode}, {"seed", o.seed}};
    if (r.contains("line_of_point")) meta["line_of_point"] = r["line_of_point"];
    artifact = tripres::presentation_to_string(*found, meta);
    if (o.out.empty()) r["presentation"] = json::parse(artifact);
  }
  s.emit(r, out, &artifact, found.has_value());
  if (!found) {
    std::string why = "no presentation found";
    if (r.value("budget_hit", false)) why += " within the node budget";
    throw CheckFailure{"search", why};
  }
}

void cmd_ball(Session& s, std::ostream& out) {
  const auto& o = s.options();
  if (o.radius < 0) throw UsageError("--radius is required for ball build");
  if (o.out.empty()) throw UsageError("--out is required for ball build");
  const Group& g = s.group();
  const CayleyBall& b = s.ball(o.radius);
  wordcore::save_ball(b, g, o.out);
  json r;
  r["radius"] = b.radius;
  r["vertices"] = b.size();
  json layers = json::array();
  for (int d = 0; d <= b.radius; ++d)
    layers.push_back(b.layer_offsets[static_cast<std::size_t>(d) + 1] - b.layer_offsets[static_cast<std::size_t>(d)]);
  r["layers"] = layers;
  std::string empty;
  s.emit(r, out, &empty);
}

void cmd_sphere(Session& s, int max_norm, std::ostream& out) {
  if (max_norm < 0) throw UsageError("--max-norm: must be non-negative");
  const Group& g = s.group();
  const CayleyBall& b = s.ball(max_norm);
  if (b.radius < max_norm) throw UsageError("--ball: radius " + std::to_string(b.radius) + " is below --max-norm");
  json rows = json::array();
  bool all = true;
  std::string first_bad;
  for (int t = 0; t <= max_norm; ++t) {
    std::vector<SphereIndex> ks;
    SphereIndex cur;
    compositions(g.n(), t, cur, ks);
    for (const auto& k : ks) {
      QInt formula = counting::sphere_size(k, g.n(), g.q());
      std::size_t found = wordcore::sphere(g, b, k).size();
      bool match = QInt(found) == formula;
      if (!match && first_bad.empty()) first_bad = "S_(" + shape_text(k) + ")";
      all = all && match;
      rows.push_back({{"k", shape_json(k)}, {"formula", formula.str()}, {"enumerated", std::to_string(found)},
                      {"match", match}});
    }
  }
  json r;
  r["max_norm"] = max_norm;
  r["rows"] = rows;
  r["all_match"] = all;
  s.emit(r, out);
  if (!all) throw CheckFailure{"sphere census", first_bad + " differs from the closed form"};
}

struct MeasureFlags {
  std::string base, target;
  std::vector<int> refine, partition;
  bool via_ball = false;
};

json cylinder_json(const Group& g, const boundary::CylinderSet& c) {
  return {{"base", wordcore::format_word(c.base)},
          {"target", wordcore::format_word(c.target)},
          {"shape", shape_json(c.shape)},
          {"measure", to_string(boundary::cylinder_measure(g, c))}};
}

void cmd_measure(Session& s, const MeasureFlags& f, std::ostream& out) {
  const Group& g = s.group();
  NormalWord base = s.word(f.base, "--base");
  json r;
  std::optional<CheckFailure> fail;
  if (!f.partition.empty()) {
    if (!f.target.empty() || !f.refine.empty()) throw UsageError("--partition: cannot be combined with --target");
    SphereIndex k = s.index(f.partition, "--partition");
    int norm = 0;
    for (int v : k) norm += v;
    auto rep = boundary::partition_check(g, s.ball(static_cast<int>(base.size()) + norm), base, k);
    r["base"] = wordcore::format_word(base);
    r["k"] = shape_json(k);
    r["cylinders"] = rep.cylinders;
    r["formula"] = rep.formula.str();
    r["each"] = to_string(rep.each);
    r["total"] = to_string(rep.total);
    r["distinct"] = rep.distinct;
    r["ok"] = rep.ok();
    if (!rep.ok()) fail = CheckFailure{"partition", "cylinders carry total measure " + to_string(rep.total)};
  } else {
    if (f.target.empty()) throw UsageError("--target or --partition is required for measure");
    auto c = boundary::make_cylinder(g, base, s.word(f.target, "--target"));
    r["cylinder"] = cylinder_json(g, c);
    if (!f.refine.empty()) {
      SphereIndex d = s.index(f.refine, "--refine");
      auto kids = boundary::refine_cylinder(g, c, d);
      Rational sum = 0;
      json rows = json::array();
      for (const auto& k : kids) {
        rows.push_back(cylinder_json(g, k));
        sum += boundary::cylinder_measure(g, k);
      }
      r["refine"] = shape_json(d);
      r["children"] = rows;
      r["children_total"] = to_string(sum);
      if (f.via_ball) {
        int norm = 0;
        for (int v : d) norm += v;
        auto other = boundary::refine_cylinder(g, c, d, s.ball(static_cast<int>(c.target.size()) + norm));
        r["routes_agree"] = other == kids;
        if (other != kids) fail = CheckFailure{"refinement", "word and ball routes disagree"};
      }
    }
  }
  s.emit(r, out);
  if (fail) throw *fail;
}

struct RnFlags {
  std::string x, y, z;
  bool census = false;
  int depth = 2;
};

void cmd_rn(Session& s, const RnFlags& f, std::ostream& out) {
  const Group& g = s.group();
  json r;
  if (f.census) {
    auto c = dynamics::generator_rn_census(g, s.ball(2), f.depth);
    json rows = json::array();
    std::optional<CheckFailure> fail;
    for (const auto& gr : c.generators) {
      rows.push_back({{"generator", "g" + std::to_string(gr.generator.gen)},
                      {"type", gr.type},
                      {"cylinder", wordcore::format_word(gr.cylinder)},
                      {"value", to_string(boundary::rn_value(gr.exponent, g.q()))},
                      {"expected", to_string(boundary::rn_value(gr.expected, g.q()))},
                      {"match", gr.matches()}});
      if (!gr.matches() && !fail) fail = CheckFailure{"generator census", "g" + std::to_string(gr.generator.gen)};
    }
    r["depth"] = f.depth;
    r["generators"] = rows;
    json att = json::array();
    for (auto e : c.attained) att.push_back(to_string(boundary::rn_value(e, g.q())));
    r["attained_values"] = att;
    r["attained_exponents"] = c.attained;
    r["pairs_checked"] = c.pairs_checked;
    s.emit(r, out);
    if (fail) throw *fail;
    return;
  }
  NormalWord x = s.word(f.x, "--x"), y = s.word(f.y, "--y");
  if (f.z.empty()) throw UsageError("--z is required for rn");
  NormalWord z = s.word(f.z, "--z");
  auto m = [&] {
    try {
      return boundary::m_vector(g, x, y, z);
    } catch (const DepthError& e) {
      throw UsageError("--z: " + std::string(e.what()));
    }
  }();
  auto e = boundary::rn_exponent(m);
  r["x"] = wordcore::format_word(x);
  r["y"] = wordcore::format_word(y);
  r["z"] = wordcore::format_word(z);
  r["m"] = m.m;
  r["exponent"] = e;
  r["value"] = to_string(boundary::rn_value(e, g.q()));
  s.emit(r, out);
}

json map_json(const Group& g, const dynamics::PiecewiseMap& m, bool pieces) {
  json r;
  r["x"] = wordcore::format_word(m.x);
  r["y"] = wordcore::format_word(m.y);
  r["levels"] = m.levels;
  r["root_children"] = m.root_children;
  r["K"] = m.K;
  r["pieces"] = m.piece_count;
  r["covered"] = to_string(m.covered);
  r["target_covered"] = to_string(m.target_covered);
  r["expected"] = to_string(m.expected);
  r["sources_disjoint"] = m.sources_disjoint;
  r["targets_disjoint"] = m.targets_disjoint;
  r["movers_ok"] = m.movers_ok;
  r["measure_preserving"] = m.measure_preserving;
  r["identity_movers"] = m.identity_movers;
  r["findings"] = m.findings;
  r["ok"] = m.ok(g.shape(m.x) == g.shape(m.y));
  if (pieces) {
    json rows = json::array();
    for (const auto& p : m.pieces)
      rows.push_back({{"level", p.level},
                      {"source", wordcore::format_word(p.source.target)},
                      {"mover", wordcore::format_word(p.mover)},
                      {"target", wordcore::format_word(p.target.target)},
                      {"measure", to_string(boundary::cylinder_measure(g, p.source))}});
    r["piece_list"] = rows;
  }
  return r;
}

void cmd_phi(Session& s, const std::string& x, const std::string& y, int levels, bool pieces, std::ostream& out) {
  const Group& g = s.group();
  if (levels < 1) throw UsageError("--levels: must be at least 1");
  if (x.empty() || y.empty()) throw UsageError("--x and --y are required for phi");
  NormalWord wx = s.word(x, "--x"), wy = s.word(y, "--y");
  auto m = [&] {
    try {
      return dynamics::phi_construct(g, wx, wy, levels, pieces);
    } catch (const UsageError& e) {
      throw UsageError("--x/--y: " + std::string(e.what()));
    }
  }();
  json r = map_json(g, m, pieces);
  s.emit(r, out);
  if (!r["ok"].get<bool>())
    throw CheckFailure{"phi", m.findings.empty() ? "coverage " + to_string(m.covered) : m.findings.front()};
}

json witnesses_json(const dynamics::WitnessReport& w) {
  json r;
  r["k"] = shape_json(w.k);
  r["levels"] = w.levels;
  r["K"] = w.K;
  r["expected"] = to_string(w.expected);
  json rows = json::array();
  for (const auto& x : w.witnesses)
    rows.push_back({{"x", wordcore::format_word(x.x)},
                    {"y", wordcore::format_word(x.y)},
                    {"pieces", x.pieces},
                    {"covered", to_string(x.covered)},
                    {"ok", x.ok},
                    {"findings", x.findings}});
  r["witnesses"] = rows;
  r["all_ok"] = w.all_ok();
  return r;
}

SphereIndex default_k(const Group& g, const std::vector<int>& k, Session& s) {
  if (!k.empty()) return s.index(k, "--k");
  SphereIndex e(static_cast<std::size_t>(g.n()), 0);
  e[0] = 1;
  return e;
}

void cmd_witnesses(Session& s, const std::vector<int>& kflag, int levels, std::ostream& out) {
  const Group& g = s.group();
  if (levels < 1) throw UsageError("--levels: must be at least 1");
  auto w = dynamics::transitivity_witnesses(g, default_k(g, kflag, s), levels, s.options().threads);
  s.emit(witnesses_json(w), out);
  if (!w.all_ok()) throw CheckFailure{"transitivity witnesses", "some pair failed"};
}

json descriptor_json(const dynamics::RatioSetDescriptor& d) {
  return {{"n", d.n},
          {"q", d.q},
          {"exponents", d.exponents},
          {"gcd", d.gcd},
          {"lambda", to_string(d.lambda)},
          {"ratio_set", d.ratio_set()},
          {"type", "III_" + to_string(d.lambda)}};
}

void cmd_ratio_set(Session& s, std::ostream& out) {
  const auto& o = s.options();
  if (o.n < 1) throw UsageError("--n: must be at least 1");
  if (o.q < 2) throw UsageError("--q: must be at least 2");
  s.emit(descriptor_json(dynamics::ratio_descriptor(o.n, o.q)), out);
}

void cmd_classify(Session& s, const std::vector<int>& kflag, int levels, int depth, std::ostream& out) {
  const auto& o = s.options();
  dynamics::Certificate cert;
  if (o.presentation.empty()) {
    if (o.n < 1) throw UsageError("--n: must be at least 1");
    if (o.q < 2) throw UsageError("--q: must be at least 2");
    cert = dynamics::classify_descriptor(o.n, o.q);
  } else {
    const Group& g = s.group();
    if (levels < 1) throw UsageError("--levels: must be at least 1");
    auto census = dynamics::generator_rn_census(g, s.ball(2), depth);
    auto w = dynamics::transitivity_witnesses(g, default_k(g, kflag, s), levels, o.threads);
    cert = dynamics::classify(census, w);
  }
  json r;
  r["descriptor"] = descriptor_json(cert.descriptor);
  r["descriptor_only"] = cert.descriptor_only;
  json secs = json::array();
  for (const auto& sec : cert.sections)
    secs.push_back({{"name", sec.name}, {"pass", sec.pass}, {"detail", sec.detail},
                    {"finite_evidence", sec.finite_evidence}});
  r["sections"] = secs;
  r["passed"] = cert.passed();
  s.emit(r, out);
  for (const auto& sec : cert.sections)
    if (!sec.pass) throw CheckFailure{sec.name, sec.detail};
}

void cmd_triangles(Session& s, int max_m, std::ostream& out) {
  const Group& g = s.group();
  if (max_m < 1) throw UsageError("--m: must be at least 1");
  if (g.n() != 2) throw UsageError("--presentation: the triangle census needs n = 2");
  const CayleyBall& b = s.ball(max_m);
  json rows = json::array();
  std::optional<CheckFailure> fail;
  for (int m = 1; m <= max_m; ++m) {
    QInt formula = counting::triangle_count(m, 2, g.q());
    QInt found = dynamics::triangle_census(g, b, m);
    rows.push_back({{"m", m}, {"formula", formula.str()}, {"enumerated", found.str()}, {"match", formula == found}});
    if (formula != found && !fail) fail = CheckFailure{"triangle census", "side " + std::to_string(m)};
  }
  json r;
  r["rows"] = rows;
  r["all_match"] = !fail.has_value();
  s.emit(r, out);
  if (fail) throw *fail;
}

void cmd_freeness(Session& s, int max_m, std::ostream& out) {
  const auto& o = s.options();
  if (o.q < 2) throw UsageError("--q: must be at least 2");
  if (max_m < 1) throw UsageError("--max-m: must be at least 1");
  json rows = json::array();
  for (int m = 1; m <= max_m; ++m)
    rows.push_back({{"m", m},
                    {"triangles", counting::triangle_count(m, 2, o.q).str()},
                    {"wall_triangles", counting::wall_triangle_count(m, o.q).str()},
                    {"bound", to_string(counting::freeness_bound(m, o.q))},
                    {"step_ratio", to_string(counting::freeness_step_ratio(m, o.q))}});
  json r;
  r["q"] = o.q;
  r["rows"] = rows;
  s.emit(r, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Triangle-presentation groups of type A~_n and their boundary actions", "atilde"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ATILDE_VERSION);
  Options o;
  std::function<void(Session&)> action;
  std::string command;

  auto presentation = [&](CLI::App* c) { c->add_option("--presentation", o.presentation, "Presentation file"); };
  auto ball = [&](CLI::App* c) {
    c->add_option("--ball", o.ball, "Ball file from `ball build`");
    c->add_option("--radius", o.radius, "Radius of the ball to build when --ball is absent");
    c->add_option("--max-vertices", o.max_vertices, "Vertex budget for ball construction")->capture_default_str();
    c->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  };
  auto out_flag = [&](CLI::App* c) { c->add_option("--out", o.out, "Write the artifact here (manifest beside it)"); };
  auto nq = [&](CLI::App* c) {
    c->add_option("--n", o.n, "Rank")->capture_default_str();
    c->add_option("--q", o.q, "Order")->capture_default_str();
  };
  auto bind = [&](CLI::App* c, std::string name, std::function<void(Session&)> f) {
    c->callback([&command, &action, name = std::move(name), f = std::move(f)] {
      command = name;
      action = f;
    });
  };

  auto* tri = app.add_subcommand("tripres", "Validate or search triangle presentations");
  tri->require_subcommand(1);
  auto* validate = tri->add_subcommand("validate", "Check the five axioms and normal-form uniqueness");
  presentation(validate);
  out_flag(validate);
  bind(validate, "tripres validate", [&](Session& s) { cmd_validate(s, out); });

  SearchFlags sf;
  auto* search = tri->add_subcommand("search", "Backtracking search over PG(n, q)");
  nq(search);
  search->add_option("--seed", o.seed, "0 keeps index order; otherwise shuffles candidates");
  search->add_option("--duality", sf.duality, "sweep | annihilator | index")
      ->check(CLI::IsMember({"sweep", "annihilator", "index"}));
  search->add_option("--node-budget", sf.node_budget, "Search nodes per duality (0: unbounded)");
  search->add_option("--max-dualities", sf.max_dualities, "Pairings tried by the sweep")->capture_default_str();
  out_flag(search);
  bind(search, "tripres search", [&](Session& s) { cmd_search(s, sf, out); });

  auto* ballc = app.add_subcommand("ball", "Cayley balls");
  ballc->require_subcommand(1);
  auto* build = ballc->add_subcommand("build", "Build and save a ball around the identity");
  presentation(build);
  ball(build);
  out_flag(build);
  bind(build, "ball build", [&](Session& s) { cmd_ball(s, out); });

  int max_norm = 0;
  auto* sph = app.add_subcommand("sphere", "Sphere sizes");
  sph->require_subcommand(1);
  auto* census = sph->add_subcommand("census", "Closed form against enumeration for all |k| <= max-norm");
  presentation(census);
  ball(census);
  out_flag(census);
  census->add_option("--max-norm", max_norm, "Largest |k|")->required();
  bind(census, "sphere census", [&](Session& s) { cmd_sphere(s, max_norm, out); });

  MeasureFlags mf;
  auto* meas = app.add_subcommand("measure", "Cylinder measures, refinements and partitions");
  presentation(meas);
  ball(meas);
  out_flag(meas);
  meas->add_option("--base", mf.base, "Base vertex (default: identity)");
  meas->add_option("--target", mf.target, "Cylinder target vertex");
  meas->add_option("--refine", mf.refine, "Refinement step, e.g. 1,0")->delimiter(',');
  meas->add_flag("--via-ball", mf.via_ball, "Also refine through the ball and compare");
  meas->add_option("--partition", mf.partition, "Check the partition by S_k(base), e.g. 1,1")->delimiter(',');
  bind(meas, "measure", [&](Session& s) { cmd_measure(s, mf, out); });

  RnFlags rf;
  auto* rn = app.add_subcommand("rn", "Radon-Nikodym derivatives");
  presentation(rn);
  ball(rn);
  out_flag(rn);
  rn->add_option("--x", rf.x, "First vertex (default: identity)");
  rn->add_option("--y", rf.y, "Second vertex");
  rn->add_option("--z", rf.z, "Cylinder Omega_x^z on which to evaluate");
  rn->add_flag("--census", rf.census, "Every generator on a deep cylinder, plus the radius-2 scan");
  rn->add_option("--depth", rf.depth, "Census cylinder depth")->capture_default_str();
  bind(rn, "rn", [&](Session& s) { cmd_rn(s, rf, out); });

  std::string px, py;
  int levels = 3;
  bool keep = false;
  auto* phi = app.add_subcommand("phi", "Piecewise map from Omega_1^x onto Omega_1^y");
  presentation(phi);
  out_flag(phi);
  phi->add_option("--x", px, "Source vertex")->required();
  phi->add_option("--y", py, "Target vertex")->required();
  phi->add_option("--levels", levels, "Refinement rounds")->capture_default_str();
  phi->add_flag("--pieces", keep, "List every piece");
  bind(phi, "phi", [&](Session& s) { cmd_phi(s, px, py, levels, keep, out); });

  std::vector<int> kflag;
  auto* wit = app.add_subcommand("witnesses", "phi for every ordered pair of S_k");
  presentation(wit);
  out_flag(wit);
  wit->add_option("--k", kflag, "Sphere index (default: e_1)")->delimiter(',');
  wit->add_option("--levels", levels, "Refinement rounds")->capture_default_str();
  wit->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  bind(wit, "witnesses", [&](Session& s) { cmd_witnesses(s, kflag, levels, out); });

  auto* rs = app.add_subcommand("ratio-set", "Ratio set and type from n and q");
  nq(rs);
  out_flag(rs);
  bind(rs, "ratio-set", [&](Session& s) { cmd_ratio_set(s, out); });

  int depth = 2;
  int class_levels = 2;
  auto* cls = app.add_subcommand("classify", "Type certificate (descriptor only without --presentation)");
  nq(cls);
  presentation(cls);
  ball(cls);
  out_flag(cls);
  cls->add_option("--k", kflag, "Witness sphere index (default: e_1)")->delimiter(',');
  cls->add_option("--levels", class_levels, "Witness refinement rounds")->capture_default_str();
  cls->add_option("--depth", depth, "Census cylinder depth")->capture_default_str();
  bind(cls, "classify", [&](Session& s) { cmd_classify(s, kflag, class_levels, depth, out); });

  int max_m = 2;
  auto* tr = app.add_subcommand("triangles", "Apex-1 triangle census against the closed form (n = 2)");
  presentation(tr);
  ball(tr);
  out_flag(tr);
  tr->add_option("--m", max_m, "Largest side")->capture_default_str();
  bind(tr, "triangles", [&](Session& s) { cmd_triangles(s, max_m, out); });

  int free_m = 5;
  auto* fb = app.add_subcommand("freeness-bound", "Wall-triangle bound and its step ratio (n = 2)");
  fb->add_option("--q", o.q, "Order")->capture_default_str();
  fb->add_option("--max-m", free_m, "Largest side")->capture_default_str();
  out_flag(fb);
  bind(fb, "freeness-bound", [&](Session& s) { cmd_freeness(s, free_m, out); });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << ATILDE_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    Session session(o, command, args);
    action(session);
    return kOk;
  } catch (const CheckFailure& f) {
    err << "check failed [" << f.section << "]" << (f.detail.empty() ? "" : ": " + f.detail) << "\n";
    return kCheckFailed;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const RangeError& e) {
    err << "usage error: " << e.what() << " (raise --radius)\n";
  } catch (const DepthError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const BudgetError& e) {
    err << "check failed [ball]: " << e.what() << " (--max-vertices " << o.max_vertices << ")\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "check failed [consistency]: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace atilde::cli
