// Binary ball file, little-endian:
//   magic "ATBALL01", u32 version, u32 q, u32 n, u32 radius,
//   u64 presentation hash, u32 generators, u64 vertices,
//   per vertex: u16 length, length x u16 letters,
//   vertices x generators x i32 adjacency (-1 outside the ball).

#include <bit>
#include <cstring>
#include <fstream>

#include "atilde/errors.hpp"
#include "atilde/wordcore.hpp"

namespace atilde::wordcore {

namespace {

static_assert(std::endian::native == std::endian::little, "ball files assume a little-endian host");

constexpr char kMagic[8] = {'A', 'T', 'B', 'A', 'L', 'L', '0', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::string& path, const char* field) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw ParseError(path + ": truncated while reading " + field);
  return v;
}

}  // namespace

void save_ball(const CayleyBall& ball, const Group& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw UsageError("cannot open " + path + " for writing");
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.q()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ball.radius));
  put<std::uint64_t>(os, tripres::presentation_hash(g.presentation()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(ball.generators));
  put<std::uint64_t>(os, ball.vertices.size());
  for (const auto& w : ball.vertices) {
    put<std::uint16_t>(os, static_cast<std::uint16_t>(w.size()));
    for (Letter l : w.letters()) put<std::uint16_t>(os, l.gen);
  }
  os.write(reinterpret_cast<const char*>(ball.adjacency.data()),
           static_cast<std::streamsize>(ball.adjacency.size() * sizeof(std::int32_t)));
  if (!os) throw UsageError("write to " + path + " failed");
}

CayleyBall load_ball(const Group& g, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open ball file '" + path + "'");
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ParseError(path + ": not a ball file");
  auto version = get<std::uint32_t>(is, path, "version");
  if (version != kVersion) throw ParseError(path + ": unsupported version " + std::to_string(version));
  auto q = get<std::uint32_t>(is, path, "q");
  auto n = get<std::uint32_t>(is, path, "n");
  auto radius = get<std::uint32_t>(is, path, "radius");
  auto hash = get<std::uint64_t>(is, path, "presentation hash");
  auto gens = get<std::uint32_t>(is, path, "generators");
  auto count = get<std::uint64_t>(is, path, "vertices");
  if (static_cast<int>(q) != g.q() || static_cast<int>(n) != g.n())
    throw ParseError(path + ": ball is for n=" + std::to_string(n) + ", q=" + std::to_string(q));
  if (hash != tripres::presentation_hash(g.presentation()))
    throw ParseError(path + ": ball was built from presentation " + tripres::hash_hex(hash));
  if (gens != g.generator_count()) throw ParseError(path + ": generator count mismatch");

  CayleyBall ball;
  ball.radius = static_cast<int>(radius);
  ball.generators = gens;
  ball.vertices.reserve(count);
  ball.layer_offsets.assign(1, 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto len = get<std::uint16_t>(is, path, "word length");
    if (len > radius) throw ParseError(path + ": vertex " + std::to_string(i) + " lies outside the radius");
    std::vector<Letter> letters(len);
    for (auto& l : letters) l.gen = get<std::uint16_t>(is, path, "letter");
    try {
      ball.vertices.push_back(g.assume_normal(std::move(letters)));
    } catch (const UsageError& e) {
      throw ParseError(path + ": vertex " + std::to_string(i) + ": " + e.what());
    }
    if (i > 0 && !(ball.vertices[i - 1] < ball.vertices[i]))
      throw ParseError(path + ": vertex table is not in canonical order at " + std::to_string(i));
    while (ball.layer_offsets.size() <= len) ball.layer_offsets.push_back(i);
  }
  while (ball.layer_offsets.size() <= radius + 1u) ball.layer_offsets.push_back(count);
  ball.adjacency.resize(count * gens);
  if (!is.read(reinterpret_cast<char*>(ball.adjacency.data()),
               static_cast<std::streamsize>(ball.adjacency.size() * sizeof(std::int32_t))))
    throw ParseError(path + ": truncated adjacency table");
  for (auto a : ball.adjacency)
    if (a < -1 || a >= static_cast<std::int64_t>(count)) throw ParseError(path + ": adjacency entry out of range");
  ball.index.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) ball.index.emplace(ball.vertices[i], i);
  return ball;
}

}  // namespace atilde::wordcore
