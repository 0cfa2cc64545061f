#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "atilde/boundary.hpp"
#include "atilde/dynamics.hpp"
#include "atilde/tripres.hpp"
#include "atilde/wordcore.hpp"

using namespace atilde;

namespace {

const wordcore::Group& group(int q) {
  static std::unique_ptr<wordcore::Group> g2, g3;
  auto& slot = q == 2 ? g2 : g3;
  if (!slot) {
    auto sw = tripres::sweep_dualities(pgeom::Geometry::vector_space(2, q), {}, 100000);
    slot = std::make_unique<wordcore::Group>(*sw.presentation);
  }
  return *slot;
}

std::vector<std::vector<wordcore::Letter>> random_words(const wordcore::Group& g, std::size_t len, std::size_t count) {
  std::mt19937_64 rng(42);
  std::vector<std::vector<wordcore::Letter>> out(count, std::vector<wordcore::Letter>(len));
  for (auto& w : out)
    for (auto& l : w) l = wordcore::Letter{static_cast<std::uint16_t>(rng() % g.generator_count())};
  return out;
}

void BM_Reduce(benchmark::State& state) {
  const auto& g = group(static_cast<int>(state.range(0)));
  auto words = random_words(g, static_cast<std::size_t>(state.range(1)), 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(g.reduce(words[i++ % words.size()]));
}
BENCHMARK(BM_Reduce)->Args({2, 8})->Args({2, 32})->Args({3, 8})->Args({3, 32});

void BM_MultiplyLetter(benchmark::State& state) {
  const auto& g = group(static_cast<int>(state.range(0)));
  std::vector<wordcore::NormalWord> xs;
  for (const auto& w : random_words(g, 12, 256)) xs.push_back(g.reduce(w));
  std::mt19937_64 rng(1);
  std::size_t i = 0;
  for (auto _ : state) {
    wordcore::Letter l{static_cast<std::uint16_t>(rng() % g.generator_count())};
    benchmark::DoNotOptimize(g.multiply(xs[i++ % xs.size()], l));
  }
}
BENCHMARK(BM_MultiplyLetter)->Arg(2)->Arg(3);

void BM_BuildBall(benchmark::State& state) {
  const auto& g = group(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto ball = wordcore::build_ball(g, static_cast<int>(state.range(1)), 10'000'000,
                                     static_cast<unsigned>(state.range(2)));
    state.counters["vertices"] = static_cast<double>(ball.size());
  }
}
BENCHMARK(BM_BuildBall)->Args({2, 4, 1})->Args({2, 5, 1})->Args({2, 5, 4})->Args({3, 3, 1})->Unit(benchmark::kMillisecond);

void BM_MVector(benchmark::State& state) {
  const auto& g = group(2);
  auto ball = wordcore::build_ball(g, 2);
  auto z = dynamics::deepen(g, ball.vertices[7], SphereIndex{6, 6});
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& y = ball.vertices[i++ % ball.size()];
    benchmark::DoNotOptimize(boundary::m_vector(g, g.identity(), y, z));
  }
}
BENCHMARK(BM_MVector);

void BM_Phi(benchmark::State& state) {
  const auto& g = group(2);
  auto s = g.enumerate_shape(SphereIndex{1, 0});
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::phi_construct(g, s[0], s[1], static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Phi)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
