#include <benchmark/benchmark.h>

#include <random>

#include "tdri/adapt/ae.hpp"
#include "tdri/adapt/dpo.hpp"
#include "tdri/core/protocol.hpp"
#include "tdri/core/rng.hpp"
#include "tdri/genbridge/pose.hpp"
#include "tdri/reflect/reflect.hpp"

using namespace tdri;

namespace {

const Backends& toy() {
  static const Backends b = make_toy_backends(SessionConfig{});
  return b;
}

void BM_Embed(benchmark::State& state) {
  const auto& e = *toy().embedder;
  for (auto _ : state) benchmark::DoNotOptimize(e.embed("a red parrot in a forest, watercolor style"));
}
BENCHMARK(BM_Embed);

void BM_Round(benchmark::State& state) {
  const Protocol p(toy());
  const Session base = p.advance(p.advance(make_session("b", SessionConfig{}), UserMessage{"a red parrot"}), Continue{});
  for (auto _ : state) {
    Session s = p.advance(base, UserMessage{"make it blue"});
    benchmark::DoNotOptimize(p.advance(s, Continue{}));
  }
}
BENCHMARK(BM_Round);

void BM_SmoothPose(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Pose pose;
  for (int k = 0; k < 17; ++k) pose.keypoints.push_back({u(rng), u(rng)});
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(genbridge::smooth_pose(pose, 2.0, side, side));
}
BENCHMARK(BM_SmoothPose)->Arg(64)->Arg(256);

void BM_DpoUpdate(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  std::vector<PreferencePair> pairs;
  for (std::uint64_t i = 0; i < 40; ++i) {
    PreferencePair p;
    p.state_embedding = random_unit_vector(3 * i, d);
    p.winner_descriptor = random_unit_vector(3 * i + 1, d);
    p.loser_descriptor = random_unit_vector(3 * i + 2, d);
    pairs.push_back(std::move(p));
  }
  const PolicyParams theta = PolicyParams::zero(d);
  for (auto _ : state) benchmark::DoNotOptimize(adapt::dpo_update(theta, pairs, 3, 40));
}
BENCHMARK(BM_DpoUpdate)->Arg(64)->Arg(512);

void BM_Consistency(benchmark::State& state) {
  const AspectArray<std::optional<double>> k = {0.9, 0.4, std::nullopt, 0.7, std::nullopt, 0.2, 0.8};
  const AspectArray<double> nu = {1, 2, 1, 1, 1, 0.5, 1};
  for (auto _ : state) benchmark::DoNotOptimize(reflect::consistency(k, nu, 0.3));
}
BENCHMARK(BM_Consistency);

void BM_AeRefine(benchmark::State& state) {
  const Backends& b = toy();
  const Prompt p = b.summarizer->summarize({{}, "a fox, desert background, painting style", SessionConfig{}});
  genbridge::GeneratorRequest req;
  req.prompt = p;
  const ImageArtifact img = b.generator->generate(req);
  for (auto _ : state)
    benchmark::DoNotOptimize(adapt::ae_refine(p, img, req, *b.generator, *b.embedder, {1.01, 0.5}));
}
BENCHMARK(BM_AeRefine);

}  // namespace

BENCHMARK_MAIN();
