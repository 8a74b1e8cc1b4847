#include <catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <random>
#include <set>

#include "support.hpp"
#include "tdri/genbridge/pose.hpp"
#include "tdri/genbridge/toy.hpp"

using namespace tdri;
using namespace tdri::genbridge;
using Catch::Matchers::WithinAbs;

namespace {

SessionConfig quiet_config() {
  SessionConfig c;
  c.toy.noise_scale = 0.0;
  return c;
}

GeneratorRequest request_for(const Prompt& p, std::uint64_t seed = 7) {
  GeneratorRequest r;
  r.prompt = p;
  r.seed = seed;
  return r;
}

Pose one_point(double x, double y) { return Pose{{{x, y}}, std::nullopt, false}; }

}  // namespace

TEST_CASE("generate is deterministic in the request") {
  const Backends b = make_toy_backends(SessionConfig{});
  const Prompt p = testing::prompt_with(b, {{Aspect::Content, "a parrot"}, {Aspect::Color, "red"}});
  const auto one = b.generator->generate(request_for(p, 11));
  const auto two = b.generator->generate(request_for(p, 11));
  CHECK(one == two);
  CHECK(is_unit(one.descriptor));
  CHECK(one.provenance.seed == 11);
  CHECK(one.id.empty());

  const auto other = b.generator->generate(request_for(p, 12));
  CHECK_FALSE(same(one.descriptor, other.descriptor));
}

TEST_CASE("noise-free single aspect descriptor is that aspect's embedding") {
  const Backends b = make_toy_backends(quiet_config());
  const Prompt p = testing::prompt_with(b, {{Aspect::Content, "a dog"}});
  const Vector d = b.generator->generate(request_for(p)).descriptor;
  const Vector e = b.embedder->embed("a dog");
  CHECK((d - e).norm() < 1e-12);
}

TEST_CASE("noise-free mix matches an independent weighted sum") {
  const SessionConfig c = quiet_config();
  const Backends b = make_toy_backends(c);
  Prompt p = testing::prompt_with(b, {{Aspect::Content, "a cat"}, {Aspect::Style, "watercolor"}});
  p.aspect_weights[index(Aspect::Content)] = 2.0;
  p.aspect_weights[index(Aspect::Style)] = 0.5;

  GeneratorRequest r = request_for(p);
  const Vector prior = testing::random_unit(3);
  r.context = SessionContext{}.with(p, prior);

  const Vector expect = normalized(2.0 * b.embedder->embed("a cat") + 0.5 * b.embedder->embed("watercolor") +
                                   c.toy.context_weight * r.context.context_vector);
  CHECK((b.generator->generate(r).descriptor - expect).norm() < 1e-12);
}

TEST_CASE("seeded noise stays close to the clean descriptor") {
  const Backends noisy = make_toy_backends(SessionConfig{});
  const Backends clean = make_toy_backends(quiet_config());
  const Prompt p = testing::prompt_with(noisy, {{Aspect::Content, "a boat"}, {Aspect::Background, "sea"}});
  const Vector ref = clean.generator->generate(request_for(p)).descriptor;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    CHECK(cosine(noisy.generator->generate(request_for(p, seed)).descriptor, ref) >= 0.9);
}

TEST_CASE("all-zero weights are rejected") {
  const Backends b = make_toy_backends(SessionConfig{});
  Prompt p = testing::prompt_with(b, {{Aspect::Content, "a dog"}});
  p.aspect_weights[index(Aspect::Content)] = 0.0;
  try {
    b.generator->generate(request_for(p));
    FAIL("expected InvalidPrompt");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPrompt);
  }
}

TEST_CASE("smooth path agrees with noise-free generate") {
  const Backends b = make_toy_backends(quiet_config());
  const Prompt p = testing::prompt_with(b, {{Aspect::Content, "a dog"}, {Aspect::Color, "blue"}});
  const GeneratorRequest r = request_for(p);
  const ImageFn f = b.generator->smooth_path(r);
  CHECK((f(p.aspect_weights) - b.generator->generate(r).descriptor).norm() < 1e-12);

  AspectArray<double> w = p.aspect_weights;
  w[index(Aspect::Color)] = 3.0;
  Prompt q = p;
  q.aspect_weights = w;
  CHECK((f(w) - b.generator->generate(request_for(q)).descriptor).norm() < 1e-12);
}

TEST_CASE("pose encoding is a deterministic unit vector") {
  const Pose sm = smooth_pose(one_point(0.3, 0.6), 2.0, 64, 64);
  const Vector a = pose_encoding(*sm.heatmap, 64, 5);
  CHECK(is_unit(a));
  CHECK(same(a, pose_encoding(*sm.heatmap, 64, 5)));
  const Heatmap empty{16, 16, std::vector<double>(256, 0.0)};
  CHECK(pose_encoding(empty, 64, 5).norm() == 0.0);
}

TEST_CASE("toy pose estimate has K keypoints inside the unit square") {
  const SessionConfig c;
  const Backends b = make_toy_backends(c);
  ImageArtifact img;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    img.descriptor = testing::random_unit(s);
    const Pose p = b.pose_estimator->estimate(img);
    REQUIRE(p.keypoints.size() == static_cast<std::size_t>(c.toy.pose_keypoints));
    for (const Keypoint& kp : p.keypoints) {
      CHECK(kp.x >= 0.0);
      CHECK(kp.x <= 1.0);
      CHECK(kp.y >= 0.0);
      CHECK(kp.y <= 1.0);
    }
    if (s < 5) CHECK(p == b.pose_estimator->estimate(img));
  }
}

TEST_CASE("single centered keypoint") {
  const Pose p = smooth_pose(one_point(0.5, 0.5), 2.0, 64, 64);
  REQUIRE(p.heatmap);
  CHECK(p.smoothed);
  CHECK(p.keypoints == one_point(0.5, 0.5).keypoints);
  CHECK_THAT(p.heatmap->total(), WithinAbs(1.0, 1e-9));

  int best = 0;
  for (int i = 1; i < 64 * 64; ++i)
    if (p.heatmap->cells[i] > p.heatmap->cells[best]) best = i;
  CHECK(best / 64 == 32);
  CHECK(best % 64 == 32);
}

TEST_CASE("bump shape follows the Gaussian") {
  const double sigma = 2.0;
  const Heatmap h = keypoint_bump({0.5, 0.5}, sigma, 64, 64);
  const double peak = h.at(32, 32);
  for (auto [dr, dc] : {std::pair{1, 0}, {0, 2}, {3, 3}, {-2, 1}}) {
    const double ratio = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
    CHECK_THAT(h.at(32 + dr, 32 + dc) / peak, WithinAbs(ratio, 1e-12));
  }
  CHECK(h.at(32, 32 + 7) == 0.0);
}

TEST_CASE("narrow sigma concentrates mass") {
  const Pose p = smooth_pose(one_point(0.37, 0.61), 0.5, 64, 64);
  const double px = 0.37 * 64, py = 0.61 * 64;
  double near = 0.0;
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c)
      if (std::hypot(r - py, c - px) <= 2.0) near += p.heatmap->at(r, c);
  CHECK(near >= 0.99);
}

TEST_CASE("mass adds across keypoints") {
  Pose two{{{0.2, 0.2}, {0.8, 0.7}}, std::nullopt, false};
  CHECK_THAT(smooth_pose(two, 2.0, 64, 64).heatmap->total(), WithinAbs(2.0, 1e-9));

  Pose stacked{{{0.5, 0.5}, {0.5, 0.5}}, std::nullopt, false};
  const Pose sm = smooth_pose(stacked, 2.0, 32, 32);
  CHECK_THAT(sm.heatmap->total(), WithinAbs(2.0, 1e-9));
}

TEST_CASE("corner keypoints keep unit mass") {
  for (auto [x, y] : {std::pair{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}}) {
    const Pose p = smooth_pose(one_point(x, y), 2.0, 16, 24);
    CHECK_THAT(p.heatmap->total(), WithinAbs(1.0, 1e-9));
    const auto [row, col] = keypoint_cell({x, y}, 16, 24);
    CHECK(row >= 0);
    CHECK(row < 16);
    CHECK(col >= 0);
    CHECK(col < 24);
  }
}

TEST_CASE("random poses conserve mass and peak at the keypoint") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const Pose p = smooth_pose(one_point(u(rng), u(rng)), 2.0, 64, 64);
    REQUIRE(std::abs(p.heatmap->total() - 1.0) < 1e-6);
    int best = 0;
    for (int i = 1; i < 64 * 64; ++i)
      if (p.heatmap->cells[i] > p.heatmap->cells[best]) best = i;
    const auto [row, col] = keypoint_cell(p.keypoints[0], 64, 64);
    REQUIRE(std::abs(best / 64 - row) <= 1);
    REQUIRE(std::abs(best % 64 - col) <= 1);
  }
}

TEST_CASE("smooth_pose rejects bad inputs") {
  auto code_of = [](auto&& f) -> std::optional<ErrorCode> {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  CHECK(code_of([] { smooth_pose(one_point(0.5, 0.5), 0.0, 64, 64); }) == ErrorCode::InvalidSigma);
  CHECK(code_of([] { smooth_pose(one_point(0.5, 0.5), -1.0, 64, 64); }) == ErrorCode::InvalidSigma);
  CHECK(code_of([] { smooth_pose(one_point(0.5, 0.5), NAN, 64, 64); }) == ErrorCode::InvalidSigma);
  CHECK(code_of([] { smooth_pose(one_point(0.5, 0.5), 2.0, 7, 64); }) == ErrorCode::InvalidGrid);
  CHECK(code_of([] { smooth_pose(one_point(0.5, 0.5), 2.0, 64, 4); }) == ErrorCode::InvalidGrid);
  CHECK(code_of([] { smooth_pose(one_point(1.2, 0.5), 2.0, 64, 64); }) == ErrorCode::InvalidPose);
  CHECK(code_of([] { smooth_pose(Pose{}, 2.0, 64, 64); }) == ErrorCode::InvalidPose);
}

TEST_CASE("captioner returns one caption per aspect") {
  const Backends b = make_toy_backends(SessionConfig{});
  ImageArtifact img;
  img.descriptor = testing::random_unit(19);
  const AspectCaptionSet set = b.captioner->extract(img);
  for (Aspect a : kAllAspects) {
    CHECK(set[a].aspect == a);
    CHECK(is_unit(set[a].embedding));
    CHECK_FALSE(set[a].text.empty());
  }
  CHECK_NOTHROW(tdri::validate(set));
  CHECK(set == b.captioner->extract(img));
}

TEST_CASE("captions track the prompt aspect by aspect") {
  const Backends b = make_toy_backends(SessionConfig{});
  const Prompt p = testing::prompt_with(b, {{Aspect::Content, "a parrot"},
                                            {Aspect::Color, "red"},
                                            {Aspect::Background, "a forest"}});
  AspectArray<double> total{};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto set = b.captioner->extract(b.generator->generate(request_for(p, seed)));
    for (Aspect a : p.active_aspects())
      total[index(a)] += cosine(set[a].embedding, b.embedder->embed(p.aspect_texts[index(a)]));
  }
  for (Aspect a : p.active_aspects()) CHECK(total[index(a)] / 200.0 > 0.0);
}

TEST_CASE("captioner rejects a wrong-sized descriptor") {
  const Backends b = make_toy_backends(SessionConfig{});
  ImageArtifact img;
  img.descriptor = Vector::Ones(10).normalized();
  CHECK_THROWS_AS(b.captioner->extract(img), Error);
}
