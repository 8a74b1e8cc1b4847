#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "support.hpp"
#include "tdri/harness/batch.hpp"
#include "tdri/harness/scenario.hpp"
#include "tdri/harness/simulated_user.hpp"
#include "tdri/harness/sweep.hpp"

using namespace tdri;
using namespace tdri::harness;
using Catch::Matchers::WithinAbs;

namespace {

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string data_path(const char* name) { return std::string(TDRI_TEST_DATA_DIR) + "/" + name; }

std::vector<std::uint64_t> seeds(std::size_t n, std::uint64_t first = 1) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), first);
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class SecondRoundOutage final : public genbridge::Generator {
 public:
  explicit SecondRoundOutage(std::shared_ptr<const genbridge::Generator> inner) : inner_(std::move(inner)) {}
  ImageArtifact generate(const genbridge::GeneratorRequest& r) const override {
    if (r.prompt.round == 2) throw Error(ErrorCode::BackendUnavailable, "generator offline");
    return inner_->generate(r);
  }
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<const genbridge::Generator> inner_;
};

constexpr const char* kParrot = R"({
  "name": "parrot",
  "strategy": "RandomAspect",
  "patience": 6,
  "temperature": 0.1,
  "slack": 2,
  "config": {"ambiguity_threshold": 0.4, "toy.noise_scale": 0.02},
  "targets": [{"opening": "a parrot", "aspects": {"Content": ["parrot"], "Color": ["red"]}}]
})";

}  // namespace

TEST_CASE("scenario with explicit targets") {
  const Scenario s = parse_scenario(kParrot);
  CHECK(s.name == "parrot");
  CHECK(s.strategy == EditStrategy::RandomAspect);
  CHECK(s.patience == 6);
  CHECK(s.slack == 2);
  CHECK(s.config.ambiguity_threshold == 0.4);
  CHECK(s.config.toy.noise_scale == 0.02);
  REQUIRE(s.targets.size() == 1);
  CHECK(s.targets[0].opening == "a parrot");
  CHECK(s.targets[0].tokens[index(Aspect::Color)] == std::vector<std::string>{"red"});
  CHECK(s.targets[0].aspects() == std::vector<Aspect>{Aspect::Content, Aspect::Color});
  CHECK_FALSE(s.random_targets);
}

TEST_CASE("scenario file with random targets") {
  const Scenario s = load_scenario(data_path("random_targets.json"));
  REQUIRE(s.random_targets);
  CHECK(s.random_targets->extra_aspects == 4);
  CHECK(s.strategy == EditStrategy::WorstAspect);
  const TargetSpec a = target_for(s, d2p::Lexicon::builtin(), 0, 7);
  const TargetSpec b = target_for(s, d2p::Lexicon::builtin(), 5, 7);
  CHECK(a.tokens == b.tokens);
  CHECK(a.aspects().size() == 5);
  CHECK(a.aspects().front() == Aspect::Content);
  for (Aspect asp : a.aspects())
    for (const std::string& t : a.tokens[index(asp)]) CHECK_FALSE(is_template_word(asp, t));
}

TEST_CASE("bad scenarios") {
  for (const char* text : {"", "   \n", "[]", "{not json", R"({"name": "x"})",
                           R"({"strategy": "Greedy", "random_targets": {}})",
                           R"({"patience": 0, "random_targets": {}})",
                           R"({"config": {"ambiguity_threshold": 2.0}, "random_targets": {}})",
                           R"({"config": {"no_such_key": 1}, "random_targets": {}})",
                           R"({"targets": [{"aspects": {"Color": ["red"]}}]})",
                           R"({"targets": [{"aspects": {"Content": ["red"]}}]})",
                           R"({"targets": [{"aspects": {"Hue": ["red"]}}]})",
                           R"({"random_targets": {"extra_aspects": 9}})"}) {
    INFO(text);
    CHECK(code_of([&] { parse_scenario(text); }) == ErrorCode::BadScenario);
  }
  CHECK(code_of([] { load_scenario("/nonexistent/scenario.json"); }) == ErrorCode::BadScenario);
}

TEST_CASE("edit messages follow the per-aspect templates") {
  CHECK(render_edit(Aspect::Content, {"fox"}) == "a fox");
  CHECK(render_edit(Aspect::Color, {"red", "blue"}) == "make it red blue");
  CHECK(render_edit(Aspect::Background, {"desert"}) == "desert background");
  CHECK(render_edit(Aspect::Style, {"cartoon"}) == "cartoon style");
  CHECK(render_edit(Aspect::Perspective, {"aerial"}) == "aerial view");
  CHECK(render_edit(Aspect::Others, {"lanterns"}) == "with lanterns");
}

TEST_CASE("simulated user accepts the target itself") {
  const Scenario s = parse_scenario(kParrot);
  const Backends b = make_toy_backends(s.config);
  const SimulatedUser user = make_user(s.targets[0], b, s);
  CHECK(is_unit(user.target_descriptor));
  CHECK_THAT(alignment(user, user.target_descriptor), WithinAbs(1.0, 1e-12));

  Session session = make_session("t", s.config);
  CHECK(code_of([&] { simulate_feedback(user, session, b, 1); }) == ErrorCode::NoImages);

  ImageArtifact img;
  img.descriptor = user.target_descriptor;
  session.images.push_back(img);
  CHECK(simulate_feedback(user, session, b, 1) == kAcceptSentinel);
}

TEST_CASE("simulated feedback is deterministic") {
  const Scenario s = load_scenario(data_path("random_targets.json"));
  const Backends b = make_toy_backends(s.config);
  const Protocol p(b);
  const SimulatedUser user = make_user(target_for(s, d2p::Lexicon::builtin(), 0, 3), b, s);
  const Session session = testing::run_round(p, make_session("t", s.config), user.target.opening);
  const std::string first = simulate_feedback(user, session, b, 11);
  CHECK(first == simulate_feedback(user, session, b, 11));
  CHECK(first != kAcceptSentinel);
  CHECK_FALSE(first.empty());
}

TEST_CASE("closed loop rarely loses ground") {
  const Scenario s = load_scenario(data_path("random_targets.json"));
  const RunReport r = run_batch(s, 4, seeds(200));
  CHECK(r.failures.empty());
  CHECK(nondecreasing_fraction(r) >= 0.90);
}

TEST_CASE("batch report shape and determinism") {
  const Scenario s = load_scenario(data_path("random_targets.json"));
  const RunReport a = run_batch(s, 3, seeds(12), {1});
  const RunReport b = run_batch(s, 3, seeds(12), {4});
  REQUIRE(a.rows.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.rows[i].round == i + 1);
    CHECK(a.rows[i].mean_alignment == b.rows[i].mean_alignment);
    CHECK(a.rows[i].std_alignment >= 0.0);
  }
  REQUIRE(a.sessions.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(a.sessions[i].seed == i + 1);
    CHECK(a.sessions[i].messages == b.sessions[i].messages);
    CHECK(a.sessions[i].alignment == b.sessions[i].alignment);
  }
  CHECK(code_of([&] { run_batch(s, 0, seeds(2)); }) == ErrorCode::BadScenario);
  CHECK(code_of([&] { run_batch(s, 2, {}); }) == ErrorCode::BadScenario);

  const auto dir = std::filesystem::temp_directory_path() / "tdri-harness-report";
  std::filesystem::remove_all(dir);
  write_report(a, dir);
  const std::string csv = slurp(dir / "rounds.csv");
  CHECK(csv.rfind("round,sessions,mean_alignment", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(slurp(dir / "report.json").find("\"failures\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("session failures are listed, not fatal") {
  Scenario s = load_scenario(data_path("random_targets.json"));
  s.config.max_rounds = 2;
  const RunReport r = run_batch(s, 4, seeds(10));
  CHECK(r.rows.size() == 4);
  CHECK(r.rows[0].sessions == 10);
  CHECK_FALSE(r.failures.empty());
  for (const SessionFailure& f : r.failures) {
    CHECK(f.code == "IllegalTransition");
    CHECK(f.round == 3);
  }

  const Backends good = make_toy_backends(s.config);
  Backends broken = good;
  broken.generator = std::make_shared<SecondRoundOutage>(good.generator);
  const SessionTrace t = run_session(s, broken, 3, 0, 5);
  REQUIRE(t.failure);
  CHECK(t.failure->code == "BackendUnavailable");
  CHECK(t.failure->round == 2);
  CHECK(t.alignment.size() == 1);
}

TEST_CASE("corpus parsing") {
  const auto items = parse_corpus("# header\n\na dog\na cat | make it red\n");
  REQUIRE(items.size() == 2);
  CHECK(items[1].turns == std::vector<std::string>{"a cat", "make it red"});
  CHECK(code_of([] { parse_corpus("# only comments\n\n"); }) == ErrorCode::EmptyCorpus);
  CHECK(load_corpus(data_path("ae_corpus_single.txt")).size() == 500);
  CHECK(load_corpus(data_path("ae_corpus_multi.txt")).size() == 500);
}

TEST_CASE("sweep on hand-built scores") {
  const std::vector<ScoredItem> one = {{0.75, 0.9}};
  const auto rows = sweep_thresholds({0.74, 0.76}, one);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].trigger_frequency == 0.0);
  CHECK(rows[0].mean_final_sim == 0.75);
  CHECK(rows[1].trigger_frequency == 1.0);
  CHECK(rows[1].mean_final_sim == 0.9);

  const std::vector<ScoredItem> many = {{0.6, 0.7}, {0.7, 0.8}, {0.8, 0.85}};
  CHECK(sweep_thresholds({0.5}, many)[0].trigger_frequency == 0.0);
  CHECK(sweep_thresholds({0.9}, many)[0].trigger_frequency == 1.0);
  CHECK_THAT(sweep_thresholds({0.75}, many)[0].trigger_frequency, WithinAbs(2.0 / 3.0, 1e-12));

  CHECK(code_of([] { sweep_thresholds({0.7}, std::vector<ScoredItem>{}); }) == ErrorCode::EmptyCorpus);
  for (double k : {0.0, 1.0, -0.2, 1.5})
    CHECK(code_of([&] { sweep_thresholds({k}, many); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("sweep over the committed corpora") {
  const std::vector<double> ks = {0.80, 0.75, 0.73, 0.70, 0.68, 0.66};
  const SessionConfig c;
  for (const char* name : {"ae_corpus_single.txt", "ae_corpus_multi.txt"}) {
    INFO(name);
    const auto scored = score_corpus(load_corpus(data_path(name)), c);
    REQUIRE(scored.size() == 500);
    double lo = 1.0, hi = 0.0;
    for (const ScoredItem& s : scored) {
      lo = std::min(lo, s.sim);
      hi = std::max(hi, s.sim);
    }
    const auto rows = sweep_thresholds(ks, scored);
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i].trigger_frequency <= rows[i - 1].trigger_frequency);
    CHECK(sweep_thresholds({std::max(0.01, lo - 1e-9)}, scored)[0].trigger_frequency == 0.0);
    if (hi < 0.999) CHECK(sweep_thresholds({hi + 1e-9}, scored)[0].trigger_frequency == 1.0);
  }

  const auto single = score_corpus(load_corpus(data_path("ae_corpus_single.txt")), c);
  CHECK(sweep_thresholds({0.80}, single)[0].trigger_frequency == 0.0);

  const auto dir = std::filesystem::temp_directory_path() / "tdri-harness-sweep";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_thresholds(sweep_thresholds(ks, single), dir);
  const std::string csv = slurp(dir / "thresholds.csv");
  CHECK(csv.rfind("k,trigger_frequency,mean_final_sim\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  std::filesystem::remove_all(dir);
}

TEST_CASE("score_corpus is reproducible") {
  const auto corpus = parse_corpus("a red fox\na castle | watercolor style\n");
  const SessionConfig c;
  const auto a = score_corpus(corpus, c, 4);
  const auto b = score_corpus(corpus, c, 4);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a[i].sim == b[i].sim);
    CHECK(a[i].refined_sim == b[i].refined_sim);
    CHECK(a[i].sim > 0.0);
    CHECK(a[i].sim <= 1.0);
  }
}
