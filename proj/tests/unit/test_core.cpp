#include <catch_amalgamated.hpp>

#include <set>

#include "support.hpp"
#include "tdri/core/config.hpp"
#include "tdri/core/error.hpp"
#include "tdri/core/protocol.hpp"

using namespace tdri;
using Catch::Matchers::ContainsSubstring;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected tdri::Error");
  return ErrorCode::IllegalTransition;
}

Session fresh(SessionConfig c = {}) { return make_session("s-test", c); }

}  // namespace

TEST_CASE("aspects form a closed set of seven unique names") {
  STATIC_REQUIRE(kAspectCount == 7);
  std::set<std::string_view> names;
  for (Aspect a : kAllAspects) names.insert(to_string(a));
  CHECK(names.size() == 7);
  CHECK(names == std::set<std::string_view>{"Content", "Style", "Background", "Size", "Color",
                                            "Perspective", "Others"});
  CHECK(parse_aspect("color") == Aspect::Color);
  CHECK(parse_aspect("PERSPECTIVE") == Aspect::Perspective);
  CHECK_FALSE(parse_aspect("Texture").has_value());
}

TEST_CASE("dialogue history keeps indices gapless from one") {
  DialogueHistory h;
  h.append({1, "a parrot", "a parrot"});
  CHECK(code_of([&] { h.append({3, "x", ""}); }) == ErrorCode::IllegalTransition);
  CHECK(code_of([&] { h.append({2, "", ""}); }) == ErrorCode::IllegalTransition);
  h.append({2, "make it red", ""});
  CHECK(h.size() == 2);
}

TEST_CASE("prompt validation") {
  Prompt p;
  p.embedding = testing::unit(8, 0);
  CHECK(code_of([&] { validate(p); }) == ErrorCode::InvalidPrompt);  // no text
  p.aspect_texts[index(Aspect::Content)] = "a parrot";
  CHECK(code_of([&] { validate(p); }) == ErrorCode::InvalidPrompt);  // all weights zero
  p.aspect_weights[index(Aspect::Content)] = 1.0;
  validate(p);
  p.aspect_weights[index(Aspect::Color)] = -0.1;
  CHECK(code_of([&] { validate(p); }) == ErrorCode::InvalidPrompt);
  p.aspect_weights[index(Aspect::Color)] = 0.0;
  p.embedding *= 2.0;
  CHECK(code_of([&] { validate(p); }) == ErrorCode::InvalidPrompt);
}

TEST_CASE("prompt text follows the fixed aspect order") {
  Prompt p;
  p.aspect_texts[index(Aspect::Background)] = "forest background";
  p.aspect_texts[index(Aspect::Color)] = "red";
  p.aspect_texts[index(Aspect::Content)] = "a parrot";
  p.aspect_texts[index(Aspect::Style)] = "watercolor style";
  CHECK(p.text() == "a parrot, with red, watercolor style, forest background");
}

TEST_CASE("context vector is the renormalized running mean") {
  const Vector a = testing::unit(4, 0);
  const Vector b = testing::unit(4, 1);
  const SessionContext c = SessionContext{}.with(Prompt{}, a).with(Prompt{}, b);
  CHECK(c.prior_descriptors.size() == c.prior_prompts.size());
  CHECK(is_unit(c.context_vector));
  CHECK(c.context_vector[0] == Catch::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(c.context_vector[1] == Catch::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("config defaults and range checks") {
  const SessionConfig c;
  CHECK(c.ambiguity_threshold == 0.3);
  CHECK(c.ae_threshold == 0.70);
  CHECK(c.lambda_combine == 1.0);
  CHECK(c.recency_decay == 0.7);
  CHECK(c.response_weight_ratio == 0.5);
  CHECK(c.dpo_batch == 40);
  CHECK(c.dpo_epochs == 3);
  CHECK(c.embedding_dim == 64);
  CHECK(c.toy.pose_keypoints == 17);
  CHECK(c.toy.heatmap_height == 64);
  CHECK(c.toy.heatmap_width == 64);
  CHECK(c.toy.pose_sigma == 2.0);
  CHECK(c.toy.context_weight == 0.3);
  CHECK(c.toy.pose_weight == 0.1);
  CHECK(c.toy.noise_scale == 0.05);
  CHECK(c.toy.ae_step == 0.5);
  validate(c);

  SessionConfig bad = c;
  set_field(bad, "ambiguity_threshold", "1.5");
  try {
    validate(bad);
    FAIL("accepted tau = 1.5");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    CHECK(e.field() == "ambiguity_threshold");
    CHECK_THAT(e.what(), ContainsSubstring("ambiguity_threshold"));
  }

  SessionConfig other = c;
  CHECK(code_of([&] { set_field(other, "no_such_key", "1"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { set_field(other, "max_rounds", "three"); }) == ErrorCode::InvalidConfig);
  set_field(other, "aspect_importance.Color", "2.5");
  set_field(other, "toy.noise_scale", "0");
  CHECK(other.aspect_importance[index(Aspect::Color)] == 2.5);
  CHECK(other.toy.noise_scale == 0.0);
  set_field(other, "recency_decay", "1");
  validate(other);
  set_field(other, "recency_decay", "0");
  CHECK(code_of([&] { validate(other); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("seed stream resumes from its persisted state") {
  SeedStream a(42);
  a.next();
  a.next();
  SeedStream b(a.seed(), a.draws());
  CHECK(a.next() == b.next());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("first message moves Created to InitialGenerated with one image") {
  const Protocol p(make_toy_backends({}));
  const Session s0 = fresh();
  const Session s1 = p.advance(s0, UserMessage{"a red parrot"});
  CHECK(s1.phase == Phase::InitialGenerated);
  CHECK(s1.images.size() == 1);
  CHECK(s1.prompts.size() == 1);
  REQUIRE(s1.pose_constraint);
  CHECK(s1.pose_constraint->smoothed);
  CHECK(s1.pose_constraint->keypoints.size() == 17);
  CHECK(s1.images[0].id == "img-1");
  CHECK(s0.images.empty());  // the input session is untouched
  check_invariants(s1);
}

TEST_CASE("accept completes the session; later events report SessionCompleted") {
  const Protocol p(make_toy_backends({}));
  Session s = testing::run_round(p, fresh(), "a red parrot");
  REQUIRE(s.phase == Phase::AwaitFeedback);
  s = p.advance(s, UserAccept{});
  CHECK(s.phase == Phase::Completed);
  CHECK_FALSE(s.pending_query);
  CHECK(code_of([&] { p.advance(s, UserMessage{"more"}); }) == ErrorCode::SessionCompleted);
  CHECK(code_of([&] { p.advance(s, UserAccept{}); }) == ErrorCode::SessionCompleted);
  CHECK(code_of([&] { p.advance(s, Continue{}); }) == ErrorCode::SessionCompleted);
}

TEST_CASE("events outside their phase are IllegalTransition") {
  const Protocol p(make_toy_backends({}));
  const Session s0 = fresh();
  CHECK(code_of([&] { p.advance(s0, UserAccept{}); }) == ErrorCode::IllegalTransition);
  CHECK(code_of([&] { p.advance(s0, Continue{}); }) == ErrorCode::IllegalTransition);
  const Session s1 = p.advance(s0, UserMessage{"a parrot"});
  CHECK(code_of([&] { p.advance(s1, UserMessage{"again"}); }) == ErrorCode::IllegalTransition);
  CHECK(code_of([&] { p.advance(s1, UserAccept{}); }) == ErrorCode::IllegalTransition);
  const Session s2 = p.advance(s1, Continue{});
  CHECK(code_of([&] { p.advance(s2, Continue{}); }) == ErrorCode::IllegalTransition);
  CHECK(code_of([&] { p.advance(s2, UserMessage{""}); }) == ErrorCode::EmptyText);
}

TEST_CASE("round budget caps messages") {
  SessionConfig c;
  c.max_rounds = 2;
  const Protocol p(make_toy_backends(c));
  Session s = testing::run_round(p, fresh(c), "a parrot");
  s = testing::run_round(p, s, "make it red");
  CHECK(code_of([&] { p.advance(s, UserMessage{"make it blue"}); }) == ErrorCode::IllegalTransition);
  CHECK(p.advance(s, UserAccept{}).phase == Phase::Completed);
}

TEST_CASE("answering a clarification goes through Refining back to AwaitFeedback") {
  const SessionConfig c;
  const Protocol p(testing::distorted_backends(c, {1}));
  Session s = p.advance(fresh(c), UserMessage{"a parrot, make it red"});
  s = p.advance(s, Continue{});
  REQUIRE(s.phase == Phase::Clarifying);
  REQUIRE(s.pending_query);
  const auto& report = s.reflections.back().report;
  CHECK(report.triggered);
  CHECK(report.ambiguity_score > c.ambiguity_threshold);
  CHECK(report.selected_aspect == s.pending_query->aspect);
  CHECK(s.history.turns().back().system_response == s.pending_query->question_text);

  std::vector<Phase> trace;
  Session next = p.advance(s, UserMessage{"make it blue"});
  trace.push_back(next.phase);
  next = p.advance(next, Continue{});
  trace.push_back(next.phase);
  CHECK(trace == std::vector<Phase>{Phase::Refining, Phase::AwaitFeedback});
  CHECK(next.images.size() == s.images.size() + 1);
  CHECK_FALSE(next.pending_query);
  CHECK(next.prompts.back().aspect_texts[index(Aspect::Color)] == "blue");
  check_invariants(next);
}

TEST_CASE("a low tau triggers clarification on the plain toy backends") {
  SessionConfig c;
  c.ambiguity_threshold = 0.01;
  const Protocol p(make_toy_backends(c));
  const Session s = testing::run_round(p, fresh(c), "a red parrot");
  CHECK(s.phase == Phase::Clarifying);
  REQUIRE(s.pending_query);
  CHECK(s.pending_query->aspect == Aspect::Content);
  CHECK_THAT(s.pending_query->question_text, ContainsSubstring("subject"));
}

TEST_CASE("every transition keeps the audit trail append-only") {
  const SessionConfig c;
  const Protocol p(testing::distorted_backends(c, {2}));
  std::vector<Session> states{fresh(c)};
  const std::vector<std::string> script = {"a parrot", "make it red", "make it green", "watercolor style"};
  for (const auto& text : script) {
    states.push_back(p.advance(states.back(), UserMessage{text}));
    states.push_back(p.advance(states.back(), Continue{}));
  }
  states.push_back(p.advance(states.back(), UserAccept{}));

  for (std::size_t i = 1; i < states.size(); ++i) {
    const Session& prev = states[i - 1];
    const Session& cur = states[i];
    check_invariants(cur);
    CHECK(cur.images.size() == cur.prompts.size());
    CHECK(transition_allowed(prev.phase, cur.phase));
    REQUIRE(cur.images.size() >= prev.images.size());
    for (std::size_t k = 0; k < prev.images.size(); ++k) CHECK(cur.images[k] == prev.images[k]);
    for (std::size_t k = 0; k < prev.prompts.size(); ++k) CHECK(cur.prompts[k] == prev.prompts[k]);
    REQUIRE(cur.history.size() >= prev.history.size());
    for (std::size_t k = 0; k < prev.history.size(); ++k)
      CHECK(cur.history.turns()[k] == prev.history.turns()[k]);
    CHECK(cur.pose_constraint == (prev.images.empty() ? cur.pose_constraint : prev.pose_constraint));
  }
  CHECK(states.back().phase == Phase::Completed);
  CHECK(states[4].phase == Phase::Clarifying);  // round 2 was distorted
}

TEST_CASE("replaying the same events reproduces the same session") {
  SessionConfig c;
  c.rng_seed = 1234;
  c.ambiguity_threshold = 0.05;
  const std::vector<std::string> script = {"a parrot", "make it red", "forest background", "side view"};
  auto replay = [&] {
    const Protocol p(make_toy_backends(c));
    Session s = make_session("twin", c);
    for (const auto& t : script) s = testing::run_round(p, s, t);
    return s;
  };
  const Session a = replay();
  const Session b = replay();
  CHECK(a == b);
  CHECK(a.rng.draws() == b.rng.draws());

  SessionConfig other = c;
  other.rng_seed = 99;
  const Protocol p(make_toy_backends(other));
  Session d = make_session("twin", other);
  for (const auto& t : script) d = testing::run_round(p, d, t);
  CHECK_FALSE(same(d.images.back().descriptor, a.images.back().descriptor));
}

TEST_CASE("protocol rejects missing backends") {
  Backends b = make_toy_backends({});
  b.captioner.reset();
  CHECK_THROWS_AS(Protocol(b), Error);
}

TEST_CASE("preference votes append pairs and update every dpo_batch-th pair") {
  SessionConfig c;
  c.dpo_batch = 40;
  const Protocol p(make_toy_backends(c));
  Session s = testing::run_round(p, fresh(c), "a parrot");
  s = testing::run_round(p, s, "make it red");

  CHECK(code_of([&] { make_preference(s, "img-1", "img-1", "t"); }) == ErrorCode::SelfPair);
  CHECK(code_of([&] { make_preference(s, "img-1", "img-9", "t"); }) == ErrorCode::UnknownImage);
  CHECK(code_of([&] { make_preference(s, "img-9", "img-1", "t"); }) == ErrorCode::UnknownImage);

  for (int i = 1; i <= 39; ++i) s = record_preference(s, make_preference(s, "img-2", "img-1", "t"));
  CHECK(s.preference_pairs.size() == 39);
  CHECK(s.policy.version == 1);
  s = record_preference(s, make_preference(s, "img-2", "img-1", "t"));
  CHECK(s.policy.version == 2);
  const PreferencePair& last = s.preference_pairs.back();
  CHECK(same(last.state_embedding, s.prompts.back().embedding));
  CHECK(same(last.winner_descriptor, s.images[1].descriptor));
  CHECK(last.session_id == s.id);
}
