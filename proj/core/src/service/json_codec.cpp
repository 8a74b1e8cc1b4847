#include "service/json_codec.hpp"

#include "detail/base64.hpp"
#include "tdri/core/error.hpp"

namespace tdri::service::json_io {

namespace {

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::CorruptSnapshot, what);
}

std::string key(Aspect a) { return std::string(to_string(a)); }

Aspect read_aspect(const json& j) {
  const auto a = parse_aspect(j.get<std::string>());
  if (!a) corrupt("unknown aspect '" + j.get<std::string>() + "'");
  return *a;
}

template <class T>
json write_aspects(const AspectArray<T>& arr) {
  json j = json::object();
  for (Aspect a : kAllAspects) j[key(a)] = arr[index(a)];
  return j;
}

template <class T>
AspectArray<T> read_aspects(const json& j) {
  AspectArray<T> arr{};
  for (Aspect a : kAllAspects) arr[index(a)] = j.at(key(a)).get<T>();
  return arr;
}

json optional_double(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_double(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

json write(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector read_vector(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json write(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix read_matrix(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size())
    corrupt("matrix shape does not match its data");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  return m;
}

json write(const SessionConfig& c) {
  return {
      {"ambiguity_threshold", c.ambiguity_threshold},
      {"ae_threshold", c.ae_threshold},
      {"lambda_combine", c.lambda_combine},
      {"recency_decay", c.recency_decay},
      {"response_weight_ratio", c.response_weight_ratio},
      {"aspect_importance", write_aspects(c.aspect_importance)},
      {"max_rounds", c.max_rounds},
      {"dpo_batch", c.dpo_batch},
      {"dpo_epochs", c.dpo_epochs},
      {"embedding_dim", c.embedding_dim},
      {"rng_seed", c.rng_seed},
      {"toy",
       {{"context_weight", c.toy.context_weight},
        {"pose_weight", c.toy.pose_weight},
        {"noise_scale", c.toy.noise_scale},
        {"pose_keypoints", c.toy.pose_keypoints},
        {"heatmap_height", c.toy.heatmap_height},
        {"heatmap_width", c.toy.heatmap_width},
        {"pose_sigma", c.toy.pose_sigma},
        {"ae_step", c.toy.ae_step},
        {"dpo_step", c.toy.dpo_step}}},
  };
}

SessionConfig read_config(const json& j) {
  SessionConfig c;
  c.ambiguity_threshold = j.at("ambiguity_threshold").get<double>();
  c.ae_threshold = j.at("ae_threshold").get<double>();
  c.lambda_combine = j.at("lambda_combine").get<double>();
  c.recency_decay = j.at("recency_decay").get<double>();
  c.response_weight_ratio = j.at("response_weight_ratio").get<double>();
  c.aspect_importance = read_aspects<double>(j.at("aspect_importance"));
  c.max_rounds = j.at("max_rounds").get<int>();
  c.dpo_batch = j.at("dpo_batch").get<int>();
  c.dpo_epochs = j.at("dpo_epochs").get<int>();
  c.embedding_dim = j.at("embedding_dim").get<int>();
  c.rng_seed = j.at("rng_seed").get<std::int64_t>();
  const json& t = j.at("toy");
  c.toy.context_weight = t.at("context_weight").get<double>();
  c.toy.pose_weight = t.at("pose_weight").get<double>();
  c.toy.noise_scale = t.at("noise_scale").get<double>();
  c.toy.pose_keypoints = t.at("pose_keypoints").get<int>();
  c.toy.heatmap_height = t.at("heatmap_height").get<int>();
  c.toy.heatmap_width = t.at("heatmap_width").get<int>();
  c.toy.pose_sigma = t.at("pose_sigma").get<double>();
  c.toy.ae_step = t.at("ae_step").get<double>();
  c.toy.dpo_step = t.at("dpo_step").get<double>();
  return c;
}

json write(const Prompt& p) {
  return {{"aspect_texts", write_aspects(p.aspect_texts)},
          {"aspect_weights", write_aspects(p.aspect_weights)},
          {"embedding", write(p.embedding)},
          {"round", p.round},
          {"text", p.text()}};
}

Prompt read_prompt(const json& j) {
  Prompt p;
  p.aspect_texts = read_aspects<std::string>(j.at("aspect_texts"));
  p.aspect_weights = read_aspects<double>(j.at("aspect_weights"));
  p.embedding = read_vector(j.at("embedding"));
  p.round = j.at("round").get<int>();
  return p;
}

json write(const ImageArtifact& img) {
  json render = nullptr;
  if (img.render)
    render = {{"data", detail::base64_encode(img.render->bytes)}, {"media_type", img.render->media_type}};
  return {{"id", img.id},
          {"descriptor", write(img.descriptor)},
          {"render", render},
          {"provenance",
           {{"round", img.provenance.round},
            {"generator", img.provenance.generator},
            {"seed", img.provenance.seed}}}};
}

ImageArtifact read_image(const json& j) {
  ImageArtifact img;
  img.id = j.at("id").get<std::string>();
  img.descriptor = read_vector(j.at("descriptor"));
  const json& r = j.at("render");
  if (!r.is_null()) {
    auto bytes = detail::base64_decode(r.at("data").get<std::string>());
    if (!bytes) corrupt("render payload is not base64");
    img.render = RenderPayload{std::move(*bytes), r.at("media_type").get<std::string>()};
  }
  const json& p = j.at("provenance");
  img.provenance = Provenance{p.at("round").get<int>(), p.at("generator").get<std::string>(),
                              p.at("seed").get<std::uint64_t>()};
  return img;
}

json write(const Pose& p) {
  json kps = json::array();
  for (const Keypoint& k : p.keypoints) kps.push_back({k.x, k.y});
  json heat = nullptr;
  if (p.heatmap)
    heat = {{"height", p.heatmap->height}, {"width", p.heatmap->width}, {"cells", p.heatmap->cells}};
  return {{"keypoints", kps}, {"heatmap", heat}, {"smoothed", p.smoothed}};
}

Pose read_pose(const json& j) {
  Pose p;
  for (const json& k : j.at("keypoints")) p.keypoints.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
  const json& h = j.at("heatmap");
  if (!h.is_null()) {
    Heatmap m{h.at("height").get<int>(), h.at("width").get<int>(), h.at("cells").get<std::vector<double>>()};
    if (m.height < 0 || m.width < 0 ||
        m.cells.size() != static_cast<std::size_t>(m.height) * static_cast<std::size_t>(m.width))
      corrupt("heatmap shape does not match its cells");
    p.heatmap = std::move(m);
  }
  p.smoothed = j.at("smoothed").get<bool>();
  return p;
}

json write(const AspectCaptionSet& set) {
  json arr = json::array();
  for (Aspect a : kAllAspects) {
    const AspectCaption& c = set[a];
    arr.push_back({{"aspect", key(c.aspect)},
                   {"text", c.text},
                   {"embedding", write(c.embedding)},
                   {"similarity", optional_double(c.similarity)}});
  }
  return arr;
}

AspectCaptionSet read_captions(const json& j) {
  if (!j.is_array() || j.size() != kAspectCount) corrupt("caption set must hold 7 captions");
  AspectCaptionSet set;
  for (std::size_t i = 0; i < kAspectCount; ++i) {
    const json& c = j.at(i);
    AspectCaption& cap = set.captions[i];
    cap.aspect = read_aspect(c.at("aspect"));
    cap.text = c.at("text").get<std::string>();
    cap.embedding = read_vector(c.at("embedding"));
    cap.similarity = read_optional_double(c.at("similarity"));
  }
  return set;
}

json write(const AmbiguityReport& r) {
  json kappa = json::object();
  for (Aspect a : kAllAspects) kappa[key(a)] = optional_double(r.per_aspect_similarity[index(a)]);
  json cands = json::array();
  for (Aspect a : r.candidate_aspects) cands.push_back(key(a));
  return {{"per_aspect_similarity", kappa},
          {"sigma", r.sigma},
          {"ambiguity_score", r.ambiguity_score},
          {"triggered", r.triggered},
          {"candidate_aspects", cands},
          {"selected_aspect", r.selected_aspect ? json(key(*r.selected_aspect)) : json(nullptr)}};
}

AmbiguityReport read_report(const json& j) {
  AmbiguityReport r;
  for (Aspect a : kAllAspects)
    r.per_aspect_similarity[index(a)] = read_optional_double(j.at("per_aspect_similarity").at(key(a)));
  r.sigma = j.at("sigma").get<double>();
  r.ambiguity_score = j.at("ambiguity_score").get<double>();
  r.triggered = j.at("triggered").get<bool>();
  for (const json& a : j.at("candidate_aspects")) r.candidate_aspects.push_back(read_aspect(a));
  if (!j.at("selected_aspect").is_null()) r.selected_aspect = read_aspect(j.at("selected_aspect"));
  return r;
}

json write(const ClarificationQuery& q) {
  return {{"aspect", key(q.aspect)}, {"question_text", q.question_text}, {"round", q.round}};
}

ClarificationQuery read_query(const json& j) {
  return {read_aspect(j.at("aspect")), j.at("question_text").get<std::string>(), j.at("round").get<int>()};
}

json write(const PreferencePair& p) {
  return {{"session_id", p.session_id},
          {"round", p.round},
          {"state_embedding", write(p.state_embedding)},
          {"winner_id", p.winner_id},
          {"winner_descriptor", write(p.winner_descriptor)},
          {"loser_id", p.loser_id},
          {"loser_descriptor", write(p.loser_descriptor)},
          {"timestamp", p.created_at}};
}

PreferencePair read_pair(const json& j) {
  PreferencePair p;
  p.session_id = j.at("session_id").get<std::string>();
  p.round = j.at("round").get<int>();
  p.state_embedding = read_vector(j.at("state_embedding"));
  p.winner_id = j.at("winner_id").get<std::string>();
  p.winner_descriptor = read_vector(j.at("winner_descriptor"));
  p.loser_id = j.at("loser_id").get<std::string>();
  p.loser_descriptor = read_vector(j.at("loser_descriptor"));
  p.created_at = j.at("timestamp").get<std::string>();
  return p;
}

json write(const Session& s) {
  json history = json::array();
  for (const DialogueTurn& t : s.history.turns())
    history.push_back({{"index", t.index}, {"user_input", t.user_input}, {"system_response", t.system_response}});

  json prior_prompts = json::array();
  for (const Prompt& p : s.context.prior_prompts) prior_prompts.push_back(write(p));
  json prior_desc = json::array();
  for (const Vector& d : s.context.prior_descriptors) prior_desc.push_back(write(d));

  json images = json::array();
  for (const ImageArtifact& i : s.images) images.push_back(write(i));
  json prompts = json::array();
  for (const Prompt& p : s.prompts) prompts.push_back(write(p));
  json ae = json::array();
  for (const AeRecord& r : s.ae_records)
    ae.push_back({{"round", r.round}, {"sim", r.sim}, {"applied", r.applied},
                  {"refined_sim", optional_double(r.refined_sim)}});
  json reflections = json::array();
  for (const ReflectionRecord& r : s.reflections)
    reflections.push_back({{"round", r.round}, {"report", write(r.report)}, {"captions", write(r.captions)}});
  json pairs = json::array();
  for (const PreferencePair& p : s.preference_pairs) pairs.push_back(write(p));

  return {
      {"id", s.id},
      {"config", write(s.config)},
      {"phase", std::string(to_string(s.phase))},
      {"round", s.round()},
      {"history", history},
      {"context",
       {{"prior_prompts", prior_prompts},
        {"prior_descriptors", prior_desc},
        {"context_vector", write(s.context.context_vector)}}},
      {"pose_constraint", s.pose_constraint ? write(*s.pose_constraint) : json(nullptr)},
      {"images", images},
      {"prompts", prompts},
      {"ae_records", ae},
      {"reflections", reflections},
      {"pending_input", s.pending_input ? json(*s.pending_input) : json(nullptr)},
      {"pending_query", s.pending_query ? write(*s.pending_query) : json(nullptr)},
      {"preference_pairs", pairs},
      {"policy",
       {{"weight_matrix", write(s.policy.weight_matrix)},
        {"step_size", s.policy.step_size},
        {"version", s.policy.version}}},
      {"rng", {{"seed", s.rng.seed()}, {"draws", s.rng.draws()}}},
  };
}

Session read_session(const json& j) {
  Session s;
  s.id = j.at("id").get<std::string>();
  s.config = read_config(j.at("config"));
  const auto phase = parse_phase(j.at("phase").get<std::string>());
  if (!phase) corrupt("unknown phase");
  s.phase = *phase;
  for (const json& t : j.at("history"))
    s.history.append({t.at("index").get<int>(), t.at("user_input").get<std::string>(),
                      t.at("system_response").get<std::string>()});

  const json& ctx = j.at("context");
  for (const json& p : ctx.at("prior_prompts")) s.context.prior_prompts.push_back(read_prompt(p));
  for (const json& d : ctx.at("prior_descriptors")) s.context.prior_descriptors.push_back(read_vector(d));
  s.context.context_vector = read_vector(ctx.at("context_vector"));

  if (!j.at("pose_constraint").is_null()) s.pose_constraint = read_pose(j.at("pose_constraint"));
  for (const json& i : j.at("images")) s.images.push_back(read_image(i));
  for (const json& p : j.at("prompts")) s.prompts.push_back(read_prompt(p));
  for (const json& r : j.at("ae_records"))
    s.ae_records.push_back({r.at("round").get<int>(), r.at("sim").get<double>(), r.at("applied").get<bool>(),
                            read_optional_double(r.at("refined_sim"))});
  for (const json& r : j.at("reflections"))
    s.reflections.push_back({r.at("round").get<int>(), read_report(r.at("report")), read_captions(r.at("captions"))});
  if (!j.at("pending_input").is_null()) s.pending_input = j.at("pending_input").get<std::string>();
  if (!j.at("pending_query").is_null()) s.pending_query = read_query(j.at("pending_query"));
  for (const json& p : j.at("preference_pairs")) s.preference_pairs.push_back(read_pair(p));

  const json& pol = j.at("policy");
  s.policy.weight_matrix = read_matrix(pol.at("weight_matrix"));
  s.policy.step_size = pol.at("step_size").get<double>();
  s.policy.version = pol.at("version").get<std::int64_t>();
  s.rng = SeedStream(j.at("rng").at("seed").get<std::uint64_t>(), j.at("rng").at("draws").get<std::uint64_t>());
  return s;
}

}  // namespace tdri::service::json_io
