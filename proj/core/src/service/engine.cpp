#include "tdri/service/engine.hpp"

#include <cctype>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>

#include "tdri/adapt/dpo.hpp"
#include "tdri/core/error.hpp"
#include "tdri/genbridge/remote.hpp"
#include "tdri/genbridge/toy.hpp"
#include "tdri/service/codec.hpp"

namespace tdri::service {

namespace fs = std::filesystem;

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

IdSource random_ids() {
  auto state = std::make_shared<std::pair<std::mutex, std::mt19937_64>>();
  state->second.seed(std::random_device{}());
  return [state] {
    std::lock_guard lock(state->first);
    std::ostringstream out;
    out << "s-" << std::hex << state->second();
    return out.str();
  };
}

namespace {

std::string toy_key(const SessionConfig& c) {
  const ToyConstants& t = c.toy;
  std::ostringstream k;
  k.precision(17);
  k << c.embedding_dim << '|' << t.context_weight << '|' << t.pose_weight << '|' << t.noise_scale << '|'
    << t.pose_keypoints << '|' << t.heatmap_height << '|' << t.heatmap_width << '|' << t.pose_sigma << '|'
    << t.ae_step << '|' << t.dpo_step;
  return k.str();
}

template <class Build>
BackendFactory cached(Build build) {
  auto cache = std::make_shared<std::pair<std::mutex, std::map<std::string, Backends>>>();
  return [cache, build](const SessionConfig& config) {
    const std::string key = toy_key(config);
    std::lock_guard lock(cache->first);
    auto it = cache->second.find(key);
    if (it == cache->second.end()) it = cache->second.emplace(key, build(config)).first;
    return it->second;
  };
}

void write_atomically(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::BackendUnavailable, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::BackendUnavailable, "cannot replace " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CorruptSnapshot, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return true;
}

}  // namespace

BackendFactory toy_backend_factory() {
  return cached([](const SessionConfig& c) { return make_toy_backends(c); });
}

BackendFactory remote_backend_factory(std::string base_url, std::chrono::milliseconds timeout,
                                      std::string bearer_token, bool external_summarizer) {
  genbridge::Endpoint ep{std::move(base_url), timeout, std::move(bearer_token)};
  return cached([ep, external_summarizer](const SessionConfig& c) {
    Backends b = make_toy_backends(c);
    const Eigen::Index dim = c.embedding_dim;
    auto embedder = std::make_shared<genbridge::RemoteEmbedder>(ep, dim);
    b.embedder = embedder;
    if (external_summarizer)
      b.summarizer = std::make_shared<d2p::ExternalSummarizer>(
          embedder, std::make_shared<genbridge::RemoteLanguageModel>(ep));
    else
      b.summarizer = std::make_shared<d2p::TemplateSummarizer>(
          embedder, std::shared_ptr<const d2p::Lexicon>(&d2p::Lexicon::builtin(), [](const d2p::Lexicon*) {}));
    b.generator = std::make_shared<genbridge::RemoteGenerator>(ep, dim);
    b.captioner = std::make_shared<genbridge::RemoteCaptioner>(ep, dim);
    return b;
  });
}

EngineOptions engine_options(const ServerSettings& settings) {
  EngineOptions o;
  o.data_dir = settings.data_dir;
  o.policy_scope = settings.policy_scope;
  o.defaults = settings.defaults;
  if (!settings.backend_url.empty())
    o.backends = remote_backend_factory(settings.backend_url,
                                        std::chrono::milliseconds(settings.backend_timeout_ms),
                                        settings.backend_token, settings.external_summarizer);
  return o;
}

struct Engine::Impl {
  struct Slot {
    std::mutex writer;
    mutable std::mutex state_mu;
    std::shared_ptr<const Session> state;

    std::shared_ptr<const Session> current() const {
      std::lock_guard lock(state_mu);
      return state;
    }
    void publish(Session s) {
      auto next = std::make_shared<const Session>(std::move(s));
      std::lock_guard lock(state_mu);
      state = std::move(next);
    }
  };

  struct SharedPolicy {
    PolicyParams policy;
    std::vector<PreferencePair> pairs;
  };

  EngineOptions options;
  mutable std::shared_mutex registry_mu;
  mutable std::map<std::string, std::shared_ptr<Slot>> slots;

  mutable std::mutex shared_mu;
  std::map<int, SharedPolicy> shared;

  std::mutex log_mu;

  explicit Impl(EngineOptions o) : options(std::move(o)) {}

  bool persistent() const { return !options.data_dir.empty(); }
  fs::path session_path(const std::string& id) const { return options.data_dir / "sessions" / (id + ".json"); }
  fs::path log_path() const { return options.data_dir / "preferences.jsonl"; }

  void persist(const Session& s) const {
    if (!persistent()) return;
    write_atomically(session_path(s.id), encode_snapshot({kSchemaVersion, s, options.clock()}));
  }

  void append_log(const PreferencePair& p) {
    if (!persistent()) return;
    std::lock_guard lock(log_mu);
    fs::create_directories(options.data_dir);
    std::ofstream out(log_path(), std::ios::binary | std::ios::app);
    out << encode_pair_line(p) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::BackendUnavailable, "cannot append to " + log_path().string());
  }

  std::shared_ptr<Slot> find(const std::string& id) const {
    {
      std::shared_lock lock(registry_mu);
      if (auto it = slots.find(id); it != slots.end()) return it->second;
    }
    if (!persistent() || !safe_id(id) || !fs::exists(session_path(id)))
      throw Error(ErrorCode::UnknownSession, "no session " + id, "session_id");
    Session s = decode_snapshot(read_file(session_path(id))).session;
    std::unique_lock lock(registry_mu);
    auto& slot = slots[id];
    if (!slot) {
      slot = std::make_shared<Slot>();
      slot->publish(std::move(s));
    }
    return slot;
  }

  SharedPolicy& shared_for(int dim) {
    auto it = shared.find(dim);
    if (it == shared.end())
      it = shared.emplace(dim, SharedPolicy{PolicyParams::zero(dim, options.defaults.toy.dpo_step), {}}).first;
    return it->second;
  }

  // The shared policy is not snapshotted; it is rebuilt from the vote log.
  void replay_log() {
    if (!persistent() || !fs::exists(log_path())) return;
    std::ifstream in(log_path(), std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      PreferencePair p = decode_pair_line(line);
      SharedPolicy& sp = shared_for(static_cast<int>(p.state_embedding.size()));
      sp.pairs.push_back(std::move(p));
      if (sp.pairs.size() % static_cast<std::size_t>(options.defaults.dpo_batch) == 0)
        sp.policy = adapt::dpo_update(sp.policy, sp.pairs, options.defaults.dpo_epochs, options.defaults.dpo_batch);
    }
  }

  Protocol protocol_for(const Session& s) const { return Protocol(options.backends(s.config)); }
};

Engine::Engine(EngineOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  validate(impl_->options.defaults);
  if (!impl_->options.clock || !impl_->options.ids || !impl_->options.backends)
    throw Error(ErrorCode::InvalidConfig, "engine needs a clock, an id source and a backend factory");
  if (impl_->options.policy_scope == PolicyScope::Shared) impl_->replay_log();
}

Engine::~Engine() = default;

const EngineOptions& Engine::options() const noexcept { return impl_->options; }

std::string Engine::create_session(const KeyValues& overrides) {
  SessionConfig config = impl_->options.defaults;
  for (const auto& [k, v] : overrides) set_field(config, k, v);
  validate(config);

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::string id = impl_->options.ids();
    if (!safe_id(id)) throw Error(ErrorCode::InvalidConfig, "id source produced an unusable id");
    std::unique_lock lock(impl_->registry_mu);
    if (impl_->slots.count(id) || (impl_->persistent() && fs::exists(impl_->session_path(id)))) continue;
    Session s = make_session(id, config);
    impl_->persist(s);
    auto slot = std::make_shared<Impl::Slot>();
    slot->publish(std::move(s));
    impl_->slots.emplace(id, std::move(slot));
    return id;
  }
  throw Error(ErrorCode::InvalidConfig, "id source keeps returning ids already in use");
}

RoundResult Engine::submit_message(const std::string& session_id, const std::string& text) {
  auto slot = impl_->find(session_id);
  std::lock_guard writer(slot->writer);
  const auto before = slot->current();
  const Protocol protocol = impl_->protocol_for(*before);

  Session s = protocol.advance(*before, UserMessage{text});
  s = protocol.advance(s, Continue{});
  impl_->persist(s);

  RoundResult r;
  r.session_id = s.id;
  r.round = s.round();
  r.phase = s.phase;
  r.image = s.images.back();
  r.ambiguity_report = s.reflections.back().report;
  if (s.phase == Phase::Clarifying) r.clarification_query = s.pending_query;
  r.response = s.history.turns().back().system_response;
  r.ae_applied = s.ae_records.back().applied;
  slot->publish(std::move(s));
  return r;
}

Session Engine::accept(const std::string& session_id) {
  auto slot = impl_->find(session_id);
  std::lock_guard writer(slot->writer);
  const auto before = slot->current();
  Session s = impl_->protocol_for(*before).advance(*before, UserAccept{});
  impl_->persist(s);
  slot->publish(s);
  return s;
}

VoteResult Engine::vote(const std::string& session_id, const std::string& winner_id,
                        const std::string& loser_id) {
  auto slot = impl_->find(session_id);
  std::lock_guard writer(slot->writer);
  const auto before = slot->current();
  PreferencePair pair = make_preference(*before, winner_id, loser_id, impl_->options.clock());
  const bool shared = impl_->options.policy_scope == PolicyScope::Shared;

  VoteResult r;
  if (!shared) {
    Session s = record_preference(*before, pair, true);
    r.pair_count = s.preference_pairs.size();
    r.policy_version = s.policy.version;
    r.policy_updated = s.policy.version != before->policy.version;
    impl_->persist(s);
    impl_->append_log(pair);
    slot->publish(std::move(s));
    return r;
  }

  std::lock_guard lock(impl_->shared_mu);
  Impl::SharedPolicy next = impl_->shared_for(before->config.embedding_dim);
  next.pairs.push_back(pair);
  const auto batch = static_cast<std::size_t>(impl_->options.defaults.dpo_batch);
  if (next.pairs.size() % batch == 0)
    next.policy = adapt::dpo_update(next.policy, next.pairs, impl_->options.defaults.dpo_epochs,
                                    impl_->options.defaults.dpo_batch);
  Session s = record_preference(*before, pair, false);
  r.policy_updated = next.policy.version != s.policy.version;
  s.policy = next.policy;
  r.pair_count = next.pairs.size();
  r.policy_version = next.policy.version;
  impl_->persist(s);
  impl_->append_log(pair);
  impl_->shared[before->config.embedding_dim] = std::move(next);
  slot->publish(std::move(s));
  return r;
}

Session Engine::get(const std::string& session_id) const { return *impl_->find(session_id)->current(); }

ImageArtifact Engine::image(const std::string& session_id, const std::string& image_id) const {
  const auto s = impl_->find(session_id)->current();
  const ImageArtifact* img = s->find_image(image_id);
  if (!img) throw Error(ErrorCode::UnknownImage, "no image " + image_id, "image_id");
  return *img;
}

fs::path Engine::save_snapshot(const std::string& session_id) {
  if (!impl_->persistent()) throw Error(ErrorCode::InvalidConfig, "engine has no data directory", "data_dir");
  auto slot = impl_->find(session_id);
  std::lock_guard writer(slot->writer);
  const auto s = slot->current();
  impl_->persist(*s);
  return impl_->session_path(session_id);
}

Session Engine::load_snapshot(const fs::path& path) {
  Session s = decode_snapshot(read_file(path)).session;
  if (!safe_id(s.id)) throw Error(ErrorCode::CorruptSnapshot, "snapshot session id is unusable");
  std::shared_ptr<Impl::Slot> slot;
  {
    std::unique_lock lock(impl_->registry_mu);
    if (auto it = impl_->slots.find(s.id); it != impl_->slots.end()) {
      slot = it->second;
    } else {
      slot = std::make_shared<Impl::Slot>();
      slot->publish(s);
      impl_->slots.emplace(s.id, slot);
    }
  }
  std::lock_guard writer(slot->writer);
  if (impl_->persistent() && fs::absolute(path) != fs::absolute(impl_->session_path(s.id))) impl_->persist(s);
  slot->publish(s);
  return s;
}

std::size_t Engine::session_count() const {
  std::shared_lock lock(impl_->registry_mu);
  return impl_->slots.size();
}

std::optional<PolicyParams> Engine::shared_policy(int embedding_dim) const {
  std::lock_guard lock(impl_->shared_mu);
  auto it = impl_->shared.find(embedding_dim);
  if (it == impl_->shared.end()) return std::nullopt;
  return it->second.policy;
}

}  // namespace tdri::service
