#include "skillrec/service.hpp"

#include <chrono>
#include <random>
#include <sstream>

#include <httplib.h>

#include "skillrec/error.hpp"
#include "skillrec/io.hpp"
#include "skillrec/log.hpp"

namespace skillrec {
namespace {

std::int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::vector<double> as_vector(const Eigen::Vector4d& v) { return {v.data(), v.data() + 4}; }

}  // namespace

nlohmann::json error_body(ErrorCode code, const std::string& message) {
  return {{"code", std::string(error_code_name(code))}, {"message", message}};
}

// ---------------------------------------------------------------------------
// Store

Store::Store(std::filesystem::path dir) : Store(std::move(dir), Options{}) {}

Store::Store(std::filesystem::path dir, Options options)
    : dir_(std::move(dir)), options_(std::move(options)) {
  if (!options_.clock) options_.clock = wall_clock_ms;
  std::filesystem::create_directories(dir_ / "users");

  if (std::filesystem::exists(skills_path(dir_))) skills_ = mining::load_skills(skills_path(dir_));
  catalog_ = std::make_unique<Catalog>(
      std::filesystem::exists(catalog_path(dir_)) ? ingest_catalog(catalog_path(dir_), skills_)
                                                  : Catalog({}, skills_));
  if (std::filesystem::exists(fit_model_path(dir_))) {
    fit_model_ = fit::RandomForestModel::load(fit_model_path(dir_));
  } else if (!catalog_->records().empty()) {
    log_warning("no fit model in " + dir_.string() + "; fit probability defaults to 0.5");
  }
  index_ = std::make_unique<VideoFeatureIndex>(*catalog_, [this](const VideoRecord& v) {
    return fit_model_ ? fit::predict_fit(*fit_model_, fit::features_of(*catalog_, v)).probability : 0.5;
  });

  for (const auto& entry : std::filesystem::directory_iterator(dir_ / "users")) {
    if (entry.path().extension() != ".json") continue;
    auto slot = std::make_unique<UserSlot>();
    try {
      slot->profile = io::read_json(entry.path()).get<LearnerProfile>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, entry.path().string() + ": " + e.what());
    }
    for (const auto& e : slot->profile.history) {
      if (!catalog_->find(e.video_id)) {
        throw Error(ErrorCode::kParseError, entry.path().string() + ": rating references unknown video '" +
                                                e.video_id + "'");
      }
    }
    auto id = slot->profile.id;
    users_.emplace(std::move(id), std::move(slot));
  }
}

Store::~Store() = default;

Store::UserSlot& Store::slot(const std::string& id) const {
  std::shared_lock lock(users_mutex_);
  auto it = users_.find(id);
  if (it == users_.end()) throw Error(ErrorCode::kUnknownUser, "unknown user '" + id + "'");
  return *it->second;
}

void Store::persist(const LearnerProfile& profile) const {
  io::write_file_atomic(dir_ / "users" / (profile.id + ".json"), nlohmann::json(profile).dump(2) + "\n");
}

std::string Store::new_user_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  std::ostringstream ss;
  ss << "u" << std::hex << gen();
  return ss.str();
}

LearnerProfile Store::create_user(const LearnerContext& context) {
  std::unique_lock lock(users_mutex_);
  std::vector<Peer> peers;
  peers.reserve(users_.size());
  for (const auto& [id, slot] : users_) {
    std::lock_guard user_lock(slot->mutex);
    peers.push_back({slot->profile.context, slot->profile.p});
  }
  LearnerProfile profile;
  do {
    profile.id = new_user_id();
  } while (users_.contains(profile.id));
  profile.context = context;
  profile.p = profile.p_init = init_preferences(context, peers);
  persist(profile);
  auto slot = std::make_unique<UserSlot>();
  slot->profile = profile;
  users_.emplace(profile.id, std::move(slot));
  return profile;
}

LearnerProfile Store::get_user(const std::string& id) const {
  auto& s = slot(id);
  std::lock_guard lock(s.mutex);
  return s.profile;
}

LearnerProfile Store::mutate(const std::string& id,
                             const std::function<LearnerProfile(const LearnerProfile&)>& change) {
  auto& s = slot(id);
  std::lock_guard lock(s.mutex);
  LearnerProfile next = change(s.profile);
  if (next != s.profile) persist(next);
  s.profile = next;
  return next;
}

LearnerProfile Store::add_skill(const std::string& user_id, const std::string& skill, Level level) {
  const bool known = std::any_of(skills_.begin(), skills_.end(),
                                 [&](const mining::SkillRecord& s) { return s.name == skill; });
  slot(user_id);  // unknown user is reported before unknown skill
  if (!known) throw Error(ErrorCode::kUnknownSkill, "unknown skill '" + skill + "'");
  return mutate(user_id, [&](const LearnerProfile& p) { return add_target(p, skill, level); });
}

RankedCandidate Store::recommendation(const std::string& user_id, const std::string& skill) const {
  auto& s = slot(user_id);
  std::lock_guard lock(s.mutex);
  return next_recommendation(s.profile, skill, *index_);
}

LearnerProfile Store::rate(const std::string& user_id, const std::string& video_id, int stars) {
  const auto now = options_.clock();
  return mutate(user_id, [&](const LearnerProfile& p) {
    return record_rating(p, video_id, stars, *index_, options_.descent, now);
  });
}

LearnerProfile Store::skip(const std::string& user_id, const std::string& video_id) {
  return mutate(user_id, [&](const LearnerProfile& p) { return skip_recommendation(p, video_id, *index_); });
}

// ---------------------------------------------------------------------------
// Service

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), error_body(code, message));
}

nlohmann::json parse_body(const httplib::Request& req) {
  auto body = nlohmann::json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::kBadRequest, "request body must be a JSON object");
  }
  return body;
}

std::string require_string(const nlohmann::json& body, const char* field) {
  auto it = body.find(field);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorCode::kBadRequest, std::string("missing string field '") + field + "'");
  }
  return it->get<std::string>();
}

nlohmann::json target_json(const std::string& skill, const SkillTarget& t) {
  return {{"skill", skill}, {"level", to_string(t.level)}, {"mastered", t.mastered}};
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, ErrorCode::kBadRequest, e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, {{"code", "Internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

Service::Service(Store& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Service::~Service() { stop(); }

void Service::install_routes() {
  auto& srv = *server_;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/skills", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, store_.skills());
          }));

  srv.Post("/users", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             LearnerContext ctx{require_string(body, "occupation"), require_string(body, "location"),
                                require_string(body, "education")};
             const auto profile = store_.create_user(ctx);
             send_json(res, 200, {{"user_id", profile.id}, {"P", as_vector(profile.p)}});
           }));

  srv.Get(R"(/users/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto profile = store_.get_user(req.matches[1]);
            nlohmann::json targets = nlohmann::json::array();
            for (const auto& [skill, t] : profile.targets) targets.push_back(target_json(skill, t));
            send_json(res, 200,
                      {{"user_id", profile.id},
                       {"occupation", profile.context.occupation},
                       {"location", profile.context.location},
                       {"education", profile.context.education},
                       {"targets", targets},
                       {"P", as_vector(profile.p)},
                       {"ratings", profile.history.size()},
                       {"skipped", profile.skipped}});
          }));

  srv.Post(R"(/users/([^/]+)/skills)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             const auto skill = require_string(body, "skill");
             Level level = Level::kBeginner;
             if (auto it = body.find("level"); it != body.end()) {
               if (it->is_number_integer()) {
                 const int l = it->get<int>();
                 if (l < 0 || l > 2) throw Error(ErrorCode::kBadRequest, "level must be 0, 1 or 2");
                 level = static_cast<Level>(l);
               } else if (it->is_string()) {
                 try {
                   level = parse_level(it->get<std::string>());
                 } catch (const Error& e) {
                   throw Error(ErrorCode::kBadRequest, e.what());
                 }
               } else {
                 throw Error(ErrorCode::kBadRequest, "level must be a string or integer");
               }
             }
             const auto profile = store_.add_skill(req.matches[1], skill, level);
             send_json(res, 200, target_json(skill, profile.targets.at(skill)));
           }));

  srv.Get(R"(/users/([^/]+)/recommendation)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("skill")) throw Error(ErrorCode::kBadRequest, "missing query parameter 'skill'");
            const auto skill = req.get_param_value("skill");
            const auto rec = store_.recommendation(req.matches[1], skill);
            const auto* entry = store_.index().find(rec.video_id);
            send_json(res, 200,
                      {{"video_id", rec.video_id},
                       {"title", entry->video->title},
                       {"url", entry->video->url},
                       {"skill", skill},
                       {"level", to_string(entry->video->level)},
                       {"X", as_vector(rec.x)},
                       {"score", rec.score}});
          }));

  srv.Post(R"(/users/([^/]+)/ratings)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             const auto video_id = require_string(body, "video_id");
             auto stars = body.find("stars");
             if (stars == body.end() || !stars->is_number()) {
               throw Error(ErrorCode::kBadRequest, "missing numeric field 'stars'");
             }
             if (!stars->is_number_integer()) {
               throw Error(ErrorCode::kRatingOutOfRange, "stars must be an integer in 1..5");
             }
             const auto value = stars->get<long long>();
             if (value < 1 || value > 5) {
               throw Error(ErrorCode::kRatingOutOfRange, "stars must be in 1..5, got " + std::to_string(value));
             }
             const auto profile = store_.rate(req.matches[1], video_id, static_cast<int>(value));
             const auto& skill = store_.index().find(video_id)->video->target_skill;
             const auto& t = profile.targets.at(skill);
             send_json(res, 200,
                       {{"skill", skill},
                        {"level", to_string(t.level)},
                        {"mastered", t.mastered},
                        {"P", as_vector(profile.p)}});
           }));

  srv.Post(R"(/users/([^/]+)/skips)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             store_.skip(req.matches[1], require_string(body, "video_id"));
             res.status = 204;
           }));
}

int Service::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace skillrec
