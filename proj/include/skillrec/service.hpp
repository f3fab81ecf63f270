#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/catalog.hpp"
#include "skillrec/fit_model.hpp"
#include "skillrec/learner.hpp"
#include "skillrec/skill_mining.hpp"

namespace httplib {
class Server;
}

namespace skillrec {

/// Directory-backed state of a running service:
///   skills.json, catalog.jsonl, models/fit_model.json, users/{id}.json
/// Skills, catalog and models are read once and immutable afterwards; each
/// user profile is rewritten atomically on every accepted mutation.
class Store {
 public:
  struct Options {
    DescentConfig descent;
    /// Milliseconds since epoch stamped on rating events.
    std::function<std::int64_t()> clock;
  };

  explicit Store(std::filesystem::path dir);
  Store(std::filesystem::path dir, Options options);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  static std::filesystem::path skills_path(const std::filesystem::path& dir) { return dir / "skills.json"; }
  static std::filesystem::path catalog_path(const std::filesystem::path& dir) { return dir / "catalog.jsonl"; }
  static std::filesystem::path fit_model_path(const std::filesystem::path& dir) {
    return dir / "models" / "fit_model.json";
  }

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<mining::SkillRecord>& skills() const { return skills_; }
  const Catalog& catalog() const { return *catalog_; }
  const VideoFeatureIndex& index() const { return *index_; }
  bool has_fit_model() const { return fit_model_.has_value(); }

  LearnerProfile create_user(const LearnerContext& context);
  LearnerProfile get_user(const std::string& id) const;
  LearnerProfile add_skill(const std::string& user_id, const std::string& skill, Level level);
  RankedCandidate recommendation(const std::string& user_id, const std::string& skill) const;
  LearnerProfile rate(const std::string& user_id, const std::string& video_id, int stars);
  LearnerProfile skip(const std::string& user_id, const std::string& video_id);

 private:
  struct UserSlot {
    mutable std::mutex mutex;
    LearnerProfile profile;
  };

  UserSlot& slot(const std::string& id) const;
  /// Runs `change` on a copy under the user's lock; persists before publishing.
  LearnerProfile mutate(const std::string& id,
                        const std::function<LearnerProfile(const LearnerProfile&)>& change);
  void persist(const LearnerProfile& profile) const;
  std::string new_user_id();

  std::filesystem::path dir_;
  Options options_;
  std::vector<mining::SkillRecord> skills_;
  std::unique_ptr<Catalog> catalog_;
  std::optional<fit::RandomForestModel> fit_model_;
  std::unique_ptr<VideoFeatureIndex> index_;

  mutable std::shared_mutex users_mutex_;
  std::map<std::string, std::unique_ptr<UserSlot>> users_;
};

/// JSON-over-HTTP front end for a Store.
class Service {
 public:
  explicit Service(Store& store);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  void install_routes();

  Store& store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

nlohmann::json error_body(ErrorCode code, const std::string& message);

}  // namespace skillrec
