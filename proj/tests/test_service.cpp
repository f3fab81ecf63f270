#include <doctest.h>

#include "skillrec/io.hpp"
#include "skillrec/service.hpp"
#include "support.hpp"

// after Eigen: <resolv.h> defines _res
#include <httplib.h>

using namespace skillrec;
using nlohmann::json;

namespace {

// Three videos per level of "sql"; a single beginner video of "python".
void write_store(const std::filesystem::path& dir) {
  std::vector<VideoRecord> records;
  for (int level = 0; level < 3; ++level) {
    for (int i = 0; i < 3; ++i) {
      records.push_back(testing::video("sql-" + std::to_string(level) + "-" + std::to_string(i), "sql",
                                       static_cast<Level>(level), 300.0 + 400.0 * i, 10 * (i + 1), i,
                                       0.2 + 0.3 * i));
    }
  }
  records.push_back(testing::video("py-0", "python"));
  const auto skills = testing::skills({"sql", "python"});
  mining::save_skills(Store::skills_path(dir), skills);
  io::write_file_atomic(Store::catalog_path(dir), Catalog(records, skills).to_jsonl());
}

Store::Options fixed_clock() {
  Store::Options o;
  o.clock = [] { return std::int64_t{1700000000000}; };
  return o;
}

struct Running {
  explicit Running(const std::filesystem::path& dir) : store(dir, fixed_clock()), service(store) {
    port = service.start("127.0.0.1", 0);
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }
  Store store;
  Service service;
  int port = 0;
};

json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

void check_error(const httplib::Result& r, int status, const std::string& code) {
  REQUIRE(r);
  CHECK(r->status == status);
  const auto b = json::parse(r->body);
  CHECK(b.at("code") == code);
  CHECK(b.at("message").is_string());
}

httplib::Result post(httplib::Client& c, const std::string& path, const json& body) {
  return c.Post(path, body.dump(), "application/json");
}

std::string new_user(httplib::Client& c) {
  const auto r = post(c, "/users", {{"occupation", "analyst"}, {"location", "Berlin"}, {"education", "BSc"}});
  REQUIRE(r);
  REQUIRE(r->status == 200);
  return json::parse(r->body).at("user_id");
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("empty store serves an empty skill list") {
    testing::TempDir dir;
    Running s(dir.path());
    auto c = s.client();
    const auto r = c.Get("/skills");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body) == json::array());
    const auto opt = c.Options("/users");
    REQUIRE(opt);
    CHECK(opt->status == 204);
  }

  TEST_CASE("learner session over HTTP") {
    testing::TempDir dir;
    write_store(dir.path());
    Running s(dir.path());
    auto c = s.client();

    const auto skills = body_of(c.Get("/skills"));
    REQUIRE(skills.size() == 2);

    const auto created = body_of(post(c, "/users", {{"occupation", "analyst"}, {"location", "Berlin"}, {"education", "BSc"}}));
    const std::string uid = created.at("user_id");
    CHECK(created.at("P") == json::array({0.25, 0.25, 0.25, 0.25}));

    const auto target = body_of(post(c, "/users/" + uid + "/skills", {{"skill", "sql"}}));
    CHECK(target == json{{"skill", "sql"}, {"level", "beginner"}, {"mastered", false}});

    const auto rec = body_of(c.Get("/users/" + uid + "/recommendation?skill=sql"));
    for (const char* k : {"video_id", "title", "url", "skill", "level", "X", "score"}) CHECK(rec.contains(k));
    CHECK(rec.at("level") == "beginner");
    CHECK(rec.at("X").size() == 4);

    const auto rated = body_of(post(c, "/users/" + uid + "/ratings", {{"video_id", rec.at("video_id")}, {"stars", 4}}));
    CHECK(rated.at("skill") == "sql");
    CHECK(rated.at("level") == "intermediate");
    CHECK(rated.at("mastered") == false);
    CHECK(rated.at("P").size() == 4);

    const auto next = body_of(c.Get("/users/" + uid + "/recommendation?skill=sql"));
    CHECK(next.at("video_id") != rec.at("video_id"));
    CHECK(next.at("level") == "intermediate");

    const auto skip = post(c, "/users/" + uid + "/skips", {{"video_id", next.at("video_id")}});
    REQUIRE(skip);
    CHECK(skip->status == 204);
    CHECK(body_of(c.Get("/users/" + uid + "/recommendation?skill=sql")).at("video_id") != next.at("video_id"));

    const auto user = body_of(c.Get("/users/" + uid));
    CHECK(user.at("ratings") == 1);
    CHECK(user.at("skipped").size() == 1);
    CHECK(user.at("targets").size() == 1);

    const auto history = io::read_json(dir / ("users/" + uid + ".json")).at("history");
    REQUIRE(history.size() == 1);
    CHECK(history[0].at("timestamp") == 1700000000000);
  }

  TEST_CASE("error statuses") {
    testing::TempDir dir;
    write_store(dir.path());
    Running s(dir.path());
    auto c = s.client();
    const auto uid = new_user(c);
    const auto base = "/users/" + uid;

    check_error(c.Post("/users", "{not json", "application/json"), 400, "BadRequest");
    check_error(post(c, "/users", {{"occupation", "x"}}), 400, "BadRequest");
    check_error(c.Get("/users/nobody"), 404, "UnknownUser");
    check_error(post(c, base + "/skills", {{"skill", "cobol"}}), 404, "UnknownSkill");
    check_error(post(c, base + "/skills", {{"skill", "sql"}, {"level", "expert"}}), 400, "BadRequest");
    check_error(c.Get(base + "/recommendation"), 400, "BadRequest");
    check_error(c.Get(base + "/recommendation?skill=sql"), 404, "UnknownSkill");

    REQUIRE(post(c, base + "/skills", {{"skill", "sql"}, {"level", "advanced"}})->status == 200);
    check_error(post(c, base + "/skills", {{"skill", "sql"}}), 409, "DuplicateTarget");

    const std::string vid = body_of(c.Get(base + "/recommendation?skill=sql")).at("video_id");
    check_error(post(c, base + "/ratings", {{"video_id", vid}, {"stars", 0}}), 422, "RatingOutOfRange");
    check_error(post(c, base + "/ratings", {{"video_id", vid}, {"stars", 2.5}}), 422, "RatingOutOfRange");
    check_error(post(c, base + "/ratings", {{"video_id", vid}, {"stars", 6}}), 422, "RatingOutOfRange");
    check_error(post(c, base + "/ratings", {{"video_id", "nope"}, {"stars", 3}}), 404, "UnknownVideo");
    check_error(post(c, base + "/ratings", {{"video_id", "sql-0-0"}, {"stars", 3}}), 409, "NotActiveRecommendation");

    REQUIRE(post(c, base + "/ratings", {{"video_id", vid}, {"stars", 5}})->status == 200);
    check_error(c.Get(base + "/recommendation?skill=sql"), 409, "SkillMastered");

    REQUIRE(post(c, base + "/skills", {{"skill", "python"}})->status == 200);
    const std::string py = body_of(c.Get(base + "/recommendation?skill=python")).at("video_id");
    REQUIRE(post(c, base + "/skips", {{"video_id", py}})->status == 204);
    check_error(c.Get(base + "/recommendation?skill=python"), 410, "NoCandidates");
  }

  TEST_CASE("responses survive a restart byte for byte") {
    testing::TempDir dir;
    write_store(dir.path());
    std::string uid;
    std::vector<std::string> before;
    const auto snapshot = [&](httplib::Client& c) {
      std::vector<std::string> out;
      for (const std::string path : {std::string("/skills"), "/users/" + uid, "/users/" + uid + "/recommendation?skill=sql"}) {
        const auto r = c.Get(path);
        REQUIRE(r);
        out.push_back(r->body);
      }
      return out;
    };
    {
      Running s(dir.path());
      auto c = s.client();
      uid = new_user(c);
      post(c, "/users/" + uid + "/skills", {{"skill", "sql"}});
      for (int stars : {2, 3}) {
        const std::string vid = body_of(c.Get("/users/" + uid + "/recommendation?skill=sql")).at("video_id");
        REQUIRE(post(c, "/users/" + uid + "/ratings", {{"video_id", vid}, {"stars", stars}})->status == 200);
      }
      before = snapshot(c);
    }
    Running s(dir.path());
    auto c = s.client();
    CHECK(snapshot(c) == before);
    CHECK(s.store.get_user(uid).p == replay_preferences(s.store.get_user(uid)));
  }

  TEST_CASE("a failed write publishes nothing") {
    testing::TempDir dir;
    write_store(dir.path());
    Store store(dir.path(), fixed_clock());
    auto profile = store.create_user({"a", "b", "c"});
    profile = store.add_skill(profile.id, "sql", Level::kBeginner);
    const auto file = dir / ("users/" + profile.id + ".json");
    const auto saved = io::read_file(file);

    // A non-empty directory in place of the profile makes the final rename fail.
    std::filesystem::rename(file, dir / "backup.json");
    std::filesystem::create_directories(file / "blocker");
    const auto vid = store.recommendation(profile.id, "sql").video_id;
    CHECK(testing::error_of([&] { store.rate(profile.id, vid, 4); }) == ErrorCode::kIoError);
    CHECK(store.get_user(profile.id) == profile);
    std::filesystem::remove_all(file);
    std::filesystem::rename(dir / "backup.json", file);
    CHECK(io::read_file(file) == saved);

    std::size_t entries = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "users")) entries += e.exists();
    CHECK(entries == 1);
  }

  TEST_CASE("cold start uses stored peers") {
    testing::TempDir dir;
    write_store(dir.path());
    Store store(dir.path(), fixed_clock());
    auto first = store.create_user({"analyst", "Berlin", "BSc"});
    store.add_skill(first.id, "sql", Level::kBeginner);
    first = store.rate(first.id, store.recommendation(first.id, "sql").video_id, 1);
    const auto second = store.create_user({"analyst", "Oslo", "PhD"});
    CHECK(second.p == first.p);
    CHECK(second.p_init == first.p);
    CHECK(store.create_user({"pilot", "Rome", "none"}).p == uniform_preferences());
  }
}
