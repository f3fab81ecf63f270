#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "skillrec/catalog.hpp"
#include "skillrec/error.hpp"
#include "skillrec/skill_mining.hpp"

namespace skillrec::testing {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("skillrec-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline VideoRecord video(std::string id, std::string skill, Level level = Level::kBeginner,
                         double length_s = 600.0, std::optional<std::int64_t> likes = std::nullopt,
                         std::optional<std::int64_t> dislikes = std::nullopt, double similarity = 0.5) {
  VideoRecord v;
  v.id = std::move(id);
  v.target_skill = std::move(skill);
  v.level = level;
  v.length_s = length_s;
  v.likes = likes;
  v.dislikes = dislikes;
  v.text_similarity = similarity;
  v.title = v.id;
  v.url = "https://videos.example.org/" + v.id;
  return v;
}

inline std::vector<mining::SkillRecord> skills(std::initializer_list<const char*> names) {
  std::vector<mining::SkillRecord> out;
  for (const char* n : names) out.push_back({n, {n}, std::string(n) + " is a skill.", 1.0});
  return out;
}

/// Runs `fn` and returns the code of the skillrec::Error it throws.
template <typename Fn>
std::optional<ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace skillrec::testing
