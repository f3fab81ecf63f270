#include "skillrec/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "skillrec/error.hpp"
#include "skillrec/io.hpp"

namespace skillrec {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kParseError, "field '" + field + "': " + why);
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string_view to_string(VideoSource s) {
  return s == VideoSource::kYoutube ? "youtube" : "av_portal";
}

std::string_view to_string(Level l) {
  switch (l) {
    case Level::kBeginner: return "beginner";
    case Level::kIntermediate: return "intermediate";
    case Level::kAdvanced: return "advanced";
  }
  return "beginner";
}

VideoSource parse_source(std::string_view s) {
  const auto v = lower(s);
  if (v == "youtube") return VideoSource::kYoutube;
  if (v == "av_portal" || v == "av-portal" || v == "tib_av" || v == "tib") return VideoSource::kAvPortal;
  bad_field("source", "unknown source '" + std::string(s) + "'");
}

Level parse_level(std::string_view s) {
  const auto v = lower(s);
  if (v == "beginner") return Level::kBeginner;
  if (v == "intermediate") return Level::kIntermediate;
  if (v == "advanced") return Level::kAdvanced;
  bad_field("level", "unknown level '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const VideoRecord& v) {
  j = nlohmann::json::object();
  j["id"] = v.id;
  j["source"] = to_string(v.source);
  j["title"] = v.title;
  j["target_skill"] = v.target_skill;
  j["url"] = v.url;
  j["length_s"] = v.length_s;
  j["description"] = v.description;
  j["transcript"] = v.transcript;
  if (v.view_count) j["view_count"] = *v.view_count;
  if (v.rating) j["rating"] = *v.rating;
  if (v.likes) j["likes"] = *v.likes;
  if (v.dislikes) j["dislikes"] = *v.dislikes;
  j["relevancy_score"] = v.relevancy_score;
  j["level"] = to_string(v.level);
  j["text_similarity"] = v.text_similarity;
  if (v.fit_label) j["fit_label"] = *v.fit_label;
}

void from_json(const nlohmann::json& j, VideoRecord& v) {
  v.id = j.at("id").get<std::string>();
  if (v.id.empty()) bad_field("id", "empty");
  v.source = parse_source(j.value("source", "youtube"));
  v.title = j.value("title", "");
  v.target_skill = j.at("target_skill").get<std::string>();
  v.url = j.value("url", "");
  v.length_s = j.value("length_s", 0.0);
  if (!(v.length_s >= 0.0) || !std::isfinite(v.length_s)) bad_field("length_s", "must be >= 0");
  v.description = j.value("description", "");
  v.transcript = j.value("transcript", "");
  v.view_count = optional_field<std::int64_t>(j, "view_count");
  v.rating = optional_field<double>(j, "rating");
  v.likes = optional_field<std::int64_t>(j, "likes");
  v.dislikes = optional_field<std::int64_t>(j, "dislikes");
  if (v.view_count && *v.view_count < 0) bad_field("view_count", "must be >= 0");
  if (v.likes && *v.likes < 0) bad_field("likes", "must be >= 0");
  if (v.dislikes && *v.dislikes < 0) bad_field("dislikes", "must be >= 0");
  v.relevancy_score = j.at("relevancy_score").get<double>();
  if (!(v.relevancy_score > 0.0 && v.relevancy_score <= 1.0)) {
    bad_field("relevancy_score", "must lie in (0, 1]");
  }
  const double position = 1.0 / v.relevancy_score;
  if (std::abs(position - std::round(position)) > 1e-6 * position) {
    bad_field("relevancy_score", "must equal 1/position for an integer position");
  }
  const auto& level = j.at("level");
  if (level.is_number_integer()) {
    const int l = level.get<int>();
    if (l < 0 || l > 2) bad_field("level", "must be 0, 1 or 2");
    v.level = static_cast<Level>(l);
  } else {
    v.level = parse_level(level.get<std::string>());
  }
  v.text_similarity = j.value("text_similarity", 0.0);
  if (!(v.text_similarity >= -1.0 && v.text_similarity <= 1.0)) {
    bad_field("text_similarity", "must lie in [-1, 1]");
  }
  v.fit_label = optional_field<int>(j, "fit_label");
  if (v.fit_label && *v.fit_label != 0 && *v.fit_label != 1) bad_field("fit_label", "must be 0 or 1");
}

double relevancy_from_rank(long long position) {
  if (position < 1) {
    throw Error(ErrorCode::kInvalidRank, "ranking position must be >= 1, got " + std::to_string(position));
  }
  return 1.0 / static_cast<double>(position);
}

std::vector<double> minmax_normalize(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "minmax_normalize: empty input");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(minmax_scale(v, *lo, *hi));
  return out;
}

double popularity_diff(const VideoRecord& v) {
  return static_cast<double>(v.likes.value_or(0)) - static_cast<double>(v.dislikes.value_or(0));
}

double popularity(const VideoRecord& v, const SkillGroup& group) {
  return minmax_scale(popularity_diff(v), group.popularity_min, group.popularity_max);
}

double normalized_length(const VideoRecord& v, const SkillGroup& group) {
  return minmax_scale(v.length_s, group.length_min, group.length_max);
}

FeatureVectorX build_feature_vector_x(const VideoRecord& v, const SkillGroup& group,
                                      double fit_probability) {
  FeatureVectorX x;
  x << popularity(v, group), fit_probability, normalized_length(v, group), v.text_similarity;
  return x;
}

FixtureTranscriptProvider FixtureTranscriptProvider::load(const std::filesystem::path& path) {
  try {
    return FixtureTranscriptProvider(io::read_json(path).get<std::map<std::string, std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

std::optional<std::string> FixtureTranscriptProvider::transcript(const VideoRecord& v) const {
  auto it = entries_.find(v.id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Catalog::Catalog(std::vector<VideoRecord> records, const std::vector<mining::SkillRecord>& skills)
    : records_(std::move(records)) {
  std::set<std::string> known;
  for (const auto& s : skills) known.insert(s.name);

  std::map<std::string, std::vector<double>> ratings;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& v = records_[i];
    if (!known.contains(v.target_skill)) {
      throw Error(ErrorCode::kUnknownSkill,
                  "video '" + v.id + "' names unknown skill '" + v.target_skill + "'");
    }
    if (!index_.emplace(v.id, i).second) {
      throw Error(ErrorCode::kParseError, "duplicate video id '" + v.id + "'");
    }
    auto [it, fresh] = groups_.try_emplace(v.target_skill);
    auto& g = it->second;
    const double pop = popularity_diff(v);
    if (fresh) {
      g.skill = v.target_skill;
      g.popularity_min = g.popularity_max = pop;
      g.length_min = g.length_max = v.length_s;
    } else {
      g.popularity_min = std::min(g.popularity_min, pop);
      g.popularity_max = std::max(g.popularity_max, pop);
      g.length_min = std::min(g.length_min, v.length_s);
      g.length_max = std::max(g.length_max, v.length_s);
    }
    g.video_ids.push_back(v.id);
    if (v.rating) ratings[v.target_skill].push_back(*v.rating);
  }
  for (auto& [skill, values] : ratings) groups_.at(skill).rating_median = median(values);
}

const VideoRecord* Catalog::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

const SkillGroup& Catalog::group(const std::string& skill) const {
  auto it = groups_.find(skill);
  if (it == groups_.end()) throw Error(ErrorCode::kUnknownSkill, "no videos for skill '" + skill + "'");
  return it->second;
}

double Catalog::imputed_rating(const VideoRecord& v) const {
  if (v.rating) return *v.rating;
  return group(v.target_skill).rating_median.value_or(0.0);
}

std::string Catalog::to_jsonl() const {
  std::string out;
  for (const auto& v : records_) {
    out += nlohmann::json(v).dump();
    out += '\n';
  }
  return out;
}

std::vector<VideoRecord> read_catalog_records(const std::filesystem::path& path) {
  std::vector<VideoRecord> records;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line_no) {
    try {
      records.push_back(j.get<VideoRecord>());
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  return records;
}

Catalog ingest_catalog(const std::filesystem::path& path,
                       const std::vector<mining::SkillRecord>& skills,
                       const IngestOptions& options) {
  std::map<std::string, const mining::SkillRecord*> by_name;
  for (const auto& s : skills) by_name.emplace(s.name, &s);

  std::vector<VideoRecord> records;
  std::size_t record_no = 0;
  for (auto& v : read_catalog_records(path)) {
    ++record_no;
    auto skill = by_name.find(v.target_skill);
    if (skill == by_name.end()) {
      throw Error(ErrorCode::kUnknownSkill, path.string() + ": record " + std::to_string(record_no) +
                                                " ('" + v.id + "') names unknown skill '" +
                                                v.target_skill + "'");
    }
    if (v.transcript.empty() && options.transcripts) {
      if (auto t = options.transcripts->transcript(v)) v.transcript = *t;
    }
    if (options.vectors) {
      v.text_similarity = v.transcript.empty()
                              ? 0.0
                              : text_similarity(*options.vectors, v.transcript,
                                                skill->second->description, options.similarity);
    }
    records.push_back(std::move(v));
  }
  return Catalog(std::move(records), skills);
}

}  // namespace skillrec
