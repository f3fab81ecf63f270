#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/embeddings.hpp"
#include "skillrec/skill_mining.hpp"
#include "skillrec/types.hpp"

namespace skillrec {

enum class VideoSource { kYoutube, kAvPortal };
enum class Level : int { kBeginner = 0, kIntermediate = 1, kAdvanced = 2 };

std::string_view to_string(VideoSource s);
std::string_view to_string(Level l);
VideoSource parse_source(std::string_view s);
/// Accepts "beginner" / "intermediate" / "advanced" (case-insensitive).
Level parse_level(std::string_view s);

struct VideoRecord {
  std::string id;
  VideoSource source = VideoSource::kYoutube;
  std::string title;
  std::string target_skill;
  std::string url;
  double length_s = 0.0;
  std::string description;
  std::string transcript;
  std::optional<std::int64_t> view_count;
  std::optional<double> rating;
  std::optional<std::int64_t> likes;
  std::optional<std::int64_t> dislikes;
  double relevancy_score = 1.0;
  Level level = Level::kBeginner;
  double text_similarity = 0.0;
  std::optional<int> fit_label;

  bool operator==(const VideoRecord&) const = default;
};

void to_json(nlohmann::json& j, const VideoRecord& v);
/// Validates field ranges; throws Error(ParseError) with the offending field.
void from_json(const nlohmann::json& j, VideoRecord& v);

/// 1/position. Throws InvalidRank for position < 1.
double relevancy_from_rank(long long position);

/// (v - min) / (max - min); every output is 0.5 when max == min. Throws EmptyInput.
std::vector<double> minmax_normalize(const std::vector<double>& values);

template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> minmax_normalize(
    const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  if (values.size() == 0) throw Error(ErrorCode::kEmptyInput, "minmax_normalize: empty input");
  const Scalar lo = values.minCoeff();
  const Scalar hi = values.maxCoeff();
  if (hi == lo) return Eigen::Array<Scalar, Eigen::Dynamic, 1>::Constant(values.size(), Scalar(0.5));
  return (values.derived().array() - lo) / (hi - lo);
}

struct SkillGroup {
  std::string skill;
  std::vector<std::string> video_ids;
  double popularity_min = 0.0, popularity_max = 0.0;  ///< over likes - dislikes
  double length_min = 0.0, length_max = 0.0;
  std::optional<double> rating_median;                ///< over members with a rating
};

/// likes - dislikes with absent counts taken as 0.
double popularity_diff(const VideoRecord& v);

/// Group-local min-max of likes - dislikes.
double popularity(const VideoRecord& v, const SkillGroup& group);
double normalized_length(const VideoRecord& v, const SkillGroup& group);

/// X = [popularity, fit_probability, normalized length, text similarity].
FeatureVectorX build_feature_vector_x(const VideoRecord& v, const SkillGroup& group,
                                      double fit_probability);

/// Supplies transcripts for records that arrive without one.
class TranscriptProvider {
 public:
  virtual ~TranscriptProvider() = default;
  virtual std::optional<std::string> transcript(const VideoRecord& v) const = 0;
};

/// JSON object file mapping video id -> transcript text.
class FixtureTranscriptProvider : public TranscriptProvider {
 public:
  explicit FixtureTranscriptProvider(std::map<std::string, std::string> entries)
      : entries_(std::move(entries)) {}
  static FixtureTranscriptProvider load(const std::filesystem::path& path);
  std::optional<std::string> transcript(const VideoRecord& v) const override;

 private:
  std::map<std::string, std::string> entries_;
};

/// Immutable set of videos grouped by target skill.
class Catalog {
 public:
  Catalog() = default;
  /// Validates every record against `skills` (UnknownSkill) and builds groups.
  Catalog(std::vector<VideoRecord> records, const std::vector<mining::SkillRecord>& skills);

  const std::vector<VideoRecord>& records() const { return records_; }
  const std::map<std::string, SkillGroup>& groups() const { return groups_; }
  const VideoRecord* find(const std::string& id) const;
  const SkillGroup& group(const std::string& skill) const;

  /// Rating with absent values imputed by the group median (0 if none in group).
  double imputed_rating(const VideoRecord& v) const;

  std::string to_jsonl() const;

 private:
  std::vector<VideoRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, SkillGroup> groups_;
};

struct IngestOptions {
  /// Recompute text_similarity from word vectors. Without a store the value
  /// in the file is kept.
  const WordVectorStore* vectors = nullptr;
  const TranscriptProvider* transcripts = nullptr;
  SimilarityOptions similarity;
};

/// Parses and validates catalog JSONL records. Errors: ParseError (with line).
std::vector<VideoRecord> read_catalog_records(const std::filesystem::path& path);

/// Reads a catalog JSONL file. Errors: ParseError (with line), UnknownSkill.
Catalog ingest_catalog(const std::filesystem::path& path,
                       const std::vector<mining::SkillRecord>& skills,
                       const IngestOptions& options = {});

}  // namespace skillrec
