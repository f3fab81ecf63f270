#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skillrec/text.hpp"
#include "skillrec/types.hpp"

namespace skillrec::mining {

struct LabeledSentence {
  text::Sentence sentence;
  int label = 0;  ///< 1 = from a "Required Skills" section
};

/// One vacancy from the JSONL corpus.
struct Vacancy {
  struct Section {
    std::string name;
    std::string text;
  };
  std::string id;
  std::vector<Section> sections;
};

std::vector<Vacancy> load_vacancies(const std::filesystem::path& path);

/// Sentences of every section; label 1 for sections named "Required Skills"
/// (case-insensitive).
std::vector<LabeledSentence> label_sentences(const std::vector<Vacancy>& vacancies,
                                             const text::StopWords& stopwords);

/// Labeled sentence fixture: JSONL {"text": str, "label": 0|1, ...}. Each
/// line becomes a single sentence (no further splitting).
std::vector<LabeledSentence> load_labeled_sentences(const std::filesystem::path& path,
                                                    const text::StopWords& stopwords);

// ---------------------------------------------------------------------------
// Sentence classifier: averaged hashed n-gram embeddings, logistic output.

struct ClassifierConfig {
  int dim = 50;
  int max_n = 2;
  std::uint32_t buckets = 1u << 20;
  int epochs = 5;
  double learning_rate = 0.1;
  std::uint64_t seed = 42;
};

class SentenceClassifierModel {
 public:
  static constexpr int kFormatVersion = 1;

  SentenceClassifierModel() = default;
  explicit SentenceClassifierModel(ClassifierConfig config);

  const ClassifierConfig& config() const { return config_; }
  double bias() const { return bias_; }
  const VectorX<double>& output_weights() const { return output_; }
  /// Trained rows only; absent buckets use their deterministic initial value.
  const std::map<std::uint32_t, VectorX<double>>& embeddings() const { return rows_; }
  /// Mean training loss after each epoch.
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

  std::uint32_t bucket_of(const text::NGram& g) const;
  std::vector<std::uint32_t> features(const text::Sentence& s) const;

  /// Sentence representation: mean of the feature rows (zero for no features).
  VectorX<double> hidden(const std::vector<std::uint32_t>& features) const;
  double probability(const text::Sentence& s) const;

  nlohmann::json to_json() const;
  static SentenceClassifierModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static SentenceClassifierModel load(const std::filesystem::path& path);

  void set_bias(double b) { bias_ = b; }

 private:
  friend SentenceClassifierModel train_sentence_classifier(const std::vector<LabeledSentence>&,
                                                           const ClassifierConfig&);

  VectorX<double> initial_row(std::uint32_t bucket) const;
  VectorX<double>& row(std::uint32_t bucket);

  ClassifierConfig config_;
  VectorX<double> output_;
  double bias_ = 0.0;
  std::map<std::uint32_t, VectorX<double>> rows_;
  std::vector<double> epoch_losses_;
};

SentenceClassifierModel train_sentence_classifier(const std::vector<LabeledSentence>& data,
                                                  const ClassifierConfig& config);

struct Classification {
  double probability = 0.0;
  int label = 0;
};

/// label = 1 iff probability >= 0.5.
Classification classify_sentence(const SentenceClassifierModel& model, const text::Sentence& s);

struct F1Report {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Precision/recall/F1 of the positive class from parallel label vectors.
F1Report f1_from_labels(const std::vector<int>& truth, const std::vector<int>& predicted);

F1Report evaluate_f1(const SentenceClassifierModel& model, const std::vector<LabeledSentence>& test);

// ---------------------------------------------------------------------------
// TF-IDF skill terms.

struct SkillRecord {
  std::string name;
  std::vector<std::string> keywords;
  std::string description;
  double score = 0.0;

  bool operator==(const SkillRecord&) const = default;
};

void to_json(nlohmann::json& j, const SkillRecord& s);
void from_json(const nlohmann::json& j, SkillRecord& s);

std::vector<SkillRecord> load_skills(const std::filesystem::path& path);
void save_skills(const std::filesystem::path& path, const std::vector<SkillRecord>& skills);

struct ScoredNGram {
  text::NGram ngram;
  int df = 0;
  double score = 0.0;
};

/// Each sentence is one document. tf = raw count, idf = ln((1+N)/(1+df)) + 1,
/// score = sum over documents of tf*idf. Terms with df < min_df are dropped.
/// Sorted by score descending, ties by joined n-gram ascending.
std::vector<ScoredNGram> score_ngrams(const std::vector<text::Sentence>& documents, int min_df,
                                      int max_n);

/// Ranked n-grams merged by head token into at most `top_k` skills. A skill's
/// score is its best member's score. Its name is its longest keyword found in
/// at least half as many sentences as its most common keyword. A group whose
/// name occurs inside a longer skill name at least half as often as on its own
/// joins that skill. Names and keywords use the most frequent unstemmed spelling.
std::vector<SkillRecord> extract_skill_terms(const std::vector<text::Sentence>& positive_sentences,
                                             int min_df = 3, int max_n = 3, int top_k = 16);

// ---------------------------------------------------------------------------
// Skill descriptions.

class DescriptionProvider {
 public:
  virtual ~DescriptionProvider() = default;
  /// First-paragraph summary for `name`, or nullopt on a miss.
  /// Throws Error(ProviderUnavailable) when the backend cannot be reached.
  virtual std::optional<std::string> lookup(const std::string& name) const = 0;
};

/// JSON object file mapping skill name -> description.
class FixtureDescriptionProvider : public DescriptionProvider {
 public:
  explicit FixtureDescriptionProvider(std::map<std::string, std::string> entries)
      : entries_(std::move(entries)) {}
  static FixtureDescriptionProvider load(const std::filesystem::path& path);

  std::optional<std::string> lookup(const std::string& name) const override;

 private:
  std::map<std::string, std::string> entries_;
};

/// Encyclopedia page-summary client. Issues GET {path_prefix}{title} against
/// `base_url` and reads the "extract" field of the JSON response.
class HttpDescriptionProvider : public DescriptionProvider {
 public:
  explicit HttpDescriptionProvider(std::string base_url,
                                   std::string path_prefix = "/api/rest_v1/page/summary/");

  std::optional<std::string> lookup(const std::string& name) const override;

 private:
  std::string base_url_;
  std::string path_prefix_;
};

/// Description := provider's first paragraph; skill unchanged on a miss.
SkillRecord enrich_description(const SkillRecord& skill, const DescriptionProvider& provider);

}  // namespace skillrec::mining
