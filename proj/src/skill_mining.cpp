#include "skillrec/skill_mining.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <httplib.h>

#include "skillrec/error.hpp"
#include "skillrec/io.hpp"
#include "skillrec/log.hpp"
#include "skillrec/random.hpp"

namespace skillrec::mining {
namespace {

std::string lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_loss(double p, int y) {
  constexpr double kEps = 1e-12;
  return y == 1 ? -std::log(std::max(p, kEps)) : -std::log(std::max(1.0 - p, kEps));
}

}  // namespace

// ---------------------------------------------------------------------------
// corpus loading

std::vector<Vacancy> load_vacancies(const std::filesystem::path& path) {
  std::vector<Vacancy> out;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) {
    Vacancy v;
    v.id = j.at("id").get<std::string>();
    for (const auto& s : j.at("sections")) {
      v.sections.push_back({s.at("name").get<std::string>(), s.at("text").get<std::string>()});
    }
    out.push_back(std::move(v));
  });
  return out;
}

std::vector<LabeledSentence> label_sentences(const std::vector<Vacancy>& vacancies,
                                             const text::StopWords& stopwords) {
  std::vector<LabeledSentence> out;
  for (const auto& v : vacancies) {
    for (const auto& section : v.sections) {
      const int label = lower(section.name) == "required skills" ? 1 : 0;
      for (auto& s : text::preprocess(section.text, stopwords, v.id, section.name)) {
        out.push_back({std::move(s), label});
      }
    }
  }
  return out;
}

std::vector<LabeledSentence> load_labeled_sentences(const std::filesystem::path& path,
                                                    const text::StopWords& stopwords) {
  std::vector<LabeledSentence> out;
  io::for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t line_no) {
    const auto raw = j.at("text").get<std::string>();
    const int label = j.at("label").get<int>();
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": label must be 0 or 1");
    }
    out.push_back({text::make_sentence(raw, stopwords, j.value("id", std::to_string(line_no)),
                                       j.value("section", "")),
                   label});
  });
  return out;
}

// ---------------------------------------------------------------------------
// classifier

SentenceClassifierModel::SentenceClassifierModel(ClassifierConfig config)
    : config_(config), output_(VectorX<double>::Zero(config.dim)) {}

std::uint32_t SentenceClassifierModel::bucket_of(const text::NGram& g) const {
  return static_cast<std::uint32_t>(fnv1a(g.joined()) % config_.buckets);
}

std::vector<std::uint32_t> SentenceClassifierModel::features(const text::Sentence& s) const {
  std::vector<std::uint32_t> out;
  for (const auto& g : text::ngrams(s, config_.max_n)) out.push_back(bucket_of(g));
  return out;
}

VectorX<double> SentenceClassifierModel::initial_row(std::uint32_t bucket) const {
  Rng rng(mix_seed(config_.seed) ^ (static_cast<std::uint64_t>(bucket) * 0x9E3779B97F4A7C15ull));
  const double bound = 1.0 / config_.dim;
  VectorX<double> v(config_.dim);
  for (int i = 0; i < config_.dim; ++i) v[i] = rng.uniform(-bound, bound);
  return v;
}

VectorX<double>& SentenceClassifierModel::row(std::uint32_t bucket) {
  auto it = rows_.find(bucket);
  if (it == rows_.end()) it = rows_.emplace(bucket, initial_row(bucket)).first;
  return it->second;
}

VectorX<double> SentenceClassifierModel::hidden(const std::vector<std::uint32_t>& feats) const {
  VectorX<double> h = VectorX<double>::Zero(config_.dim);
  if (feats.empty()) return h;
  for (auto b : feats) {
    auto it = rows_.find(b);
    if (it != rows_.end()) {
      h += it->second;
    } else {
      h += initial_row(b);
    }
  }
  return h / static_cast<double>(feats.size());
}

double SentenceClassifierModel::probability(const text::Sentence& s) const {
  return sigmoid(output_.dot(hidden(features(s))) + bias_);
}

nlohmann::json SentenceClassifierModel::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [bucket, v] : rows_) {
    rows.push_back({bucket, std::vector<double>(v.data(), v.data() + v.size())});
  }
  return {
      {"format", "skillrec-sentence-classifier"},
      {"version", kFormatVersion},
      {"preprocess_version", text::kPreprocessVersion},
      {"config",
       {{"dim", config_.dim},
        {"max_n", config_.max_n},
        {"buckets", config_.buckets},
        {"epochs", config_.epochs},
        {"learning_rate", config_.learning_rate},
        {"seed", config_.seed}}},
      {"bias", bias_},
      {"output_weights", std::vector<double>(output_.data(), output_.data() + output_.size())},
      {"epoch_losses", epoch_losses_},
      {"embeddings", rows},
  };
}

SentenceClassifierModel SentenceClassifierModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kParseError, "unsupported classifier model version " +
                                              j.at("version").dump());
    }
    const auto& c = j.at("config");
    ClassifierConfig config;
    config.dim = c.at("dim").get<int>();
    config.max_n = c.at("max_n").get<int>();
    config.buckets = c.at("buckets").get<std::uint32_t>();
    config.epochs = c.at("epochs").get<int>();
    config.learning_rate = c.at("learning_rate").get<double>();
    config.seed = c.at("seed").get<std::uint64_t>();
    SentenceClassifierModel m(config);
    m.bias_ = j.at("bias").get<double>();
    auto w = j.at("output_weights").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != config.dim) {
      throw Error(ErrorCode::kParseError, "output_weights length does not match dim");
    }
    m.output_ = Eigen::Map<VectorX<double>>(w.data(), config.dim);
    m.epoch_losses_ = j.value("epoch_losses", std::vector<double>{});
    for (const auto& r : j.at("embeddings")) {
      auto v = r.at(1).get<std::vector<double>>();
      if (static_cast<int>(v.size()) != config.dim) {
        throw Error(ErrorCode::kParseError, "embedding row length does not match dim");
      }
      m.rows_.emplace(r.at(0).get<std::uint32_t>(), Eigen::Map<VectorX<double>>(v.data(), config.dim));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("classifier model: ") + e.what());
  }
}

void SentenceClassifierModel::save(const std::filesystem::path& path) const {
  io::write_file_atomic(path, to_json().dump());
}

SentenceClassifierModel SentenceClassifierModel::load(const std::filesystem::path& path) {
  return from_json(io::read_json(path));
}

SentenceClassifierModel train_sentence_classifier(const std::vector<LabeledSentence>& data,
                                                  const ClassifierConfig& config) {
  bool has_pos = false, has_neg = false;
  for (const auto& d : data) {
    has_pos = has_pos || d.label == 1;
    has_neg = has_neg || d.label == 0;
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kSingleClassCorpus, "training data must contain both labels");
  }

  SentenceClassifierModel model(config);
  std::vector<std::vector<std::uint32_t>> feats;
  feats.reserve(data.size());
  for (const auto& d : data) feats.push_back(model.features(d.sentence));

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Rng rng(config.seed);
  const double total_steps = static_cast<double>(config.epochs) * static_cast<double>(data.size());
  double step = 0;
  VectorX<double> grad_hidden(config.dim);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const double lr = config.learning_rate * (1.0 - step / total_steps);
      step += 1;
      const auto& f = feats[i];
      const VectorX<double> h = model.hidden(f);
      const double p = sigmoid(model.output_.dot(h) + model.bias_);
      const double g = p - static_cast<double>(data[i].label);
      grad_hidden = g * model.output_;
      model.output_ -= lr * g * h;
      model.bias_ -= lr * g;
      if (!f.empty()) {
        const double scale = lr / static_cast<double>(f.size());
        for (auto b : f) model.row(b) -= scale * grad_hidden;
      }
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double p = sigmoid(model.output_.dot(model.hidden(feats[i])) + model.bias_);
      loss += log_loss(p, data[i].label);
    }
    model.epoch_losses_.push_back(loss / static_cast<double>(data.size()));
  }
  return model;
}

Classification classify_sentence(const SentenceClassifierModel& model, const text::Sentence& s) {
  const double p = model.probability(s);
  return {p, p >= 0.5 ? 1 : 0};
}

F1Report f1_from_labels(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.empty()) throw Error(ErrorCode::kEmptyTestSet, "empty test set");
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "truth and prediction lengths differ");
  }
  F1Report r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == 1 && truth[i] == 1) ++r.tp;
    else if (predicted[i] == 1) ++r.fp;
    else if (truth[i] == 1) ++r.fn;
    else ++r.tn;
  }
  r.precision = (r.tp + r.fp) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = (r.precision + r.recall) > 0
             ? 2 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

F1Report evaluate_f1(const SentenceClassifierModel& model, const std::vector<LabeledSentence>& test) {
  if (test.empty()) throw Error(ErrorCode::kEmptyTestSet, "empty test set");
  std::vector<int> truth, predicted;
  truth.reserve(test.size());
  predicted.reserve(test.size());
  for (const auto& t : test) {
    truth.push_back(t.label);
    predicted.push_back(classify_sentence(model, t.sentence).label);
  }
  return f1_from_labels(truth, predicted);
}

// ---------------------------------------------------------------------------
// skills

void to_json(nlohmann::json& j, const SkillRecord& s) {
  j = {{"name", s.name}, {"keywords", s.keywords}, {"description", s.description}, {"score", s.score}};
}

void from_json(const nlohmann::json& j, SkillRecord& s) {
  s.name = j.at("name").get<std::string>();
  s.keywords = j.value("keywords", std::vector<std::string>{});
  s.description = j.value("description", "");
  s.score = j.value("score", 0.0);
  if (s.keywords.empty()) s.keywords.push_back(s.name);
}

std::vector<SkillRecord> load_skills(const std::filesystem::path& path) {
  try {
    return io::read_json(path).get<std::vector<SkillRecord>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void save_skills(const std::filesystem::path& path, const std::vector<SkillRecord>& skills) {
  io::write_file_atomic(path, nlohmann::json(skills).dump(2) + "\n");
}

std::vector<ScoredNGram> score_ngrams(const std::vector<text::Sentence>& documents, int min_df,
                                      int max_n) {
  struct Stats {
    text::NGram ngram;
    int df = 0;
    std::vector<int> tf;  // per containing document, in document order
  };
  std::unordered_map<std::string, Stats> stats;
  for (const auto& doc : documents) {
    std::unordered_map<std::string, int> counts;
    std::vector<std::string> first_seen;
    for (auto& g : text::ngrams(doc, max_n)) {
      auto key = g.joined();
      auto [it, inserted] = counts.try_emplace(key, 0);
      ++it->second;
      if (inserted) {
        first_seen.push_back(key);
        stats.try_emplace(key, Stats{std::move(g), 0, {}});
      }
    }
    for (const auto& key : first_seen) {
      auto& s = stats.at(key);
      ++s.df;
      s.tf.push_back(counts.at(key));
    }
  }

  const double n_docs = static_cast<double>(documents.size());
  std::vector<ScoredNGram> out;
  for (auto& [key, s] : stats) {
    if (s.df < min_df) continue;
    const double idf = std::log((1.0 + n_docs) / (1.0 + s.df)) + 1.0;
    double score = 0.0;
    for (int tf : s.tf) score += tf * idf;
    out.push_back({std::move(s.ngram), s.df, score});
  }
  std::sort(out.begin(), out.end(), [](const ScoredNGram& a, const ScoredNGram& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.ngram.joined() < b.ngram.joined();
  });
  return out;
}

namespace {

// Most frequent unstemmed spelling of every stemmed n-gram; ties go to the
// lexicographically smallest spelling.
std::unordered_map<std::string, std::string> surface_forms(const std::vector<text::Sentence>& sentences,
                                                           int max_n) {
  std::unordered_map<std::string, std::map<std::string, int>> counts;
  for (const auto& s : sentences) {
    if (s.surface.size() != s.tokens.size()) continue;
    const auto stemmed = text::ngrams(s.tokens, max_n);
    const auto plain = text::ngrams(s.surface, max_n);
    for (std::size_t i = 0; i < stemmed.size(); ++i) ++counts[stemmed[i].joined()][plain[i].joined()];
  }
  std::unordered_map<std::string, std::string> out;
  for (const auto& [key, spellings] : counts) {
    const auto best = std::max_element(spellings.begin(), spellings.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    out.emplace(key, best->first);
  }
  return out;
}

bool contains_run(const std::vector<std::string>& outer, const std::vector<std::string>& inner) {
  return std::search(outer.begin(), outer.end(), inner.begin(), inner.end()) != outer.end();
}

}  // namespace

std::vector<SkillRecord> extract_skill_terms(const std::vector<text::Sentence>& positive_sentences,
                                             int min_df, int max_n, int top_k) {
  if (positive_sentences.empty()) throw Error(ErrorCode::kEmptyCorpus, "no skill sentences");
  if (min_df < 1) throw Error(ErrorCode::kBadRequest, "min_df must be >= 1");

  const auto scored = score_ngrams(positive_sentences, min_df, max_n);
  struct Group {
    std::vector<const ScoredNGram*> members;  // score order
    const ScoredNGram* name = nullptr;
  };
  std::vector<Group> groups;
  std::unordered_map<std::string, std::size_t> by_head;
  for (const auto& sc : scored) {
    auto [it, fresh] = by_head.try_emplace(sc.ngram.terms.front(), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].members.push_back(&sc);
  }

  // Name: the longest member still found in at least half as many sentences
  // as the group's most common member.
  for (auto& g : groups) {
    int max_df = 0;
    for (const auto* m : g.members) max_df = std::max(max_df, m->df);
    for (const auto* m : g.members) {
      if (2 * m->df >= max_df && (!g.name || m->ngram.n() > g.name->ngram.n())) g.name = m;
    }
  }

  // A group whose name mostly occurs inside a longer name ("learn" inside
  // "machine learn") is a fragment of that skill and joins its group.
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return groups[a].name->ngram.n() < groups[b].name->ngram.n();
  });
  std::vector<bool> absorbed(groups.size(), false);
  for (std::size_t gi : order) {
    const auto* name = groups[gi].name;
    Group* best = nullptr;
    for (auto& h : groups) {
      if (&h == &groups[gi] || h.name->ngram.n() <= name->ngram.n()) continue;
      if (2 * h.name->df < name->df || !contains_run(h.name->ngram.terms, name->ngram.terms)) continue;
      if (!best || h.name->ngram.n() > best->name->ngram.n()) best = &h;
    }
    if (!best) continue;
    best->members.insert(best->members.end(), groups[gi].members.begin(), groups[gi].members.end());
    groups[gi].members.clear();
    absorbed[gi] = true;
  }

  const auto surface = surface_forms(positive_sentences, max_n);
  auto spelled = [&](const text::NGram& g) {
    const auto key = g.joined();
    auto it = surface.find(key);
    return it == surface.end() ? key : it->second;
  };
  auto ranked_before = [](const ScoredNGram* a, const ScoredNGram* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->ngram.joined() < b->ngram.joined();
  };
  std::vector<std::pair<const ScoredNGram*, SkillRecord>> kept;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (absorbed[gi]) continue;
    auto& members = groups[gi].members;
    std::sort(members.begin(), members.end(), ranked_before);
    SkillRecord r{spelled(groups[gi].name->ngram), {}, {}, members.front()->score};
    for (const auto* m : members) r.keywords.push_back(spelled(m->ngram));
    kept.emplace_back(members.front(), std::move(r));
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](const auto& a, const auto& b) { return ranked_before(a.first, b.first); });
  std::vector<SkillRecord> out;
  for (auto& [top, r] : kept) {
    if (static_cast<int>(out.size()) >= top_k) break;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// descriptions

FixtureDescriptionProvider FixtureDescriptionProvider::load(const std::filesystem::path& path) {
  try {
    return FixtureDescriptionProvider(io::read_json(path).get<std::map<std::string, std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

std::optional<std::string> FixtureDescriptionProvider::lookup(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

HttpDescriptionProvider::HttpDescriptionProvider(std::string base_url, std::string path_prefix)
    : base_url_(std::move(base_url)), path_prefix_(std::move(path_prefix)) {}

std::optional<std::string> HttpDescriptionProvider::lookup(const std::string& name) const {
  std::string title = name;
  std::replace(title.begin(), title.end(), ' ', '_');
  httplib::Client client(base_url_);
  client.set_connection_timeout(5);
  client.set_read_timeout(10);
  auto res = client.Get(path_prefix_ + httplib::detail::encode_url(title));
  if (!res) {
    throw Error(ErrorCode::kProviderUnavailable,
                "description provider unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status == 404) return std::nullopt;
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderUnavailable,
                "description provider returned HTTP " + std::to_string(res->status));
  }
  auto body = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (!body.is_object() || !body.contains("extract") || !body["extract"].is_string()) {
    return std::nullopt;
  }
  auto extract = body["extract"].get<std::string>();
  if (auto nl = extract.find('\n'); nl != std::string::npos) extract.resize(nl);
  if (extract.empty()) return std::nullopt;
  return extract;
}

SkillRecord enrich_description(const SkillRecord& skill, const DescriptionProvider& provider) {
  auto found = provider.lookup(skill.name);
  if (!found) {
    log_warning("no description found for skill '" + skill.name + "'");
    return skill;
  }
  SkillRecord out = skill;
  out.description = *found;
  return out;
}

}  // namespace skillrec::mining
