#include "skillrec/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "skillrec/random.hpp"

namespace skillrec::synthetic {
namespace {

template <typename T, std::size_t N>
const T& pick(Rng& rng, const std::array<T, N>& items) {
  return items[rng.index(N)];
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.index(items.size())];
}

struct SkillSpec {
  const char* name;
  const char* description;
  std::vector<std::string> topic_words;
};

const std::vector<SkillSpec>& skill_specs() {
  static const std::vector<SkillSpec> specs = {
      {"python programming",
       "Python is an interpreted, high-level, general-purpose programming language.",
       {"python", "programming", "interpreted", "language", "script", "code", "functions", "library"}},
      {"sql",
       "SQL is a domain-specific language for managing data held in a relational database.",
       {"sql", "query", "relational", "database", "tables", "join", "select", "schema"}},
      {"machine learning",
       "Machine learning is the study of algorithms that improve automatically through experience with data.",
       {"machine", "learning", "algorithms", "training", "model", "prediction", "features", "classifier"}},
      {"statistics",
       "Statistics is the discipline concerned with the collection, analysis and interpretation of data.",
       {"statistics", "probability", "distribution", "variance", "hypothesis", "sample", "inference", "mean"}},
      {"visualization",
       "Data visualization is the graphic representation of data using charts, plots and dashboards.",
       {"visualization", "charts", "plots", "dashboards", "graphic", "colors", "axis", "matplotlib"}},
      {"deep learning",
       "Deep learning is a family of machine learning methods based on artificial neural networks with many layers.",
       {"deep", "layers", "artificial", "backpropagation", "gpu", "tensor", "convolution", "gradient"}},
      {"big data",
       "Big data refers to data sets too large or complex for traditional data processing software.",
       {"big", "volume", "velocity", "distributed", "cluster", "storage", "scale", "pipeline"}},
      {"text mining",
       "Text mining is the process of deriving high-quality information from text.",
       {"text", "mining", "documents", "corpus", "tokens", "extraction", "keywords", "information"}},
      {"spark",
       "Apache Spark is an open-source unified analytics engine for large-scale data processing.",
       {"spark", "apache", "analytics", "engine", "rdd", "dataframe", "executor", "partitions"}},
      {"cloud computing",
       "Cloud computing is the on-demand availability of computer system resources such as storage and computing power.",
       {"cloud", "computing", "aws", "servers", "virtual", "demand", "resources", "deployment"}},
      {"natural language processing",
       "Natural language processing is a subfield of linguistics and artificial intelligence concerned with human language.",
       {"natural", "linguistics", "parsing", "sentences", "translation", "semantics", "grammar", "speech"}},
      {"hadoop",
       "Apache Hadoop is a collection of open-source utilities for distributed storage and processing using MapReduce.",
       {"hadoop", "mapreduce", "hdfs", "yarn", "nodes", "replication", "jobs", "utilities"}},
      {"tableau",
       "Tableau is interactive data visualization software focused on business intelligence.",
       {"tableau", "interactive", "business", "intelligence", "workbook", "reports", "drag", "filters"}},
      {"linear algebra",
       "Linear algebra is the branch of mathematics concerning linear equations, vectors and matrices.",
       {"linear", "algebra", "matrices", "vectors", "equations", "eigenvalues", "determinant", "mathematics"}},
      {"time series",
       "A time series is a sequence of data points indexed in time order, used for forecasting.",
       {"series", "forecasting", "seasonality", "trend", "arima", "lag", "temporal", "sequence"}},
      {"neural networks",
       "Neural networks are computing systems inspired by the biological networks of brains, built from connected neurons.",
       {"neural", "networks", "neurons", "activation", "weights", "biological", "perceptron", "connected"}},
  };
  return specs;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "today", "video", "welcome", "look", "example", "lecture", "tutorial", "explain", "hello",
      "channel", "subscribe", "next", "first", "second", "simple", "show", "going", "course",
      "step", "part", "thing", "really", "okay", "right", "start", "end", "watch", "thanks",
      "cooking", "music", "travel", "football", "guitar", "garden", "movie", "weather", "holiday",
      "painting", "coffee", "recipe", "dance", "fashion", "camera", "car", "game", "story"};
  return words;
}

const std::array<const char*, 10> kSkillTemplates = {
    "Strong {} skills required.",
    "Experience with {} and {} is a must.",
    "Proficiency in {} expected.",
    "Solid knowledge of {}.",
    "Hands-on expertise in {} and {}.",
    "Demonstrated ability using {}.",
    "Working familiarity with {} preferred.",
    "Advanced understanding of {} and {}.",
    "Practical background in {} needed.",
    "Candidates should master {}.",
};

const std::array<const char*, 14> kOtherSentences = {
    "We offer a competitive salary and generous benefits.",
    "Our company is a leading provider of consulting services.",
    "Join a friendly team in our downtown office.",
    "Health insurance and paid vacation are included.",
    "We value diversity and equal opportunity.",
    "The position reports to the head of analytics.",
    "Flexible working hours and remote days are possible.",
    "Our team works on exciting projects for global clients.",
    "Apply today by sending your resume and cover letter.",
    "We are an award winning employer with offices worldwide.",
    "Employees enjoy free lunch and a gym membership.",
    "The role involves collaboration with product managers.",
    "You will join our growing team in a fast paced environment.",
    "Relocation assistance is available for this role.",
};

std::string fill(std::string templ, Rng& rng, const std::vector<SkillSpec>& specs) {
  std::string out;
  std::size_t pos = 0;
  std::string first;
  while (true) {
    auto at = templ.find("{}", pos);
    out += templ.substr(pos, at == std::string::npos ? std::string::npos : at - pos);
    if (at == std::string::npos) break;
    std::string name;
    do {
      name = pick(rng, specs).name;
    } while (name == first && specs.size() > 1);
    if (first.empty()) first = name;
    out += name;
    pos = at + 2;
  }
  return out;
}

VectorX<double> random_unit(Rng& rng, int dim) {
  VectorX<double> v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v.normalized();
}

}  // namespace

const std::vector<std::string>& job_posting_stopwords() {
  static const std::vector<std::string> words = {
      "strong", "skill", "skills", "required", "experience", "must", "proficiency", "expected",
      "solid", "knowledge", "hands-on", "hands", "on", "expertise", "demonstrated", "ability",
      "using", "working", "familiarity", "preferred", "advanced", "understanding", "practical",
      "background", "needed", "candidates", "candidate", "master"};
  return words;
}

std::vector<mining::LabeledSentence> separable_sentences(std::size_t n, std::uint64_t seed) {
  static const std::array<const char*, 12> kPos = {"skillz", "pandas", "numpy", "scipy", "keras",
                                                   "pytorch", "sklearn", "jupyter", "dask",
                                                   "xgboost", "seaborn", "plotly"};
  static const std::array<const char*, 12> kNeg = {"salary", "bonus", "vacation", "office", "parking",
                                                   "lunch", "gym", "insurance", "pension", "holiday",
                                                   "relocation", "commute"};
  Rng rng(seed);
  std::vector<mining::LabeledSentence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = rng.bernoulli(0.5) ? 1 : 0;
    text::Sentence s;
    s.source_id = "sep-" + std::to_string(i);
    const std::size_t len = 3 + rng.index(5);
    if (label == 1) s.tokens.push_back("skillz");
    while (s.tokens.size() < len) s.tokens.push_back(label ? pick(rng, kPos) : pick(rng, kNeg));
    rng.shuffle(s.tokens);
    for (const auto& t : s.tokens) s.raw += (s.raw.empty() ? "" : " ") + t;
    out.push_back({std::move(s), label});
  }
  return out;
}

std::vector<nlohmann::json> noisy_vacancy_sentences(std::size_t n, double noise, std::uint64_t seed) {
  Rng rng(seed);
  const auto& specs = skill_specs();
  std::vector<nlohmann::json> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int clean = rng.bernoulli(0.5) ? 1 : 0;
    std::string text = clean ? fill(pick(rng, kSkillTemplates), rng, specs) : pick(rng, kOtherSentences);
    int label = clean;
    if (rng.bernoulli(noise)) label = rng.bernoulli(0.5) ? 1 : 0;
    out.push_back({{"id", "s" + std::to_string(i)}, {"text", text}, {"label", label}, {"clean_label", clean}});
  }
  return out;
}

World make_world(const WorldConfig& config) {
  Rng rng(config.seed);
  const auto& all_specs = skill_specs();
  const int n_skills = std::clamp(config.n_skills, 1, static_cast<int>(all_specs.size()));
  const std::vector<SkillSpec> specs(all_specs.begin(), all_specs.begin() + n_skills);

  World world;
  world.vectors = WordVectorStore(config.dim);

  // Topic-clustered vectors: topic words sit near their skill's direction.
  for (const auto& spec : specs) {
    const VectorX<double> topic = random_unit(rng, config.dim);
    for (const auto& w : spec.topic_words) {
      world.vectors.insert(w, (topic + 0.35 * random_unit(rng, config.dim)).normalized());
    }
  }
  // Generic words share a direction of their own, as function-like words do
  // in trained embeddings, so off-topic talk pulls a transcript away from its skill.
  const VectorX<double> generic = random_unit(rng, config.dim);
  for (const auto& w : filler_words()) {
    world.vectors.insert(w, (generic + 0.35 * random_unit(rng, config.dim)).normalized());
  }

  for (const auto& spec : specs) {
    mining::SkillRecord s;
    s.name = spec.name;
    s.keywords = {spec.name};
    s.description = spec.description;
    world.skills.push_back(s);
    world.descriptions.emplace(spec.name, spec.description);
  }

  int counter = 0;
  for (int si = 0; si < n_skills; ++si) {
    const auto& spec = specs[static_cast<std::size_t>(si)];
    for (int level = 0; level < 3; ++level) {
      for (int k = 0; k < config.videos_per_level; ++k) {
        VideoRecord v;
        const bool av = rng.bernoulli(0.1);
        v.source = av ? VideoSource::kAvPortal : VideoSource::kYoutube;
        v.id = std::string(av ? "av" : "yt") + "-" + std::to_string(counter++);
        v.target_skill = spec.name;
        v.level = static_cast<Level>(level);
        v.title = std::string(spec.name) + " " + std::string(to_string(v.level)) + " tutorial " +
                  std::to_string(k + 1);
        v.url = "https://videos.example.org/watch/" + v.id;
        v.length_s = std::round(std::exp(rng.uniform(std::log(60.0), std::log(3600.0))));
        v.relevancy_score = 1.0 / (k + 1);

        const double on_topic = rng.uniform(0.05, 0.95);
        std::string transcript;
        for (int w = 0; w < 40; ++w) {
          const auto& word = rng.bernoulli(on_topic) ? pick(rng, spec.topic_words) : pick(rng, filler_words());
          transcript += (transcript.empty() ? "" : " ") + word;
        }
        v.transcript = transcript;
        v.description = "A video about " + std::string(spec.name) + ".";

        if (!av) {
          const auto views = static_cast<std::int64_t>(std::exp(rng.uniform(std::log(50.0), std::log(2e6))));
          v.view_count = views;
          const double approval = rng.uniform(0.6, 0.99);
          const auto votes = static_cast<std::int64_t>(static_cast<double>(views) * rng.uniform(0.002, 0.04));
          v.likes = static_cast<std::int64_t>(std::round(approval * static_cast<double>(votes)));
          v.dislikes = votes - *v.likes;
          v.rating = std::round((1.0 + 4.0 * approval) * 100.0) / 100.0;
        }

        const bool reasonable_length = v.length_s >= 180.0 && v.length_s <= 2400.0;
        int fit = (on_topic > 0.45 && reasonable_length) ? 1 : 0;
        if (rng.bernoulli(0.08)) fit = 1 - fit;
        v.fit_label = fit;
        world.videos.push_back(std::move(v));
      }
    }
  }

  for (int i = 0; i < config.vacancies; ++i) {
    mining::Vacancy vac;
    vac.id = "vac-" + std::to_string(i);
    auto sentences = [&](int count, auto&& make) {
      std::string text;
      for (int s = 0; s < count; ++s) text += (text.empty() ? "" : " ") + make();
      return text;
    };
    vac.sections.push_back({"Job Description", sentences(2 + static_cast<int>(rng.index(2)), [&] {
                              return std::string(pick(rng, kOtherSentences));
                            })});
    vac.sections.push_back({"Required Skills", sentences(3 + static_cast<int>(rng.index(3)), [&] {
                              return fill(pick(rng, kSkillTemplates), rng, specs);
                            })});
    vac.sections.push_back({"Benefits", sentences(1 + static_cast<int>(rng.index(2)), [&] {
                              return std::string(pick(rng, kOtherSentences));
                            })});
    world.vacancies.push_back(std::move(vac));
  }
  return world;
}

}  // namespace skillrec::synthetic
