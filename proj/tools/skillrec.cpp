// skillrec: command line front end for the mining pipeline, the fit model,
// the simulation and the recommendation service.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "skillrec/catalog.hpp"
#include "skillrec/error.hpp"
#include "skillrec/fit_model.hpp"
#include "skillrec/io.hpp"
#include "skillrec/log.hpp"
#include "skillrec/random.hpp"
#include "skillrec/service.hpp"
#include "skillrec/simulate.hpp"
#include "skillrec/skill_mining.hpp"
#include "skillrec/synthetic.hpp"
#include "skillrec/text.hpp"

namespace fs = std::filesystem;
using namespace skillrec;

namespace {

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

text::StopWords stopwords_from(const std::vector<std::string>& files, bool job_terms) {
  text::StopWords words = files.empty() ? text::default_stopwords() : text::StopWords{};
  for (const auto& f : files) {
    auto more = text::load_stopwords(f);
    words.insert(more.begin(), more.end());
  }
  if (job_terms) {
    for (const auto& w : synthetic::job_posting_stopwords()) words.insert(w);
  }
  return words;
}

std::vector<mining::LabeledSentence> read_corpus(const std::string& vacancies, const std::string& sentences,
                                                 const text::StopWords& stopwords) {
  if (!sentences.empty()) return mining::load_labeled_sentences(sentences, stopwords);
  return mining::label_sentences(mining::load_vacancies(vacancies), stopwords);
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

nlohmann::json f1_json(const mining::F1Report& r) {
  return {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
          {"tp", r.tp},               {"fp", r.fp},         {"fn", r.fn}, {"tn", r.tn}};
}

// ---------------------------------------------------------------------------

struct ClassifierArgs {
  std::string vacancies, sentences, out;
  std::vector<std::string> stopwords;
  double split = 0.8;
  mining::ClassifierConfig config;
};

int train_classifier(const ClassifierArgs& a) {
  const auto words = stopwords_from(a.stopwords, false);
  const auto data = read_corpus(a.vacancies, a.sentences, words);
  const auto [train_idx, test_idx] = train_test_split(data.size(), a.split, a.config.seed);
  std::vector<mining::LabeledSentence> train, test;
  for (auto i : train_idx) train.push_back(data[i]);
  for (auto i : test_idx) test.push_back(data[i]);

  const auto model = mining::train_sentence_classifier(train, a.config);
  nlohmann::json report = {{"sentences", data.size()},
                           {"train", train.size()},
                           {"test", test.size()},
                           {"epoch_losses", model.epoch_losses()}};
  if (!test.empty()) report["heldout"] = f1_json(mining::evaluate_f1(model, test));
  if (!a.out.empty()) model.save(a.out);
  print_json(report);
  return 0;
}

struct ExtractArgs {
  std::string vacancies, sentences, model, descriptions, wiki_url, out;
  std::vector<std::string> stopwords;
  bool job_terms = true;
  int min_df = 3, max_n = 3, top_k = 16;
};

int extract_skills(const ExtractArgs& a) {
  const auto words = stopwords_from(a.stopwords, a.job_terms);
  const auto data = read_corpus(a.vacancies, a.sentences, words);

  std::vector<text::Sentence> positive;
  if (!a.model.empty()) {
    const auto model = mining::SentenceClassifierModel::load(a.model);
    for (const auto& s : data) {
      if (mining::classify_sentence(model, s.sentence).label == 1) positive.push_back(s.sentence);
    }
  } else {
    for (const auto& s : data) {
      if (s.label == 1) positive.push_back(s.sentence);
    }
  }

  auto skills = mining::extract_skill_terms(positive, a.min_df, a.max_n, a.top_k);
  std::unique_ptr<mining::DescriptionProvider> provider;
  if (!a.descriptions.empty()) {
    provider = std::make_unique<mining::FixtureDescriptionProvider>(
        mining::FixtureDescriptionProvider::load(a.descriptions));
  } else if (!a.wiki_url.empty()) {
    provider = std::make_unique<mining::HttpDescriptionProvider>(a.wiki_url);
  }
  if (provider) {
    for (auto& s : skills) s = mining::enrich_description(s, *provider);
  }
  if (!a.out.empty()) {
    mining::save_skills(a.out, skills);
  } else {
    print_json(skills);
  }
  log_info("extracted " + std::to_string(skills.size()) + " skills from " +
           std::to_string(positive.size()) + " positive sentences");
  return 0;
}

struct IngestArgs {
  std::string catalog, skills, vectors, transcripts, out, store;
  bool keep_stopwords = false;
};

int ingest_videos(const IngestArgs& a) {
  const auto skills = mining::load_skills(a.skills);
  std::optional<WordVectorStore> vectors;
  std::optional<FixtureTranscriptProvider> transcripts;
  IngestOptions opts;
  if (!a.vectors.empty()) {
    vectors = WordVectorStore::load(a.vectors);
    opts.vectors = &*vectors;
  }
  if (!a.transcripts.empty()) {
    transcripts = FixtureTranscriptProvider::load(a.transcripts);
    opts.transcripts = &*transcripts;
  }
  opts.similarity.filter_stopwords = !a.keep_stopwords;
  const auto catalog = ingest_catalog(a.catalog, skills, opts);

  if (!a.store.empty()) {
    io::write_file_atomic(Store::catalog_path(a.store), catalog.to_jsonl());
    mining::save_skills(Store::skills_path(a.store), skills);
  }
  if (!a.out.empty()) io::write_file_atomic(a.out, catalog.to_jsonl());
  if (a.store.empty() && a.out.empty()) std::cout << catalog.to_jsonl();
  log_info("ingested " + std::to_string(catalog.records().size()) + " videos in " +
           std::to_string(catalog.groups().size()) + " skill groups");
  return 0;
}

struct FitArgs {
  std::string catalog, skills, out;
  double split = 0.7;
  fit::ForestConfig forest;
};

int train_fit(const FitArgs& a) {
  std::vector<mining::SkillRecord> skills;
  if (!a.skills.empty()) {
    skills = mining::load_skills(a.skills);
  } else {
    std::set<std::string> names;
    for (const auto& v : read_catalog_records(a.catalog)) names.insert(v.target_skill);
    for (const auto& n : names) skills.push_back({n, {n}, "", 0.0});
  }
  const auto catalog = ingest_catalog(a.catalog, skills);
  const auto samples = fit::annotated_samples(catalog);
  const auto [train_idx, test_idx] = train_test_split(samples.size(), a.split, a.forest.seed);
  std::vector<fit::Sample> train;
  for (auto i : train_idx) train.push_back(samples[i]);
  const auto model = fit::train_fit_model(train, a.forest);

  nlohmann::json report = {{"annotated", samples.size()}, {"train", train.size()}, {"test", test_idx.size()}};
  if (!test_idx.empty()) {
    std::vector<int> truth, predicted;
    for (auto i : test_idx) {
      truth.push_back(samples[i].label);
      predicted.push_back(fit::predict_fit(model, samples[i].x).label);
    }
    report["heldout"] = f1_json(mining::f1_from_labels(truth, predicted));
  }
  const auto importances = fit::feature_importances(model);
  for (int f = 0; f < fit::kNumFeatures; ++f) report["importances"][fit::kFeatureNames[f]] = importances[f];
  if (!a.out.empty()) model.save(a.out);
  print_json(report);
  return 0;
}

int write_fixtures(const fs::path& dir, std::uint64_t seed, bool with_store) {
  synthetic::WorldConfig wc;
  wc.seed = seed;
  auto world = synthetic::make_world(wc);

  std::string lines;
  for (const auto& v : world.vacancies) {
    nlohmann::json sections = nlohmann::json::array();
    for (const auto& s : v.sections) sections.push_back({{"name", s.name}, {"text", s.text}});
    lines += nlohmann::json{{"id", v.id}, {"sections", sections}}.dump() + '\n';
  }
  io::write_file_atomic(dir / "vacancies.jsonl", lines);

  lines.clear();
  for (const auto& j : synthetic::noisy_vacancy_sentences(1000, 0.2, seed)) lines += j.dump() + '\n';
  io::write_file_atomic(dir / "sentences_noisy.jsonl", lines);

  io::write_file_atomic(dir / "descriptions.json", nlohmann::json(world.descriptions).dump(2) + '\n');
  world.vectors.save(dir / "vectors.txt");
  mining::save_skills(dir / "skills.json", world.skills);

  // AV-portal records arrive without transcripts; the transcript fixture supplies them.
  nlohmann::json transcripts = nlohmann::json::object();
  lines.clear();
  for (auto v : world.videos) {
    if (v.source == VideoSource::kAvPortal) {
      transcripts[v.id] = v.transcript;
      v.transcript.clear();
    }
    v.text_similarity = 0.0;
    lines += nlohmann::json(v).dump() + '\n';
  }
  io::write_file_atomic(dir / "videos.jsonl", lines);
  io::write_file_atomic(dir / "transcripts.json", transcripts.dump(2) + '\n');

  if (with_store) {
    const fs::path store = dir / "store";
    FixtureTranscriptProvider provider(transcripts.get<std::map<std::string, std::string>>());
    IngestOptions opts;
    opts.vectors = &world.vectors;
    opts.transcripts = &provider;
    const auto catalog = ingest_catalog(dir / "videos.jsonl", world.skills, opts);
    io::write_file_atomic(Store::catalog_path(store), catalog.to_jsonl());
    mining::save_skills(Store::skills_path(store), world.skills);
    fit::train_fit_model(fit::annotated_samples(catalog)).save(Store::fit_model_path(store));
  }
  log_info("fixtures written to " + dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill mining and video recommendation toolkit"};
  app.require_subcommand(1);

  // serve
  std::string store_dir, host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service on a store directory");
  serve->add_option("--store", store_dir, "Store directory")->required();
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  // train-sentence-classifier
  ClassifierArgs ca;
  auto* tsc = app.add_subcommand("train-sentence-classifier", "Train the requirement sentence classifier");
  auto* tsc_vac = tsc->add_option("--corpus", ca.vacancies, "Vacancy JSONL (id, sections[name, text])");
  auto* tsc_sent = tsc->add_option("--sentences", ca.sentences, "Labeled sentence JSONL (text, label)");
  tsc_vac->excludes(tsc_sent);
  tsc->add_option("--stopwords", ca.stopwords, "Stop-word files (replace the default list)");
  tsc->add_option("--split", ca.split, "Train fraction")->check(CLI::Range(0.0, 1.0));
  tsc->add_option("--seed", ca.config.seed);
  tsc->add_option("--epochs", ca.config.epochs);
  tsc->add_option("--dim", ca.config.dim);
  tsc->add_option("--lr", ca.config.learning_rate);
  tsc->add_option("--out", ca.out, "Model output path");

  // extract-skills
  ExtractArgs ea;
  auto* ext = app.add_subcommand("extract-skills", "Extract skill terms from requirement sentences");
  auto* ext_vac = ext->add_option("--corpus", ea.vacancies, "Vacancy JSONL");
  ext->add_option("--sentences", ea.sentences, "Labeled sentence JSONL")->excludes(ext_vac);
  ext->add_option("--model", ea.model, "Classifier model; without it section labels are used");
  ext->add_option("--stopwords", ea.stopwords);
  ext->add_flag("!--no-job-stopwords", ea.job_terms, "Keep job-posting boilerplate terms");
  ext->add_option("--min-df", ea.min_df);
  ext->add_option("--max-n", ea.max_n);
  ext->add_option("--top-k", ea.top_k);
  auto* ext_desc = ext->add_option("--descriptions", ea.descriptions, "Description fixture JSON");
  ext->add_option("--wiki-url", ea.wiki_url, "Page-summary service base URL")->excludes(ext_desc);
  ext->add_option("--out", ea.out);

  // ingest-videos
  IngestArgs ia;
  auto* ing = app.add_subcommand("ingest-videos", "Validate a video catalog and compute text similarity");
  ing->add_option("--catalog", ia.catalog, "Raw video JSONL")->required();
  ing->add_option("--skills", ia.skills, "Skills JSON")->required();
  ing->add_option("--vectors", ia.vectors, "Word vectors (token v1 .. vd per line)");
  ing->add_option("--transcripts", ia.transcripts, "Transcript fixture JSON (id -> text)");
  ing->add_flag("--keep-stopwords", ia.keep_stopwords, "Do not filter stop words before averaging");
  ing->add_option("--out", ia.out, "Catalog JSONL output");
  ing->add_option("--store", ia.store, "Write catalog.jsonl and skills.json into a store directory");

  // train-fit
  FitArgs fa;
  auto* tf = app.add_subcommand("train-fit", "Train the random-forest fit model");
  tf->add_option("--catalog", fa.catalog, "Catalog JSONL with fit_label annotations")->required();
  tf->add_option("--skills", fa.skills, "Skills JSON (default: skills named in the catalog)");
  tf->add_option("--split", fa.split)->check(CLI::Range(0.0, 1.0));
  tf->add_option("--seed", fa.forest.seed);
  tf->add_option("--trees", fa.forest.n_trees);
  tf->add_option("--max-depth", fa.forest.max_depth);
  tf->add_option("--out", fa.out);

  // simulate
  sim::SimulationConfig sc;
  std::string sim_out;
  auto* simc = app.add_subcommand("simulate", "Simulate learners with hidden preferences");
  simc->add_option("--users", sc.users);
  simc->add_option("--rounds", sc.rounds);
  simc->add_option("--seed", sc.seed);
  simc->add_option("--sigma", sc.noise_sigma);
  simc->add_option("--out", sim_out);

  // generate-fixtures
  std::string fixture_dir;
  std::uint64_t fixture_seed = 2020;
  bool with_store = false;
  auto* gen = app.add_subcommand("generate-fixtures", "Write the synthetic corpus, catalog and vectors");
  gen->add_option("--out", fixture_dir)->required();
  gen->add_option("--seed", fixture_seed);
  gen->add_flag("--with-store", with_store, "Also build a ready-to-serve store under OUT/store");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      Store store(store_dir);
      Service service(store);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      log_info("listening on " + host + ":" + std::to_string(port));
      return service.listen(host, port) ? 0 : 1;
    }
    if (*tsc) {
      if (ca.vacancies.empty() && ca.sentences.empty()) throw CLI::RequiredError("--corpus or --sentences");
      return train_classifier(ca);
    }
    if (*ext) {
      if (ea.vacancies.empty() && ea.sentences.empty()) throw CLI::RequiredError("--corpus or --sentences");
      return extract_skills(ea);
    }
    if (*ing) return ingest_videos(ia);
    if (*tf) return train_fit(fa);
    if (*simc) {
      const auto report = sim::run_simulation(sc);
      if (!sim_out.empty()) io::write_file_atomic(sim_out, report.to_json().dump(2) + '\n');
      auto summary = report.to_json();
      summary.erase("users");
      print_json(summary);
      return 0;
    }
    if (*gen) return write_fixtures(fixture_dir, fixture_seed, with_store);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
