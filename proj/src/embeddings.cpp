#include "skillrec/embeddings.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skillrec/error.hpp"
#include "skillrec/io.hpp"
#include "skillrec/text.hpp"

namespace skillrec {

WordVectorStore WordVectorStore::load(const std::filesystem::path& path,
                                      const std::unordered_set<std::string>* vocabulary) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open vector file " + path.string());

  std::optional<WordVectorStore> store;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    values.clear();
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) +
                                              ": non-numeric vector component");
    }
    if (!store) {
      if (values.empty()) {
        throw Error(ErrorCode::kParseError,
                    path.string() + ":" + std::to_string(line_no) + ": empty vector");
      }
      store.emplace(static_cast<int>(values.size()));
    }
    if (static_cast<int>(values.size()) != store->dim()) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) +
                                              ": expected " + std::to_string(store->dim()) +
                                              " components, got " + std::to_string(values.size()));
    }
    if (vocabulary && !vocabulary->contains(token)) continue;
    store->insert(std::move(token),
                  Eigen::Map<const VectorX<double>>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  if (!store) throw Error(ErrorCode::kParseError, path.string() + ": no vectors");
  return std::move(*store);
}

void WordVectorStore::save(const std::filesystem::path& path) const {
  std::vector<const std::string*> tokens;
  for (const auto& [token, v] : vectors_) tokens.push_back(&token);
  std::sort(tokens.begin(), tokens.end(), [](auto* a, auto* b) { return *a < *b; });
  std::string out;
  for (const auto* token : tokens) {
    out += *token;
    for (double x : vectors_.at(*token)) {
      char buf[40];
      std::snprintf(buf, sizeof buf, " %.17g", x);
      out += buf;
    }
    out += '\n';
  }
  io::write_file_atomic(path, out);
}

void WordVectorStore::insert(std::string token, VectorX<double> v) {
  if (v.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "vector for '" + token + "' has length " +
                                                   std::to_string(v.size()) + ", store dim is " +
                                                   std::to_string(dim_));
  }
  vectors_.insert_or_assign(std::move(token), std::move(v));
}

const VectorX<double>* WordVectorStore::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

TextVector embed_text(const WordVectorStore& store, const std::vector<std::string>& tokens) {
  TextVector out{VectorX<double>::Zero(store.dim()), 0.0};
  std::size_t found = 0;
  for (const auto& t : tokens) {
    if (const auto* v = store.find(t)) {
      out.values += *v;
      ++found;
    }
  }
  if (found > 0) {
    out.values /= static_cast<double>(found);
    out.coverage = static_cast<double>(found) / static_cast<double>(tokens.size());
  }
  return out;
}

double cosine(const TextVector& a, const TextVector& b) {
  return cosine_similarity(a.values, b.values);
}

double text_similarity(const WordVectorStore& store, const std::string& text_a,
                       const std::string& text_b, const SimilarityOptions& options) {
  static const text::StopWords kNone;
  const auto& stop = options.filter_stopwords ? text::default_stopwords() : kNone;
  auto all_tokens = [&](const std::string& raw) {
    std::vector<std::string> tokens;
    for (auto& s : text::preprocess(raw, stop, {}, {}, /*apply_stem=*/false)) {
      tokens.insert(tokens.end(), s.tokens.begin(), s.tokens.end());
    }
    return tokens;
  };
  return cosine(embed_text(store, all_tokens(text_a)), embed_text(store, all_tokens(text_b)));
}

}  // namespace skillrec
