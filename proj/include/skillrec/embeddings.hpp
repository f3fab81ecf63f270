#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "skillrec/types.hpp"

namespace skillrec {

/// Immutable token -> vector map. Every stored vector has length dim().
class WordVectorStore {
 public:
  explicit WordVectorStore(int dim = 300) : dim_(dim) {}

  /// Whitespace-separated text: token followed by `dim` reals per line.
  /// When `vocabulary` is given, tokens outside it are not kept.
  static WordVectorStore load(const std::filesystem::path& path,
                              const std::unordered_set<std::string>* vocabulary = nullptr);

  void insert(std::string token, VectorX<double> v);
  /// Writes the load() format, tokens sorted, with round-trip precision.
  void save(const std::filesystem::path& path) const;

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  const VectorX<double>* find(const std::string& token) const;

 private:
  int dim_;
  std::unordered_map<std::string, VectorX<double>> vectors_;
};

struct TextVector {
  VectorX<double> values;
  double coverage = 0.0;  ///< fraction of tokens found in the store
};

/// Mean of the in-vocabulary token vectors; zero vector with coverage 0 when none match.
TextVector embed_text(const WordVectorStore& store, const std::vector<std::string>& tokens);

/// Zero-norm operands give 0. Throws DimensionMismatch on unequal sizes.
double cosine(const TextVector& a, const TextVector& b);

/// Whether transcript/description tokens pass through stop-word removal before averaging.
struct SimilarityOptions {
  bool filter_stopwords = true;
};

/// Cosine between the averaged vectors of two raw texts.
double text_similarity(const WordVectorStore& store, const std::string& text_a,
                       const std::string& text_b, const SimilarityOptions& options = {});

}  // namespace skillrec
