#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace skillrec::text {

using StopWords = std::unordered_set<std::string>;

/// Version tag of the tokenizer + stemmer rules. Bump on any rule change.
inline constexpr int kPreprocessVersion = 1;

struct Sentence {
  std::string source_id;
  std::string section_label;
  std::string raw;
  std::vector<std::string> tokens;
  /// Lowercased unstemmed form of each token, parallel to `tokens`.
  std::vector<std::string> surface;

  bool operator==(const Sentence&) const = default;
};

struct NGram {
  std::vector<std::string> terms;

  std::size_t n() const { return terms.size(); }
  /// Terms joined by a single space.
  std::string joined() const;

  bool operator==(const NGram&) const = default;
  auto operator<=>(const NGram&) const = default;
};

/// Built-in English stop-word list (also shipped as config/stopwords_en.txt).
const StopWords& default_stopwords();

/// One token per line; blank lines and lines starting with '#' ignored.
StopWords load_stopwords(const std::filesystem::path& path);

/// Suffix stemmer: strips "ing", "ed", "es" or "s" while the remaining
/// stem keeps at least 3 bytes, repeated to a fixed point.
std::string stem(std::string_view token);

/// Splits on '.', '!', '?', ';' and newlines. A '.' between two alphanumerics
/// ("3.8", "node.js") is part of a token, not a boundary.
std::vector<std::string> split_sentences(std::string_view raw_text);

/// Lowercased, stemmed, stop-word-free tokens of one sentence.
/// With `apply_stem` false tokens keep their surface form (word-vector lookup).
std::vector<std::string> tokenize(std::string_view sentence, const StopWords& stopwords,
                                  bool apply_stem = true);

/// One sentence, no further splitting; `tokens` may come out empty.
Sentence make_sentence(std::string raw, const StopWords& stopwords, std::string_view source_id = {},
                       std::string_view section_label = {}, bool apply_stem = true);

std::vector<Sentence> preprocess(std::string_view raw_text, const StopWords& stopwords,
                                 std::string_view source_id = {},
                                 std::string_view section_label = {}, bool apply_stem = true);

/// All contiguous n-grams for n = 1..max_n; unigrams first, then bigrams, ...
std::vector<NGram> ngrams(const std::vector<std::string>& tokens, int max_n);
inline std::vector<NGram> ngrams(const Sentence& s, int max_n) { return ngrams(s.tokens, max_n); }

}  // namespace skillrec::text
