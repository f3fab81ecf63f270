#include "skillrec/text.hpp"

#include <fstream>
#include <sstream>

#include "skillrec/error.hpp"
#include "stopwords_default.inc"  // generated from config/stopwords_en.txt

namespace skillrec::text {
namespace {

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Non-ASCII bytes are kept so multi-byte UTF-8 letters stay intact.
bool is_word_byte(char c) {
  return is_ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

bool is_token_symbol(char c) { return c == '+' || c == '#'; }

bool is_inner_dot(std::string_view s, std::size_t i) {
  return s[i] == '.' && i > 0 && i + 1 < s.size() && is_word_byte(s[i - 1]) &&
         is_word_byte(s[i + 1]);
}

char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

StopWords parse_stopwords(std::istream& in) {
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::string w = line.substr(start);
    for (char& c : w) c = to_lower_ascii(c);
    words.insert(std::move(w));
  }
  return words;
}

}  // namespace

std::string NGram::joined() const {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out.push_back(' ');
    out += terms[i];
  }
  return out;
}

const StopWords& default_stopwords() {
  static const StopWords words = [] {
    std::istringstream in{std::string(kDefaultStopwordsText)};
    return parse_stopwords(in);
  }();
  return words;
}

StopWords load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open stop-word file " + path.string());
  return parse_stopwords(in);
}

std::string stem(std::string_view token) {
  static constexpr std::string_view kSuffixes[] = {"ing", "ed", "es", "s"};
  static constexpr std::size_t kMinStem = 3;
  std::string s(token);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::string_view suffix : kSuffixes) {
      if (s.size() >= suffix.size() + kMinStem && s.ends_with(suffix)) {
        s.resize(s.size() - suffix.size());
        changed = true;
        break;
      }
    }
  }
  return s;
}

std::vector<std::string> split_sentences(std::string_view raw_text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.find_first_not_of(" \t\r\n") != std::string::npos) out.push_back(current);
    current.clear();
  };
  for (std::size_t i = 0; i < raw_text.size(); ++i) {
    const char c = raw_text[i];
    const bool boundary = c == '!' || c == '?' || c == ';' || c == '\n' || c == '\r' ||
                          (c == '.' && !is_inner_dot(raw_text, i));
    if (boundary) {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

namespace {

void tokenize_into(std::string_view sentence, const StopWords& stopwords, bool apply_stem,
                   std::vector<std::string>& tokens, std::vector<std::string>* surface) {
  std::string current;
  auto flush = [&] {
    bool has_word = false;
    for (char c : current) has_word = has_word || is_word_byte(c);
    if (has_word && !stopwords.contains(current)) {
      std::string stemmed = apply_stem ? stem(current) : current;
      if (!stopwords.contains(stemmed)) {
        tokens.push_back(std::move(stemmed));
        if (surface) surface->push_back(current);
      }
    }
    current.clear();
  };
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const char c = sentence[i];
    if (is_word_byte(c) || is_token_symbol(c) || is_inner_dot(sentence, i)) {
      current.push_back(to_lower_ascii(c));
    } else {
      flush();
    }
  }
  flush();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view sentence, const StopWords& stopwords,
                                  bool apply_stem) {
  std::vector<std::string> tokens;
  tokenize_into(sentence, stopwords, apply_stem, tokens, nullptr);
  return tokens;
}

Sentence make_sentence(std::string raw, const StopWords& stopwords, std::string_view source_id,
                       std::string_view section_label, bool apply_stem) {
  Sentence s{std::string(source_id), std::string(section_label), {}, {}, {}};
  tokenize_into(raw, stopwords, apply_stem, s.tokens, &s.surface);
  s.raw = std::move(raw);
  return s;
}

std::vector<Sentence> preprocess(std::string_view raw_text, const StopWords& stopwords,
                                 std::string_view source_id, std::string_view section_label,
                                 bool apply_stem) {
  std::vector<Sentence> out;
  for (std::string& raw : split_sentences(raw_text)) {
    auto s = make_sentence(std::move(raw), stopwords, source_id, section_label, apply_stem);
    if (!s.tokens.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<NGram> ngrams(const std::vector<std::string>& tokens, int max_n) {
  std::vector<NGram> out;
  const int len = static_cast<int>(tokens.size());
  for (int n = 1; n <= max_n && n <= len; ++n) {
    for (int start = 0; start + n <= len; ++start) {
      out.push_back(NGram{{tokens.begin() + start, tokens.begin() + start + n}});
    }
  }
  return out;
}

}  // namespace skillrec::text
