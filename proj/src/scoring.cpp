#include "hdlg/scoring.hpp"

#include <cctype>
#include <cmath>

#include "hdlg/errors.hpp"
#include "hdlg/hash.hpp"

namespace hdlg {
namespace {

bool isWordStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool isWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool isNumberChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::string toLower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Split at underscores and camelCase boundaries. "ABCReg" → {ABC, Reg}.
std::vector<std::string> splitSubtokens(std::string_view word) {
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(cur);
    cur.clear();
  };
  for (size_t i = 0; i < word.size(); ++i) {
    char c = word[i];
    if (c == '_' || c == '$') {
      flush();
      continue;
    }
    if (!cur.empty() && std::isupper(static_cast<unsigned char>(c))) {
      bool prev_upper = std::isupper(static_cast<unsigned char>(cur.back())) != 0;
      bool next_lower = i + 1 < word.size() &&
                        std::islower(static_cast<unsigned char>(word[i + 1]));
      // lower→Upper starts a word; so does the last capital of a run
      // followed by lowercase (ABCReg → ABC, Reg).
      if (!prev_upper || next_lower) flush();
    }
    cur += c;
  }
  flush();
  return parts;
}

}  // namespace

std::vector<std::string> tokenize_code(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) ++i;
      i = i + 1 < n ? i + 2 : n;
      continue;
    }
    if (c == '"') {
      ++i;
      while (i < n && text[i] != '"' && text[i] != '\n') {
        i += text[i] == '\\' ? 2 : 1;
      }
      if (i < n && text[i] == '"') ++i;
      continue;
    }
    if (isWordStart(c)) {
      size_t start = i;
      while (i < n && isWordChar(text[i])) ++i;
      std::string_view word = text.substr(start, i - start);
      std::vector<std::string> subs = splitSubtokens(word);
      tokens.push_back(toLower(word));
      if (subs.size() > 1) {
        for (const std::string& s : subs) tokens.push_back(toLower(s));
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (i < n && isNumberChar(text[i])) ++i;
      tokens.push_back(toLower(text.substr(start, i - start)));
      continue;
    }
    ++i;
  }
  return tokens;
}

CorpusStats CorpusStats::fromDocuments(
    const std::vector<std::vector<std::string>>& docs) {
  CorpusStats stats;
  stats.doc_count = docs.size();
  size_t total_len = 0;
  for (const std::vector<std::string>& doc : docs) {
    total_len += doc.size();
    std::map<std::string, size_t> seen;
    for (const std::string& t : doc) seen[t] = 1;
    for (const auto& [t, one] : seen) stats.doc_freq[t] += one;
  }
  stats.avg_doc_len =
      docs.empty() ? 0.0 : static_cast<double>(total_len) / docs.size();
  return stats;
}

double CorpusStats::idf(const std::string& token) const {
  auto it = doc_freq.find(token);
  double df = it == doc_freq.end() ? 0.0 : static_cast<double>(it->second);
  double n = static_cast<double>(doc_count);
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

EmbeddingVector lexical_embed(std::string_view text, const CorpusStats* stats,
                              size_t dim) {
  std::map<std::string, size_t> tf;
  for (const std::string& t : tokenize_code(text)) ++tf[t];
  EmbeddingVector v(dim, 0.0);
  if (tf.empty()) return v;
  for (const auto& [token, count] : tf) {
    double w = 1.0 + std::log(static_cast<double>(count));
    if (stats) w *= stats->idf(token);
    v[fnv1a64(token) % dim] += w;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return EmbeddingVector(dim, 0.0);
  for (double& x : v) x /= norm;
  return v;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    throw Error(Errc::DimensionMismatch,
                "cosine: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double bm25_score(const std::vector<std::string>& query_tokens,
                  const std::vector<std::string>& doc_tokens,
                  const CorpusStats& stats) {
  constexpr double k1 = 1.2;
  constexpr double b = 0.75;
  std::map<std::string, double> tf;
  for (const std::string& t : doc_tokens) tf[t] += 1.0;
  double len = static_cast<double>(doc_tokens.size());
  double avg = stats.avg_doc_len > 0.0 ? stats.avg_doc_len : 1.0;
  double score = 0.0;
  for (const std::string& q : query_tokens) {
    auto it = tf.find(q);
    if (it == tf.end()) continue;
    double f = it->second;
    score += stats.idf(q) * (f * (k1 + 1.0)) / (f + k1 * (1.0 - b + b * len / avg));
  }
  return score;
}

EmbeddingVector Embedder::embedOne(const std::string& text) {
  std::vector<EmbeddingVector> out = embed({text});
  return out.at(0);
}

std::vector<EmbeddingVector> LexicalEmbedder::embed(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(lexical_embed(t, nullptr, dim_));
  return out;
}

}  // namespace hdlg
