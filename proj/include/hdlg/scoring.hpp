#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hdlg/graph.hpp"

namespace hdlg {

inline constexpr size_t kLexicalDim = 256;

// Lowercased identifier/keyword/number tokens; identifiers additionally
// split at underscores and camelCase boundaries, whole identifier first,
// sub-tokens after (only when there is more than one). Comments, strings,
// and punctuation dropped.
std::vector<std::string> tokenize_code(std::string_view text);

struct CorpusStats {
  size_t doc_count = 0;
  double avg_doc_len = 0.0;
  std::map<std::string, size_t> doc_freq;

  static CorpusStats fromDocuments(
      const std::vector<std::vector<std::string>>& docs);

  // ln((N - df + 0.5)/(df + 0.5) + 1), df = 0 for unseen tokens.
  double idf(const std::string& token) const;
};

// Hashed TF embedding: bucket = fnv1a64(token) % dim, weight
// 1 + ln(tf), multiplied by idf when stats given; L2-normalized.
// Zero vector for an empty token stream.
EmbeddingVector lexical_embed(std::string_view text,
                              const CorpusStats* stats = nullptr,
                              size_t dim = kLexicalDim);

// 0 when either vector is zero. Throws DimensionMismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Okapi BM25, k1 = 1.2, b = 0.75, summed over the query multiset.
double bm25_score(const std::vector<std::string>& query_tokens,
                  const std::vector<std::string>& doc_tokens,
                  const CorpusStats& stats);

// Text embedding provider. Deterministic per configured instance; dimension
// constant per index.
struct Embedder {
  virtual ~Embedder() = default;
  virtual std::vector<EmbeddingVector> embed(
      const std::vector<std::string>& texts) = 0;
  virtual std::string family() const = 0;
  virtual size_t dim() const = 0;

  EmbeddingVector embedOne(const std::string& text);
};

class LexicalEmbedder : public Embedder {
 public:
  explicit LexicalEmbedder(size_t dim = kLexicalDim) : dim_(dim) {}

  std::vector<EmbeddingVector> embed(
      const std::vector<std::string>& texts) override;
  std::string family() const override { return "lexical"; }
  size_t dim() const override { return dim_; }

 private:
  size_t dim_;
};

}  // namespace hdlg
