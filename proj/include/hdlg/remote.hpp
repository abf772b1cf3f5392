#pragma once

#include <string>
#include <vector>

#include "hdlg/benchgen.hpp"
#include "hdlg/retrieval.hpp"
#include "hdlg/scoring.hpp"

namespace hdlg {

// POST {"texts": [...]} -> {"vectors": [[...], ...]}, order preserved, in
// batches of at most 64. Throws Transport on connection/status failures and
// Protocol on malformed or ragged responses, both naming the failing batch.
std::vector<EmbeddingVector> remote_embed(const std::string& endpoint,
                                          const std::vector<std::string>& texts);

class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(std::string endpoint);

  std::vector<EmbeddingVector> embed(
      const std::vector<std::string>& texts) override;
  std::string family() const override;
  // 0 until the first successful embed reveals the provider dimension.
  size_t dim() const override;

 private:
  std::string endpoint_;
  size_t dim_ = 0;
};

// POST {"query": "..."} -> {"module": "...", "block": "...", "signal": "..."}
// with empty strings for absent levels; block falls back to the raw query
// when the endpoint yields nothing.
class RemoteDecomposer final : public Decomposer {
 public:
  explicit RemoteDecomposer(std::string endpoint);

  DecomposedQuery decompose(const std::string& raw) override;

 private:
  std::string endpoint_;
};

// POST {"prompt": "..."} -> {"text": "..."}; failures surface as Provider.
class RemoteTextGen final : public TextGenProvider {
 public:
  explicit RemoteTextGen(std::string endpoint);

  std::string generate(const std::string& prompt) override;

 private:
  std::string endpoint_;
};

}  // namespace hdlg
