#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hdlg/graph_store.hpp"
#include "hdlg/scoring.hpp"

namespace hdlg {

// A user query split into per-level sub-queries. Empty string = level absent.
// block_query falls back to raw downstream when the decomposer yields nothing
// for it.
struct DecomposedQuery {
  std::string raw;
  std::string module_query;
  std::string block_query;
  std::string signal_query;

  friend bool operator==(const DecomposedQuery&,
                         const DecomposedQuery&) = default;
};

// provenance: "module-cosine", "block-cosine", "pair-mean", "signal-rerank"
// or "module-score". text carries the module/signal name or the block code.
struct RetrievalHit {
  NodeId node_id;
  NodeKind level = NodeKind::Block;
  double score = 0.0;
  std::string provenance;
  std::string text;

  friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

// A contained (module, block) candidate pair; score is the mean of the two
// hit scores.
struct PairHit {
  RetrievalHit module;
  RetrievalHit block;
  double score = 0.0;
};

struct Decomposer {
  virtual ~Decomposer();
  virtual DecomposedQuery decompose(const std::string& raw) = 0;
};

// Deterministic pattern-based decomposition:
//   module_query: "module X" | "in the X module" | capitalized "X module"
//   signal_query: "signal X" | "output X" | first `backticked` identifier
//   block_query:  raw with the matched fragments removed (whitespace
//                 collapsed), or raw unchanged when nothing matched.
// Throws EmptyQuery on empty raw.
DecomposedQuery decompose_rule_based(const std::string& raw);

struct RuleBasedDecomposer final : Decomposer {
  DecomposedQuery decompose(const std::string& raw) override;
};

// Level search APIs. All throw EmptyDatabase when the database holds no
// nodes, UnknownLevelQuery when a required query string is empty, and Domain
// when the database was indexed with a different embedder family. Results
// are sorted by descending score, ties by ascending NodeId, truncated to k.
std::vector<RetrievalHit> search_module(const GraphDatabase& db,
                                        Embedder& embedder,
                                        const std::string& q, size_t k);
std::vector<RetrievalHit> search_block(const GraphDatabase& db,
                                       Embedder& embedder,
                                       const std::string& q, size_t k);
// Cross-level rerank with q applied at all three levels (internal breadth
// max(k, 10) for the module/block stages).
std::vector<RetrievalHit> search_signal(const GraphDatabase& db,
                                        Embedder& embedder,
                                        const std::string& q, size_t k);
// Top-k modules for module_q, then the blocks they contain scored by
// block_q.
std::vector<RetrievalHit> search_module_block(const GraphDatabase& db,
                                              Embedder& embedder,
                                              const std::string& module_q,
                                              const std::string& block_q,
                                              size_t k);
// Top-k modules for module_q, then their declared signals filtered by
// signal_q token overlap; each signal carries its containing module's score
// (signals have no embeddings of their own).
std::vector<RetrievalHit> search_module_signal(const GraphDatabase& db,
                                               Embedder& embedder,
                                               const std::string& module_q,
                                               const std::string& signal_q,
                                               size_t k);

// All (m, b) with a CONTAINS edge m -> b, sorted by descending mean score,
// ties by ascending (module id, block id).
std::vector<PairHit> filter_pairs(const GraphDatabase& db,
                                  const std::vector<RetrievalHit>& module_hits,
                                  const std::vector<RetrievalHit>& block_hits);

// score(s) = mean of pair scores over pairs whose block contains s. When
// signal_query is nonempty, s must share at least one code token with it
// (filter, not a scored term).
std::vector<RetrievalHit> rerank_signals(const GraphDatabase& db,
                                         const std::vector<PairHit>& pairs,
                                         const std::string& signal_query,
                                         size_t k);

// One ranked block with its containing module and any reranked signals it
// contains attached as context.
struct RetrievedBlock {
  RetrievalHit block;
  std::optional<RetrievalHit> module;
  std::vector<RetrievalHit> signals;
};

// Introspection of one retrieve() run; pre_truncation is the full candidate
// block ranking before the final top-k cut.
struct RetrieveTrace {
  DecomposedQuery decomposition;
  std::vector<RetrievalHit> module_hits;
  std::vector<RetrievalHit> block_hits;
  std::vector<PairHit> pairs;
  std::vector<RetrievalHit> pre_truncation;
  bool used_fallback = false;
};

// Full pipeline: decompose -> per-level top-K0 (K0 = max(k, 10)) ->
// containment filtering -> signal rerank. Candidate blocks from the pairs
// path are scored by their pair mean; when no module sub-query was produced
// or no pair survives, falls back to plain search_block over the block
// sub-query (or raw).
std::vector<RetrievedBlock> retrieve(const GraphDatabase& db,
                                     Embedder& embedder, Decomposer& decomposer,
                                     const std::string& raw_query, size_t k,
                                     RetrieveTrace* trace = nullptr);

}  // namespace hdlg
