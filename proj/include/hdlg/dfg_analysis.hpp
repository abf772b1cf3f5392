#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hdlg/graph.hpp"
#include "hdlg/graph_store.hpp"

namespace hdlg {

inline constexpr size_t kGraphDim = 64;
inline constexpr int kDefaultGraphHops = 2;
inline constexpr uint64_t kGraphProjectionSeed = 0x9e3779b97f4a7c15ull;

struct TraversalResult {
  NodeId origin;
  std::vector<std::pair<NodeId, int>> visited;  // hop-ordered, no duplicates
  bool frontier_truncated = false;
};

struct CandidateBlock {
  NodeId id;
  std::string code;
  int min_hop = 0;
};

struct CandidateSet {
  std::vector<CandidateBlock> blocks;  // (min hop, NodeId) order
  std::vector<NodeId> signals_on_path;
};

struct SubgraphEmbedding {
  EmbeddingVector vector;  // dimension kGraphDim, L2-normalized unless zero
  int hops = 0;
};

struct CompletionHit {
  NodeId block_id;
  std::string code;
  double score = 0.0;  // 0.5 * graph_score + 0.5 * lexical_score
  double graph_score = 0.0;
  double lexical_score = 0.0;
};

// Reverse breadth-first traversal over FLOWS_TO/TRUE/FALSE/COND edges from
// the faulty signal, up to max_hops. Within a hop, ascending NodeId order.
TraversalResult signal_traverse(const GraphDatabase& db, const NodeId& signal_id,
                                int max_hops);

// Blocks containing any traversed SIGNAL, ordered by (minimum hop of their
// matched signals, NodeId). TEMP nodes contribute no blocks.
CandidateSet error_candidates(const GraphDatabase& db,
                              const NodeId& faulty_signal, int max_hops);

// Name-independent node feature: hashed projection of (kind, flow-degree
// buckets, direction for SIGNAL nodes).
EmbeddingVector node_feature(const GraphDatabase& db, const NodeId& id);

// Untrained GraphSAGE-style propagation over the upstream closure of the
// seeds; deterministic, invariant under node renaming.
SubgraphEmbedding graph_embed(const GraphDatabase& db,
                              const std::vector<NodeId>& seed_nodes, int hops);

// Parses partial_code as a module body (dropping one trailing incomplete
// statement if needed), embeds its DFG, and ranks indexed blocks by
// 0.5 * graph cosine + 0.5 * lexical cosine.
std::vector<CompletionHit> completion_matches(const GraphDatabase& db,
                                              const std::string& partial_code,
                                              size_t k);

// Index-time pass: stores a DFG embedding on every BLOCK node, seeded by
// the block's contained signals (zero vector when it has none).
void attach_graph_embeddings(CodeGraph& graph, int hops = kDefaultGraphHops);

}  // namespace hdlg
