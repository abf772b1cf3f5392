#include "hdlg/dfg_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "hdlg/errors.hpp"
#include "hdlg/graph_builder.hpp"
#include "hdlg/hash.hpp"
#include "hdlg/parser.hpp"
#include "hdlg/scoring.hpp"

namespace hdlg {
namespace {

constexpr EdgeKind kFlowKinds[] = {EdgeKind::FlowsTo, EdgeKind::True,
                                   EdgeKind::False, EdgeKind::Cond};

// Distinct flow-edge adjacency, sorted, merged over the four flow kinds.
struct FlowAdj {
  std::map<NodeId, std::vector<NodeId>> upstream;    // dst → srcs
  std::map<NodeId, std::vector<NodeId>> downstream;  // src → dsts

  static FlowAdj fromGraph(const CodeGraph& g) {
    FlowAdj adj;
    for (const GraphEdge& e : g.edges) {
      bool flow = false;
      for (EdgeKind k : kFlowKinds) flow = flow || e.kind == k;
      if (!flow) continue;
      adj.upstream[e.dst].push_back(e.src);
      adj.downstream[e.src].push_back(e.dst);
    }
    auto finish = [](std::map<NodeId, std::vector<NodeId>>& m) {
      for (auto& [id, ids] : m) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      }
    };
    finish(adj.upstream);
    finish(adj.downstream);
    return adj;
  }

  const std::vector<NodeId>& upstreamOf(const NodeId& id) const {
    static const std::vector<NodeId> kEmpty;
    auto it = upstream.find(id);
    return it == upstream.end() ? kEmpty : it->second;
  }

  size_t upDegree(const NodeId& id) const { return upstreamOf(id).size(); }
  size_t downDegree(const NodeId& id) const {
    auto it = downstream.find(id);
    return it == downstream.end() ? 0 : it->second.size();
  }
};

void requireSignalOrTemp(const GraphNode& node) {
  if (node.kind != NodeKind::Signal && node.kind != NodeKind::Temp) {
    throw Error(Errc::WrongKind,
                "expected a SIGNAL or TEMP node, got " +
                    std::string(nodeKindName(node.kind)) + ": " + node.id);
  }
}

void addFeature(EmbeddingVector& v, const std::string& tag) {
  v[fnv1a64(tag) % kGraphDim] += 1.0;
}

EmbeddingVector featureOf(const GraphNode& node, size_t up_degree,
                          size_t down_degree) {
  EmbeddingVector v(kGraphDim, 0.0);
  addFeature(v, std::string("kind=") + nodeKindName(node.kind));
  auto bucket = [](size_t d) { return std::min<size_t>(d, 5); };
  addFeature(v, "in=" + std::to_string(bucket(up_degree)));
  addFeature(v, "out=" + std::to_string(bucket(down_degree)));
  if (node.kind == NodeKind::Signal) {
    auto it = node.attributes.find("direction");
    addFeature(v, "dir=" + (it == node.attributes.end()
                                ? std::string("internal")
                                : it->second));
  }
  return v;
}

void l2Normalize(EmbeddingVector& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

const std::vector<EmbeddingVector>& projectionMatrix() {
  static const std::vector<EmbeddingVector> w = [] {
    SplitMix64 rng(kGraphProjectionSeed);
    std::vector<EmbeddingVector> rows(kGraphDim, EmbeddingVector(kGraphDim));
    double scale = 1.0 / std::sqrt(static_cast<double>(kGraphDim));
    for (size_t i = 0; i < kGraphDim; ++i) {
      for (size_t j = 0; j < kGraphDim; ++j) {
        rows[i][j] = (rng.nextUnit() * 2.0 - 1.0) * scale;
      }
    }
    return rows;
  }();
  return w;
}

EmbeddingVector project(const EmbeddingVector& x) {
  const std::vector<EmbeddingVector>& w = projectionMatrix();
  EmbeddingVector out(kGraphDim, 0.0);
  for (size_t i = 0; i < kGraphDim; ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < kGraphDim; ++j) acc += w[i][j] * x[j];
    out[i] = acc;
  }
  return out;
}

// Sums vectors in content order (lexicographic on values), so the result is
// independent of node naming and insertion order.
EmbeddingVector contentOrderedMean(std::vector<EmbeddingVector> parts) {
  std::sort(parts.begin(), parts.end());
  EmbeddingVector sum(kGraphDim, 0.0);
  for (const EmbeddingVector& p : parts) {
    for (size_t i = 0; i < kGraphDim; ++i) sum[i] += p[i];
  }
  double n = static_cast<double>(parts.size());
  for (double& x : sum) x /= n;
  return sum;
}

// Core propagation shared by graph_embed and attach_graph_embeddings.
// feature_fn must be defined for every closure node.
EmbeddingVector embedCore(
    const FlowAdj& adj, const std::set<NodeId>& seeds, int hops,
    const std::function<EmbeddingVector(const NodeId&)>& feature_fn) {
  // Upstream closure of the seeds within `hops`.
  std::set<NodeId> closure(seeds.begin(), seeds.end());
  std::vector<NodeId> frontier(seeds.begin(), seeds.end());
  for (int h = 0; h < hops && !frontier.empty(); ++h) {
    std::vector<NodeId> next;
    for (const NodeId& id : frontier) {
      for (const NodeId& up : adj.upstreamOf(id)) {
        if (closure.insert(up).second) next.push_back(up);
      }
    }
    frontier = std::move(next);
  }

  std::map<NodeId, EmbeddingVector> h;
  for (const NodeId& id : closure) h[id] = feature_fn(id);

  for (int round = 0; round < hops; ++round) {
    std::map<NodeId, EmbeddingVector> next;
    for (const NodeId& id : closure) {
      std::vector<EmbeddingVector> parts;
      parts.push_back(h[id]);
      for (const NodeId& up : adj.upstreamOf(id)) {
        auto it = h.find(up);
        if (it != h.end()) parts.push_back(it->second);
      }
      EmbeddingVector v = project(contentOrderedMean(std::move(parts)));
      l2Normalize(v);
      next[id] = std::move(v);
    }
    h = std::move(next);
  }

  std::vector<EmbeddingVector> seed_vectors;
  for (const NodeId& id : seeds) seed_vectors.push_back(h[id]);
  EmbeddingVector out = contentOrderedMean(std::move(seed_vectors));
  l2Normalize(out);
  return out;
}

}  // namespace

TraversalResult signal_traverse(const GraphDatabase& db,
                                const NodeId& signal_id, int max_hops) {
  if (max_hops < 1) {
    throw Error(Errc::Domain, "max_hops must be at least 1, got " +
                                  std::to_string(max_hops));
  }
  requireSignalOrTemp(db.node(signal_id));

  TraversalResult result;
  result.origin = signal_id;
  result.visited.push_back({signal_id, 0});
  std::set<NodeId> seen{signal_id};
  std::vector<NodeId> frontier{signal_id};

  auto upstreamOf = [&](const NodeId& id) {
    std::set<NodeId> ups;
    for (EdgeKind k : kFlowKinds) {
      for (const NodeId& u : db.neighbors(id, k, EdgeDir::In)) ups.insert(u);
    }
    return ups;
  };

  for (int hop = 1; hop <= max_hops && !frontier.empty(); ++hop) {
    std::set<NodeId> next;
    for (const NodeId& id : frontier) {
      for (const NodeId& up : upstreamOf(id)) {
        if (!seen.count(up)) next.insert(up);
      }
    }
    frontier.assign(next.begin(), next.end());
    for (const NodeId& id : frontier) {
      seen.insert(id);
      result.visited.push_back({id, hop});
    }
  }

  for (const NodeId& id : frontier) {
    for (const NodeId& up : upstreamOf(id)) {
      if (!seen.count(up)) {
        result.frontier_truncated = true;
        return result;
      }
    }
  }
  return result;
}

CandidateSet error_candidates(const GraphDatabase& db,
                              const NodeId& faulty_signal, int max_hops) {
  TraversalResult traversal = signal_traverse(db, faulty_signal, max_hops);
  CandidateSet out;
  std::map<NodeId, int> block_min_hop;
  for (const auto& [id, hop] : traversal.visited) {
    if (db.node(id).kind != NodeKind::Signal) continue;
    out.signals_on_path.push_back(id);
    for (const NodeId& parent :
         db.neighbors(id, EdgeKind::Contains, EdgeDir::In)) {
      if (db.node(parent).kind != NodeKind::Block) continue;
      auto [it, inserted] = block_min_hop.emplace(parent, hop);
      if (!inserted && hop < it->second) it->second = hop;
    }
  }
  for (const auto& [id, hop] : block_min_hop) {
    const GraphNode& block = db.node(id);
    auto code_it = block.attributes.find("code");
    out.blocks.push_back(
        {id, code_it == block.attributes.end() ? "" : code_it->second, hop});
  }
  std::sort(out.blocks.begin(), out.blocks.end(),
            [](const CandidateBlock& a, const CandidateBlock& b) {
              if (a.min_hop != b.min_hop) return a.min_hop < b.min_hop;
              return a.id < b.id;
            });
  return out;
}

EmbeddingVector node_feature(const GraphDatabase& db, const NodeId& id) {
  const GraphNode& node = db.node(id);
  requireSignalOrTemp(node);
  std::set<NodeId> ups;
  std::set<NodeId> downs;
  for (EdgeKind k : kFlowKinds) {
    for (const NodeId& u : db.neighbors(id, k, EdgeDir::In)) ups.insert(u);
    for (const NodeId& d : db.neighbors(id, k, EdgeDir::Out)) downs.insert(d);
  }
  return featureOf(node, ups.size(), downs.size());
}

SubgraphEmbedding graph_embed(const GraphDatabase& db,
                              const std::vector<NodeId>& seed_nodes,
                              int hops) {
  if (seed_nodes.empty()) {
    throw Error(Errc::EmptySeed, "graph_embed requires at least one seed");
  }
  for (const NodeId& id : seed_nodes) requireSignalOrTemp(db.node(id));
  FlowAdj adj = FlowAdj::fromGraph(db.graph());
  std::set<NodeId> seeds(seed_nodes.begin(), seed_nodes.end());
  SubgraphEmbedding out;
  out.hops = hops;
  out.vector = embedCore(adj, seeds, hops, [&](const NodeId& id) {
    return featureOf(db.node(id), adj.upDegree(id), adj.downDegree(id));
  });
  return out;
}

void attach_graph_embeddings(CodeGraph& graph, int hops) {
  FlowAdj adj = FlowAdj::fromGraph(graph);
  // BLOCK → contained SIGNAL seeds.
  std::map<NodeId, std::set<NodeId>> block_signals;
  for (const GraphEdge& e : graph.edges) {
    if (e.kind != EdgeKind::Contains) continue;
    auto src_it = graph.nodes.find(e.src);
    auto dst_it = graph.nodes.find(e.dst);
    if (src_it == graph.nodes.end() || dst_it == graph.nodes.end()) continue;
    if (src_it->second.kind == NodeKind::Block &&
        dst_it->second.kind == NodeKind::Signal) {
      block_signals[e.src].insert(e.dst);
    }
  }
  for (auto& [id, node] : graph.nodes) {
    if (node.kind != NodeKind::Block) continue;
    const std::set<NodeId>& seeds = block_signals[id];
    if (seeds.empty()) {
      node.graph_embedding = EmbeddingVector(kGraphDim, 0.0);
      continue;
    }
    node.graph_embedding = embedCore(adj, seeds, hops, [&](const NodeId& nid) {
      return featureOf(graph.nodes.at(nid), adj.upDegree(nid),
                       adj.downDegree(nid));
    });
  }
}

std::vector<CompletionHit> completion_matches(const GraphDatabase& db,
                                              const std::string& partial_code,
                                              size_t k) {
  if (db.graph().nodes.empty()) {
    throw Error(Errc::EmptyDatabase, "completion_matches on empty database");
  }

  auto tryParse = [](const std::string& body,
                     std::vector<AstModule>& out) -> bool {
    std::string wrapped = "module __fragment__;\n" + body + "\nendmodule\n";
    try {
      std::vector<Diagnostic> diags;
      out = parse_file(wrapped, "<completion>", diags);
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  std::vector<AstModule> modules;
  bool ok = tryParse(partial_code, modules);
  if (!ok) {
    // Salvage: drop everything after the last complete statement.
    size_t cut = partial_code.rfind(';');
    if (cut != std::string::npos) {
      ok = tryParse(partial_code.substr(0, cut + 1), modules);
    }
  }
  if (!ok || modules.empty() || modules[0].blocks.empty()) {
    throw Error(Errc::UnparsableFragment,
                "no complete statements salvageable from the fragment");
  }

  const AstModule& fragment = modules[0];
  CodeGraph frag_graph = build_ast_graph({fragment}, {});
  merge_graphs(frag_graph, build_dfg(fragment));

  int hops = db.meta().graph_hops > 0 ? db.meta().graph_hops : kDefaultGraphHops;
  EmbeddingVector frag_vector(kGraphDim, 0.0);
  {
    FlowAdj adj = FlowAdj::fromGraph(frag_graph);
    std::set<NodeId> seeds;
    for (const auto& [id, node] : frag_graph.nodes) {
      if (node.kind == NodeKind::Signal) seeds.insert(id);
    }
    if (!seeds.empty()) {
      frag_vector = embedCore(adj, seeds, hops, [&](const NodeId& nid) {
        return featureOf(frag_graph.nodes.at(nid), adj.upDegree(nid),
                         adj.downDegree(nid));
      });
    }
  }

  EmbeddingVector frag_lexical = lexical_embed(partial_code);
  std::vector<CompletionHit> hits;
  for (const GraphNode* block : db.find(NodeKind::Block)) {
    CompletionHit hit;
    hit.block_id = block->id;
    auto code_it = block->attributes.find("code");
    hit.code = code_it == block->attributes.end() ? "" : code_it->second;
    if (block->graph_embedding) {
      hit.graph_score = cosine(frag_vector, *block->graph_embedding);
    }
    hit.lexical_score = cosine(frag_lexical, lexical_embed(hit.code));
    hit.score = 0.5 * hit.graph_score + 0.5 * hit.lexical_score;
    hits.push_back(std::move(hit));
  }
  std::sort(hits.begin(), hits.end(),
            [](const CompletionHit& a, const CompletionHit& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.block_id < b.block_id;
            });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

}  // namespace hdlg
