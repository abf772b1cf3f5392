#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdlg/source.hpp"

namespace hdlg {

enum class NodeKind { Module, Block, Signal, Temp };
enum class EdgeKind { Contains, Instantiate, FlowsTo, True, False, Cond };

const char* nodeKindName(NodeKind k);  // "MODULE" / "BLOCK" / ...
const char* edgeKindName(EdgeKind k);  // "CONTAINS" / "FLOWS_TO" / ...
NodeKind nodeKindFromName(const std::string& name);  // throws FormatError
EdgeKind edgeKindFromName(const std::string& name);  // throws FormatError

using EmbeddingVector = std::vector<double>;

// Stable string identifier: {kind}:{file_path}:{qualified_name}:{ordinal}.
// The ordinal disambiguates entities sharing a qualified name within one
// file, 0-based in source order.
using NodeId = std::string;

NodeId make_node_id(NodeKind kind, const std::string& file_path,
                    const std::string& qualified_name, int ordinal);

struct GraphNode {
  NodeId id;
  NodeKind kind = NodeKind::Signal;
  std::string name;
  // BLOCK: block_type, code, ordinal, drives, reads. MODULE: code, plus
  // external=true on placeholders. SIGNAL: direction, net_kind, plus
  // dangling=true / instance_port=true on placeholders.
  std::map<std::string, std::string> attributes;
  std::optional<EmbeddingVector> embedding;        // code embedding
  std::optional<EmbeddingVector> graph_embedding;  // DFG structure embedding
  std::optional<SourceSpan> span;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  NodeId src;
  NodeId dst;
  EdgeKind kind = EdgeKind::Contains;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
  friend bool operator<(const GraphEdge& a, const GraphEdge& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.dst < b.dst;
  }
};

struct CodeGraph {
  std::map<NodeId, GraphNode> nodes;
  std::vector<GraphEdge> edges;  // multiset; canonicalized on save
  std::vector<Diagnostic> diagnostics;

  bool hasNode(const NodeId& id) const { return nodes.count(id) > 0; }
  GraphNode& addNode(GraphNode node);
  void addEdge(const NodeId& src, const NodeId& dst, EdgeKind kind);
};

}  // namespace hdlg
