#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hdlg/graph.hpp"

namespace hdlg {

enum class EdgeDir { Out, In };

struct StoreMeta {
  std::string embedder_family;
  size_t embedding_dim = 0;
  size_t graph_dim = 0;
  int graph_hops = 2;

  friend bool operator==(const StoreMeta&, const StoreMeta&) = default;
};

// Read-only typed view over a CodeGraph with rebuildable indexes. All query
// results are sorted by NodeId unless stated otherwise.
class GraphDatabase {
 public:
  static constexpr int kFormatVersion = 1;

  GraphDatabase() = default;
  explicit GraphDatabase(CodeGraph graph, StoreMeta meta = {});

  const CodeGraph& graph() const { return graph_; }
  const StoreMeta& meta() const { return meta_; }

  bool hasNode(const NodeId& id) const { return graph_.hasNode(id); }
  const GraphNode& node(const NodeId& id) const;  // throws UnknownNode

  // Distinct adjacent ids via edges of the given kind/direction, sorted.
  std::vector<NodeId> neighbors(const NodeId& id, EdgeKind kind,
                                EdgeDir dir) const;

  std::vector<const GraphNode*> find(NodeKind kind) const;
  std::vector<const GraphNode*> find(NodeKind kind,
                                     const std::string& name) const;

  // CONTAINS children of a MODULE node, in source order (ordinal attribute).
  std::vector<const GraphNode*> blocks_of(const NodeId& module_id) const;
  std::vector<const GraphNode*> signals_of(const NodeId& module_id) const;

 private:
  CodeGraph graph_;
  StoreMeta meta_;
  std::map<NodeKind, std::vector<NodeId>> by_kind_;
  std::map<std::pair<NodeKind, std::string>, std::vector<NodeId>> by_kind_name_;
  std::map<NodeId, std::map<EdgeKind, std::vector<NodeId>>> out_;
  std::map<NodeId, std::map<EdgeKind, std::vector<NodeId>>> in_;

  std::vector<const GraphNode*> containedOf(const NodeId& module_id,
                                            NodeKind kind) const;
  void rebuild();
};

// Canonical line-delimited `.hdlg` file: header record, node records sorted
// by id, edge records sorted by (src, kind, dst). Equal databases produce
// byte-identical files.
void save_database(const GraphDatabase& db, const std::string& path);

// Throws Error(Errc::Io | Errc::Format | Errc::Version); FormatError
// messages carry the offending line number.
GraphDatabase load_database(const std::string& path);

}  // namespace hdlg
