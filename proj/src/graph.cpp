#include "hdlg/graph.hpp"

#include "hdlg/errors.hpp"

namespace hdlg {

const char* nodeKindName(NodeKind k) {
  switch (k) {
    case NodeKind::Module: return "MODULE";
    case NodeKind::Block: return "BLOCK";
    case NodeKind::Signal: return "SIGNAL";
    case NodeKind::Temp: return "TEMP";
  }
  return "SIGNAL";
}

const char* edgeKindName(EdgeKind k) {
  switch (k) {
    case EdgeKind::Contains: return "CONTAINS";
    case EdgeKind::Instantiate: return "INSTANTIATE";
    case EdgeKind::FlowsTo: return "FLOWS_TO";
    case EdgeKind::True: return "TRUE";
    case EdgeKind::False: return "FALSE";
    case EdgeKind::Cond: return "COND";
  }
  return "CONTAINS";
}

NodeKind nodeKindFromName(const std::string& name) {
  if (name == "MODULE") return NodeKind::Module;
  if (name == "BLOCK") return NodeKind::Block;
  if (name == "SIGNAL") return NodeKind::Signal;
  if (name == "TEMP") return NodeKind::Temp;
  throw Error(Errc::Format, "unknown node kind: " + name);
}

EdgeKind edgeKindFromName(const std::string& name) {
  if (name == "CONTAINS") return EdgeKind::Contains;
  if (name == "INSTANTIATE") return EdgeKind::Instantiate;
  if (name == "FLOWS_TO") return EdgeKind::FlowsTo;
  if (name == "TRUE") return EdgeKind::True;
  if (name == "FALSE") return EdgeKind::False;
  if (name == "COND") return EdgeKind::Cond;
  throw Error(Errc::Format, "unknown edge kind: " + name);
}

NodeId make_node_id(NodeKind kind, const std::string& file_path,
                    const std::string& qualified_name, int ordinal) {
  return std::string(nodeKindName(kind)) + ":" + file_path + ":" +
         qualified_name + ":" + std::to_string(ordinal);
}

GraphNode& CodeGraph::addNode(GraphNode node) {
  NodeId id = node.id;
  auto [it, inserted] = nodes.emplace(std::move(id), std::move(node));
  return it->second;
}

void CodeGraph::addEdge(const NodeId& src, const NodeId& dst, EdgeKind kind) {
  edges.push_back(GraphEdge{src, dst, kind});
}

}  // namespace hdlg
