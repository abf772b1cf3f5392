#include "hdlg/graph_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdlg/errors.hpp"
#include "hdlg/files.hpp"

namespace hdlg {

using nlohmann::json;

GraphDatabase::GraphDatabase(CodeGraph graph, StoreMeta meta)
    : graph_(std::move(graph)), meta_(std::move(meta)) {
  rebuild();
}

void GraphDatabase::rebuild() {
  by_kind_.clear();
  by_kind_name_.clear();
  out_.clear();
  in_.clear();
  for (const auto& [id, node] : graph_.nodes) {
    by_kind_[node.kind].push_back(id);
    by_kind_name_[{node.kind, node.name}].push_back(id);
  }
  for (const GraphEdge& e : graph_.edges) {
    out_[e.src][e.kind].push_back(e.dst);
    in_[e.dst][e.kind].push_back(e.src);
  }
  auto dedupe = [](std::map<NodeId, std::map<EdgeKind, std::vector<NodeId>>>& adj) {
    for (auto& [id, by_kind] : adj) {
      for (auto& [kind, ids] : by_kind) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      }
    }
  };
  dedupe(out_);
  dedupe(in_);
}

const GraphNode& GraphDatabase::node(const NodeId& id) const {
  auto it = graph_.nodes.find(id);
  if (it == graph_.nodes.end()) {
    throw Error(Errc::UnknownNode, "unknown node: " + id);
  }
  return it->second;
}

std::vector<NodeId> GraphDatabase::neighbors(const NodeId& id, EdgeKind kind,
                                             EdgeDir dir) const {
  node(id);  // UnknownNode check
  const auto& adj = dir == EdgeDir::Out ? out_ : in_;
  auto it = adj.find(id);
  if (it == adj.end()) return {};
  auto kit = it->second.find(kind);
  if (kit == it->second.end()) return {};
  return kit->second;
}

std::vector<const GraphNode*> GraphDatabase::find(NodeKind kind) const {
  std::vector<const GraphNode*> out;
  auto it = by_kind_.find(kind);
  if (it == by_kind_.end()) return out;
  out.reserve(it->second.size());
  for (const NodeId& id : it->second) out.push_back(&graph_.nodes.at(id));
  return out;
}

std::vector<const GraphNode*> GraphDatabase::find(
    NodeKind kind, const std::string& name) const {
  std::vector<const GraphNode*> out;
  auto it = by_kind_name_.find({kind, name});
  if (it == by_kind_name_.end()) return out;
  for (const NodeId& id : it->second) out.push_back(&graph_.nodes.at(id));
  return out;
}

std::vector<const GraphNode*> GraphDatabase::containedOf(
    const NodeId& module_id, NodeKind kind) const {
  const GraphNode& m = node(module_id);
  if (m.kind != NodeKind::Module) {
    throw Error(Errc::WrongKind,
                "expected a MODULE node, got " +
                    std::string(nodeKindName(m.kind)) + ": " + module_id);
  }
  std::vector<const GraphNode*> out;
  for (const NodeId& id : neighbors(module_id, EdgeKind::Contains, EdgeDir::Out)) {
    const GraphNode& n = graph_.nodes.at(id);
    if (n.kind == kind) out.push_back(&n);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GraphNode* a, const GraphNode* b) {
                     auto ordinalOf = [](const GraphNode* n) {
                       auto it = n->attributes.find("ordinal");
                       return it == n->attributes.end() ? 0L
                                                        : std::stol(it->second);
                     };
                     return ordinalOf(a) < ordinalOf(b);
                   });
  return out;
}

std::vector<const GraphNode*> GraphDatabase::blocks_of(
    const NodeId& module_id) const {
  return containedOf(module_id, NodeKind::Block);
}

std::vector<const GraphNode*> GraphDatabase::signals_of(
    const NodeId& module_id) const {
  return containedOf(module_id, NodeKind::Signal);
}

namespace {

json spanToJson(const SourceSpan& span) {
  return json{{"file_path", span.file_path},
              {"byte_start", span.byte_start},
              {"byte_end", span.byte_end},
              {"line_start", span.line_start},
              {"line_end", span.line_end}};
}

SourceSpan spanFromJson(const json& j) {
  SourceSpan span;
  span.file_path = j.at("file_path").get<std::string>();
  span.byte_start = j.at("byte_start").get<size_t>();
  span.byte_end = j.at("byte_end").get<size_t>();
  span.line_start = j.at("line_start").get<int>();
  span.line_end = j.at("line_end").get<int>();
  return span;
}

json diagnosticToJson(const Diagnostic& d) {
  return json{{"file", d.file},
              {"line", d.line},
              {"code", d.code},
              {"message", d.message}};
}

Diagnostic diagnosticFromJson(const json& j) {
  Diagnostic d;
  d.file = j.at("file").get<std::string>();
  d.line = j.at("line").get<int>();
  d.code = j.at("code").get<std::string>();
  d.message = j.at("message").get<std::string>();
  return d;
}

}  // namespace

void save_database(const GraphDatabase& db, const std::string& path) {
  const CodeGraph& g = db.graph();
  std::ostringstream out;

  json meta{{"embedder_family", db.meta().embedder_family},
            {"embedding_dim", db.meta().embedding_dim},
            {"graph_dim", db.meta().graph_dim},
            {"graph_hops", db.meta().graph_hops}};
  json diags = json::array();
  for (const Diagnostic& d : g.diagnostics) diags.push_back(diagnosticToJson(d));
  json header{{"type", "header"},
              {"format_version", GraphDatabase::kFormatVersion},
              {"node_count", g.nodes.size()},
              {"edge_count", g.edges.size()},
              {"meta", meta},
              {"diagnostics", diags}};
  out << header.dump() << '\n';

  for (const auto& [id, node] : g.nodes) {
    json record{{"type", "node"},
                {"id", node.id},
                {"kind", nodeKindName(node.kind)},
                {"name", node.name},
                {"attributes", node.attributes}};
    if (node.embedding) record["embedding"] = *node.embedding;
    if (node.graph_embedding) record["graph_embedding"] = *node.graph_embedding;
    if (node.span) record["span"] = spanToJson(*node.span);
    out << record.dump() << '\n';
  }

  std::vector<GraphEdge> edges = g.edges;
  std::sort(edges.begin(), edges.end());
  for (const GraphEdge& e : edges) {
    json record{{"type", "edge"},
                {"src", e.src},
                {"dst", e.dst},
                {"kind", edgeKindName(e.kind)}};
    out << record.dump() << '\n';
  }

  write_file(path, out.str());
}

GraphDatabase load_database(const std::string& path) {
  std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;

  auto formatError = [&](const std::string& what) {
    return Error(Errc::Format,
                 path + ":" + std::to_string(line_no) + ": " + what);
  };

  auto nextRecord = [&](json& out) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json parsed = json::parse(line, nullptr, false);
      if (parsed.is_discarded()) throw formatError("malformed record");
      out = std::move(parsed);
      return true;
    }
    return false;
  };

  json header;
  if (!nextRecord(header)) throw formatError("missing header");
  if (!header.is_object() || header.value("type", "") != "header") {
    throw formatError("first record is not a header");
  }
  if (!header.contains("format_version") ||
      !header["format_version"].is_number_integer()) {
    throw formatError("header missing format_version");
  }
  int version = header["format_version"].get<int>();
  if (version != GraphDatabase::kFormatVersion) {
    throw Error(Errc::Version, path + ": unsupported format_version " +
                                   std::to_string(version));
  }

  CodeGraph g;
  StoreMeta meta;
  try {
    size_t node_count = header.at("node_count").get<size_t>();
    size_t edge_count = header.at("edge_count").get<size_t>();
    const json& m = header.at("meta");
    meta.embedder_family = m.at("embedder_family").get<std::string>();
    meta.embedding_dim = m.at("embedding_dim").get<size_t>();
    meta.graph_dim = m.at("graph_dim").get<size_t>();
    meta.graph_hops = m.at("graph_hops").get<int>();
    for (const json& d : header.at("diagnostics")) {
      g.diagnostics.push_back(diagnosticFromJson(d));
    }

    json record;
    while (nextRecord(record)) {
      std::string type = record.value("type", "");
      if (type == "node") {
        GraphNode node;
        node.id = record.at("id").get<std::string>();
        node.kind = nodeKindFromName(record.at("kind").get<std::string>());
        node.name = record.at("name").get<std::string>();
        node.attributes =
            record.at("attributes").get<std::map<std::string, std::string>>();
        if (record.contains("embedding")) {
          node.embedding = record["embedding"].get<EmbeddingVector>();
        }
        if (record.contains("graph_embedding")) {
          node.graph_embedding =
              record["graph_embedding"].get<EmbeddingVector>();
        }
        if (record.contains("span")) node.span = spanFromJson(record["span"]);
        if (g.hasNode(node.id)) throw formatError("duplicate node id");
        g.addNode(std::move(node));
      } else if (type == "edge") {
        GraphEdge e;
        e.src = record.at("src").get<std::string>();
        e.dst = record.at("dst").get<std::string>();
        e.kind = edgeKindFromName(record.at("kind").get<std::string>());
        if (!g.hasNode(e.src) || !g.hasNode(e.dst)) {
          throw formatError("edge references missing node");
        }
        g.edges.push_back(std::move(e));
      } else {
        throw formatError("unknown record type '" + type + "'");
      }
    }
    if (g.nodes.size() != node_count) {
      throw formatError("node count mismatch: header says " +
                        std::to_string(node_count) + ", found " +
                        std::to_string(g.nodes.size()));
    }
    if (g.edges.size() != edge_count) {
      throw formatError("edge count mismatch: header says " +
                        std::to_string(edge_count) + ", found " +
                        std::to_string(g.edges.size()));
    }
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    throw formatError(e.what());
  }

  return GraphDatabase(std::move(g), std::move(meta));
}

}  // namespace hdlg
