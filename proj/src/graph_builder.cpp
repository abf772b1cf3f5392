#include "hdlg/graph_builder.hpp"

#include <algorithm>
#include <set>

#include "hdlg/dfg_analysis.hpp"
#include "hdlg/errors.hpp"
#include "hdlg/files.hpp"
#include "hdlg/parser.hpp"

namespace hdlg {
namespace {

std::string sliceCode(const SourceMap& sources, const SourceSpan& span) {
  auto it = sources.find(span.file_path);
  if (it == sources.end()) return "";
  const std::string& text = it->second;
  if (span.byte_end > text.size() || span.byte_start > span.byte_end) return "";
  return text.substr(span.byte_start, span.length());
}

std::string joinSorted(const std::set<std::string>& names) {
  std::string out;
  for (const std::string& n : names) {
    if (!out.empty()) out += ' ';
    out += n;
  }
  return out;
}

// Read/write role analysis for a block, by name.
struct RoleSets {
  std::set<std::string> drives;
  std::set<std::string> reads;
};

void collectLhsRoles(const Expr& lhs, RoleSets& roles) {
  switch (lhs.kind) {
    case ExprKind::Identifier:
      roles.drives.insert(lhs.text);
      break;
    case ExprKind::Select: {
      collectLhsRoles(lhs.operands[0], roles);
      for (size_t i = 1; i < lhs.operands.size(); ++i) {
        collectExprIdentifiers(lhs.operands[i], roles.reads);
      }
      break;
    }
    case ExprKind::Concat:
      for (const Expr& part : lhs.operands) collectLhsRoles(part, roles);
      break;
    default:
      collectExprIdentifiers(lhs, roles.reads);
      break;
  }
}

void collectStmtRoles(const Stmt& s, RoleSets& roles) {
  switch (s.kind) {
    case StmtKind::Assign:
      collectLhsRoles(s.lhs, roles);
      collectExprIdentifiers(s.rhs, roles.reads);
      break;
    case StmtKind::If:
      collectExprIdentifiers(s.cond, roles.reads);
      for (const Stmt& c : s.body) collectStmtRoles(c, roles);
      for (const Stmt& c : s.else_body) collectStmtRoles(c, roles);
      break;
    case StmtKind::Case:
      collectExprIdentifiers(s.cond, roles.reads);
      for (const Stmt::Arm& arm : s.arms) {
        for (const Expr& l : arm.labels) collectExprIdentifiers(l, roles.reads);
        for (const Stmt& c : arm.body) collectStmtRoles(c, roles);
      }
      break;
    case StmtKind::Seq:
      for (const Stmt& c : s.body) collectStmtRoles(c, roles);
      break;
    case StmtKind::Null:
      break;
  }
}

RoleSets blockRoles(const AstBlock& block) {
  RoleSets roles;
  for (const SensItem& item : block.sensitivity) {
    if (!item.signal.empty()) roles.reads.insert(item.signal);
  }
  for (const Stmt& s : block.statements) collectStmtRoles(s, roles);
  for (const PortConnection& pc : block.port_connections) {
    if (pc.expr) collectExprIdentifiers(*pc.expr, roles.reads);
  }
  return roles;
}

NodeId moduleNodeId(const AstModule& mod) {
  return make_node_id(NodeKind::Module, mod.span.file_path, mod.name, 0);
}

NodeId signalNodeId(const AstModule& mod, const std::string& signal_name) {
  return make_node_id(NodeKind::Signal, mod.span.file_path,
                      mod.name + "." + signal_name, 0);
}

}  // namespace

CodeGraph build_ast_graph(const std::vector<AstModule>& modules,
                          const SourceMap& sources) {
  CodeGraph g;
  std::set<std::pair<std::string, std::string>> seen_file_name;
  std::map<std::string, int> name_count;

  for (const AstModule& mod : modules) {
    const std::string& file = mod.span.file_path;
    if (!seen_file_name.insert({file, mod.name}).second) {
      g.diagnostics.push_back(
          {file, mod.span.line_start, "duplicate-module",
           "module '" + mod.name + "' redefined in the same file; skipped"});
      continue;
    }
    if (++name_count[mod.name] > 1) {
      g.diagnostics.push_back(
          {file, mod.span.line_start, "duplicate-module",
           "module '" + mod.name + "' also defined in another file"});
    }

    NodeId module_id = moduleNodeId(mod);
    GraphNode module_node;
    module_node.id = module_id;
    module_node.kind = NodeKind::Module;
    module_node.name = mod.name;
    module_node.attributes["code"] = sliceCode(sources, mod.span);
    module_node.span = mod.span;
    g.addNode(std::move(module_node));

    std::set<std::string> declared;
    for (size_t i = 0; i < mod.signals.size(); ++i) {
      const AstSignal& sig = mod.signals[i];
      declared.insert(sig.name);
      GraphNode node;
      node.id = signalNodeId(mod, sig.name);
      node.kind = NodeKind::Signal;
      node.name = sig.name;
      node.attributes["direction"] = directionName(sig.direction);
      node.attributes["net_kind"] = netKindName(sig.net_kind);
      node.attributes["ordinal"] = std::to_string(i);
      node.span = sig.span;
      NodeId id = node.id;
      g.addNode(std::move(node));
      g.addEdge(module_id, id, EdgeKind::Contains);
    }

    std::map<std::string, int> block_name_ordinal;
    for (size_t j = 0; j < mod.blocks.size(); ++j) {
      const AstBlock& block = mod.blocks[j];
      std::string local_name =
          block.label.empty() ? blockKindName(block.kind) : block.label;
      std::string qualified = mod.name + "." + local_name;
      int ordinal = block_name_ordinal[qualified]++;
      GraphNode node;
      node.id = make_node_id(NodeKind::Block, file, qualified, ordinal);
      node.kind = NodeKind::Block;
      node.name = local_name;
      node.attributes["block_type"] = blockKindName(block.kind);
      node.attributes["code"] = sliceCode(sources, block.span);
      node.attributes["ordinal"] = std::to_string(j);
      RoleSets roles = blockRoles(block);
      node.attributes["drives"] = joinSorted(roles.drives);
      node.attributes["reads"] = joinSorted(roles.reads);
      if (block.kind == BlockKind::Instance) {
        node.attributes["instance_of"] = block.instance_of;
        node.attributes["instance_name"] = block.instance_name;
      }
      node.span = block.span;
      NodeId block_id = node.id;
      g.addNode(std::move(node));
      g.addEdge(module_id, block_id, EdgeKind::Contains);
      for (const std::string& ref : block.referenced_signals) {
        if (declared.count(ref)) {
          g.addEdge(block_id, signalNodeId(mod, ref), EdgeKind::Contains);
        }
      }
    }
  }
  return g;
}

namespace {

// Per-module DFG lowering state.
class DfgLowering {
 public:
  DfgLowering(const AstModule& mod, CodeGraph& g)
      : mod_(mod), g_(g), module_id_(moduleNodeId(mod)) {
    for (const AstSignal& s : mod.signals) declared_.insert(s.name);
  }

  void run() {
    for (const AstBlock& block : mod_.blocks) {
      current_line_ = block.span.line_start;
      if (block.kind == BlockKind::Instance) {
        lowerInstance(block);
        continue;
      }
      Env env;
      for (const Stmt& s : block.statements) lowerStmt(s, env);
    }
  }

 private:
  using ValueSrc = std::vector<NodeId>;
  using Env = std::map<std::string, ValueSrc>;

  const AstModule& mod_;
  CodeGraph& g_;
  NodeId module_id_;
  std::set<std::string> declared_;
  int temp_ordinal_ = 0;
  int current_line_ = 0;

  NodeId resolveSignal(const std::string& name) {
    if (declared_.count(name)) return signalNodeId(mod_, name);
    NodeId id = signalNodeId(mod_, name);
    if (!g_.hasNode(id)) {
      GraphNode node;
      node.id = id;
      node.kind = NodeKind::Signal;
      node.name = name;
      node.attributes["direction"] = "internal";
      node.attributes["net_kind"] = "wire";
      node.attributes["dangling"] = "true";
      g_.addNode(std::move(node));
      g_.addEdge(module_id_, id, EdgeKind::Contains);
      g_.diagnostics.push_back(
          {mod_.span.file_path, current_line_, "dangling-signal",
           "signal '" + name + "' referenced but not declared in module '" +
               mod_.name + "'"});
    }
    return id;
  }

  NodeId instancePortNode(const std::string& instance_name,
                          const std::string& port_label) {
    std::string name = instance_name + "." + port_label;
    NodeId id = signalNodeId(mod_, name);
    if (!g_.hasNode(id)) {
      GraphNode node;
      node.id = id;
      node.kind = NodeKind::Signal;
      node.name = name;
      node.attributes["direction"] = "internal";
      node.attributes["net_kind"] = "wire";
      node.attributes["instance_port"] = "true";
      g_.addNode(std::move(node));
      g_.addEdge(module_id_, id, EdgeKind::Contains);
    }
    return id;
  }

  NodeId newTemp() {
    NodeId id = make_node_id(NodeKind::Temp, mod_.span.file_path, mod_.name,
                             temp_ordinal_++);
    GraphNode node;
    node.id = id;
    node.kind = NodeKind::Temp;
    node.name = id;
    g_.addNode(std::move(node));
    return id;
  }

  // Identifiers in DFS order, first occurrence kept.
  static void exprIdentifiers(const Expr& e, std::vector<std::string>& out,
                              std::set<std::string>& seen) {
    if (e.kind == ExprKind::Identifier && seen.insert(e.text).second) {
      out.push_back(e.text);
    }
    for (const Expr& op : e.operands) exprIdentifiers(op, out, seen);
  }

  std::vector<std::string> identifiersOf(const Expr& e) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    exprIdentifiers(e, out, seen);
    return out;
  }

  // Single-term: Identifier, Number, String, or a Select chain over an
  // identifier. Everything else routes through a TEMP.
  static bool isSingleTerm(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Identifier:
      case ExprKind::Number:
      case ExprKind::String:
        return true;
      case ExprKind::Select:
        return isSingleTerm(e.operands[0]);
      default:
        return false;
    }
  }

  struct Target {
    std::string base;
    std::vector<std::string> index_reads;  // identifiers in lhs selects
  };

  static void collectTargets(const Expr& lhs, std::vector<Target>& out) {
    switch (lhs.kind) {
      case ExprKind::Identifier:
        out.push_back({lhs.text, {}});
        break;
      case ExprKind::Select: {
        size_t before = out.size();
        collectTargets(lhs.operands[0], out);
        std::vector<std::string> reads;
        std::set<std::string> seen;
        for (size_t i = 1; i < lhs.operands.size(); ++i) {
          exprIdentifiers(lhs.operands[i], reads, seen);
        }
        for (size_t i = before; i < out.size(); ++i) {
          out[i].index_reads.insert(out[i].index_reads.end(), reads.begin(),
                                    reads.end());
        }
        break;
      }
      case ExprKind::Concat:
        for (const Expr& part : lhs.operands) collectTargets(part, out);
        break;
      default:
        break;
    }
  }

  ValueSrc fallbackValue(Env& env, const std::string& name) {
    auto it = env.find(name);
    if (it != env.end()) return it->second;
    return {resolveSignal(name)};
  }

  // Lowers rhs into a value source: the rhs identifiers for single terms,
  // one TEMP for a compound expression, one COND/TRUE/FALSE TEMP for a
  // top-level ternary.
  ValueSrc lowerRhs(const Expr& rhs) {
    if (rhs.kind == ExprKind::Ternary) {
      NodeId t = newTemp();
      for (const std::string& c : identifiersOf(rhs.operands[0])) {
        g_.addEdge(resolveSignal(c), t, EdgeKind::Cond);
      }
      for (const std::string& v : identifiersOf(rhs.operands[1])) {
        g_.addEdge(resolveSignal(v), t, EdgeKind::True);
      }
      for (const std::string& v : identifiersOf(rhs.operands[2])) {
        g_.addEdge(resolveSignal(v), t, EdgeKind::False);
      }
      return {t};
    }
    if (isSingleTerm(rhs)) {
      ValueSrc src;
      for (const std::string& name : identifiersOf(rhs)) {
        src.push_back(resolveSignal(name));
      }
      return src;
    }
    NodeId t = newTemp();
    for (const std::string& name : identifiersOf(rhs)) {
      g_.addEdge(resolveSignal(name), t, EdgeKind::FlowsTo);
    }
    return {t};
  }

  // Returns names assigned by this statement (and updates env).
  std::set<std::string> lowerStmt(const Stmt& s, Env& env) {
    switch (s.kind) {
      case StmtKind::Assign: return lowerAssign(s, env);
      case StmtKind::If: return lowerIf(s, env);
      case StmtKind::Case: return lowerCase(s, env);
      case StmtKind::Seq: {
        std::set<std::string> assigned;
        for (const Stmt& c : s.body) {
          std::set<std::string> a = lowerStmt(c, env);
          assigned.insert(a.begin(), a.end());
        }
        return assigned;
      }
      case StmtKind::Null: return {};
    }
    return {};
  }

  std::set<std::string> lowerAssign(const Stmt& s, Env& env) {
    std::vector<Target> targets;
    collectTargets(s.lhs, targets);
    ValueSrc src = lowerRhs(s.rhs);
    std::set<std::string> assigned;
    for (const Target& target : targets) {
      NodeId dst = resolveSignal(target.base);
      for (const NodeId& v : src) g_.addEdge(v, dst, EdgeKind::FlowsTo);
      for (const std::string& idx : target.index_reads) {
        g_.addEdge(resolveSignal(idx), dst, EdgeKind::FlowsTo);
      }
      env[target.base] = src;
      assigned.insert(target.base);
    }
    return assigned;
  }

  std::set<std::string> lowerIf(const Stmt& s, Env& env) {
    std::vector<std::string> cond_ids = identifiersOf(s.cond);
    Env then_env = env;
    Env else_env = env;
    std::set<std::string> assigned_then;
    std::set<std::string> assigned_else;
    for (const Stmt& c : s.body) {
      std::set<std::string> a = lowerStmt(c, then_env);
      assigned_then.insert(a.begin(), a.end());
    }
    for (const Stmt& c : s.else_body) {
      std::set<std::string> a = lowerStmt(c, else_env);
      assigned_else.insert(a.begin(), a.end());
    }
    std::set<std::string> assigned = assigned_then;
    assigned.insert(assigned_else.begin(), assigned_else.end());

    for (const std::string& name : assigned) {
      ValueSrc true_src = assigned_then.count(name) ? then_env[name]
                                                    : fallbackValue(env, name);
      ValueSrc false_src = assigned_else.count(name)
                               ? else_env[name]
                               : fallbackValue(env, name);
      NodeId t = newTemp();
      for (const std::string& c : cond_ids) {
        g_.addEdge(resolveSignal(c), t, EdgeKind::Cond);
      }
      for (const NodeId& v : true_src) g_.addEdge(v, t, EdgeKind::True);
      for (const NodeId& v : false_src) g_.addEdge(v, t, EdgeKind::False);
      g_.addEdge(t, resolveSignal(name), EdgeKind::FlowsTo);
      env[name] = {t};
    }
    return assigned;
  }

  std::set<std::string> lowerCase(const Stmt& s, Env& env) {
    std::vector<std::string> subject_ids = identifiersOf(s.cond);

    struct ArmResult {
      Env env;
      std::set<std::string> assigned;
      std::vector<std::string> label_ids;
      bool is_default = false;
    };
    std::vector<ArmResult> arms;
    for (const Stmt::Arm& arm : s.arms) {
      ArmResult r;
      r.env = env;
      r.is_default = arm.is_default;
      std::set<std::string> seen;
      for (const Expr& l : arm.labels) {
        exprIdentifiers(l, r.label_ids, seen);
      }
      for (const Stmt& c : arm.body) {
        std::set<std::string> a = lowerStmt(c, r.env);
        r.assigned.insert(a.begin(), a.end());
      }
      arms.push_back(std::move(r));
    }

    const ArmResult* default_arm = nullptr;
    for (const ArmResult& r : arms) {
      if (r.is_default) {
        default_arm = &r;
        break;
      }
    }

    std::set<std::string> assigned;
    for (const ArmResult& r : arms) {
      assigned.insert(r.assigned.begin(), r.assigned.end());
    }

    for (const std::string& name : assigned) {
      // Chain TEMPs back-to-front over the non-default arms that assign the
      // signal; the default arm (or the prior value) is the chain tail.
      ValueSrc fallback;
      if (default_arm && default_arm->assigned.count(name)) {
        fallback = default_arm->env.at(name);
      } else {
        fallback = fallbackValue(env, name);
      }
      std::vector<size_t> assigning;
      for (size_t i = 0; i < arms.size(); ++i) {
        if (!arms[i].is_default && arms[i].assigned.count(name)) {
          assigning.push_back(i);
        }
      }
      std::vector<NodeId> temps;
      for (size_t k = 0; k < assigning.size(); ++k) temps.push_back(newTemp());

      ValueSrc acc = fallback;
      for (size_t k = assigning.size(); k-- > 0;) {
        const ArmResult& arm = arms[assigning[k]];
        const NodeId& t = temps[k];
        for (const std::string& c : subject_ids) {
          g_.addEdge(resolveSignal(c), t, EdgeKind::Cond);
        }
        for (const std::string& c : arm.label_ids) {
          g_.addEdge(resolveSignal(c), t, EdgeKind::Cond);
        }
        for (const NodeId& v : arm.env.at(name)) {
          g_.addEdge(v, t, EdgeKind::True);
        }
        for (const NodeId& v : acc) g_.addEdge(v, t, EdgeKind::False);
        acc = {t};
      }
      NodeId dst = resolveSignal(name);
      for (const NodeId& v : acc) g_.addEdge(v, dst, EdgeKind::FlowsTo);
      env[name] = acc;
    }
    return assigned;
  }

  void lowerInstance(const AstBlock& block) {
    for (size_t k = 0; k < block.port_connections.size(); ++k) {
      const PortConnection& pc = block.port_connections[k];
      std::string label = pc.port.empty() ? std::to_string(k) : pc.port;
      NodeId port_node = instancePortNode(block.instance_name, label);
      if (!pc.expr) continue;
      for (const std::string& name : identifiersOf(*pc.expr)) {
        g_.addEdge(resolveSignal(name), port_node, EdgeKind::FlowsTo);
      }
    }
  }
};

}  // namespace

CodeGraph build_dfg(const AstModule& module) {
  CodeGraph g;
  DfgLowering lowering(module, g);
  lowering.run();
  return g;
}

void merge_graphs(CodeGraph& into, CodeGraph&& fragment) {
  for (auto& [id, node] : fragment.nodes) {
    if (!into.hasNode(id)) into.addNode(std::move(node));
  }
  into.edges.insert(into.edges.end(), fragment.edges.begin(),
                    fragment.edges.end());
  into.diagnostics.insert(into.diagnostics.end(), fragment.diagnostics.begin(),
                          fragment.diagnostics.end());
}

void link_instantiations(CodeGraph& graph) {
  std::map<std::string, std::vector<NodeId>> modules_by_name;
  std::vector<NodeId> instance_blocks;
  for (const auto& [id, node] : graph.nodes) {
    if (node.kind == NodeKind::Module) {
      modules_by_name[node.name].push_back(id);
    } else if (node.kind == NodeKind::Block) {
      auto it = node.attributes.find("block_type");
      if (it != node.attributes.end() && it->second == "instance") {
        instance_blocks.push_back(id);
      }
    }
  }
  // Map iteration is id-ordered, so both lists are already sorted.
  for (const NodeId& block_id : instance_blocks) {
    const GraphNode& block = graph.nodes.at(block_id);
    std::string target_name = block.attributes.at("instance_of");
    std::vector<NodeId>& candidates = modules_by_name[target_name];
    if (candidates.empty()) {
      NodeId placeholder = make_node_id(NodeKind::Module, "", target_name, 0);
      if (!graph.hasNode(placeholder)) {
        GraphNode node;
        node.id = placeholder;
        node.kind = NodeKind::Module;
        node.name = target_name;
        node.attributes["external"] = "true";
        node.attributes["code"] = "";
        graph.addNode(std::move(node));
      }
      candidates.push_back(placeholder);
      std::sort(candidates.begin(), candidates.end());
    }
    if (candidates.size() > 1) {
      int line = block.span ? block.span->line_start : 0;
      std::string file = block.span ? block.span->file_path : "";
      graph.diagnostics.push_back(
          {file, line, "ambiguous-module",
           "instance of '" + target_name + "' matches " +
               std::to_string(candidates.size()) + " modules"});
    }
    graph.addEdge(block_id, candidates.front(), EdgeKind::Instantiate);
  }
}

CodeGraph index_sources(const SourceMap& sources, Embedder& embedder,
                        int graph_hops) {
  std::vector<AstModule> modules;
  std::vector<Diagnostic> parse_diags;
  for (const auto& [path, text] : sources) {
    try {
      std::vector<AstModule> file_modules =
          parse_file(text, path, parse_diags);
      for (AstModule& m : file_modules) modules.push_back(std::move(m));
    } catch (const SyntaxError& e) {
      parse_diags.push_back({path, e.line(), "syntax-error", e.what()});
    } catch (const Error& e) {
      if (e.code() != Errc::UnterminatedModule) throw;
      parse_diags.push_back({path, 0, "unterminated-module", e.what()});
    }
  }

  CodeGraph g = build_ast_graph(modules, sources);
  g.diagnostics.insert(g.diagnostics.begin(), parse_diags.begin(),
                       parse_diags.end());
  std::set<std::pair<std::string, std::string>> lowered;
  for (const AstModule& mod : modules) {
    // Same-file duplicates were skipped by build_ast_graph; skip them here
    // too so their TEMP ids are not reissued.
    if (!lowered.insert({mod.span.file_path, mod.name}).second) continue;
    merge_graphs(g, build_dfg(mod));
  }
  link_instantiations(g);

  std::vector<NodeId> embed_ids;
  for (const auto& [id, node] : g.nodes) {
    if (node.kind == NodeKind::Module || node.kind == NodeKind::Block) {
      embed_ids.push_back(id);
    }
  }
  std::vector<std::string> texts;
  texts.reserve(embed_ids.size());
  for (const NodeId& id : embed_ids) {
    texts.push_back(g.nodes.at(id).attributes.at("code"));
  }
  std::vector<EmbeddingVector> vectors = embedder.embed(texts);
  for (size_t i = 0; i < embed_ids.size(); ++i) {
    g.nodes.at(embed_ids[i]).embedding = std::move(vectors[i]);
  }

  attach_graph_embeddings(g, graph_hops);
  return g;
}

CodeGraph index_repository(const std::string& root, Embedder& embedder,
                           int graph_hops) {
  SourceMap sources;
  for (const std::string& rel : list_repository_files(root)) {
    sources[rel] = read_file(root + "/" + rel);
  }
  return index_sources(sources, embedder, graph_hops);
}

}  // namespace hdlg
