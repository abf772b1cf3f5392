#pragma once

#include <map>
#include <string>
#include <vector>

#include "hdlg/ast.hpp"
#include "hdlg/graph.hpp"
#include "hdlg/scoring.hpp"

namespace hdlg {

// file path → file content, for code attributes.
using SourceMap = std::map<std::string, std::string>;

// AST code-view: MODULE/BLOCK/SIGNAL nodes, CONTAINS edges. INSTANTIATE
// edges are deferred to link_instantiations. Duplicate (file, name) module
// definitions beyond the first are skipped with a diagnostic; duplicates
// across files coexist (distinct ids) with a diagnostic.
CodeGraph build_ast_graph(const std::vector<AstModule>& modules,
                          const SourceMap& sources);

// DFG fragment for one module: TEMP nodes, placeholder SIGNAL nodes,
// flow edges, and CONTAINS edges for created placeholders. Edges may
// reference declared SIGNAL ids owned by the AST graph; merge_graphs
// resolves them against build_ast_graph output.
CodeGraph build_dfg(const AstModule& module);

void merge_graphs(CodeGraph& into, CodeGraph&& fragment);

// Adds one INSTANTIATE edge per instance block: to the unique module of
// that name, to the lexicographically-smallest id among several (with a
// diagnostic), or to an external=true placeholder MODULE when undefined.
void link_instantiations(CodeGraph& graph);

// Full pipeline: list files → parse (per-file failures become diagnostics,
// the file is skipped) → AST graph → per-module DFG → link → code
// embeddings on every MODULE/BLOCK node → DFG embeddings on BLOCK nodes.
CodeGraph index_repository(const std::string& root, Embedder& embedder,
                           int graph_hops = 2);

// The same pipeline over in-memory sources keyed by stored file path
// (benchmark generation namespaces multiple repos into one map this way).
CodeGraph index_sources(const SourceMap& sources, Embedder& embedder,
                        int graph_hops = 2);

}  // namespace hdlg
