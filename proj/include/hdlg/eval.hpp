#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdlg/graph_store.hpp"
#include "hdlg/retrieval.hpp"

namespace hdlg {

// Mean reciprocal rank; an absent rank contributes 0. Throws EmptyInput.
double mrr(const std::vector<std::optional<size_t>>& ranks);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

// Splits code-bearing text on whitespace, keeping identifiers, numbers and
// operators as tokens.
std::vector<std::string> rouge_tokenize(const std::string& text);

// Clipped n-gram overlap F1, n in {1, 2}; degenerate inputs yield all zeros.
RougeScore rouge_n(const std::vector<std::string>& prediction,
                   const std::vector<std::string>& reference, int n);

// Longest-common-subsequence F1.
RougeScore rouge_l(const std::vector<std::string>& prediction,
                   const std::vector<std::string>& reference);

// 1 - C(n-c, k)/C(n, k) via the stable product form. Requires 0 <= c <= n
// and 1 <= k <= n, else Domain.
double pass_at_k(int n, int c, int k);

struct BenchmarkQuery {
  std::string id;
  NodeKind level = NodeKind::Block;
  std::string text;
  std::vector<NodeId> relevant_ids;
  std::string repo;

  friend bool operator==(const BenchmarkQuery&,
                         const BenchmarkQuery&) = default;
};

std::vector<BenchmarkQuery> load_benchmark(const std::string& path);
void save_benchmark(const std::vector<BenchmarkQuery>& benchmark,
                    const std::string& path);

struct QueryOutcome {
  std::string id;
  std::string repo;
  std::optional<size_t> rank;
  double reciprocal = 0.0;

  friend bool operator==(const QueryOutcome&, const QueryOutcome&) = default;
};

struct EvalReport {
  std::string engine_label;
  std::vector<QueryOutcome> per_query;
  double micro_mrr = 0.0;
  double macro_mrr = 0.0;
  size_t query_count = 0;
};

// An engine maps (query, k) to a ranked NodeId list.
struct Engine {
  std::string label;
  std::function<std::vector<NodeId>(const std::string& query, size_t k)> run;
};

// Runs every engine over the benchmark (queries processed in id order);
// micro_mrr pools all queries, macro_mrr averages per-repo means. Throws
// UnknownBenchmarkNode when a relevant id is absent from db, Domain on
// duplicate query ids, EmptyInput on an empty benchmark.
std::vector<EvalReport> run_search_eval(
    const GraphDatabase& db, const std::vector<Engine>& engines,
    const std::vector<BenchmarkQuery>& benchmark, size_t k);

// Baseline and pipeline engines. The referenced database, embedder and
// decomposer must outlive the returned engine.
Engine make_lexical_engine(const GraphDatabase& db, Embedder& embedder);
Engine make_bm25_engine(const GraphDatabase& db);
Engine make_graph_engine(const GraphDatabase& db, Embedder& embedder,
                         Decomposer& decomposer);

std::string format_report_table(const std::vector<EvalReport>& reports);

}  // namespace hdlg
