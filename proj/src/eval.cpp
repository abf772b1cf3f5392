#include "hdlg/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <memory>
#include <set>

#include "hdlg/errors.hpp"
#include "hdlg/files.hpp"
#include "json.hpp"

namespace hdlg {
namespace {

using nlohmann::json;

RougeScore fromCounts(double overlap, double pred_total, double ref_total) {
  RougeScore s;
  if (pred_total > 0.0) s.precision = overlap / pred_total;
  if (ref_total > 0.0) s.recall = overlap / ref_total;
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

std::map<std::string, size_t> gramCounts(const std::vector<std::string>& tokens,
                                         size_t n) {
  std::map<std::string, size_t> counts;
  if (tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (size_t j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

bool isWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::vector<NodeId> rankBlocks(
    const GraphDatabase& db,
    const std::function<double(const GraphNode&)>& score, size_t k) {
  std::vector<std::pair<double, NodeId>> scored;
  for (const GraphNode* block : db.find(NodeKind::Block)) {
    scored.push_back({score(*block), block->id});
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  if (scored.size() > k) scored.resize(k);
  std::vector<NodeId> ids;
  for (auto& [s, id] : scored) ids.push_back(std::move(id));
  return ids;
}

}  // namespace

double mrr(const std::vector<std::optional<size_t>>& ranks) {
  if (ranks.empty()) {
    throw Error(Errc::EmptyInput, "mrr requires at least one rank");
  }
  double sum = 0.0;
  for (const std::optional<size_t>& rank : ranks) {
    if (rank && *rank >= 1) sum += 1.0 / static_cast<double>(*rank);
  }
  return sum / static_cast<double>(ranks.size());
}

std::vector<std::string> rouge_tokenize(const std::string& text) {
  static const char* kOperators[] = {
      "===", "!==", "<<<", ">>>", "<=", ">=", "==", "!=",
      "<<",  ">>",  "&&",  "||",  "+:", "-:", "**"};
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (isWordChar(c)) {
      size_t begin = i;
      while (i < text.size() && isWordChar(text[i])) ++i;
      tokens.push_back(text.substr(begin, i - begin));
      continue;
    }
    bool matched = false;
    for (const char* op : kOperators) {
      size_t len = std::char_traits<char>::length(op);
      if (text.compare(i, len, op) == 0) {
        tokens.emplace_back(op);
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) {
      tokens.push_back(std::string(1, c));
      ++i;
    }
  }
  return tokens;
}

RougeScore rouge_n(const std::vector<std::string>& prediction,
                   const std::vector<std::string>& reference, int n) {
  if (n != 1 && n != 2) {
    throw Error(Errc::Domain,
                "rouge_n supports n in {1, 2}, got " + std::to_string(n));
  }
  std::map<std::string, size_t> pred = gramCounts(prediction, n);
  std::map<std::string, size_t> ref = gramCounts(reference, n);
  double overlap = 0.0;
  double pred_total = 0.0;
  double ref_total = 0.0;
  for (const auto& [gram, count] : pred) {
    pred_total += static_cast<double>(count);
    auto it = ref.find(gram);
    if (it != ref.end()) {
      overlap += static_cast<double>(std::min(count, it->second));
    }
  }
  for (const auto& [gram, count] : ref) {
    ref_total += static_cast<double>(count);
  }
  return fromCounts(overlap, pred_total, ref_total);
}

RougeScore rouge_l(const std::vector<std::string>& prediction,
                   const std::vector<std::string>& reference) {
  size_t p = prediction.size();
  size_t r = reference.size();
  if (p == 0 || r == 0) return RougeScore{};
  std::vector<std::vector<size_t>> lcs(p + 1, std::vector<size_t>(r + 1, 0));
  for (size_t i = 1; i <= p; ++i) {
    for (size_t j = 1; j <= r; ++j) {
      if (prediction[i - 1] == reference[j - 1]) {
        lcs[i][j] = lcs[i - 1][j - 1] + 1;
      } else {
        lcs[i][j] = std::max(lcs[i - 1][j], lcs[i][j - 1]);
      }
    }
  }
  double overlap = static_cast<double>(lcs[p][r]);
  return fromCounts(overlap, static_cast<double>(p), static_cast<double>(r));
}

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n) {
    throw Error(Errc::Domain, "pass_at_k requires 0 <= c <= n and 1 <= k <= n");
  }
  if (n - c < k) return 1.0;
  double failure = 1.0;
  for (int i = 0; i < k; ++i) {
    failure *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  }
  return 1.0 - failure;
}

std::vector<BenchmarkQuery> load_benchmark(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw Error(Errc::Format, path + ": benchmark must be a structured array");
  }
  std::vector<BenchmarkQuery> out;
  std::set<std::string> ids;
  try {
    for (const json& record : doc) {
      BenchmarkQuery q;
      q.id = record.at("id").get<std::string>();
      q.level = nodeKindFromName(record.at("level").get<std::string>());
      q.text = record.at("query").get<std::string>();
      q.repo = record.value("repo", std::string());
      for (const json& rid : record.at("relevant_ids")) {
        q.relevant_ids.push_back(rid.get<std::string>());
      }
      if (q.relevant_ids.empty()) {
        throw Error(Errc::Format,
                    path + ": query '" + q.id + "' has no relevant ids");
      }
      std::string prefix = std::string(nodeKindName(q.level)) + ":";
      for (const NodeId& rid : q.relevant_ids) {
        if (rid.compare(0, prefix.size(), prefix) != 0) {
          throw Error(Errc::Format, path + ": query '" + q.id + "' level " +
                                        nodeKindName(q.level) +
                                        " does not match id " + rid);
        }
      }
      if (!ids.insert(q.id).second) {
        throw Error(Errc::Format, path + ": duplicate query id '" + q.id + "'");
      }
      out.push_back(std::move(q));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::Format, path + ": " + e.what());
  }
  return out;
}

void save_benchmark(const std::vector<BenchmarkQuery>& benchmark,
                    const std::string& path) {
  json doc = json::array();
  for (const BenchmarkQuery& q : benchmark) {
    json record;
    record["id"] = q.id;
    record["level"] = nodeKindName(q.level);
    record["query"] = q.text;
    record["relevant_ids"] = q.relevant_ids;
    record["repo"] = q.repo;
    doc.push_back(std::move(record));
  }
  write_file(path, doc.dump(2) + "\n");
}

std::vector<EvalReport> run_search_eval(
    const GraphDatabase& db, const std::vector<Engine>& engines,
    const std::vector<BenchmarkQuery>& benchmark, size_t k) {
  if (benchmark.empty()) {
    throw Error(Errc::EmptyInput, "benchmark holds no queries");
  }
  std::set<std::string> ids;
  for (const BenchmarkQuery& q : benchmark) {
    if (!ids.insert(q.id).second) {
      throw Error(Errc::Domain, "duplicate benchmark query id '" + q.id + "'");
    }
    for (const NodeId& rid : q.relevant_ids) {
      if (!db.hasNode(rid)) {
        throw Error(Errc::UnknownBenchmarkNode,
                    "query '" + q.id + "' references unknown node " + rid);
      }
    }
  }

  std::vector<BenchmarkQuery> ordered = benchmark;
  std::sort(ordered.begin(), ordered.end(),
            [](const BenchmarkQuery& a, const BenchmarkQuery& b) {
              return a.id < b.id;
            });

  std::vector<EvalReport> reports;
  for (const Engine& engine : engines) {
    EvalReport report;
    report.engine_label = engine.label;
    report.query_count = ordered.size();
    std::vector<std::optional<size_t>> ranks;
    for (const BenchmarkQuery& q : ordered) {
      std::set<NodeId> relevant(q.relevant_ids.begin(), q.relevant_ids.end());
      std::vector<NodeId> ranked = engine.run(q.text, k);
      QueryOutcome outcome;
      outcome.id = q.id;
      outcome.repo = q.repo;
      for (size_t i = 0; i < ranked.size(); ++i) {
        if (relevant.count(ranked[i])) {
          outcome.rank = i + 1;
          outcome.reciprocal = 1.0 / static_cast<double>(i + 1);
          break;
        }
      }
      ranks.push_back(outcome.rank);
      report.per_query.push_back(std::move(outcome));
    }
    report.micro_mrr = mrr(ranks);

    std::map<std::string, std::vector<std::optional<size_t>>> by_repo;
    for (const QueryOutcome& outcome : report.per_query) {
      by_repo[outcome.repo].push_back(outcome.rank);
    }
    double macro_sum = 0.0;
    for (const auto& [repo, repo_ranks] : by_repo) {
      macro_sum += mrr(repo_ranks);
    }
    report.macro_mrr = macro_sum / static_cast<double>(by_repo.size());
    reports.push_back(std::move(report));
  }
  return reports;
}

Engine make_lexical_engine(const GraphDatabase& db, Embedder& embedder) {
  Engine engine;
  engine.label = "lexical-cosine";
  engine.run = [&db, &embedder](const std::string& query, size_t k) {
    EmbeddingVector qv = embedder.embedOne(query);
    return rankBlocks(
        db,
        [&](const GraphNode& block) {
          return block.embedding ? cosine(qv, *block.embedding) : 0.0;
        },
        k);
  };
  return engine;
}

Engine make_bm25_engine(const GraphDatabase& db) {
  // Corpus statistics over block code, computed once per engine.
  auto docs = std::make_shared<std::map<NodeId, std::vector<std::string>>>();
  std::vector<std::vector<std::string>> token_docs;
  for (const GraphNode* block : db.find(NodeKind::Block)) {
    auto it = block->attributes.find("code");
    std::vector<std::string> tokens =
        tokenize_code(it == block->attributes.end() ? "" : it->second);
    (*docs)[block->id] = tokens;
    token_docs.push_back(std::move(tokens));
  }
  auto stats =
      std::make_shared<CorpusStats>(CorpusStats::fromDocuments(token_docs));

  Engine engine;
  engine.label = "bm25";
  engine.run = [&db, docs, stats](const std::string& query, size_t k) {
    std::vector<std::string> query_tokens = tokenize_code(query);
    return rankBlocks(
        db,
        [&](const GraphNode& block) {
          return bm25_score(query_tokens, docs->at(block.id), *stats);
        },
        k);
  };
  return engine;
}

Engine make_graph_engine(const GraphDatabase& db, Embedder& embedder,
                         Decomposer& decomposer) {
  Engine engine;
  engine.label = "graph";
  engine.run = [&db, &embedder, &decomposer](const std::string& query,
                                             size_t k) {
    std::vector<NodeId> ids;
    for (const RetrievedBlock& rb : retrieve(db, embedder, decomposer, query, k)) {
      ids.push_back(rb.block.node_id);
    }
    return ids;
  };
  return engine;
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %10s %10s %8s\n", "engine",
                "micro-MRR", "macro-MRR", "queries");
  out += line;
  for (const EvalReport& report : reports) {
    std::snprintf(line, sizeof(line), "%-16s %10.6f %10.6f %8zu\n",
                  report.engine_label.c_str(), report.micro_mrr,
                  report.macro_mrr, report.query_count);
    out += line;
  }
  return out;
}

}  // namespace hdlg
