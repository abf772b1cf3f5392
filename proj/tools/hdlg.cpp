#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdlg/benchgen.hpp"
#include "hdlg/config.hpp"
#include "hdlg/dfg_analysis.hpp"
#include "hdlg/errors.hpp"
#include "hdlg/eval.hpp"
#include "hdlg/files.hpp"
#include "hdlg/graph_builder.hpp"
#include "hdlg/graph_store.hpp"
#include "hdlg/remote.hpp"
#include "hdlg/retrieval.hpp"
#include "hdlg/scoring.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

// Exit codes: 0 success, 1 other (incl. io), 2 usage, 3 format/version,
// 4 syntax, 5 query/domain, 6 remote/provider.
int classifyError(const hdlg::Error& e) {
  switch (e.code()) {
    case hdlg::Errc::Format:
    case hdlg::Errc::Version:
      return 3;
    case hdlg::Errc::Syntax:
    case hdlg::Errc::UnterminatedModule:
      return 4;
    case hdlg::Errc::EmptyQuery:
    case hdlg::Errc::EmptyDatabase:
    case hdlg::Errc::UnknownLevelQuery:
    case hdlg::Errc::UnknownNode:
    case hdlg::Errc::WrongKind:
    case hdlg::Errc::EmptySeed:
    case hdlg::Errc::UnparsableFragment:
    case hdlg::Errc::Domain:
    case hdlg::Errc::EmptyInput:
    case hdlg::Errc::UnknownBenchmarkNode:
    case hdlg::Errc::DimensionMismatch:
      return 5;
    case hdlg::Errc::Transport:
    case hdlg::Errc::Protocol:
    case hdlg::Errc::Provider:
    case hdlg::Errc::EmptyGeneration:
      return 6;
    default:
      return 1;
  }
}

std::unique_ptr<hdlg::Embedder> makeEmbedder(const hdlg::Config& config) {
  if (config.embedder == "remote") {
    return std::make_unique<hdlg::RemoteEmbedder>(config.embedder_url);
  }
  return std::make_unique<hdlg::LexicalEmbedder>();
}

std::unique_ptr<hdlg::Decomposer> makeDecomposer(const hdlg::Config& config) {
  if (config.decomposer == "remote") {
    return std::make_unique<hdlg::RemoteDecomposer>(config.decomposer_url);
  }
  return std::make_unique<hdlg::RuleBasedDecomposer>();
}

std::string firstLine(const std::string& text) {
  size_t eol = text.find('\n');
  std::string line = eol == std::string::npos ? text : text.substr(0, eol);
  if (line.size() > 100) line = line.substr(0, 97) + "...";
  return line;
}

json hitJson(const hdlg::RetrievalHit& hit) {
  json j;
  j["node_id"] = hit.node_id;
  j["level"] = hdlg::nodeKindName(hit.level);
  j["score"] = hit.score;
  j["provenance"] = hit.provenance;
  j["text"] = hit.text;
  return j;
}

void printHits(const std::vector<hdlg::RetrievalHit>& hits) {
  char line[64];
  for (size_t i = 0; i < hits.size(); ++i) {
    std::snprintf(line, sizeof(line), "%2zu. %9.6f  ", i + 1, hits[i].score);
    std::cout << line << hits[i].node_id << "\n";
    if (!hits[i].text.empty()) {
      std::cout << "    | " << firstLine(hits[i].text) << "\n";
    }
  }
}

int cmdIndex(const std::string& root, const std::string& out,
             const hdlg::Config& config, bool json_mode) {
  std::unique_ptr<hdlg::Embedder> embedder = makeEmbedder(config);
  hdlg::CodeGraph graph =
      hdlg::index_repository(root, *embedder, config.hops);
  hdlg::StoreMeta meta;
  meta.embedder_family = embedder->family();
  meta.embedding_dim = embedder->dim();
  meta.graph_dim = hdlg::kGraphDim;
  meta.graph_hops = config.hops;
  size_t node_count = graph.nodes.size();
  size_t edge_count = graph.edges.size();
  std::vector<hdlg::Diagnostic> diagnostics = graph.diagnostics;
  hdlg::GraphDatabase db(std::move(graph), meta);
  hdlg::save_database(db, out);

  if (json_mode) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "index";
    j["root"] = root;
    j["out"] = out;
    j["nodes"] = node_count;
    j["edges"] = edge_count;
    j["diagnostics"] = json::array();
    for (const hdlg::Diagnostic& d : diagnostics) {
      j["diagnostics"].push_back(
          {{"file", d.file}, {"line", d.line}, {"code", d.code},
           {"message", d.message}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "indexed " << root << " -> " << out << "\n"
              << "nodes: " << node_count << "\nedges: " << edge_count << "\n";
    for (const hdlg::Diagnostic& d : diagnostics) {
      std::cout << "diagnostic " << d.file << ":" << d.line << " [" << d.code
                << "] " << d.message << "\n";
    }
  }
  return 0;
}

int cmdSearch(const std::string& db_path, const std::string& query,
              const std::string& module_query, size_t k,
              const std::string& level, const hdlg::Config& config,
              bool json_mode) {
  hdlg::GraphDatabase db = hdlg::load_database(db_path);
  std::unique_ptr<hdlg::Embedder> embedder = makeEmbedder(config);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "search";
  j["level"] = level;
  j["query"] = query;
  j["k"] = k;

  if (level == "retrieve") {
    std::unique_ptr<hdlg::Decomposer> decomposer = makeDecomposer(config);
    std::vector<hdlg::RetrievedBlock> results =
        hdlg::retrieve(db, *embedder, *decomposer, query, k);
    if (json_mode) {
      j["hits"] = json::array();
      for (size_t i = 0; i < results.size(); ++i) {
        json hit = hitJson(results[i].block);
        hit["rank"] = i + 1;
        if (results[i].module) {
          hit["module"] = {{"node_id", results[i].module->node_id},
                           {"name", results[i].module->text}};
        }
        hit["signals"] = json::array();
        for (const hdlg::RetrievalHit& s : results[i].signals) {
          hit["signals"].push_back(
              {{"node_id", s.node_id}, {"name", s.text}, {"score", s.score}});
        }
        j["hits"].push_back(std::move(hit));
      }
      std::cout << j.dump(2) << "\n";
    } else {
      char line[64];
      for (size_t i = 0; i < results.size(); ++i) {
        const hdlg::RetrievedBlock& rb = results[i];
        std::snprintf(line, sizeof(line), "%2zu. %9.6f  ", i + 1,
                      rb.block.score);
        std::cout << line << rb.block.node_id << "\n";
        if (rb.module) std::cout << "    module: " << rb.module->text << "\n";
        for (const hdlg::RetrievalHit& s : rb.signals) {
          std::snprintf(line, sizeof(line), " (%.6f)", s.score);
          std::cout << "    signal: " << s.text << line << "\n";
        }
        std::cout << "    | " << firstLine(rb.block.text) << "\n";
      }
    }
    return 0;
  }

  std::vector<hdlg::RetrievalHit> hits;
  if (level == "module") {
    hits = hdlg::search_module(db, *embedder, query, k);
  } else if (level == "block") {
    hits = hdlg::search_block(db, *embedder, query, k);
  } else if (level == "signal") {
    hits = hdlg::search_signal(db, *embedder, query, k);
  } else if (level == "module-block") {
    hits = hdlg::search_module_block(db, *embedder, module_query, query, k);
  } else {
    hits = hdlg::search_module_signal(db, *embedder, module_query, query, k);
  }
  if (json_mode) {
    j["hits"] = json::array();
    for (size_t i = 0; i < hits.size(); ++i) {
      json hit = hitJson(hits[i]);
      hit["rank"] = i + 1;
      j["hits"].push_back(std::move(hit));
    }
    std::cout << j.dump(2) << "\n";
  } else {
    printHits(hits);
  }
  return 0;
}

int cmdDebug(const std::string& db_path, const std::string& signal,
             int max_hops, bool json_mode) {
  hdlg::GraphDatabase db = hdlg::load_database(db_path);
  hdlg::CandidateSet candidates = hdlg::error_candidates(db, signal, max_hops);
  if (json_mode) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "debug";
    j["signal"] = signal;
    j["max_hops"] = max_hops;
    j["candidates"] = json::array();
    for (const hdlg::CandidateBlock& c : candidates.blocks) {
      j["candidates"].push_back(
          {{"node_id", c.id}, {"min_hop", c.min_hop}, {"code", c.code}});
    }
    j["signals_on_path"] = candidates.signals_on_path;
    std::cout << j.dump(2) << "\n";
  } else {
    for (size_t i = 0; i < candidates.blocks.size(); ++i) {
      const hdlg::CandidateBlock& c = candidates.blocks[i];
      std::cout << (i + 1) << ". hop " << c.min_hop << "  " << c.id << "\n"
                << "    | " << firstLine(c.code) << "\n";
    }
    std::cout << "signals on path:";
    for (const hdlg::NodeId& id : candidates.signals_on_path) {
      std::cout << " " << id;
    }
    std::cout << "\n";
  }
  return 0;
}

int cmdComplete(const std::string& db_path, const std::string& fragment_path,
                size_t k, bool json_mode) {
  hdlg::GraphDatabase db = hdlg::load_database(db_path);
  std::string fragment = hdlg::read_file(fragment_path);
  std::vector<hdlg::CompletionHit> hits =
      hdlg::completion_matches(db, fragment, k);
  if (json_mode) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "complete";
    j["fragment"] = fragment_path;
    j["k"] = k;
    j["hits"] = json::array();
    for (size_t i = 0; i < hits.size(); ++i) {
      j["hits"].push_back({{"rank", i + 1},
                           {"node_id", hits[i].block_id},
                           {"score", hits[i].score},
                           {"graph_score", hits[i].graph_score},
                           {"lexical_score", hits[i].lexical_score},
                           {"code", hits[i].code}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    char line[96];
    for (size_t i = 0; i < hits.size(); ++i) {
      std::snprintf(line, sizeof(line),
                    "%2zu. %9.6f (graph %.6f, lexical %.6f)  ", i + 1,
                    hits[i].score, hits[i].graph_score, hits[i].lexical_score);
      std::cout << line << hits[i].block_id << "\n"
                << "    | " << firstLine(hits[i].code) << "\n";
    }
  }
  return 0;
}

int cmdEval(const std::string& db_path, const std::string& benchmark_path,
            size_t k, const std::string& engines_csv,
            const hdlg::Config& config, bool json_mode) {
  hdlg::GraphDatabase db = hdlg::load_database(db_path);
  std::vector<hdlg::BenchmarkQuery> benchmark =
      hdlg::load_benchmark(benchmark_path);
  std::unique_ptr<hdlg::Embedder> embedder = makeEmbedder(config);
  std::unique_ptr<hdlg::Decomposer> decomposer = makeDecomposer(config);

  std::vector<hdlg::Engine> engines;
  size_t pos = 0;
  while (pos <= engines_csv.size()) {
    size_t comma = engines_csv.find(',', pos);
    if (comma == std::string::npos) comma = engines_csv.size();
    std::string label = engines_csv.substr(pos, comma - pos);
    pos = comma + 1;
    if (label == "graph") {
      engines.push_back(hdlg::make_graph_engine(db, *embedder, *decomposer));
    } else if (label == "bm25") {
      engines.push_back(hdlg::make_bm25_engine(db));
    } else if (label == "lexical") {
      engines.push_back(hdlg::make_lexical_engine(db, *embedder));
    } else if (!label.empty()) {
      std::cerr << "unknown engine '" << label
                << "' (expected graph, bm25 or lexical)\n";
      return 2;
    }
    if (comma == engines_csv.size()) break;
  }
  if (engines.empty()) {
    std::cerr << "no engines selected\n";
    return 2;
  }

  std::vector<hdlg::EvalReport> reports =
      hdlg::run_search_eval(db, engines, benchmark, k);
  if (json_mode) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "eval";
    j["k"] = k;
    j["reports"] = json::array();
    for (const hdlg::EvalReport& report : reports) {
      json r;
      r["engine"] = report.engine_label;
      r["micro_mrr"] = report.micro_mrr;
      r["macro_mrr"] = report.macro_mrr;
      r["queries"] = report.query_count;
      r["per_query"] = json::array();
      for (const hdlg::QueryOutcome& outcome : report.per_query) {
        json q;
        q["id"] = outcome.id;
        q["repo"] = outcome.repo;
        if (outcome.rank) {
          q["rank"] = *outcome.rank;
        } else {
          q["rank"] = nullptr;
        }
        q["reciprocal"] = outcome.reciprocal;
        r["per_query"].push_back(std::move(q));
      }
      j["reports"].push_back(std::move(r));
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << hdlg::format_report_table(reports);
  }
  return 0;
}

int cmdBenchgen(const std::string& db_path, const std::string& manifest_path,
                const std::string& transcript_path, int K,
                const std::string& out, const std::string& checkpoint,
                const std::string& review, const hdlg::Config& config,
                bool json_mode) {
  hdlg::GraphDatabase db = hdlg::load_database(db_path);
  hdlg::RepoManifest manifest = hdlg::load_manifest(manifest_path);
  std::unique_ptr<hdlg::TextGenProvider> provider;
  if (!transcript_path.empty()) {
    provider = std::make_unique<hdlg::ReplayTextGen>(transcript_path);
  } else if (!config.textgen_url.empty()) {
    provider = std::make_unique<hdlg::RemoteTextGen>(config.textgen_url);
  } else {
    std::cerr << "benchgen requires --transcript or --textgen-url\n";
    return 2;
  }
  hdlg::GenerationResult result =
      hdlg::generate_benchmark(db, manifest, *provider, K, checkpoint);
  hdlg::save_benchmark(result.queries, out);
  if (!review.empty()) hdlg::save_review(result, review);

  if (json_mode) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "benchgen";
    j["out"] = out;
    j["accepted"] = {{"module", result.module_accepted},
                     {"block", result.block_accepted},
                     {"signal", result.signal_accepted}};
    j["rejected"] = result.rejected.size();
    j["warnings"] = result.warnings;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "benchmark written to " << out << "\n"
              << "accepted: " << result.module_accepted << " module, "
              << result.block_accepted << " block, "
              << result.signal_accepted << " signal\n"
              << "rejected: " << result.rejected.size() << "\n";
    for (const std::string& warning : result.warnings) {
      std::cout << "warning: " << warning << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid Verilog code-graph indexing and retrieval"};
  app.require_subcommand(1);

  std::string config_path;
  bool json_mode = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_flag("--json", json_mode, "machine-readable output");

  // Collected as key/value pairs so file values load first and flags win.
  std::vector<std::pair<std::string, std::string>> overrides;
  auto addOverride = [&](CLI::App* cmd, const std::string& flag,
                         const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag,
        [&overrides, key](const std::string& value) {
          overrides.push_back({key, value});
        },
        help);
  };

  CLI::App* index = app.add_subcommand("index", "index a Verilog tree");
  std::string root;
  std::string out_db;
  index->add_option("--root", root, "repository root")->required();
  index->add_option("--out", out_db, "output database path")->required();
  addOverride(index, "--hops", "hops", "graph embedding hops");
  addOverride(index, "--embedder", "embedder", "lexical or remote");
  addOverride(index, "--embedder-url", "embedder_url", "remote embedder url");

  CLI::App* search = app.add_subcommand("search", "query a database");
  std::string db_path;
  std::string query;
  std::string module_query;
  std::string level = "retrieve";
  size_t k_flag = 0;
  search->add_option("--db", db_path, "database path")->required();
  search->add_option("--query", query, "query text")->required();
  search->add_option("--module-query", module_query,
                     "module sub-query for two-level searches");
  search
      ->add_option("--level", level,
                   "retrieve | module | block | signal | module-block | "
                   "module-signal")
      ->check(CLI::IsMember({"retrieve", "module", "block", "signal",
                             "module-block", "module-signal"}));
  search->add_option("-k,--k", k_flag, "result count");
  addOverride(search, "--embedder", "embedder", "lexical or remote");
  addOverride(search, "--embedder-url", "embedder_url", "remote embedder url");
  addOverride(search, "--decomposer", "decomposer", "rule_based or remote");
  addOverride(search, "--decomposer-url", "decomposer_url",
              "remote decomposer url");

  CLI::App* debug = app.add_subcommand("debug", "debugging context for a signal");
  std::string signal_id;
  int max_hops_flag = 0;
  debug->add_option("--db", db_path, "database path")->required();
  debug->add_option("--signal", signal_id, "faulty SIGNAL node id")->required();
  debug->add_option("--max-hops", max_hops_flag, "traversal bound");

  CLI::App* complete = app.add_subcommand("complete", "completion context");
  std::string fragment_path;
  complete->add_option("--db", db_path, "database path")->required();
  complete->add_option("--fragment", fragment_path, "partial code file")
      ->required();
  complete->add_option("-k,--k", k_flag, "result count");

  CLI::App* eval = app.add_subcommand("eval", "run a benchmark");
  std::string benchmark_path;
  std::string engines_csv = "graph,bm25,lexical";
  eval->add_option("--db", db_path, "database path")->required();
  eval->add_option("--benchmark", benchmark_path, "benchmark file")->required();
  eval->add_option("--engines", engines_csv, "comma-separated engine labels");
  eval->add_option("-k,--k", k_flag, "retrieval depth");
  addOverride(eval, "--embedder", "embedder", "lexical or remote");
  addOverride(eval, "--embedder-url", "embedder_url", "remote embedder url");
  addOverride(eval, "--decomposer", "decomposer", "rule_based or remote");
  addOverride(eval, "--decomposer-url", "decomposer_url",
              "remote decomposer url");

  CLI::App* benchgen = app.add_subcommand("benchgen", "generate a benchmark");
  std::string manifest_path;
  std::string transcript_path;
  std::string benchgen_out;
  std::string checkpoint_path;
  std::string review_path;
  int refine_k = 0;
  benchgen->add_option("--db", db_path, "database path")->required();
  benchgen->add_option("--manifest", manifest_path, "repo manifest")->required();
  benchgen->add_option("--transcript", transcript_path, "replay transcript");
  benchgen->add_option("--out", benchgen_out, "output benchmark file")
      ->required();
  benchgen->add_option("--checkpoint", checkpoint_path, "checkpoint file");
  benchgen->add_option("--review", review_path, "review listing for sign-off");
  benchgen->add_option("-K,--refine-rounds", refine_k, "termination count");
  addOverride(benchgen, "--textgen-url", "textgen_url", "remote text-gen url");

  addOverride(&app, "--jobs", "jobs", "parallelism bound (advisory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    hdlg::Config config;
    if (!config_path.empty()) config = hdlg::load_config(config_path);
    for (const auto& [key, value] : overrides) {
      hdlg::apply_config_entry(config, key, value);
    }
    hdlg::validate_config(config);
    size_t k = k_flag > 0 ? k_flag : static_cast<size_t>(config.k);
    int max_hops = max_hops_flag > 0 ? max_hops_flag : config.max_hops;
    int K = refine_k > 0 ? refine_k : config.refine_rounds;

    if (index->parsed()) return cmdIndex(root, out_db, config, json_mode);
    if (search->parsed()) {
      return cmdSearch(db_path, query, module_query, k, level, config,
                       json_mode);
    }
    if (debug->parsed()) return cmdDebug(db_path, signal_id, max_hops, json_mode);
    if (complete->parsed()) {
      return cmdComplete(db_path, fragment_path, k, json_mode);
    }
    if (eval->parsed()) {
      return cmdEval(db_path, benchmark_path, k, engines_csv, config,
                     json_mode);
    }
    if (benchgen->parsed()) {
      return cmdBenchgen(db_path, manifest_path, transcript_path, K,
                         benchgen_out, checkpoint_path, review_path, config,
                         json_mode);
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const hdlg::Error& e) {
    std::cerr << "error (" << hdlg::errcName(e.code()) << "): " << e.what()
              << "\n";
    return classifyError(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
