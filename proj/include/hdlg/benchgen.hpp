#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hdlg/eval.hpp"
#include "hdlg/graph_builder.hpp"
#include "hdlg/graph_store.hpp"

namespace hdlg {

struct TextGenProvider {
  virtual ~TextGenProvider();
  virtual std::string generate(const std::string& prompt) = 0;
};

// Transcript key for a rendered prompt: 16 lowercase hex digits of its
// 64-bit hash. Prompts embed their template text, so template edits
// invalidate stale transcripts.
std::string prompt_key(const std::string& prompt);

using Transcript = std::map<std::string, std::string>;

Transcript load_transcript(const std::string& path);
void save_transcript(const Transcript& transcript, const std::string& path);

// Deterministic provider over a recorded transcript; unseen prompts throw
// Provider.
class ReplayTextGen final : public TextGenProvider {
 public:
  explicit ReplayTextGen(Transcript transcript);
  explicit ReplayTextGen(const std::string& transcript_path);

  std::string generate(const std::string& prompt) override;

 private:
  Transcript transcript_;
};

// Wraps a callback and records every exchange; used to build transcripts.
class CallbackTextGen final : public TextGenProvider {
 public:
  explicit CallbackTextGen(
      std::function<std::string(const std::string&)> callback);

  std::string generate(const std::string& prompt) override;
  const Transcript& recorded() const { return recorded_; }

 private:
  std::function<std::string(const std::string&)> callback_;
  Transcript recorded_;
};

struct RepoEntry {
  std::string label;
  std::string root;
  std::string category;  // FPGA_PROJECT | INTERCONNECTION | CPU
  bool include = true;

  friend bool operator==(const RepoEntry&, const RepoEntry&) = default;
};

struct RepoManifest {
  std::vector<RepoEntry> repos;
  // Accepted-query caps per level; 0 = unlimited.
  size_t module_target = 0;
  size_t block_target = 0;
  size_t signal_target = 0;
};

// Structured manifest file; validates unique labels, known categories and
// that included roots exist on disk.
RepoManifest load_manifest(const std::string& path);

struct GeneratedQuery {
  NodeId target_id;
  NodeKind level = NodeKind::Block;
  std::string description;
  std::string scrubbed_query;
  int rounds_used = 0;

  friend bool operator==(const GeneratedQuery&,
                         const GeneratedQuery&) = default;
};

struct RefineOutcome {
  bool accepted = false;
  GeneratedQuery query;
  std::string last_feedback;
};

// Prompt renderers (templates mirrored under docs/prompts/).
std::string describe_block_prompt(const std::string& code);
std::string abstract_module_prompt(const std::vector<std::string>& descriptions);
std::string refine_prompt(const std::string& query, NodeKind level);
std::string regenerate_prompt(const std::string& query, NodeKind level,
                              const std::string& feedback);

// One-block functional description via the provider. Throws Provider on
// provider failure, EmptyGeneration on blank output, WrongKind unless the
// node is a BLOCK.
std::string describe_block(TextGenProvider& provider, const GraphNode& block);

// Per contained signal: block description plus a role phrase derived from
// the block's drives/reads sets. Signals ordered by NodeId.
std::vector<std::pair<NodeId, std::string>> annotate_signals(
    const GraphDatabase& db, const NodeId& block_id,
    const std::string& block_description);

// Module-level interaction summary over its block descriptions; at least one
// description required (Domain).
std::string abstract_module(TextGenProvider& provider, const GraphNode& module,
                            const std::vector<std::string>& descriptions);

// Replaces every whole-word occurrence of a repo module/signal name (case-
// insensitive, underscore/camel variants included) with "the module" /
// "the signal", dropping a preceding article and a following level word.
// Idempotent. Empty repo_label scrubs against the whole database.
std::string scrub_names(const GraphDatabase& db, const std::string& repo_label,
                        const std::string& text);

// Up to K judge rounds; FAIL feedback triggers a regeneration (re-scrubbed)
// before the next round. Throws Domain when K < 1.
RefineOutcome refine(TextGenProvider& provider, const GraphDatabase& db,
                     const std::string& repo_label, GeneratedQuery candidate,
                     int K);

struct RejectedQuery {
  GeneratedQuery query;
  std::string feedback;
};

struct GenerationResult {
  std::vector<BenchmarkQuery> queries;
  std::vector<RejectedQuery> rejected;
  size_t module_accepted = 0;
  size_t block_accepted = 0;
  size_t signal_accepted = 0;
  std::vector<std::string> warnings;
};

// Full pipeline per included repo: describe each block, annotate its signals
// and abstract each module, scrub, refine, emit benchmark records. With a
// checkpoint path, per-target outcomes are appended as they complete and
// reused on rerun, so an interrupted run resumes to the identical result.
GenerationResult generate_benchmark(const GraphDatabase& db,
                                    const RepoManifest& manifest,
                                    TextGenProvider& provider, int K,
                                    const std::string& checkpoint_path = "");

// Accepted-query listing for human sign-off.
void save_review(const GenerationResult& result, const std::string& path);

// Indexes every included repo with file paths prefixed "{label}/".
CodeGraph index_manifest(const RepoManifest& manifest, Embedder& embedder,
                         int graph_hops = 2);

}  // namespace hdlg
