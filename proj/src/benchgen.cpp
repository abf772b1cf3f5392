#include "hdlg/benchgen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "hdlg/errors.hpp"
#include "hdlg/files.hpp"
#include "hdlg/hash.hpp"
#include "json.hpp"

namespace hdlg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string trimmed(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

std::string loweredText(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = std::tolower(static_cast<unsigned char>(c));
  return out;
}

const char* levelWord(NodeKind level) {
  switch (level) {
    case NodeKind::Module: return "module";
    case NodeKind::Signal: return "signal";
    default: return "block";
  }
}

// File segment of "{KIND}:{file}:{qualified}:{ordinal}"; identifiers cannot
// contain ':' and indexed paths are not expected to either.
std::string nodeFileOf(const NodeId& id) {
  size_t first = id.find(':');
  size_t last = id.rfind(':');
  if (first == std::string::npos || last <= first) return "";
  size_t mid = id.rfind(':', last - 1);
  if (mid == std::string::npos || mid <= first) return "";
  return id.substr(first + 1, mid - first - 1);
}

bool belongsToRepo(const NodeId& id, const std::string& label) {
  if (label.empty()) return true;
  std::string file = nodeFileOf(id);
  return file.size() > label.size() + 1 &&
         file.compare(0, label.size(), label) == 0 &&
         file[label.size()] == '/';
}

std::string normalizeName(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == '_') continue;
    out.push_back(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::set<std::string> splitNames(const std::string& joined) {
  std::set<std::string> names;
  size_t i = 0;
  while (i < joined.size()) {
    size_t space = joined.find(' ', i);
    if (space == std::string::npos) space = joined.size();
    if (space > i) names.insert(joined.substr(i, space - i));
    i = space + 1;
  }
  return names;
}

std::string attributeOf(const GraphNode& node, const std::string& key) {
  auto it = node.attributes.find(key);
  return it == node.attributes.end() ? std::string() : it->second;
}

struct Segment {
  bool word = false;
  std::string text;
};

std::vector<Segment> segmentText(const std::string& text) {
  std::vector<Segment> segments;
  size_t i = 0;
  auto isWord = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  };
  while (i < text.size()) {
    bool word = isWord(text[i]);
    size_t begin = i;
    while (i < text.size() && isWord(text[i]) == word) ++i;
    segments.push_back({word, text.substr(begin, i - begin)});
  }
  return segments;
}

bool isSpaceOnly(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return !s.empty();
}

bool isArticle(const std::string& word) {
  std::string w = loweredText(word);
  return w == "the" || w == "a" || w == "an";
}

}  // namespace

TextGenProvider::~TextGenProvider() = default;

std::string prompt_key(const std::string& prompt) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(prompt)));
  return buf;
}

Transcript load_transcript(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(Errc::Format,
                path + ": transcript must be a structured key-response map");
  }
  Transcript transcript;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_string()) {
      throw Error(Errc::Format,
                  path + ": transcript value for key '" + it.key() +
                      "' is not text");
    }
    transcript[it.key()] = it.value().get<std::string>();
  }
  return transcript;
}

void save_transcript(const Transcript& transcript, const std::string& path) {
  json doc(transcript);
  write_file(path, doc.dump(2) + "\n");
}

ReplayTextGen::ReplayTextGen(Transcript transcript)
    : transcript_(std::move(transcript)) {}

ReplayTextGen::ReplayTextGen(const std::string& transcript_path)
    : transcript_(load_transcript(transcript_path)) {}

std::string ReplayTextGen::generate(const std::string& prompt) {
  std::string key = prompt_key(prompt);
  auto it = transcript_.find(key);
  if (it == transcript_.end()) {
    throw Error(Errc::Provider,
                "replay transcript has no entry for prompt key " + key);
  }
  return it->second;
}

CallbackTextGen::CallbackTextGen(
    std::function<std::string(const std::string&)> callback)
    : callback_(std::move(callback)) {}

std::string CallbackTextGen::generate(const std::string& prompt) {
  std::string response = callback_(prompt);
  recorded_[prompt_key(prompt)] = response;
  return response;
}

RepoManifest load_manifest(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(Errc::Format, path + ": manifest must be a structured object");
  }
  static const std::set<std::string> kCategories = {"FPGA_PROJECT",
                                                    "INTERCONNECTION", "CPU"};
  RepoManifest manifest;
  std::set<std::string> labels;
  try {
    for (const json& entry : doc.at("repos")) {
      RepoEntry repo;
      repo.label = entry.at("label").get<std::string>();
      repo.root = entry.at("root").get<std::string>();
      repo.category = entry.at("category").get<std::string>();
      repo.include = entry.value("include", true);
      if (!labels.insert(repo.label).second) {
        throw Error(Errc::Format,
                    path + ": duplicate repo label '" + repo.label + "'");
      }
      if (!kCategories.count(repo.category)) {
        throw Error(Errc::Format, path + ": unknown category '" +
                                      repo.category + "' for repo '" +
                                      repo.label + "'");
      }
      if (repo.include && !fs::exists(repo.root)) {
        throw Error(Errc::Format, path + ": included repo '" + repo.label +
                                      "' root does not exist: " + repo.root);
      }
      manifest.repos.push_back(std::move(repo));
    }
    if (doc.contains("targets")) {
      const json& targets = doc["targets"];
      manifest.module_target = targets.value("module", 0u);
      manifest.block_target = targets.value("block", 0u);
      manifest.signal_target = targets.value("signal", 0u);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::Format, path + ": " + e.what());
  }
  return manifest;
}

std::string describe_block_prompt(const std::string& code) {
  return
      "Template: describe-block v1\n"
      "Describe the function of the following Verilog block in one or two "
      "sentences.\n"
      "Do not name any identifiers.\n\n" +
      code + "\n";
}

std::string abstract_module_prompt(
    const std::vector<std::string>& descriptions) {
  std::string prompt =
      "Template: abstract-module v1\n"
      "The blocks of one Verilog module are described below. Summarize how "
      "they\n"
      "interact as a single module-level description. Do not name any "
      "identifiers.\n\n";
  for (size_t i = 0; i < descriptions.size(); ++i) {
    prompt += std::to_string(i + 1) + ". " + descriptions[i] + "\n";
  }
  return prompt;
}

std::string refine_prompt(const std::string& query, NodeKind level) {
  return
      "Template: refine-judge v1\n"
      "Judge this " +
      std::string(levelWord(level)) +
      "-level code search query against the checklist:\n"
      "unambiguous, realistic, answerable from the code alone.\n"
      "Reply PASS, or FAIL: <feedback>.\n\nQuery: " +
      query + "\n";
}

std::string regenerate_prompt(const std::string& query, NodeKind level,
                              const std::string& feedback) {
  return
      "Template: refine-regenerate v1\n"
      "Rewrite this " +
      std::string(levelWord(level)) +
      "-level code search query to address the feedback. Reply with the new "
      "query only.\n\nQuery: " +
      query + "\nFeedback: " + feedback + "\n";
}

std::string describe_block(TextGenProvider& provider, const GraphNode& block) {
  if (block.kind != NodeKind::Block) {
    throw Error(Errc::WrongKind,
                "describe_block expects a BLOCK node, got " + block.id);
  }
  std::string description =
      trimmed(provider.generate(describe_block_prompt(attributeOf(block, "code"))));
  if (description.empty()) {
    throw Error(Errc::EmptyGeneration,
                "provider returned empty description for " + block.id);
  }
  return description;
}

std::vector<std::pair<NodeId, std::string>> annotate_signals(
    const GraphDatabase& db, const NodeId& block_id,
    const std::string& block_description) {
  const GraphNode& block = db.node(block_id);
  if (block.kind != NodeKind::Block) {
    throw Error(Errc::WrongKind,
                "annotate_signals expects a BLOCK node, got " + block_id);
  }
  std::set<std::string> drives = splitNames(attributeOf(block, "drives"));
  std::set<std::string> reads = splitNames(attributeOf(block, "reads"));
  std::vector<std::pair<NodeId, std::string>> annotations;
  for (const NodeId& signal_id :
       db.neighbors(block_id, EdgeKind::Contains, EdgeDir::Out)) {
    const GraphNode& signal = db.node(signal_id);
    if (signal.kind != NodeKind::Signal) continue;
    bool driven = drives.count(signal.name) > 0;
    bool read = reads.count(signal.name) > 0;
    const char* role = driven && read ? "both read and driven by"
                       : driven      ? "driven by"
                       : read        ? "read by"
                                     : "referenced by";
    annotations.push_back(
        {signal_id,
         block_description + " This signal is " + role + " the block."});
  }
  return annotations;
}

std::string abstract_module(TextGenProvider& provider, const GraphNode& module,
                            const std::vector<std::string>& descriptions) {
  if (module.kind != NodeKind::Module) {
    throw Error(Errc::WrongKind,
                "abstract_module expects a MODULE node, got " + module.id);
  }
  if (descriptions.empty()) {
    throw Error(Errc::Domain, "abstract_module requires at least one block "
                              "description for " +
                                  module.id);
  }
  std::string summary =
      trimmed(provider.generate(abstract_module_prompt(descriptions)));
  if (summary.empty()) {
    throw Error(Errc::EmptyGeneration,
                "provider returned empty summary for " + module.id);
  }
  return summary;
}

std::string scrub_names(const GraphDatabase& db, const std::string& repo_label,
                        const std::string& text) {
  // Module placeholders win when a name is both a module and a signal.
  std::map<std::string, NodeKind> names;
  static const std::set<std::string> kUnscrubbable = {"the", "a", "an",
                                                      "module", "signal"};
  for (const auto& [id, node] : db.graph().nodes) {
    if (node.kind != NodeKind::Module && node.kind != NodeKind::Signal) {
      continue;
    }
    if (!belongsToRepo(id, repo_label)) continue;
    std::string norm = normalizeName(node.name);
    if (norm.empty() || kUnscrubbable.count(norm)) continue;
    auto [it, inserted] = names.emplace(norm, node.kind);
    if (!inserted && node.kind == NodeKind::Module) {
      it->second = NodeKind::Module;
    }
  }

  std::vector<Segment> segments = segmentText(text);
  std::vector<Segment> out;
  size_t i = 0;
  while (i < segments.size()) {
    const Segment& seg = segments[i];
    if (!seg.word) {
      out.push_back(seg);
      ++i;
      continue;
    }
    auto it = names.find(normalizeName(seg.text));
    if (it == names.end()) {
      out.push_back(seg);
      ++i;
      continue;
    }
    const char* level = levelWord(it->second);
    if (out.size() >= 2 && !out.back().word && isSpaceOnly(out.back().text) &&
        out[out.size() - 2].word && isArticle(out[out.size() - 2].text)) {
      out.pop_back();
      out.pop_back();
    }
    out.push_back({true, std::string("the ") + level});
    ++i;
    if (i + 1 < segments.size() && !segments[i].word &&
        isSpaceOnly(segments[i].text) && segments[i + 1].word &&
        loweredText(segments[i + 1].text) == level) {
      i += 2;
    }
  }

  std::string result;
  for (const Segment& seg : out) result += seg.text;
  return result;
}

RefineOutcome refine(TextGenProvider& provider, const GraphDatabase& db,
                     const std::string& repo_label, GeneratedQuery candidate,
                     int K) {
  if (K < 1) {
    throw Error(Errc::Domain,
                "refine requires K >= 1, got " + std::to_string(K));
  }
  RefineOutcome outcome;
  for (int round = 1; round <= K; ++round) {
    std::string verdict = trimmed(
        provider.generate(refine_prompt(candidate.scrubbed_query, candidate.level)));
    if (verdict.compare(0, 4, "PASS") == 0) {
      candidate.rounds_used = round;
      outcome.accepted = true;
      outcome.query = std::move(candidate);
      return outcome;
    }
    std::string feedback = verdict;
    if (feedback.compare(0, 4, "FAIL") == 0) {
      feedback = trimmed(feedback.substr(4));
      if (!feedback.empty() && feedback[0] == ':') {
        feedback = trimmed(feedback.substr(1));
      }
    }
    outcome.last_feedback = feedback;
    if (round == K) break;
    std::string regenerated = trimmed(provider.generate(
        regenerate_prompt(candidate.scrubbed_query, candidate.level, feedback)));
    if (regenerated.empty()) {
      throw Error(Errc::EmptyGeneration,
                  "provider returned empty regeneration for " +
                      candidate.target_id);
    }
    candidate.scrubbed_query = scrub_names(db, repo_label, regenerated);
  }
  candidate.rounds_used = K;
  outcome.accepted = false;
  outcome.query = std::move(candidate);
  return outcome;
}

GenerationResult generate_benchmark(const GraphDatabase& db,
                                    const RepoManifest& manifest,
                                    TextGenProvider& provider, int K,
                                    const std::string& checkpoint_path) {
  GenerationResult result;

  std::vector<const RepoEntry*> included;
  for (const RepoEntry& repo : manifest.repos) {
    if (repo.include) included.push_back(&repo);
  }
  if (included.empty()) {
    result.warnings.push_back("manifest includes no repositories");
    return result;
  }

  std::map<std::string, json> checkpoint;
  if (!checkpoint_path.empty() && fs::exists(checkpoint_path)) {
    std::string content = read_file(checkpoint_path);
    size_t pos = 0;
    while (pos < content.size()) {
      size_t eol = content.find('\n', pos);
      if (eol == std::string::npos) eol = content.size();
      std::string line = content.substr(pos, eol - pos);
      pos = eol + 1;
      if (line.empty()) continue;
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object() || !rec.contains("key")) {
        throw Error(Errc::Format,
                    checkpoint_path + ": malformed checkpoint line");
      }
      checkpoint[rec["key"].get<std::string>()] = std::move(rec);
    }
  }
  std::ofstream checkpoint_out;
  if (!checkpoint_path.empty()) {
    checkpoint_out.open(checkpoint_path, std::ios::app);
    if (!checkpoint_out) {
      throw Error(Errc::Io, "cannot open checkpoint file: " + checkpoint_path);
    }
  }

  size_t module_seq = 0;
  size_t block_seq = 0;
  size_t signal_seq = 0;
  auto nextId = [](const char* level, size_t& seq) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%04zu", level, ++seq);
    return std::string(buf);
  };

  auto capOpen = [&](NodeKind level) {
    switch (level) {
      case NodeKind::Module:
        return manifest.module_target == 0 ||
               result.module_accepted < manifest.module_target;
      case NodeKind::Signal:
        return manifest.signal_target == 0 ||
               result.signal_accepted < manifest.signal_target;
      default:
        return manifest.block_target == 0 ||
               result.block_accepted < manifest.block_target;
    }
  };

  auto processTarget = [&](const std::string& key, const std::string& repo,
                           GeneratedQuery candidate) {
    json record;
    auto found = checkpoint.find(key);
    if (found != checkpoint.end()) {
      record = found->second;
    } else {
      RefineOutcome outcome = refine(provider, db, repo, candidate, K);
      record["key"] = key;
      record["target"] = outcome.query.target_id;
      record["level"] = nodeKindName(outcome.query.level);
      record["status"] = outcome.accepted ? "accepted" : "rejected";
      record["description"] = outcome.query.description;
      record["query"] = outcome.query.scrubbed_query;
      record["rounds"] = outcome.query.rounds_used;
      record["feedback"] = outcome.last_feedback;
      if (checkpoint_out.is_open()) {
        checkpoint_out << record.dump() << "\n" << std::flush;
      }
      checkpoint[key] = record;
    }

    GeneratedQuery stored;
    stored.target_id = record["target"].get<std::string>();
    stored.level = nodeKindFromName(record["level"].get<std::string>());
    stored.description = record["description"].get<std::string>();
    stored.scrubbed_query = record["query"].get<std::string>();
    stored.rounds_used = record["rounds"].get<int>();
    if (record["status"].get<std::string>() == "accepted") {
      BenchmarkQuery q;
      q.level = stored.level;
      q.text = stored.scrubbed_query;
      q.relevant_ids = {stored.target_id};
      q.repo = repo;
      switch (stored.level) {
        case NodeKind::Module:
          q.id = nextId("module", module_seq);
          ++result.module_accepted;
          break;
        case NodeKind::Signal:
          q.id = nextId("signal", signal_seq);
          ++result.signal_accepted;
          break;
        default:
          q.id = nextId("block", block_seq);
          ++result.block_accepted;
          break;
      }
      result.queries.push_back(std::move(q));
    } else {
      result.rejected.push_back(
          {std::move(stored), record["feedback"].get<std::string>()});
    }
  };

  for (const RepoEntry* repo : included) {
    std::vector<const GraphNode*> modules;
    for (const GraphNode* node : db.find(NodeKind::Module)) {
      if (attributeOf(*node, "external") == "true") continue;
      if (!belongsToRepo(node->id, repo->label)) continue;
      modules.push_back(node);
    }
    for (const GraphNode* module : modules) {
      if (!capOpen(NodeKind::Module) && !capOpen(NodeKind::Block) &&
          !capOpen(NodeKind::Signal)) {
        return result;
      }
      std::vector<std::string> descriptions;
      for (const GraphNode* block : db.blocks_of(module->id)) {
        std::string description = describe_block(provider, *block);
        descriptions.push_back(description);
        if (capOpen(NodeKind::Block)) {
          GeneratedQuery candidate;
          candidate.target_id = block->id;
          candidate.level = NodeKind::Block;
          candidate.description = description;
          candidate.scrubbed_query =
              scrub_names(db, repo->label, description);
          processTarget("block|" + block->id, repo->label,
                        std::move(candidate));
        }
        if (capOpen(NodeKind::Signal)) {
          for (auto& [signal_id, text] :
               annotate_signals(db, block->id, description)) {
            if (!capOpen(NodeKind::Signal)) break;
            GeneratedQuery candidate;
            candidate.target_id = signal_id;
            candidate.level = NodeKind::Signal;
            candidate.description = text;
            candidate.scrubbed_query = scrub_names(db, repo->label, text);
            processTarget("signal|" + block->id + "|" + signal_id,
                          repo->label, std::move(candidate));
          }
        }
      }
      if (capOpen(NodeKind::Module) && !descriptions.empty()) {
        std::string summary = abstract_module(provider, *module, descriptions);
        GeneratedQuery candidate;
        candidate.target_id = module->id;
        candidate.level = NodeKind::Module;
        candidate.description = summary;
        candidate.scrubbed_query = scrub_names(db, repo->label, summary);
        processTarget("module|" + module->id, repo->label,
                      std::move(candidate));
      }
    }
  }
  return result;
}

void save_review(const GenerationResult& result, const std::string& path) {
  std::string out = "# Generated queries pending sign-off\n\n";
  for (const BenchmarkQuery& q : result.queries) {
    out += "- [" + q.id + "] " + nodeKindName(q.level) + " " +
           q.relevant_ids.front() + " (" + q.repo + ")\n  " + q.text + "\n";
  }
  out += "\n# Rejected\n\n";
  for (const RejectedQuery& r : result.rejected) {
    out += "- " + r.query.target_id + ": " + r.feedback + "\n";
  }
  write_file(path, out);
}

CodeGraph index_manifest(const RepoManifest& manifest, Embedder& embedder,
                         int graph_hops) {
  SourceMap sources;
  for (const RepoEntry& repo : manifest.repos) {
    if (!repo.include) continue;
    for (const std::string& rel : list_repository_files(repo.root)) {
      sources[repo.label + "/" + rel] =
          read_file((fs::path(repo.root) / rel).string());
    }
  }
  return index_sources(sources, embedder, graph_hops);
}

}  // namespace hdlg
