#include "hdlg/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "hdlg/errors.hpp"

namespace hdlg {
namespace {

bool isIdentText(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_' &&
      s[0] != '$') {
    return false;
  }
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '$') {
      return false;
    }
  }
  return true;
}

std::string lowered(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = std::tolower(static_cast<unsigned char>(c));
  return out;
}

bool isStopWord(const std::string& lower) {
  static const std::set<std::string> kStop = {"the", "a",    "an",  "in",
                                              "of",  "this", "that", "for"};
  return kStop.count(lower) > 0;
}

bool isPatternWord(const std::string& lower) {
  return lower == "module" || lower == "signal" || lower == "output" ||
         lower == "input" || lower == "block";
}

struct Word {
  std::string text;
  size_t begin = 0;
  size_t end = 0;
};

std::vector<Word> splitWords(const std::string& text) {
  std::vector<Word> words;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      size_t begin = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_' || text[i] == '$')) {
        ++i;
      }
      words.push_back({text.substr(begin, i - begin), begin, i});
    } else {
      ++i;
    }
  }
  return words;
}

std::string attributeOf(const GraphNode& node, const std::string& key) {
  auto it = node.attributes.find(key);
  return it == node.attributes.end() ? std::string() : it->second;
}

std::string hitText(const GraphNode& node) {
  return node.kind == NodeKind::Block ? attributeOf(node, "code") : node.name;
}

void sortHits(std::vector<RetrievalHit>& hits) {
  std::sort(hits.begin(), hits.end(),
            [](const RetrievalHit& a, const RetrievalHit& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.node_id < b.node_id;
            });
}

void requireQuery(const std::string& q, const char* which) {
  if (q.empty()) {
    throw Error(Errc::UnknownLevelQuery,
                std::string(which) + " query must be nonempty");
  }
}

void requireUsable(const GraphDatabase& db, Embedder& embedder) {
  if (db.graph().nodes.empty()) {
    throw Error(Errc::EmptyDatabase, "database holds no nodes");
  }
  const std::string& family = db.meta().embedder_family;
  if (!family.empty() && family != embedder.family()) {
    throw Error(Errc::Domain, "database was indexed with embedder family '" +
                                  family + "', queried with '" +
                                  embedder.family() + "'");
  }
}

std::vector<RetrievalHit> scoreKind(const GraphDatabase& db,
                                    Embedder& embedder, const std::string& q,
                                    NodeKind kind, const char* provenance,
                                    size_t k) {
  EmbeddingVector qv = embedder.embedOne(q);
  std::vector<RetrievalHit> hits;
  for (const GraphNode* node : db.find(kind)) {
    RetrievalHit hit;
    hit.node_id = node->id;
    hit.level = kind;
    hit.provenance = provenance;
    hit.text = hitText(*node);
    hit.score = node->embedding ? cosine(qv, *node->embedding) : 0.0;
    hits.push_back(std::move(hit));
  }
  sortHits(hits);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

bool tokensOverlap(const std::string& name, const std::string& query) {
  std::vector<std::string> name_tokens = tokenize_code(name);
  std::set<std::string> query_tokens;
  for (std::string& t : tokenize_code(query)) query_tokens.insert(std::move(t));
  for (const std::string& t : name_tokens) {
    if (query_tokens.count(t)) return true;
  }
  return false;
}

std::vector<NodeId> containedOfKind(const GraphDatabase& db, const NodeId& id,
                                    NodeKind kind) {
  std::vector<NodeId> out;
  for (const NodeId& child : db.neighbors(id, EdgeKind::Contains, EdgeDir::Out)) {
    if (db.node(child).kind == kind) out.push_back(child);
  }
  return out;
}

}  // namespace

Decomposer::~Decomposer() = default;

DecomposedQuery RuleBasedDecomposer::decompose(const std::string& raw) {
  return decompose_rule_based(raw);
}

DecomposedQuery decompose_rule_based(const std::string& raw) {
  if (raw.empty()) {
    throw Error(Errc::EmptyQuery, "cannot decompose an empty query");
  }

  DecomposedQuery result;
  result.raw = raw;
  std::vector<std::pair<size_t, size_t>> removals;
  std::vector<Word> words = splitWords(raw);

  auto usableName = [&](size_t idx) {
    if (idx >= words.size()) return false;
    const std::string lower = lowered(words[idx].text);
    return isIdentText(words[idx].text) && !isStopWord(lower) &&
           !isPatternWord(lower);
  };

  for (size_t i = 0; i < words.size(); ++i) {
    const std::string lower = lowered(words[i].text);
    if (lower == "module" && result.module_query.empty()) {
      bool prev_fired = false;
      if (i >= 1 && usableName(i - 1)) {
        bool articled =
            i >= 2 && (lowered(words[i - 2].text) == "the" ||
                       lowered(words[i - 2].text) == "in");
        bool capitalized =
            std::isupper(static_cast<unsigned char>(words[i - 1].text[0]));
        if (articled || capitalized) {
          result.module_query = words[i - 1].text;
          size_t first = i - 1;
          while (first >= 1) {
            const std::string w = lowered(words[first - 1].text);
            if (w != "the" && w != "in") break;
            --first;
          }
          removals.push_back({words[first].begin, words[i].end});
          prev_fired = true;
        }
      }
      if (!prev_fired && usableName(i + 1)) {
        result.module_query = words[i + 1].text;
        removals.push_back({words[i].begin, words[i + 1].end});
      }
    } else if ((lower == "signal" || lower == "output") &&
               result.signal_query.empty() && usableName(i + 1)) {
      result.signal_query = words[i + 1].text;
      removals.push_back({words[i].begin, words[i + 1].end});
    }
  }

  if (result.signal_query.empty()) {
    size_t open = raw.find('`');
    while (open != std::string::npos) {
      size_t close = raw.find('`', open + 1);
      if (close == std::string::npos) break;
      std::string inner = raw.substr(open + 1, close - open - 1);
      size_t bracket = inner.find('[');
      std::string name =
          bracket == std::string::npos ? inner : inner.substr(0, bracket);
      if (isIdentText(name)) {
        result.signal_query = name;
        removals.push_back({open, close + 1});
        break;
      }
      open = raw.find('`', close + 1);
    }
  }

  if (removals.empty()) {
    result.block_query = raw;
    return result;
  }

  std::string stripped = raw;
  for (const auto& [begin, end] : removals) {
    for (size_t i = begin; i < end && i < stripped.size(); ++i) {
      stripped[i] = ' ';
    }
  }
  std::string collapsed;
  bool in_space = true;
  for (char c : stripped) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) collapsed.push_back(' ');
      in_space = true;
    } else {
      collapsed.push_back(c);
      in_space = false;
    }
  }
  while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
  result.block_query = collapsed;
  return result;
}

std::vector<RetrievalHit> search_module(const GraphDatabase& db,
                                        Embedder& embedder,
                                        const std::string& q, size_t k) {
  requireUsable(db, embedder);
  requireQuery(q, "module");
  return scoreKind(db, embedder, q, NodeKind::Module, "module-cosine", k);
}

std::vector<RetrievalHit> search_block(const GraphDatabase& db,
                                       Embedder& embedder, const std::string& q,
                                       size_t k) {
  requireUsable(db, embedder);
  requireQuery(q, "block");
  return scoreKind(db, embedder, q, NodeKind::Block, "block-cosine", k);
}

std::vector<RetrievalHit> search_signal(const GraphDatabase& db,
                                        Embedder& embedder,
                                        const std::string& q, size_t k) {
  requireUsable(db, embedder);
  requireQuery(q, "signal");
  size_t breadth = std::max<size_t>(k, 10);
  std::vector<RetrievalHit> module_hits =
      scoreKind(db, embedder, q, NodeKind::Module, "module-cosine", breadth);
  std::vector<RetrievalHit> block_hits =
      scoreKind(db, embedder, q, NodeKind::Block, "block-cosine", breadth);
  std::vector<PairHit> pairs = filter_pairs(db, module_hits, block_hits);
  return rerank_signals(db, pairs, q, k);
}

std::vector<RetrievalHit> search_module_block(const GraphDatabase& db,
                                              Embedder& embedder,
                                              const std::string& module_q,
                                              const std::string& block_q,
                                              size_t k) {
  requireUsable(db, embedder);
  requireQuery(module_q, "module");
  requireQuery(block_q, "block");
  std::vector<RetrievalHit> module_hits =
      scoreKind(db, embedder, module_q, NodeKind::Module, "module-cosine", k);
  EmbeddingVector qv = embedder.embedOne(block_q);
  std::vector<RetrievalHit> hits;
  for (const RetrievalHit& m : module_hits) {
    for (const NodeId& block_id :
         containedOfKind(db, m.node_id, NodeKind::Block)) {
      const GraphNode& block = db.node(block_id);
      RetrievalHit hit;
      hit.node_id = block_id;
      hit.level = NodeKind::Block;
      hit.provenance = "block-cosine";
      hit.text = hitText(block);
      hit.score = block.embedding ? cosine(qv, *block.embedding) : 0.0;
      hits.push_back(std::move(hit));
    }
  }
  sortHits(hits);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<RetrievalHit> search_module_signal(const GraphDatabase& db,
                                               Embedder& embedder,
                                               const std::string& module_q,
                                               const std::string& signal_q,
                                               size_t k) {
  requireUsable(db, embedder);
  requireQuery(module_q, "module");
  requireQuery(signal_q, "signal");
  std::vector<RetrievalHit> module_hits =
      scoreKind(db, embedder, module_q, NodeKind::Module, "module-cosine", k);
  std::vector<RetrievalHit> hits;
  for (const RetrievalHit& m : module_hits) {
    for (const NodeId& signal_id :
         containedOfKind(db, m.node_id, NodeKind::Signal)) {
      const GraphNode& signal = db.node(signal_id);
      if (!tokensOverlap(signal.name, signal_q)) continue;
      RetrievalHit hit;
      hit.node_id = signal_id;
      hit.level = NodeKind::Signal;
      hit.provenance = "module-score";
      hit.text = signal.name;
      hit.score = m.score;
      hits.push_back(std::move(hit));
    }
  }
  sortHits(hits);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<PairHit> filter_pairs(const GraphDatabase& db,
                                  const std::vector<RetrievalHit>& module_hits,
                                  const std::vector<RetrievalHit>& block_hits) {
  std::vector<PairHit> pairs;
  for (const RetrievalHit& m : module_hits) {
    std::set<NodeId> contained;
    for (const NodeId& block_id :
         containedOfKind(db, m.node_id, NodeKind::Block)) {
      contained.insert(block_id);
    }
    for (const RetrievalHit& b : block_hits) {
      if (!contained.count(b.node_id)) continue;
      PairHit pair;
      pair.module = m;
      pair.block = b;
      pair.score = (m.score + b.score) / 2.0;
      pairs.push_back(std::move(pair));
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const PairHit& a, const PairHit& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.module.node_id != b.module.node_id) {
      return a.module.node_id < b.module.node_id;
    }
    return a.block.node_id < b.block.node_id;
  });
  return pairs;
}

std::vector<RetrievalHit> rerank_signals(const GraphDatabase& db,
                                         const std::vector<PairHit>& pairs,
                                         const std::string& signal_query,
                                         size_t k) {
  std::map<NodeId, std::pair<double, size_t>> sums;
  for (const PairHit& pair : pairs) {
    for (const NodeId& signal_id :
         containedOfKind(db, pair.block.node_id, NodeKind::Signal)) {
      auto& [sum, count] = sums[signal_id];
      sum += pair.score;
      count += 1;
    }
  }
  std::vector<RetrievalHit> hits;
  for (const auto& [signal_id, acc] : sums) {
    const GraphNode& signal = db.node(signal_id);
    if (!signal_query.empty() && !tokensOverlap(signal.name, signal_query)) {
      continue;
    }
    RetrievalHit hit;
    hit.node_id = signal_id;
    hit.level = NodeKind::Signal;
    hit.provenance = "signal-rerank";
    hit.text = signal.name;
    hit.score = acc.first / static_cast<double>(acc.second);
    hits.push_back(std::move(hit));
  }
  sortHits(hits);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<RetrievedBlock> retrieve(const GraphDatabase& db,
                                     Embedder& embedder, Decomposer& decomposer,
                                     const std::string& raw_query, size_t k,
                                     RetrieveTrace* trace) {
  if (raw_query.empty()) {
    throw Error(Errc::EmptyQuery, "cannot retrieve with an empty query");
  }
  requireUsable(db, embedder);

  DecomposedQuery d = decomposer.decompose(raw_query);
  if (d.block_query.empty()) d.block_query = d.raw;
  if (trace) trace->decomposition = d;

  auto attachModule = [&](const NodeId& block_id) -> std::optional<RetrievalHit> {
    for (const NodeId& parent :
         db.neighbors(block_id, EdgeKind::Contains, EdgeDir::In)) {
      const GraphNode& node = db.node(parent);
      if (node.kind != NodeKind::Module) continue;
      RetrievalHit hit;
      hit.node_id = parent;
      hit.level = NodeKind::Module;
      hit.provenance = "containment";
      hit.text = node.name;
      return hit;
    }
    return std::nullopt;
  };

  auto fallback = [&]() {
    std::vector<RetrievalHit> block_hits =
        search_block(db, embedder, d.block_query, k);
    if (trace) {
      trace->used_fallback = true;
      trace->pre_truncation = block_hits;
    }
    std::vector<RetrievedBlock> out;
    for (RetrievalHit& hit : block_hits) {
      RetrievedBlock rb;
      rb.module = attachModule(hit.node_id);
      rb.block = std::move(hit);
      out.push_back(std::move(rb));
    }
    return out;
  };

  if (d.module_query.empty()) return fallback();

  size_t breadth = std::max<size_t>(k, 10);
  std::vector<RetrievalHit> module_hits = scoreKind(
      db, embedder, d.module_query, NodeKind::Module, "module-cosine", breadth);
  std::vector<RetrievalHit> block_hits = scoreKind(
      db, embedder, d.block_query, NodeKind::Block, "block-cosine", breadth);
  std::vector<PairHit> pairs = filter_pairs(db, module_hits, block_hits);
  if (trace) {
    trace->module_hits = module_hits;
    trace->block_hits = block_hits;
    trace->pairs = pairs;
  }
  if (pairs.empty()) return fallback();

  // CONTAINS uniqueness gives each block at most one pair; the candidate
  // ranking is the pair ranking keyed by block id.
  std::vector<RetrievedBlock> candidates;
  for (const PairHit& pair : pairs) {
    RetrievedBlock rb;
    rb.block = pair.block;
    rb.block.score = pair.score;
    rb.block.provenance = "pair-mean";
    rb.module = pair.module;
    candidates.push_back(std::move(rb));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const RetrievedBlock& a, const RetrievedBlock& b) {
              if (a.block.score != b.block.score) {
                return a.block.score > b.block.score;
              }
              return a.block.node_id < b.block.node_id;
            });
  if (trace) {
    trace->pre_truncation.clear();
    for (const RetrievedBlock& rb : candidates) {
      trace->pre_truncation.push_back(rb.block);
    }
  }

  if (!d.signal_query.empty()) {
    std::vector<RetrievalHit> signal_hits =
        rerank_signals(db, pairs, d.signal_query, breadth);
    std::map<NodeId, const RetrievalHit*> by_id;
    for (const RetrievalHit& s : signal_hits) by_id[s.node_id] = &s;
    for (RetrievedBlock& rb : candidates) {
      for (const NodeId& signal_id :
           containedOfKind(db, rb.block.node_id, NodeKind::Signal)) {
        auto it = by_id.find(signal_id);
        if (it != by_id.end()) rb.signals.push_back(*it->second);
      }
      std::sort(rb.signals.begin(), rb.signals.end(),
                [](const RetrievalHit& a, const RetrievalHit& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.node_id < b.node_id;
                });
    }
  }

  if (candidates.size() > k) candidates.resize(k);
  return candidates;
}

}  // namespace hdlg
