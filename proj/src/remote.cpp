#include "hdlg/remote.hpp"

#include <algorithm>

#include "hdlg/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace hdlg {
namespace {

using nlohmann::json;

constexpr size_t kBatchSize = 64;

struct Endpoint {
  std::string base;
  std::string path;
};

Endpoint splitEndpoint(const std::string& endpoint) {
  size_t scheme = endpoint.find("://");
  size_t path_start =
      endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

// POSTs one JSON body and parses the JSON reply; `context` prefixes error
// messages (e.g. "batch 2").
json postJson(const std::string& endpoint, const json& body,
              const std::string& context) {
  Endpoint ep = splitEndpoint(endpoint);
  httplib::Client client(ep.base);
  httplib::Result res =
      client.Post(ep.path, body.dump(), "application/json");
  if (!res) {
    throw Error(Errc::Transport, context + ": cannot reach " + endpoint +
                                     ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(Errc::Transport, context + ": " + endpoint + " returned status " +
                                     std::to_string(res->status));
  }
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object()) {
    throw Error(Errc::Protocol,
                context + ": " + endpoint + " returned malformed body");
  }
  return reply;
}

}  // namespace

std::vector<EmbeddingVector> remote_embed(const std::string& endpoint,
                                          const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> vectors;
  if (texts.empty()) return vectors;
  size_t dim = 0;
  for (size_t batch = 0; batch * kBatchSize < texts.size(); ++batch) {
    std::string context = "batch " + std::to_string(batch);
    size_t begin = batch * kBatchSize;
    size_t end = std::min(texts.size(), begin + kBatchSize);
    json body;
    body["texts"] = std::vector<std::string>(texts.begin() + begin,
                                             texts.begin() + end);
    json reply = postJson(endpoint, body, context);
    if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
        reply["vectors"].size() != end - begin) {
      throw Error(Errc::Protocol,
                  context + ": response lacks a matching 'vectors' array");
    }
    for (const json& row : reply["vectors"]) {
      if (!row.is_array()) {
        throw Error(Errc::Protocol, context + ": vector row is not an array");
      }
      EmbeddingVector v;
      for (const json& x : row) {
        if (!x.is_number()) {
          throw Error(Errc::Protocol,
                      context + ": vector element is not a number");
        }
        v.push_back(x.get<double>());
      }
      if (dim == 0) dim = v.size();
      if (v.size() != dim || v.empty()) {
        throw Error(Errc::Protocol,
                    context + ": ragged embedding dimensions (" +
                        std::to_string(v.size()) + " vs " +
                        std::to_string(dim) + ")");
      }
      vectors.push_back(std::move(v));
    }
  }
  return vectors;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint)
    : endpoint_(std::move(endpoint)) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> vectors = remote_embed(endpoint_, texts);
  if (!vectors.empty()) dim_ = vectors.front().size();
  return vectors;
}

std::string RemoteEmbedder::family() const { return "remote"; }

size_t RemoteEmbedder::dim() const { return dim_; }

RemoteDecomposer::RemoteDecomposer(std::string endpoint)
    : endpoint_(std::move(endpoint)) {}

DecomposedQuery RemoteDecomposer::decompose(const std::string& raw) {
  if (raw.empty()) {
    throw Error(Errc::EmptyQuery, "cannot decompose an empty query");
  }
  json body;
  body["query"] = raw;
  json reply = postJson(endpoint_, body, "decompose");
  DecomposedQuery d;
  d.raw = raw;
  d.module_query = reply.value("module", std::string());
  d.block_query = reply.value("block", std::string());
  d.signal_query = reply.value("signal", std::string());
  if (d.block_query.empty() && d.module_query.empty() &&
      d.signal_query.empty()) {
    d.block_query = raw;
  }
  return d;
}

RemoteTextGen::RemoteTextGen(std::string endpoint)
    : endpoint_(std::move(endpoint)) {}

std::string RemoteTextGen::generate(const std::string& prompt) {
  json body;
  body["prompt"] = prompt;
  try {
    json reply = postJson(endpoint_, body, "generate");
    if (!reply.contains("text") || !reply["text"].is_string()) {
      throw Error(Errc::Protocol, "generate: response lacks a 'text' string");
    }
    return reply["text"].get<std::string>();
  } catch (const Error& e) {
    if (e.code() == Errc::Provider) throw;
    throw Error(Errc::Provider, e.what());
  }
}

}  // namespace hdlg
