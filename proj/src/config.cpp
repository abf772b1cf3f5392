#include "hdlg/config.hpp"

#include <cctype>

#include "hdlg/errors.hpp"
#include "hdlg/files.hpp"

namespace hdlg {
namespace {

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

int parsePositive(const std::string& key, const std::string& value) {
  size_t consumed = 0;
  int parsed = 0;
  try {
    parsed = std::stoi(value, &consumed);
  } catch (const std::exception&) {
    throw Error(Errc::Format, "config key '" + key + "': not a number: " + value);
  }
  if (consumed != value.size()) {
    throw Error(Errc::Format, "config key '" + key + "': not a number: " + value);
  }
  return parsed;
}

}  // namespace

void apply_config_entry(Config& config, const std::string& key,
                        const std::string& value) {
  if (key == "database") {
    config.database = value;
  } else if (key == "embedder") {
    config.embedder = value;
  } else if (key == "embedder_url") {
    config.embedder_url = value;
  } else if (key == "decomposer") {
    config.decomposer = value;
  } else if (key == "decomposer_url") {
    config.decomposer_url = value;
  } else if (key == "textgen_url") {
    config.textgen_url = value;
  } else if (key == "k") {
    config.k = parsePositive(key, value);
  } else if (key == "max_hops") {
    config.max_hops = parsePositive(key, value);
  } else if (key == "hops") {
    config.hops = parsePositive(key, value);
  } else if (key == "refine_rounds") {
    config.refine_rounds = parsePositive(key, value);
  } else if (key == "jobs") {
    config.jobs = parsePositive(key, value);
  } else {
    throw Error(Errc::Format, "unknown config key '" + key + "'");
  }
}

Config load_config(const std::string& path) {
  Config config;
  std::string content = read_file(path);
  size_t pos = 0;
  int line_no = 0;
  while (pos <= content.size()) {
    size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string line = trimmed(content.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') {
      if (pos > content.size()) break;
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::Format, path + ":" + std::to_string(line_no) +
                                    ": expected key = value");
    }
    apply_config_entry(config, trimmed(line.substr(0, eq)),
                       trimmed(line.substr(eq + 1)));
    if (pos > content.size()) break;
  }
  return config;
}

void validate_config(const Config& config) {
  if (config.embedder != "lexical" && config.embedder != "remote") {
    throw Error(Errc::Domain,
                "embedder must be 'lexical' or 'remote', got '" +
                    config.embedder + "'");
  }
  if (config.embedder == "remote" && config.embedder_url.empty()) {
    throw Error(Errc::Domain, "remote embedder requires embedder_url");
  }
  if (config.decomposer != "rule_based" && config.decomposer != "remote") {
    throw Error(Errc::Domain,
                "decomposer must be 'rule_based' or 'remote', got '" +
                    config.decomposer + "'");
  }
  if (config.decomposer == "remote" && config.decomposer_url.empty()) {
    throw Error(Errc::Domain, "remote decomposer requires decomposer_url");
  }
  if (config.k < 1 || config.max_hops < 1 || config.hops < 1 ||
      config.refine_rounds < 1 || config.jobs < 1) {
    throw Error(Errc::Domain, "numeric config parameters must be >= 1");
  }
}

}  // namespace hdlg
