#pragma once

#include <string>

namespace hdlg {

// Runtime configuration shared by the CLI commands; file values are
// overridden by command-line flags (flags win).
struct Config {
  std::string database;
  std::string embedder = "lexical";        // lexical | remote
  std::string embedder_url;
  std::string decomposer = "rule_based";   // rule_based | remote
  std::string decomposer_url;
  std::string textgen_url;
  int k = 10;
  int max_hops = 3;
  int hops = 2;
  int refine_rounds = 7;
  int jobs = 1;
};

// key = value lines, '#' comments, blank lines ignored. Unknown keys and
// malformed values throw Format.
Config load_config(const std::string& path);

// Applies one key=value override; same validation as the file loader.
void apply_config_entry(Config& config, const std::string& key,
                        const std::string& value);

// Numeric parameters must be >= 1 and choices well-formed, else Domain.
void validate_config(const Config& config);

}  // namespace hdlg
