#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hdlg/ast.hpp"
#include "hdlg/source.hpp"

namespace hdlg {

// Parses one file of the supported Verilog subset. Spans index `text` (the
// original bytes; directive stripping preserves offsets). Stripped constructs
// are appended to `diagnostics`. Throws SyntaxError for constructs outside
// the subset and Error(Errc::UnterminatedModule) when endmodule is missing.
std::vector<AstModule> parse_file(std::string_view text,
                                  const std::string& file_path,
                                  std::vector<Diagnostic>& diagnostics);

std::vector<AstModule> parse_file(std::string_view text,
                                  const std::string& file_path);

}  // namespace hdlg
