#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hdlg/source.hpp"

namespace hdlg {

// Replaces compiler directives and non-first `ifdef branches with spaces.
// Output has the same length and the same newline positions as the input, so
// byte offsets into the preprocessed text index the original file. Each
// stripped construct appends one Diagnostic.
std::string preprocess(std::string_view text, const std::string& file_path,
                       std::vector<Diagnostic>& diagnostics);

enum class TokKind { Identifier, Number, String, Punct, Eof };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;  // escaped identifiers keep the leading backslash
  size_t byte_offset = 0;
  int line = 1;
  int column = 1;

  bool is(TokKind k) const { return kind == k; }
  bool is(TokKind k, std::string_view t) const { return kind == k && text == t; }
  bool isPunct(std::string_view t) const { return is(TokKind::Punct, t); }
  bool isKeyword(std::string_view t) const { return is(TokKind::Identifier, t); }
};

// Tokenizes preprocessed text. Skips whitespace and comments. Throws
// SyntaxError on an unterminated block comment, unterminated string, or a
// byte no token can start with.
std::vector<Token> lex(std::string_view text, const std::string& file_path);

}  // namespace hdlg
