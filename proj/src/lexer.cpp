#include "hdlg/lexer.hpp"

#include <cctype>
#include <cstring>

#include "hdlg/errors.hpp"

namespace hdlg {
namespace {

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isBaseChar(char c) { return c != '\0' && std::strchr("bodhBODH", c) != nullptr; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool isNumChar(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '_'; }
bool isBaseDigit(char c) {
  return std::isxdigit(static_cast<unsigned char>(c)) || c == '_' || c == 'x' || c == 'X' ||
         c == 'z' || c == 'Z' || c == '?';
}

struct Cursor {
  std::string_view text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= text.size(); }
  char peek(size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }
};

// Blanks [from, cur.pos) cannot contain newlines by construction; callers
// blank line by line.
void blankRange(std::string& out, size_t from, size_t to) {
  for (size_t i = from; i < to; ++i) {
    if (out[i] != '\n') out[i] = ' ';
  }
}

// Consumes to end of line (handling backslash continuations), blanking as it
// goes. Leaves the newline itself intact.
void blankDirectiveLine(std::string& out, Cursor& c) {
  while (!c.done()) {
    char ch = c.peek();
    if (ch == '\n') return;
    if (ch == '\\' && c.peek(1) == '\n') {
      out[c.pos] = ' ';
      c.advance();  // backslash
      c.advance();  // newline survives
      continue;
    }
    out[c.pos] = ' ';
    c.advance();
  }
}

std::string directiveName(const Cursor& c) {
  size_t i = c.pos + 1;  // past backtick
  std::string name;
  while (i < c.text.size() && isIdentChar(c.text[i])) name += c.text[i++];
  return name;
}

}  // namespace

std::string preprocess(std::string_view text, const std::string& file_path,
                       std::vector<Diagnostic>& diagnostics) {
  std::string out(text);
  Cursor c{text};
  // Stack of `ifdef frames: whether we are past the kept (first) branch.
  struct Frame {
    int line;
    bool in_kept_branch;
  };
  std::vector<Frame> stack;

  bool blanking = false;  // inside a dropped branch
  while (!c.done()) {
    char ch = c.peek();
    if (ch == '`') {
      std::string name = directiveName(c);
      int at_line = c.line;
      if (name == "ifdef" || name == "ifndef") {
        stack.push_back({at_line, !blanking});
        diagnostics.push_back({file_path, at_line, "ifdef-stripped",
                               "`" + name + " stripped; first branch kept"});
        blankDirectiveLine(out, c);
      } else if (name == "elsif" || name == "else") {
        if (stack.empty()) {
          diagnostics.push_back({file_path, at_line, "directive-unbalanced",
                                 "`" + name + " without `ifdef"});
          blankDirectiveLine(out, c);
        } else {
          // Everything after the first branch is dropped.
          if (stack.back().in_kept_branch) stack.back().in_kept_branch = false;
          blankDirectiveLine(out, c);
        }
      } else if (name == "endif") {
        if (stack.empty()) {
          diagnostics.push_back({file_path, at_line, "directive-unbalanced",
                                 "`endif without `ifdef"});
        } else {
          stack.pop_back();
        }
        blankDirectiveLine(out, c);
      } else if (name == "include") {
        diagnostics.push_back(
            {file_path, at_line, "include-skipped", "`include not expanded"});
        blankDirectiveLine(out, c);
      } else if (name.empty()) {
        out[c.pos] = ' ';
        c.advance();
      } else if (name == "define" || name == "undef" || name == "timescale" ||
                 name == "default_nettype" || name == "resetall" ||
                 name == "celldefine" || name == "endcelldefine") {
        diagnostics.push_back({file_path, at_line, "directive-skipped",
                               "`" + name + " ignored"});
        blankDirectiveLine(out, c);
      } else {
        // Macro usage: blank the token only.
        diagnostics.push_back({file_path, at_line, "macro-skipped",
                               "macro `" + name + " not expanded"});
        size_t from = c.pos;
        c.advance();  // backtick
        while (!c.done() && isIdentChar(c.peek())) c.advance();
        blankRange(out, from, c.pos);
      }
      continue;
    }
    // Recompute the dropped-branch state lazily: we are blanking iff any
    // frame is past its kept branch.
    blanking = false;
    for (const Frame& f : stack) {
      if (!f.in_kept_branch) blanking = true;
    }
    if (blanking && ch != '\n') out[c.pos] = ' ';
    c.advance();
  }
  for (const Frame& f : stack) {
    diagnostics.push_back(
        {file_path, f.line, "directive-unbalanced", "`ifdef without `endif"});
  }
  return out;
}

std::vector<Token> lex(std::string_view text, const std::string& file_path) {
  std::vector<Token> tokens;
  Cursor c{text};

  auto syntaxError = [&](const std::string& found,
                         std::vector<std::string> expected) -> SyntaxError {
    return SyntaxError(file_path, c.line, c.col, c.pos, found, std::move(expected));
  };

  while (!c.done()) {
    char ch = c.peek();
    if (std::isspace(static_cast<unsigned char>(ch))) {
      c.advance();
      continue;
    }
    if (ch == '/' && c.peek(1) == '/') {
      while (!c.done() && c.peek() != '\n') c.advance();
      continue;
    }
    if (ch == '/' && c.peek(1) == '*') {
      int start_line = c.line;
      int start_col = c.col;
      size_t start_pos = c.pos;
      c.advance();
      c.advance();
      bool closed = false;
      while (!c.done()) {
        if (c.peek() == '*' && c.peek(1) == '/') {
          c.advance();
          c.advance();
          closed = true;
          break;
        }
        c.advance();
      }
      if (!closed) {
        throw SyntaxError(file_path, start_line, start_col, start_pos, "/*",
                          {"*/"});
      }
      continue;
    }

    Token t;
    t.byte_offset = c.pos;
    t.line = c.line;
    t.column = c.col;

    if (ch == '\\') {  // escaped identifier: up to whitespace
      t.kind = TokKind::Identifier;
      while (!c.done() && !std::isspace(static_cast<unsigned char>(c.peek()))) {
        t.text += c.peek();
        c.advance();
      }
      tokens.push_back(std::move(t));
      continue;
    }
    if (isIdentStart(ch)) {
      t.kind = TokKind::Identifier;
      while (!c.done() && isIdentChar(c.peek())) {
        t.text += c.peek();
        c.advance();
      }
      tokens.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '\'') {
      t.kind = TokKind::Number;
      while (!c.done() && isNumChar(c.peek())) {
        t.text += c.peek();
        c.advance();
      }
      if (c.peek() == '\'' &&
          (c.peek(1) == 's' || c.peek(1) == 'S' || isBaseChar(c.peek(1)))) {
        t.text += c.peek();
        c.advance();  // tick
        if (c.peek() == 's' || c.peek() == 'S') {
          t.text += c.peek();
          c.advance();
        }
        if (!isBaseChar(c.peek())) {
          throw syntaxError(std::string(1, c.peek()), {"base (b, o, d, h)"});
        }
        t.text += c.peek();
        c.advance();
        if (!isBaseDigit(c.peek())) {
          throw syntaxError(std::string(1, c.peek()), {"digit"});
        }
        while (!c.done() && isBaseDigit(c.peek())) {
          t.text += c.peek();
          c.advance();
        }
      } else if (c.peek() == '.' && std::isdigit(static_cast<unsigned char>(c.peek(1)))) {
        t.text += c.peek();
        c.advance();
        while (!c.done() && isNumChar(c.peek())) {
          t.text += c.peek();
          c.advance();
        }
      }
      if (t.text.empty() || t.text == "'") {
        throw syntaxError("'", {"number"});
      }
      tokens.push_back(std::move(t));
      continue;
    }
    if (ch == '"') {
      t.kind = TokKind::String;
      int start_line = c.line;
      int start_col = c.col;
      size_t start_pos = c.pos;
      c.advance();
      bool closed = false;
      while (!c.done()) {
        char s = c.peek();
        if (s == '"') {
          c.advance();
          closed = true;
          break;
        }
        if (s == '\\' && c.peek(1) != '\0') {
          t.text += s;
          c.advance();
          t.text += c.peek();
          c.advance();
          continue;
        }
        if (s == '\n') break;
        t.text += s;
        c.advance();
      }
      if (!closed) {
        throw SyntaxError(file_path, start_line, start_col, start_pos, "\"",
                          {"\""});
      }
      tokens.push_back(std::move(t));
      continue;
    }

    // Punctuation, longest match first.
    auto tryTake = [&](std::string_view op) -> bool {
      for (size_t i = 0; i < op.size(); ++i) {
        if (c.peek(i) != op[i]) return false;
      }
      t.kind = TokKind::Punct;
      t.text = std::string(op);
      for (size_t i = 0; i < op.size(); ++i) c.advance();
      tokens.push_back(std::move(t));
      return true;
    };
    static constexpr std::string_view kThreeCharOps[] = {"===", "!==", "<<<",
                                                         ">>>"};
    static constexpr std::string_view kTwoCharOps[] = {
        "<=", ">=", "==", "!=", "&&", "||", "<<", ">>",
        "**", "~&", "~|", "~^", "^~", "+:", "-:"};
    bool took = false;
    for (std::string_view op : kThreeCharOps) {
      if (tryTake(op)) {
        took = true;
        break;
      }
    }
    for (std::string_view op : kTwoCharOps) {
      if (took) break;
      if (tryTake(op)) took = true;
    }
    if (took) continue;
    if (std::strchr("+-*/%&|^~!<>=?:;,.()[]{}#@$", ch)) {
      t.kind = TokKind::Punct;
      t.text = std::string(1, ch);
      c.advance();
      tokens.push_back(std::move(t));
      continue;
    }
    throw syntaxError(std::string(1, ch), {"token"});
  }

  Token eof;
  eof.kind = TokKind::Eof;
  eof.byte_offset = c.pos;
  eof.line = c.line;
  eof.column = c.col;
  tokens.push_back(std::move(eof));
  return tokens;
}

}  // namespace hdlg
