#include "hdlg/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "hdlg/errors.hpp"
#include "hdlg/lexer.hpp"

namespace hdlg {
namespace {

const char* const kKeywords[] = {
    "module", "endmodule", "input",  "output",  "inout",   "wire",
    "reg",    "parameter", "localparam", "assign", "always", "initial",
    "begin",  "end",       "if",     "else",    "case",    "casez",
    "casex",  "endcase",   "default", "posedge", "negedge", "or",
    "signed", "generate",  "endgenerate", "function", "task", "integer",
    "genvar", "for", "while", "forever", "repeat", "wait", "fork", "join",
};

bool isKeywordWord(const std::string& s) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), s) !=
         std::end(kKeywords);
}

bool isUnaryOp(const std::string& s) {
  static const char* const ops[] = {"!", "~", "&", "~&", "|",
                                    "~|", "^", "~^", "^~", "+", "-"};
  return std::find(std::begin(ops), std::end(ops), s) != std::end(ops);
}

// Binary precedence, higher binds tighter. 0 = not a binary operator.
int binaryPrec(const std::string& s) {
  if (s == "**") return 11;
  if (s == "*" || s == "/" || s == "%") return 10;
  if (s == "+" || s == "-") return 9;
  if (s == "<<" || s == ">>" || s == "<<<" || s == ">>>") return 8;
  if (s == "<" || s == "<=" || s == ">" || s == ">=") return 7;
  if (s == "==" || s == "!=" || s == "===" || s == "!==") return 6;
  if (s == "&" || s == "~&") return 5;
  if (s == "^" || s == "~^" || s == "^~") return 4;
  if (s == "|" || s == "~|") return 3;
  if (s == "&&") return 2;
  if (s == "||") return 1;
  return 0;
}

class Parser {
 public:
  Parser(std::string_view original_text, const std::vector<Token>& tokens,
         std::string file_path)
      : text_(original_text), tokens_(tokens), file_(std::move(file_path)) {}

  std::vector<AstModule> parseAll() {
    std::vector<AstModule> modules;
    while (!at(TokKind::Eof)) {
      if (atKeyword("module")) {
        modules.push_back(parseModule());
      } else {
        fail({"module"});
      }
    }
    return modules;
  }

 private:
  std::string_view text_;
  const std::vector<Token>& tokens_;
  std::string file_;
  size_t pos_ = 0;

  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(size_t ahead = 1) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& prev() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1]; }
  void bump() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }

  bool at(TokKind k) const { return cur().kind == k; }
  bool atPunct(std::string_view t) const { return cur().isPunct(t); }
  bool atKeyword(std::string_view t) const { return cur().isKeyword(t); }

  bool eatPunct(std::string_view t) {
    if (!atPunct(t)) return false;
    bump();
    return true;
  }
  bool eatKeyword(std::string_view t) {
    if (!atKeyword(t)) return false;
    bump();
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = cur();
    std::string found = t.kind == TokKind::Eof ? "end of file" : t.text;
    throw SyntaxError(file_, t.line, t.column, t.byte_offset, found,
                      std::move(expected));
  }

  Token expectPunct(std::string_view t) {
    if (!atPunct(t)) fail({std::string(t)});
    Token tok = cur();
    bump();
    return tok;
  }

  Token expectKeyword(std::string_view t) {
    if (!atKeyword(t)) fail({std::string(t)});
    Token tok = cur();
    bump();
    return tok;
  }

  // Any identifier token, keywords rejected (escaped identifiers are stored
  // with the backslash by the lexer and are never keywords).
  Token expectIdent() {
    if (!at(TokKind::Identifier) ||
        (cur().text[0] != '\\' && isKeywordWord(cur().text))) {
      fail({"identifier"});
    }
    Token tok = cur();
    bump();
    return tok;
  }

  bool atIdent() const {
    return at(TokKind::Identifier) &&
           (cur().text[0] == '\\' || !isKeywordWord(cur().text));
  }

  static std::string identName(const Token& t) {
    // Escaped identifier: stored without the backslash.
    if (!t.text.empty() && t.text[0] == '\\') return t.text.substr(1);
    return t.text;
  }

  size_t tokenEnd(const Token& t) const { return t.byte_offset + t.text.size(); }

  SourceSpan spanFrom(const Token& start, const Token& end) const {
    SourceSpan s;
    s.file_path = file_;
    s.byte_start = start.byte_offset;
    s.byte_end = end.byte_offset + (end.kind == TokKind::String
                                        ? end.text.size() + 2
                                        : end.text.size());
    s.line_start = start.line;
    s.line_end = end.line;
    return s;
  }

  SourceSpan tokenSpan(const Token& t) const { return spanFrom(t, t); }

  // ── Declarations ──────────────────────────────────────────────────────

  struct ModuleCtx {
    AstModule mod;
    // Port names from a 1995-style header, awaiting body declarations.
    std::vector<std::string> header_ports;
  };

  AstSignal* findOrAddSignal(AstModule& mod, const std::string& name,
                             const SourceSpan& span) {
    for (AstSignal& s : mod.signals) {
      if (s.name == name) return &s;
    }
    AstSignal sig;
    sig.name = name;
    sig.span = span;
    mod.signals.push_back(std::move(sig));
    return &mod.signals.back();
  }

  std::optional<int> foldInt(const Expr& e) const {
    if (e.kind == ExprKind::Number) {
      const std::string& t = e.text;
      std::string digits;
      for (char c : t) {
        if (c == '_') continue;
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        digits += c;
      }
      if (digits.empty() || digits.size() > 9) return std::nullopt;
      return std::stoi(digits);
    }
    if (e.kind == ExprKind::Unary && e.operands.size() == 1) {
      std::optional<int> v = foldInt(e.operands[0]);
      if (!v) return std::nullopt;
      if (e.text == "-") return -*v;
      if (e.text == "+") return *v;
    }
    return std::nullopt;
  }

  // "[msb:lsb]". Returns the raw source slice and, when both bounds fold to
  // plain integers, the numeric pair.
  void parseRange(std::optional<std::pair<int, int>>& width,
                  std::string& raw_width) {
    Token lb = expectPunct("[");
    Expr msb = parseExpr();
    expectPunct(":");
    Expr lsb = parseExpr();
    Token rb = expectPunct("]");
    raw_width = std::string(
        text_.substr(lb.byte_offset, tokenEnd(rb) - lb.byte_offset));
    std::optional<int> m = foldInt(msb);
    std::optional<int> l = foldInt(lsb);
    if (m && l) width = std::make_pair(*m, *l);
  }

  struct DeclHead {
    Direction dir = Direction::Internal;
    NetKind kind = NetKind::Wire;
    bool saw_kind = false;
    std::optional<std::pair<int, int>> width;
    std::string raw_width;
  };

  // direction [wire|reg] [signed] [range] — the direction keyword is at cur().
  DeclHead parseDeclHead() {
    DeclHead h;
    h.dir = cur().text == "input"    ? Direction::Input
            : cur().text == "output" ? Direction::Output
                                     : Direction::Inout;
    bump();
    if (eatKeyword("wire")) {
    } else if (eatKeyword("reg")) {
      h.kind = NetKind::Reg;
      h.saw_kind = true;
    }
    eatKeyword("signed");
    if (atPunct("[")) parseRange(h.width, h.raw_width);
    return h;
  }

  AstSignal* applyDeclHead(AstModule& mod, const DeclHead& h,
                           const Token& name_tok) {
    std::string name = identName(name_tok);
    AstSignal* sig = findOrAddSignal(mod, name, tokenSpan(name_tok));
    sig->direction = h.dir;
    if (h.saw_kind) sig->net_kind = h.kind;
    if (h.width) sig->width = h.width;
    if (!h.raw_width.empty()) sig->raw_width = h.raw_width;
    sig->span = tokenSpan(name_tok);
    return sig;
  }

  // Body-form input/output/inout declaration.
  void parseDirectionDecl(AstModule& mod, std::vector<Diagnostic>& diags) {
    DeclHead h = parseDeclHead();
    while (true) {
      Token name_tok = expectIdent();
      applyDeclHead(mod, h, name_tok);
      if (atPunct("=")) {  // declaration initializer: parsed and dropped
        bump();
        parseExpr();
        diags.push_back({file_, name_tok.line, "decl-init-ignored",
                         "initializer on declaration of '" +
                             identName(name_tok) + "' ignored"});
      }
      if (eatPunct(",")) continue;
      expectPunct(";");
      return;
    }
  }

  void parseNetDecl(AstModule& mod, std::vector<Diagnostic>& diags) {
    Token kind_tok = cur();
    bump();
    NetKind kind = kind_tok.text == "reg" ? NetKind::Reg : NetKind::Wire;
    eatKeyword("signed");
    std::optional<std::pair<int, int>> width;
    std::string raw_width;
    if (atPunct("[")) parseRange(width, raw_width);

    while (true) {
      Token name_tok = expectIdent();
      std::string name = identName(name_tok);
      AstSignal* sig = findOrAddSignal(mod, name, tokenSpan(name_tok));
      sig->net_kind = kind;
      if (width) sig->width = width;
      if (!raw_width.empty()) sig->raw_width = raw_width;
      if (sig->direction == Direction::Internal) sig->span = tokenSpan(name_tok);
      if (atPunct("[")) {  // memory dimension: parsed and dropped
        std::optional<std::pair<int, int>> mem_width;
        std::string mem_raw;
        parseRange(mem_width, mem_raw);
        diags.push_back({file_, name_tok.line, "memory-dim-ignored",
                         "array dimension on '" + name + "' ignored"});
      }
      if (atPunct("=")) {
        bump();
        parseExpr();
        diags.push_back({file_, name_tok.line, "decl-init-ignored",
                         "initializer on declaration of '" + name + "' ignored"});
      }
      if (eatPunct(",")) continue;
      expectPunct(";");
      return;
    }
  }

  void parseParamDecl(AstModule& mod, bool in_header) {
    bump();  // parameter | localparam
    std::optional<std::pair<int, int>> width;
    std::string raw_width;
    auto parseHead = [&] {
      eatKeyword("signed");
      eatKeyword("integer");
      width.reset();
      raw_width.clear();
      if (atPunct("[")) parseRange(width, raw_width);
    };
    parseHead();
    while (true) {
      Token name_tok = expectIdent();
      std::string name = identName(name_tok);
      AstSignal* sig = findOrAddSignal(mod, name, tokenSpan(name_tok));
      sig->net_kind = NetKind::Parameter;
      if (width) sig->width = width;
      if (!raw_width.empty()) sig->raw_width = raw_width;
      expectPunct("=");
      parseExpr();  // parameter values are not evaluated
      if (eatPunct(",")) {
        // Header lists may restate `parameter` per entry.
        if (in_header && eatKeyword("parameter")) parseHead();
        continue;
      }
      if (in_header) return;
      expectPunct(";");
      return;
    }
  }

  // ── Modules ───────────────────────────────────────────────────────────

  AstModule parseModule() {
    Token module_tok = expectKeyword("module");
    AstModule mod;
    Token name_tok = expectIdent();
    mod.name = identName(name_tok);

    if (atPunct("#")) {
      bump();
      expectPunct("(");
      if (!atPunct(")")) {
        if (!atKeyword("parameter")) fail({"parameter"});
        parseParamDecl(mod, /*in_header=*/true);
      }
      expectPunct(")");
    }
    if (atPunct("(")) {
      bump();
      if (!atPunct(")")) parsePortList(mod);
      expectPunct(")");
    }
    expectPunct(";");

    while (!atKeyword("endmodule")) {
      if (at(TokKind::Eof)) {
        throw Error(Errc::UnterminatedModule,
                    file_ + ": module '" + mod.name +
                        "' has no endmodule before end of file");
      }
      parseModuleItem(mod);
    }
    Token end_tok = expectKeyword("endmodule");
    mod.span = spanFrom(module_tok, end_tok);

    for (AstBlock& b : mod.blocks) {
      b.referenced_signals = collect_referenced_signals(b);
    }
    return mod;
  }

  bool atDirectionKeyword() const {
    return atKeyword("input") || atKeyword("output") || atKeyword("inout");
  }

  void parsePortList(AstModule& mod) {
    // ANSI style when the first entry starts with a direction keyword;
    // otherwise a 1995 name list. In ANSI lists the direction/kind/width
    // head is sticky across commas until restated.
    if (atDirectionKeyword()) {
      DeclHead head = parseDeclHead();
      while (true) {
        Token name_tok = expectIdent();
        applyDeclHead(mod, head, name_tok);
        mod.ports.push_back(identName(name_tok));
        if (eatPunct(",")) {
          if (atDirectionKeyword()) head = parseDeclHead();
          continue;
        }
        return;
      }
    }
    while (true) {
      Token name_tok = expectIdent();
      std::string name = identName(name_tok);
      mod.ports.push_back(name);
      findOrAddSignal(mod, name, tokenSpan(name_tok));
      if (eatPunct(",")) continue;
      return;
    }
  }

  void parseModuleItem(AstModule& mod) {
    if (atPunct(";")) {  // stray semicolon
      bump();
      return;
    }
    if (atDirectionKeyword()) {
      parseDirectionDecl(mod, diags_);
      return;
    }
    if (atKeyword("wire") || atKeyword("reg")) {
      parseNetDecl(mod, diags_);
      return;
    }
    if (atKeyword("parameter") || atKeyword("localparam")) {
      parseParamDecl(mod, /*in_header=*/false);
      return;
    }
    if (atKeyword("assign")) {
      parseAssignBlock(mod);
      return;
    }
    if (atKeyword("always")) {
      parseAlwaysBlock(mod);
      return;
    }
    if (atKeyword("initial")) {
      parseInitialBlock(mod);
      return;
    }
    if (atKeyword("generate") || atKeyword("function") || atKeyword("task") ||
        atKeyword("genvar") || atKeyword("integer")) {
      fail({"assign", "always", "initial", "declaration", "instance"});
    }
    if (atIdent()) {
      parseInstance(mod);
      return;
    }
    fail({"assign", "always", "initial", "declaration", "instance",
          "endmodule"});
  }

  void parseAssignBlock(AstModule& mod) {
    Token start = expectKeyword("assign");
    AstBlock block;
    block.kind = BlockKind::Assign;
    Stmt stmt;
    stmt.kind = StmtKind::Assign;
    stmt.lhs = parseLvalue();
    expectPunct("=");
    stmt.rhs = parseExpr();
    Token end = expectPunct(";");
    block.statements.push_back(std::move(stmt));
    block.span = spanFrom(start, end);
    mod.blocks.push_back(std::move(block));
  }

  void parseAlwaysBlock(AstModule& mod) {
    Token start = expectKeyword("always");
    AstBlock block;
    block.kind = BlockKind::Always;
    expectPunct("@");
    if (atPunct("*")) {
      bump();
      block.sensitivity.push_back({SensItem::Edge::Star, ""});
    } else {
      expectPunct("(");
      if (atPunct("*")) {
        bump();
        block.sensitivity.push_back({SensItem::Edge::Star, ""});
      } else {
        while (true) {
          SensItem item;
          if (eatKeyword("posedge")) {
            item.edge = SensItem::Edge::Posedge;
          } else if (eatKeyword("negedge")) {
            item.edge = SensItem::Edge::Negedge;
          }
          item.signal = identName(expectIdent());
          block.sensitivity.push_back(std::move(item));
          if (eatKeyword("or") || eatPunct(",")) continue;
          break;
        }
      }
      expectPunct(")");
    }
    block.statements.push_back(parseStatement());
    block.span = spanFrom(start, prev());
    if (block.statements.size() == 1 &&
        block.statements[0].kind == StmtKind::Seq) {
      // Flatten a single top-level begin/end; its label names the block.
      Stmt seq = std::move(block.statements[0]);
      block.label = seq_label_;
      block.statements = std::move(seq.body);
    }
    mod.blocks.push_back(std::move(block));
  }

  void parseInitialBlock(AstModule& mod) {
    Token start = expectKeyword("initial");
    AstBlock block;
    block.kind = BlockKind::Initial;
    block.statements.push_back(parseStatement());
    block.span = spanFrom(start, prev());
    if (block.statements.size() == 1 &&
        block.statements[0].kind == StmtKind::Seq) {
      Stmt seq = std::move(block.statements[0]);
      block.label = seq_label_;
      block.statements = std::move(seq.body);
    }
    mod.blocks.push_back(std::move(block));
  }

  void parseInstance(AstModule& mod) {
    Token type_tok = expectIdent();
    AstBlock block;
    block.kind = BlockKind::Instance;
    block.instance_of = identName(type_tok);
    if (atPunct("#")) {  // parameter overrides: parsed and dropped
      bump();
      expectPunct("(");
      if (!atPunct(")")) {
        while (true) {
          if (atPunct(".")) {
            bump();
            expectIdent();
            expectPunct("(");
            if (!atPunct(")")) parseExpr();
            expectPunct(")");
          } else {
            parseExpr();
          }
          if (eatPunct(",")) continue;
          break;
        }
      }
      expectPunct(")");
    }
    Token name_tok = expectIdent();
    block.instance_name = identName(name_tok);
    block.label = block.instance_name;
    expectPunct("(");
    if (!atPunct(")")) {
      while (true) {
        PortConnection pc;
        if (atPunct(".")) {
          bump();
          pc.port = identName(expectIdent());
          expectPunct("(");
          if (!atPunct(")")) pc.expr = parseExpr();
          expectPunct(")");
        } else {
          pc.expr = parseExpr();
        }
        block.port_connections.push_back(std::move(pc));
        if (eatPunct(",")) continue;
        break;
      }
    }
    expectPunct(")");
    Token end = expectPunct(";");
    block.span = spanFrom(type_tok, end);
    mod.blocks.push_back(std::move(block));
  }

  // ── Statements ────────────────────────────────────────────────────────

  Stmt parseStatement() {
    if (atKeyword("begin")) return parseSeq();
    if (atKeyword("if")) return parseIf();
    if (atKeyword("case") || atKeyword("casez") || atKeyword("casex")) {
      return parseCase();
    }
    if (atPunct(";")) {
      bump();
      Stmt s;
      s.kind = StmtKind::Null;
      return s;
    }
    if (atKeyword("for") || atKeyword("while") || atKeyword("forever") ||
        atKeyword("repeat") || atKeyword("wait") || atKeyword("fork") ||
        atPunct("#") || atPunct("@") || atPunct("$")) {
      fail({"begin", "if", "case", "assignment"});
    }
    // Procedural assignment.
    Stmt s;
    s.kind = StmtKind::Assign;
    s.lhs = parseLvalue();
    if (eatPunct("<=")) {
      s.non_blocking = true;
    } else {
      expectPunct("=");
    }
    s.rhs = parseExpr();
    expectPunct(";");
    return s;
  }

  // Label of the most recently parsed begin/end, for block naming.
  std::string seq_label_;

  Stmt parseSeq() {
    expectKeyword("begin");
    std::string label;
    if (atPunct(":")) {
      bump();
      label = identName(expectIdent());
    }
    Stmt s;
    s.kind = StmtKind::Seq;
    while (!atKeyword("end")) {
      if (at(TokKind::Eof)) fail({"end"});
      s.body.push_back(parseStatement());
    }
    expectKeyword("end");
    seq_label_ = label;
    return s;
  }

  Stmt parseIf() {
    expectKeyword("if");
    Stmt s;
    s.kind = StmtKind::If;
    expectPunct("(");
    s.cond = parseExpr();
    expectPunct(")");
    s.body.push_back(parseStatement());
    if (eatKeyword("else")) {
      s.has_else = true;
      s.else_body.push_back(parseStatement());
    }
    return s;
  }

  Stmt parseCase() {
    bump();  // case | casez | casex
    Stmt s;
    s.kind = StmtKind::Case;
    expectPunct("(");
    s.cond = parseExpr();
    expectPunct(")");
    while (!atKeyword("endcase")) {
      if (at(TokKind::Eof)) fail({"endcase"});
      Stmt::Arm arm;
      if (eatKeyword("default")) {
        arm.is_default = true;
        eatPunct(":");
      } else {
        while (true) {
          arm.labels.push_back(parseExpr());
          if (eatPunct(",")) continue;
          break;
        }
        expectPunct(":");
      }
      arm.body.push_back(parseStatement());
      s.arms.push_back(std::move(arm));
    }
    expectKeyword("endcase");
    return s;
  }

  // ── Expressions ───────────────────────────────────────────────────────

  Expr parseLvalue() {
    if (atPunct("{")) return parseConcat();
    Token name_tok = expectIdent();
    Expr e;
    e.kind = ExprKind::Identifier;
    e.text = identName(name_tok);
    return parseSelects(std::move(e));
  }

  Expr parseSelects(Expr base) {
    while (atPunct("[")) {
      bump();
      Expr first = parseExpr();
      Expr sel;
      sel.kind = ExprKind::Select;
      if (eatPunct(":")) {
        sel.text = "[:]";
        Expr second = parseExpr();
        sel.operands = {std::move(base), std::move(first), std::move(second)};
      } else if (eatPunct("+:")) {
        sel.text = "[+:]";
        Expr second = parseExpr();
        sel.operands = {std::move(base), std::move(first), std::move(second)};
      } else if (eatPunct("-:")) {
        sel.text = "[-:]";
        Expr second = parseExpr();
        sel.operands = {std::move(base), std::move(first), std::move(second)};
      } else {
        sel.text = "[]";
        sel.operands = {std::move(base), std::move(first)};
      }
      expectPunct("]");
      base = std::move(sel);
    }
    return base;
  }

  Expr parseConcat() {
    expectPunct("{");
    Expr first = parseExpr();
    if (atPunct("{")) {
      // {count{value, ...}} replication
      Expr rep;
      rep.kind = ExprKind::Replicate;
      rep.operands.push_back(std::move(first));
      bump();
      Expr value;
      value.kind = ExprKind::Concat;
      while (true) {
        value.operands.push_back(parseExpr());
        if (eatPunct(",")) continue;
        break;
      }
      expectPunct("}");
      if (value.operands.size() == 1) {
        rep.operands.push_back(std::move(value.operands[0]));
      } else {
        rep.operands.push_back(std::move(value));
      }
      expectPunct("}");
      return rep;
    }
    Expr e;
    e.kind = ExprKind::Concat;
    e.operands.push_back(std::move(first));
    while (eatPunct(",")) e.operands.push_back(parseExpr());
    expectPunct("}");
    return e;
  }

  Expr parsePrimary() {
    if (atPunct("(")) {
      bump();
      Expr e = parseExpr();
      expectPunct(")");
      return parseSelects(std::move(e));
    }
    if (atPunct("{")) return parseConcat();
    if (at(TokKind::Number)) {
      Expr e;
      e.kind = ExprKind::Number;
      e.text = cur().text;
      bump();
      return e;
    }
    if (at(TokKind::String)) {
      Expr e;
      e.kind = ExprKind::String;
      e.text = cur().text;
      bump();
      return e;
    }
    if (at(TokKind::Punct) && isUnaryOp(cur().text)) {
      Expr e;
      e.kind = ExprKind::Unary;
      e.text = cur().text;
      bump();
      e.operands.push_back(parseUnaryOperand());
      return e;
    }
    if (atIdent()) {
      Token name_tok = expectIdent();
      Expr e;
      e.kind = ExprKind::Identifier;
      e.text = identName(name_tok);
      return parseSelects(std::move(e));
    }
    fail({"expression"});
  }

  // Unary operators bind tighter than ** per the standard; operand is a
  // primary (possibly itself unary).
  Expr parseUnaryOperand() { return parsePrimary(); }

  Expr parseBinary(int min_prec) {
    Expr lhs = parsePrimary();
    while (true) {
      if (!at(TokKind::Punct)) return lhs;
      int prec = binaryPrec(cur().text);
      if (prec == 0 || prec < min_prec) return lhs;
      std::string op = cur().text;
      bump();
      // ** is right-associative; everything else left.
      Expr rhs = parseBinary(op == "**" ? prec : prec + 1);
      Expr e;
      e.kind = ExprKind::Binary;
      e.text = op;
      e.operands = {std::move(lhs), std::move(rhs)};
      lhs = std::move(e);
    }
  }

  Expr parseExpr() {
    Expr cond = parseBinary(1);
    if (!atPunct("?")) return cond;
    bump();
    Expr then_val = parseExpr();
    expectPunct(":");
    Expr else_val = parseExpr();
    Expr e;
    e.kind = ExprKind::Ternary;
    e.operands = {std::move(cond), std::move(then_val), std::move(else_val)};
    return e;
  }

 public:
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<AstModule> parse_file(std::string_view text,
                                  const std::string& file_path,
                                  std::vector<Diagnostic>& diagnostics) {
  std::string stripped = preprocess(text, file_path, diagnostics);
  std::vector<Token> tokens = lex(stripped, file_path);
  Parser p(text, tokens, file_path);
  std::vector<AstModule> modules = p.parseAll();
  diagnostics.insert(diagnostics.end(), p.diags_.begin(), p.diags_.end());
  return modules;
}

std::vector<AstModule> parse_file(std::string_view text,
                                  const std::string& file_path) {
  std::vector<Diagnostic> diags;
  return parse_file(text, file_path, diags);
}

}  // namespace hdlg
