#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hdlg/source.hpp"

namespace hdlg {

// Expression tree. One node type with a kind tag, yosys-style.
//   Identifier:  text = name
//   Number:      text = literal as written
//   String:      text = contents without quotes
//   Unary:       text = operator, operands = {arg}
//   Binary:      text = operator, operands = {lhs, rhs}
//   Ternary:     operands = {cond, then, else}
//   Concat:      operands = parts
//   Replicate:   operands = {count, value}
//   Select:      text = "[]" | "[:]" | "[+:]" | "[-:]",
//                operands = {base, index...}
enum class ExprKind {
  Identifier,
  Number,
  String,
  Unary,
  Binary,
  Ternary,
  Concat,
  Replicate,
  Select,
};

struct Expr {
  ExprKind kind = ExprKind::Number;
  std::string text;
  std::vector<Expr> operands;

  bool isIdentifier() const { return kind == ExprKind::Identifier; }
  friend bool operator==(const Expr&, const Expr&) = default;
};

// Statement tree for always/initial/assign bodies.
enum class StmtKind { Assign, If, Case, Seq, Null };

struct Stmt {
  StmtKind kind = StmtKind::Null;

  // Assign
  Expr lhs;
  Expr rhs;
  bool non_blocking = false;

  // If (cond) / Case (subject)
  Expr cond;
  std::vector<Stmt> body;       // then-arm, or Seq contents
  std::vector<Stmt> else_body;  // else-arm
  bool has_else = false;

  // Case
  struct Arm {
    std::vector<Expr> labels;  // empty for default
    bool is_default = false;
    std::vector<Stmt> body;
    friend bool operator==(const Arm&, const Arm&) = default;
  };
  std::vector<Arm> arms;

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

enum class Direction { Input, Output, Inout, Internal };
enum class NetKind { Wire, Reg, Parameter };

const char* directionName(Direction d);
const char* netKindName(NetKind k);

struct AstSignal {
  std::string name;
  Direction direction = Direction::Internal;
  NetKind net_kind = NetKind::Wire;
  // Present only when both bounds are plain integers. Parameterized widths
  // keep the raw text and leave width absent.
  std::optional<std::pair<int, int>> width;
  std::string raw_width;
  SourceSpan span;
};

enum class BlockKind { Always, Assign, Initial, Instance };

const char* blockKindName(BlockKind k);  // "always" / "assign" / ...

struct SensItem {
  enum class Edge { Posedge, Negedge, Level, Star };
  Edge edge = Edge::Level;
  std::string signal;  // empty for Star
  friend bool operator==(const SensItem&, const SensItem&) = default;
};

struct PortConnection {
  std::string port;          // empty for positional connections
  std::optional<Expr> expr;  // absent for .p() with empty parentheses
  friend bool operator==(const PortConnection&, const PortConnection&) = default;
};

struct AstBlock {
  BlockKind kind = BlockKind::Assign;
  std::string label;
  SourceSpan span;
  std::vector<SensItem> sensitivity;  // Always only
  std::vector<Stmt> statements;
  // Identifiers in expression position anywhere in the block body, plus the
  // sensitivity list. For instances: identifiers in connection expressions
  // (module, instance, and port names excluded). collect_referenced_signals
  // re-derives this set from the statement tree.
  std::set<std::string> referenced_signals;

  // Instance only
  std::string instance_of;
  std::string instance_name;
  std::vector<PortConnection> port_connections;
};

struct AstModule {
  std::string name;
  std::vector<std::string> ports;  // names in header order; each resolves
                                   // to exactly one entry of signals
  std::vector<AstSignal> signals;
  std::vector<AstBlock> blocks;
  SourceSpan span;

  const AstSignal* findSignal(const std::string& name) const;
};

void collectExprIdentifiers(const Expr& e, std::set<std::string>& out);
std::set<std::string> collect_referenced_signals(const AstBlock& block);

// Structural equality ignoring file paths and absolute byte offsets (span
// positions are compared relative to the module start, so a module re-parsed
// from its own span slice compares equal to the original).
bool structurally_equal(const AstModule& a, const AstModule& b);

}  // namespace hdlg
