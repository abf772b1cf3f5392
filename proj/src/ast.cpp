#include "hdlg/ast.hpp"

namespace hdlg {

const char* directionName(Direction d) {
  switch (d) {
    case Direction::Input: return "input";
    case Direction::Output: return "output";
    case Direction::Inout: return "inout";
    case Direction::Internal: return "internal";
  }
  return "internal";
}

const char* netKindName(NetKind k) {
  switch (k) {
    case NetKind::Wire: return "wire";
    case NetKind::Reg: return "reg";
    case NetKind::Parameter: return "parameter";
  }
  return "wire";
}

const char* blockKindName(BlockKind k) {
  switch (k) {
    case BlockKind::Always: return "always";
    case BlockKind::Assign: return "assign";
    case BlockKind::Initial: return "initial";
    case BlockKind::Instance: return "instance";
  }
  return "assign";
}

const AstSignal* AstModule::findSignal(const std::string& signal_name) const {
  for (const AstSignal& s : signals) {
    if (s.name == signal_name) return &s;
  }
  return nullptr;
}

void collectExprIdentifiers(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Identifier) out.insert(e.text);
  for (const Expr& op : e.operands) collectExprIdentifiers(op, out);
}

namespace {

void collectStmtIdentifiers(const Stmt& s, std::set<std::string>& out) {
  switch (s.kind) {
    case StmtKind::Assign:
      collectExprIdentifiers(s.lhs, out);
      collectExprIdentifiers(s.rhs, out);
      break;
    case StmtKind::If:
      collectExprIdentifiers(s.cond, out);
      for (const Stmt& c : s.body) collectStmtIdentifiers(c, out);
      for (const Stmt& c : s.else_body) collectStmtIdentifiers(c, out);
      break;
    case StmtKind::Case:
      collectExprIdentifiers(s.cond, out);
      for (const Stmt::Arm& arm : s.arms) {
        for (const Expr& l : arm.labels) collectExprIdentifiers(l, out);
        for (const Stmt& c : arm.body) collectStmtIdentifiers(c, out);
      }
      break;
    case StmtKind::Seq:
      for (const Stmt& c : s.body) collectStmtIdentifiers(c, out);
      break;
    case StmtKind::Null:
      break;
  }
}

SourceSpan relativeSpan(const SourceSpan& s, const SourceSpan& base) {
  SourceSpan r;
  r.byte_start = s.byte_start - base.byte_start;
  r.byte_end = s.byte_end - base.byte_start;
  r.line_start = s.line_start - base.line_start + 1;
  r.line_end = s.line_end - base.line_start + 1;
  return r;
}

}  // namespace

std::set<std::string> collect_referenced_signals(const AstBlock& block) {
  std::set<std::string> out;
  for (const SensItem& s : block.sensitivity) {
    if (!s.signal.empty()) out.insert(s.signal);
  }
  for (const Stmt& s : block.statements) collectStmtIdentifiers(s, out);
  for (const PortConnection& pc : block.port_connections) {
    if (pc.expr) collectExprIdentifiers(*pc.expr, out);
  }
  return out;
}

bool structurally_equal(const AstModule& a, const AstModule& b) {
  if (a.name != b.name || a.ports != b.ports) return false;
  if (a.signals.size() != b.signals.size()) return false;
  for (size_t i = 0; i < a.signals.size(); ++i) {
    const AstSignal& x = a.signals[i];
    const AstSignal& y = b.signals[i];
    if (x.name != y.name || x.direction != y.direction ||
        x.net_kind != y.net_kind || x.width != y.width ||
        x.raw_width != y.raw_width) {
      return false;
    }
    if (relativeSpan(x.span, a.span) != relativeSpan(y.span, b.span)) return false;
  }
  if (a.blocks.size() != b.blocks.size()) return false;
  for (size_t i = 0; i < a.blocks.size(); ++i) {
    const AstBlock& x = a.blocks[i];
    const AstBlock& y = b.blocks[i];
    if (x.kind != y.kind || x.label != y.label ||
        x.sensitivity != y.sensitivity || x.statements != y.statements ||
        x.referenced_signals != y.referenced_signals ||
        x.instance_of != y.instance_of || x.instance_name != y.instance_name ||
        x.port_connections != y.port_connections) {
      return false;
    }
    if (relativeSpan(x.span, a.span) != relativeSpan(y.span, b.span)) return false;
  }
  return relativeSpan(a.span, a.span) == relativeSpan(b.span, b.span);
}

}  // namespace hdlg
