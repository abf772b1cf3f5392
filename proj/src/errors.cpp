#include "hdlg/errors.hpp"

namespace hdlg {
namespace {

std::string formatSyntaxError(const std::string& file, int line, int column,
                              const std::string& found,
                              const std::vector<std::string>& expected) {
  std::string msg = file + ":" + std::to_string(line) + ":" +
                    std::to_string(column) + ": unexpected '" + found + "'";
  if (!expected.empty()) {
    msg += ", expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
  }
  return msg;
}

}  // namespace

const char* errcName(Errc code) {
  switch (code) {
    case Errc::Syntax: return "syntax";
    case Errc::UnterminatedModule: return "unterminated-module";
    case Errc::Io: return "io";
    case Errc::UnknownNode: return "unknown-node";
    case Errc::WrongKind: return "wrong-kind";
    case Errc::Format: return "format";
    case Errc::Version: return "version";
    case Errc::DimensionMismatch: return "dimension-mismatch";
    case Errc::Transport: return "transport";
    case Errc::Protocol: return "protocol";
    case Errc::EmptyQuery: return "empty-query";
    case Errc::EmptyDatabase: return "empty-database";
    case Errc::UnknownLevelQuery: return "unknown-level-query";
    case Errc::EmptySeed: return "empty-seed";
    case Errc::UnparsableFragment: return "unparsable-fragment";
    case Errc::Provider: return "provider";
    case Errc::EmptyGeneration: return "empty-generation";
    case Errc::Domain: return "domain";
    case Errc::EmptyInput: return "empty-input";
    case Errc::UnknownBenchmarkNode: return "unknown-benchmark-node";
  }
  return "unknown";
}

SyntaxError::SyntaxError(std::string file, int line, int column,
                         size_t byteOffset, std::string found,
                         std::vector<std::string> expected)
    : Error(Errc::Syntax,
            formatSyntaxError(file, line, column, found, expected)),
      file_(std::move(file)),
      line_(line),
      column_(column),
      byteOffset_(byteOffset),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

}  // namespace hdlg
