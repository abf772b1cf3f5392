#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hdlg {

enum class Errc {
  Syntax,
  UnterminatedModule,
  Io,
  UnknownNode,
  WrongKind,
  Format,
  Version,
  DimensionMismatch,
  Transport,
  Protocol,
  EmptyQuery,
  EmptyDatabase,
  UnknownLevelQuery,
  EmptySeed,
  UnparsableFragment,
  Provider,
  EmptyGeneration,
  Domain,
  EmptyInput,
  UnknownBenchmarkNode,
};

const char* errcName(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

// Parse failure with position info and the token set the parser would have
// accepted at that point.
class SyntaxError : public Error {
public:
  SyntaxError(std::string file, int line, int column, size_t byteOffset,
              std::string found, std::vector<std::string> expected);

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }
  size_t byteOffset() const { return byteOffset_; }
  const std::string& found() const { return found_; }
  const std::vector<std::string>& expected() const { return expected_; }

private:
  std::string file_;
  int line_;
  int column_;
  size_t byteOffset_;
  std::string found_;
  std::vector<std::string> expected_;
};

}  // namespace hdlg
