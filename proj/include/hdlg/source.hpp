#pragma once

#include <string>
#include <tuple>

namespace hdlg {

// Byte range in one source file. byte_end is exclusive; lines are 1-based.
// Slicing the original file bytes with [byte_start, byte_end) reproduces the
// exact text of the entity the span belongs to.
struct SourceSpan {
  std::string file_path;
  size_t byte_start = 0;
  size_t byte_end = 0;
  int line_start = 1;
  int line_end = 1;

  size_t length() const { return byte_end - byte_start; }

  friend bool operator==(const SourceSpan& a, const SourceSpan& b) = default;
};

// Structured warning record. Warnings go on a diagnostics channel, never
// interleaved with results.
struct Diagnostic {
  std::string file;
  int line = 0;
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic& a, const Diagnostic& b) = default;
  friend bool operator<(const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.file, a.line, a.code, a.message) <
           std::tie(b.file, b.line, b.code, b.message);
  }
};

}  // namespace hdlg
