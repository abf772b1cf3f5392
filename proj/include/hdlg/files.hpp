#pragma once

#include <string>
#include <vector>

namespace hdlg {

// All `.v` files under root, recursively, as root-relative paths with `/`
// separators, sorted lexicographically. Throws Error(Errc::Io) when root is
// missing or unreadable.
std::vector<std::string> list_repository_files(const std::string& root);

// Whole-file read. Throws Error(Errc::Io) on failure.
std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);

}  // namespace hdlg
