#include "hdlg/files.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hdlg/errors.hpp"

namespace fs = std::filesystem;

namespace hdlg {

std::vector<std::string> list_repository_files(const std::string& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec) || ec) {
    throw Error(Errc::Io, "not a readable directory: " + root);
  }
  std::vector<std::string> out;
  fs::recursive_directory_iterator it(root, ec);
  if (ec) throw Error(Errc::Io, root + ": " + ec.message());
  for (fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) throw Error(Errc::Io, root + ": " + ec.message());
    const fs::directory_entry& entry = *it;
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".v") continue;
    std::string rel = fs::relative(entry.path(), root).generic_string();
    out.push_back(std::move(rel));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::Io, "read failed: " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open for write: " + path);
  out << content;
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed: " + path);
}

}  // namespace hdlg
