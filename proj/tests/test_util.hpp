#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace predrl::testing {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal XML well-formedness: balanced, properly nested element tags.
inline bool well_formed_xml(const std::string& doc) {
  std::vector<std::string> open;
  std::size_t i = 0;
  bool saw_root = false;
  while ((i = doc.find('<', i)) != std::string::npos) {
    const auto j = doc.find('>', i);
    if (j == std::string::npos) return false;
    std::string tag = doc.substr(i + 1, j - i - 1);
    i = j + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (open.empty() || open.back() != tag.substr(1)) return false;
      open.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (open.empty() && saw_root) return false;
    saw_root = true;
    if (!self_closing) open.push_back(name);
  }
  return saw_root && open.empty();
}

}  // namespace predrl::testing
