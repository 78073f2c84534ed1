#include "fixpat/textdiff.hpp"

#include <algorithm>
#include <sstream>

namespace fixpat {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::vector<std::string> nonblank_lines(const std::string& text) {
  std::vector<std::string> out;
  for (const std::string& line : split_lines(text)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      out.push_back(line);
  }
  return out;
}

bool equal_ignoring_blank_lines(const std::string& a, const std::string& b) {
  return nonblank_lines(a) == nonblank_lines(b);
}

ChangeRegion change_region(const std::string& before,
                           const std::string& after) {
  std::vector<std::string> a = split_lines(before);
  std::vector<std::string> b = split_lines(after);
  size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix])
    ++prefix;
  size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
    ++suffix;
  ChangeRegion r;
  r.prefix_len = static_cast<int>(prefix);
  r.old_len = static_cast<int>(a.size() - prefix - suffix);
  r.new_len = static_cast<int>(b.size() - prefix - suffix);
  return r;
}

std::string render_unified_diff(const std::string& before,
                                const std::string& after,
                                const std::string& path) {
  ChangeRegion r = change_region(before, after);
  std::ostringstream os;
  os << "--- a/" << path << "\n+++ b/" << path << "\n";
  if (r.empty()) return os.str();
  std::vector<std::string> a = split_lines(before);
  std::vector<std::string> b = split_lines(after);
  const int ctx = 3;
  int ctx_before = std::min(ctx, r.prefix_len);
  int a_tail = static_cast<int>(a.size()) - r.prefix_len - r.old_len;
  int ctx_after = std::min(ctx, a_tail);
  int old_start = r.prefix_len - ctx_before;
  int old_count = ctx_before + r.old_len + ctx_after;
  int new_count = ctx_before + r.new_len + ctx_after;
  os << "@@ -" << (old_count == 0 ? old_start : old_start + 1) << ","
     << old_count << " +" << (new_count == 0 ? old_start : old_start + 1)
     << "," << new_count << " @@\n";
  for (int i = old_start; i < r.prefix_len; ++i) os << " " << a[i] << "\n";
  for (int i = 0; i < r.old_len; ++i) os << "-" << a[r.prefix_len + i] << "\n";
  for (int i = 0; i < r.new_len; ++i) os << "+" << b[r.prefix_len + i] << "\n";
  for (int i = 0; i < ctx_after; ++i)
    os << " " << a[r.prefix_len + r.old_len + i] << "\n";
  return os.str();
}

}  // namespace fixpat
