#pragma once

#include <string>
#include <vector>

namespace fixpat {

std::vector<std::string> split_lines(const std::string& text);

// Lines that contain non-whitespace characters, compared exactly otherwise.
std::vector<std::string> nonblank_lines(const std::string& text);

// Equality that neglects empty lines but is otherwise precise.
bool equal_ignoring_blank_lines(const std::string& a, const std::string& b);

// The single contiguous region where two texts differ, as common-prefix /
// changed-line counts. prefix_len is the number of equal leading lines;
// old_len/new_len are the differing line counts on each side.
struct ChangeRegion {
  int prefix_len = 0;
  int old_len = 0;
  int new_len = 0;
  bool empty() const { return old_len == 0 && new_len == 0; }
};

ChangeRegion change_region(const std::string& before, const std::string& after);

// Unified diff with three context lines around the changed region.
std::string render_unified_diff(const std::string& before,
                                const std::string& after,
                                const std::string& path);

}  // namespace fixpat
