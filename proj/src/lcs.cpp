#include <algorithm>

#include "storyline/wigglefree.hpp"

namespace storyline {

std::vector<CharIndex> longestCommonSubsequence(std::span<const CharIndex> a, std::span<const CharIndex> b) {
  const std::size_t n = a.size(), m = b.size();
  // L[i][j]: LCS length of a[i..] and b[j..].
  std::vector<std::size_t> L((n + 1) * (m + 1), 0);
  const auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      L[at(i, j)] = a[i] == b[j] ? L[at(i + 1, j + 1)] + 1 : std::max(L[at(i + 1, j)], L[at(i, j + 1)]);

  std::vector<CharIndex> out;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      out.push_back(a[i]);
      ++i;
      ++j;
    } else if (L[at(i, j + 1)] >= L[at(i + 1, j)]) {
      ++j;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace storyline
