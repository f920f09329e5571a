#pragma once

#include <algorithm>
#include <vector>

namespace tgm::detail {

// Orders items by descending score. Runs of scores whose neighbours differ by
// at most `eps` count as ties and are ordered by `tie_less` instead.
template <typename T, typename ScoreFn, typename TieLess>
void rank_with_ties(std::vector<T>& items, ScoreFn score, TieLess tie_less, double eps) {
  std::stable_sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    const double sa = score(a);
    const double sb = score(b);
    if (sa != sb) return sa > sb;
    return tie_less(a, b);
  });
  auto begin = items.begin();
  while (begin != items.end()) {
    auto end = begin + 1;
    while (end != items.end() && score(*(end - 1)) - score(*end) <= eps) ++end;
    std::sort(begin, end, tie_less);
    begin = end;
  }
}

}  // namespace tgm::detail
