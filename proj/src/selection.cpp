#include "rmab/selection.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "rmab/errors.hpp"

namespace rmab {

std::vector<std::size_t> top_m_by_score(std::span<const double> scores, std::size_t m,
                                        RngStream& rng) {
  if (m > scores.size()) throw ShapeError("m exceeds the number of scores");
  struct Entry {
    double score;
    std::uint64_t key;
    std::size_t index;
  };
  std::vector<Entry> entries(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) entries[i] = {scores[i], rng.next_u64(), i};
  const auto better = [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.key != b.key) return a.key < b.key;
    return a.index < b.index;
  };
  if (m < entries.size())
    std::nth_element(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(m),
                     entries.end(), better);
  std::vector<std::size_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = entries[i].index;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ActionFlag> top_m_actions(std::span<const double> scores, std::size_t m,
                                      RngStream& rng) {
  std::vector<ActionFlag> actions(scores.size(), ActionFlag::Passive);
  for (std::size_t i : top_m_by_score(scores, m, rng)) actions[i] = ActionFlag::Active;
  return actions;
}

std::vector<ActionFlag> random_actions(std::size_t n, std::size_t m, RngStream& rng) {
  if (m > n) throw ShapeError("m exceeds n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates over the first m slots.
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  std::vector<ActionFlag> actions(n, ActionFlag::Passive);
  for (std::size_t i = 0; i < m; ++i) actions[idx[i]] = ActionFlag::Active;
  return actions;
}

}  // namespace rmab
