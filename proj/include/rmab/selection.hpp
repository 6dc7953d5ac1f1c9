#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmab/core.hpp"

namespace rmab {

/// Indices of the m largest scores; ties (including at the cut) are broken
/// uniformly at random. Draws one u64 per score.
std::vector<std::size_t> top_m_by_score(std::span<const double> scores, std::size_t m,
                                        RngStream& rng);

/// Same selection expressed as an action vector with exactly m active flags.
std::vector<ActionFlag> top_m_actions(std::span<const double> scores, std::size_t m,
                                      RngStream& rng);

/// m distinct arms chosen uniformly at random.
std::vector<ActionFlag> random_actions(std::size_t n, std::size_t m, RngStream& rng);

}  // namespace rmab
