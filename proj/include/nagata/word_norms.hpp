#pragma once

#include <cstddef>

#include "nagata/group.hpp"
#include "nagata/norm.hpp"

namespace nagata {

/// Word norm of the standard generating set: the l1 norm on Z^d, and a lazily
/// grown breadth-first table on H3 (capped; queries past the cap are
/// Inconclusive).
NormHandle make_word_norm(const Group& group, std::size_t max_table = 3'000'000);

/// factor * base, a norm whenever factor >= 1.
NormHandle make_scaled_norm(const NormHandle& base, const Integer& factor);

}  // namespace nagata
