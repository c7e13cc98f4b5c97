#pragma once

#include <cstdint>
#include <cstddef>

#include "mvg/types.hpp"

namespace mvg {

// Benchmark population recipes 1..4: n type vectors drawn uniformly from the
// experiment's parameter boxes (one coordinate swept per recipe) with a pinned
// reference agent in slot min(500, n) (index min(499, n-1)). Returns the
// configuration; pin_index receives the reference agent's index.
GameConfig benchmark_population(int figure, std::size_t n, std::uint64_t seed,
                                std::size_t& pin_index);

}  // namespace mvg
