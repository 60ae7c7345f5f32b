#pragma once

#include <cstddef>
#include <string>

namespace acceptance {

struct FixtureInfo {
    std::size_t rows = 0;
    std::size_t self_loop_rows = 0;
    std::size_t unique_edges = 0;
    std::size_t nodes = 0;
};

// Writes a deterministic protein-interaction-shaped edge list: a large
// duplication-grown graph trimmed/padded to exactly 52,068 distinct edges,
// emitted in shuffled row order with 480 self-loop rows mixed in
// (52,548 rows total).
FixtureInfo write_interactome_fixture(const std::string& path);

}  // namespace acceptance
