#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "conewalk/rewrite.hpp"

namespace conewalk {

// Exhaustive ball of the Cayley graph, the exact oracle every other module is
// validated against. Vertices are keyed by their normal-form letters;
// distances come from the breadth-first layering, not from word lengths, so a
// defective rewriting system shows up as a distance or sphere-count mismatch.
struct BfsBall {
    int radius = 0;
    int alphabet = 0;
    std::vector<Word> elements;            // normal forms, id 0 = identity
    std::vector<std::int32_t> distance;    // BFS layer per id
    std::vector<std::int32_t> adjacency;   // id * alphabet + letter -> id, -1 if outside ball
    std::vector<std::int64_t> sphere_sizes; // index 0..radius
    std::unordered_map<std::string, std::int32_t> index;

    std::int32_t find(const Word& nf) const {
        auto it = index.find(word_key(nf));
        return it == index.end() ? -1 : it->second;
    }
    std::int32_t neighbor(std::int32_t id, Letter s) const {
        return adjacency[static_cast<std::size_t>(id) * alphabet + s.code];
    }
    std::size_t size() const { return elements.size(); }
};

// Throws std::length_error once the ball exceeds `max_elements`.
BfsBall bfs_oracle(const RewriteSystem& rw, int radius, std::size_t max_elements = 8'000'000);

} // namespace conewalk
