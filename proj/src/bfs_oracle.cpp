#include "conewalk/bfs_oracle.hpp"

#include <stdexcept>
#include <string>

namespace conewalk {

BfsBall bfs_oracle(const RewriteSystem& rw, int radius, std::size_t max_elements) {
    BfsBall ball;
    ball.radius = radius;
    ball.alphabet = rw.alphabet_size();

    ball.elements.push_back(Word{});
    ball.distance.push_back(0);
    ball.index.emplace(std::string{}, 0);
    ball.sphere_sizes.assign(static_cast<std::size_t>(radius) + 1, 0);
    ball.sphere_sizes[0] = 1;

    std::size_t head = 0;
    while (head < ball.elements.size()) {
        const std::int32_t id = static_cast<std::int32_t>(head);
        const int d = ball.distance[head];
        const Word current = ball.elements[head]; // copy: elements may reallocate
        ++head;
        if (d == radius) continue; // adjacency of the outermost sphere stays unexplored

        for (int c = 0; c < ball.alphabet; ++c) {
            const Letter s{static_cast<std::uint8_t>(c)};
            NormalForm next = rw.mul(NormalForm{current}, Word{s});
            const std::string key = word_key(next.letters);
            auto it = ball.index.find(key);
            std::int32_t nid;
            if (it != ball.index.end()) {
                nid = it->second;
            } else {
                if (ball.elements.size() >= max_elements)
                    throw std::length_error("bfs_oracle: ball of radius " + std::to_string(radius) +
                                            " exceeds the element budget of " +
                                            std::to_string(max_elements));
                nid = static_cast<std::int32_t>(ball.elements.size());
                ball.elements.push_back(std::move(next.letters));
                ball.distance.push_back(d + 1);
                ball.index.emplace(key, nid);
                ball.sphere_sizes[static_cast<std::size_t>(d) + 1] += 1;
            }
            // adjacency rows are created lazily below
            if (ball.adjacency.size() < ball.elements.size() * static_cast<std::size_t>(ball.alphabet))
                ball.adjacency.resize(ball.elements.size() * static_cast<std::size_t>(ball.alphabet), -1);
            ball.adjacency[static_cast<std::size_t>(id) * ball.alphabet + c] = nid;
            ball.adjacency[static_cast<std::size_t>(nid) * ball.alphabet + s.inverse().code] = id;
        }
    }
    ball.adjacency.resize(ball.elements.size() * static_cast<std::size_t>(ball.alphabet), -1);
    return ball;
}

} // namespace conewalk
