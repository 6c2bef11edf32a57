#pragma once

// Shared test fixtures: cached groups, random words, synthetic samples.

#include <random>
#include <vector>

#include "conewalk/automaton.hpp"
#include "conewalk/bfs_oracle.hpp"
#include "conewalk/rng.hpp"

namespace conewalk::testing {

struct GroupFixture {
    Presentation presentation;
    RewriteSystem rewrite;
    ConeAutomaton automaton;

    explicit GroupFixture(Presentation p)
        : presentation(p), rewrite(presentation), automaton(build_automaton(rewrite)) {
        recurrence_classify(automaton);
        mark_large(automaton);
    }
};

inline const GroupFixture& genus2() {
    static GroupFixture f(Presentation::surface(2));
    return f;
}

inline const GroupFixture& free2() {
    static GroupFixture f(Presentation::free_group(2));
    return f;
}

inline Word random_freely_reduced(std::mt19937_64& rng, int alphabet, std::size_t length) {
    Word w;
    while (w.size() < length) {
        const Letter x{static_cast<std::uint8_t>(rng() % alphabet)};
        if (!w.empty() && w.back() == x.inverse()) continue;
        w.push_back(x);
    }
    return w;
}

inline Word random_word(std::mt19937_64& rng, int alphabet, std::size_t length) {
    Word w;
    for (std::size_t i = 0; i < length; ++i)
        w.push_back(Letter{static_cast<std::uint8_t>(rng() % alphabet)});
    return w;
}

// Geometric sample on {1, 2, ...} with P(X > n) = ratio^n.
inline std::vector<std::uint32_t> geometric_sample(double ratio, std::size_t n,
                                                   std::uint64_t seed) {
    std::vector<std::uint32_t> out;
    auto rng = make_engine(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t v = 1;
        while (uniform_unit(rng) < ratio) ++v;
        out.push_back(v);
    }
    return out;
}

// Pareto-ish heavy tail: ceil(U^{-1/alpha}).
inline std::vector<std::uint32_t> pareto_sample(double alpha, std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> out;
    auto rng = make_engine(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::max(uniform_unit(rng), 1e-12);
        out.push_back(static_cast<std::uint32_t>(std::ceil(std::pow(u, -1.0 / alpha))));
    }
    return out;
}

inline std::vector<double> standard_normal_sample(std::size_t n, std::uint64_t seed) {
    std::vector<double> out;
    auto rng = make_engine(seed, 0);
    while (out.size() < n) {
        const double u1 = std::max(uniform_unit(rng), 1e-300);
        const double u2 = uniform_unit(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        out.push_back(r * std::cos(2.0 * M_PI * u2));
        if (out.size() < n) out.push_back(r * std::sin(2.0 * M_PI * u2));
    }
    return out;
}

} // namespace conewalk::testing
