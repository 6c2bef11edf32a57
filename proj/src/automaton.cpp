#include "conewalk/automaton.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace conewalk {

std::size_t ConeAutomaton::recurrent_count() const {
    std::size_t n = 0;
    for (const auto& s : states)
        if (s.recurrent) ++n;
    return n;
}

ConeAutomaton build_automaton(const RewriteSystem& rw) {
    ConeAutomaton a;
    a.alphabet = rw.alphabet_size();
    a.signature_length = rw.signature_length();
    const std::size_t sig_len = static_cast<std::size_t>(rw.signature_length());

    a.states.push_back(AutomatonState{Word{}});
    a.state_index.emplace(std::string{}, 0);
    a.transitions.assign(static_cast<std::size_t>(a.alphabet), -1);

    std::queue<std::int32_t> queue;
    queue.push(0);
    Word extended;
    while (!queue.empty()) {
        const std::int32_t id = queue.front();
        queue.pop();
        const Word signature = a.states[id].signature; // copy: states may reallocate
        for (int c = 0; c < a.alphabet; ++c) {
            const Letter s{static_cast<std::uint8_t>(c)};
            if (!rw.extension_allowed(signature, s)) continue;
            extended = signature;
            extended.push_back(s);
            if (extended.size() > sig_len) extended.erase(extended.begin());
            const std::string key = word_key(extended);
            auto it = a.state_index.find(key);
            std::int32_t nid;
            if (it != a.state_index.end()) {
                nid = it->second;
            } else {
                nid = static_cast<std::int32_t>(a.states.size());
                a.states.push_back(AutomatonState{extended});
                a.state_index.emplace(key, nid);
                a.transitions.resize(a.states.size() * static_cast<std::size_t>(a.alphabet), -1);
                queue.push(nid);
            }
            a.transitions[static_cast<std::size_t>(id) * a.alphabet + c] = nid;
        }
    }
    return a;
}

std::int32_t state_of(const NormalForm& x, const ConeAutomaton& a) {
    std::int32_t state = a.start;
    for (Letter l : x.letters) {
        state = a.transition(state, l);
        if (state < 0)
            throw std::logic_error("state_of: word is not accepted by the automaton: " +
                                   format_word(x.letters));
    }
    return state;
}

std::int32_t state_by_signature(const ConeAutomaton& a, const Word& normal_letters) {
    const std::size_t len =
        std::min(normal_letters.size(), static_cast<std::size_t>(a.signature_length));
    std::string key;
    key.resize(len);
    const std::size_t offset = normal_letters.size() - len;
    for (std::size_t i = 0; i < len; ++i)
        key[i] = static_cast<char>(normal_letters[offset + i].code);
    auto it = a.state_index.find(key);
    if (it == a.state_index.end())
        throw std::logic_error("state_by_signature: no state for suffix of " +
                               format_word(normal_letters));
    return it->second;
}

bool in_cone(const NormalForm& root, const NormalForm& y) {
    return is_prefix(root.letters, y.letters);
}

namespace {

// Iterative Tarjan; the automaton can have millions of states for larger
// genus, so no recursion.
struct TarjanScc {
    const ConeAutomaton& a;
    std::vector<std::int32_t> index, lowlink, component;
    std::vector<bool> on_stack;
    std::vector<std::int32_t> stack;
    std::int32_t next_index = 0, components = 0;

    explicit TarjanScc(const ConeAutomaton& automaton)
        : a(automaton),
          index(automaton.states.size(), -1),
          lowlink(automaton.states.size(), 0),
          component(automaton.states.size(), -1),
          on_stack(automaton.states.size(), false) {}

    void run() {
        for (std::size_t v = 0; v < a.states.size(); ++v)
            if (index[v] < 0) visit(static_cast<std::int32_t>(v));
    }

    void visit(std::int32_t root) {
        struct Frame {
            std::int32_t v;
            int edge;
        };
        std::vector<Frame> frames{{root, 0}};
        while (!frames.empty()) {
            auto& [v, edge] = frames.back();
            if (edge == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (edge < a.alphabet) {
                const std::int32_t w = a.transitions[static_cast<std::size_t>(v) * a.alphabet + edge];
                ++edge;
                if (w < 0) continue;
                if (index[w] < 0) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                while (true) {
                    const std::int32_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component[w] = components;
                    if (w == v) break;
                }
                ++components;
            }
            const std::int32_t finished = v;
            frames.pop_back();
            if (!frames.empty())
                lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[finished]);
        }
    }
};

} // namespace

bool recurrence_classify(ConeAutomaton& a) {
    TarjanScc scc(a);
    scc.run();

    std::vector<std::int32_t> component_size(static_cast<std::size_t>(scc.components), 0);
    for (std::size_t v = 0; v < a.states.size(); ++v) component_size[scc.component[v]] += 1;

    std::vector<bool> recurrent_component(static_cast<std::size_t>(scc.components), false);
    for (std::size_t v = 0; v < a.states.size(); ++v) {
        bool self_loop = false;
        for (int c = 0; c < a.alphabet; ++c)
            if (a.transitions[v * static_cast<std::size_t>(a.alphabet) + c] ==
                static_cast<std::int32_t>(v))
                self_loop = true;
        const std::int32_t comp = scc.component[v];
        const bool rec = self_loop || component_size[comp] > 1;
        a.states[v].recurrent = rec;
        if (rec) recurrent_component[comp] = true;
    }

    std::size_t live = 0;
    for (bool flag : recurrent_component)
        if (flag) ++live;
    a.classified = true;
    a.assumption_holds = (live == 1);
    return a.assumption_holds;
}

void mark_large(ConeAutomaton& a) {
    if (!a.classified || !a.assumption_holds) return;
    for (auto& s : a.states) s.large = s.recurrent;
}

std::optional<int> probe_ubiquity_radius(const ConeAutomaton& a, std::int32_t state,
                                         const BfsBall& ball, int probe_radius) {
    // multi-source BFS from every vertex of the chosen type, inside the ball
    const std::int32_t unreached = -1;
    std::vector<std::int32_t> to_type(ball.size(), unreached);
    std::queue<std::int32_t> queue;
    for (std::size_t v = 0; v < ball.size(); ++v) {
        if (state_by_signature(a, ball.elements[v]) == state) {
            to_type[v] = 0;
            queue.push(static_cast<std::int32_t>(v));
        }
    }
    while (!queue.empty()) {
        const std::int32_t v = queue.front();
        queue.pop();
        for (int c = 0; c < ball.alphabet; ++c) {
            const std::int32_t w = ball.adjacency[static_cast<std::size_t>(v) * ball.alphabet + c];
            if (w < 0 || to_type[w] != unreached) continue;
            to_type[w] = to_type[v] + 1;
            queue.push(w);
        }
    }

    // worst distance-to-type among centers at depth <= r; geodesics from such
    // centers to their nearest type vertex stay inside the ball when
    // r + R <= ball.radius, so the induced-graph distances are exact there
    std::vector<int> worst(static_cast<std::size_t>(ball.radius) + 1, 0);
    for (std::size_t v = 0; v < ball.size(); ++v) {
        const int d = ball.distance[v];
        const int t = (to_type[v] == unreached) ? std::numeric_limits<int>::max() : to_type[v];
        worst[d] = std::max(worst[d], t);
    }
    for (int d = 1; d <= ball.radius; ++d) worst[d] = std::max(worst[d], worst[d - 1]);

    for (int r = 0; r <= probe_radius && r <= ball.radius; ++r) {
        const int center_depth = ball.radius - r;
        if (worst[center_depth] <= r) return r;
    }
    return std::nullopt;
}

void mark_large_and_ubiquitous(ConeAutomaton& a, const BfsBall& ball, std::int32_t state,
                               int probe_radius) {
    if (!a.classified) recurrence_classify(a);
    mark_large(a);
    a.ubiquity_state = state;
    a.ubiquity_radius = probe_ubiquity_radius(a, state, ball, probe_radius);
}

std::uint64_t count_paths(const ConeAutomaton& a, int n) {
    std::vector<std::uint64_t> counts(a.states.size(), 0);
    counts[a.start] = 1;
    for (int step = 0; step < n; ++step) {
        std::vector<std::uint64_t> next(a.states.size(), 0);
        for (std::size_t v = 0; v < a.states.size(); ++v) {
            if (counts[v] == 0) continue;
            for (int c = 0; c < a.alphabet; ++c) {
                const std::int32_t w = a.transitions[v * static_cast<std::size_t>(a.alphabet) + c];
                if (w >= 0) next[w] += counts[v];
            }
        }
        counts.swap(next);
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    return total;
}

} // namespace conewalk
