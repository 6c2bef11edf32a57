#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "conewalk/bfs_oracle.hpp"
#include "conewalk/rewrite.hpp"

namespace conewalk {

// One automaton state. The signature is the shortest word suffix that
// decides which letters may extend a normal form (at most signature_length
// letters, since every rule lhs is one letter longer); two normal forms with
// the same signature admit exactly the same extensions.
struct AutomatonState {
    Word signature;
    bool recurrent = false;
    bool large = false;
};

// Deterministic acceptor of exactly the normal-form language. States double
// as cone types: the cone of x is the set of elements whose normal form has
// nf(x) as a prefix, and the state reached by nf(x) identifies its type.
struct ConeAutomaton {
    std::vector<AutomatonState> states;
    std::int32_t start = 0;
    std::int32_t alphabet = 0;
    std::int32_t signature_length = 1;
    std::vector<std::int32_t> transitions; // state * alphabet + letter -> state, -1 if absent
    std::unordered_map<std::string, std::int32_t> state_index;
    bool classified = false;
    bool assumption_holds = false;        // recurrent subgraph strongly connected
    std::optional<int> ubiquity_radius;   // for the probed state, if any
    std::int32_t ubiquity_state = -1;

    std::int32_t transition(std::int32_t state, Letter s) const {
        return transitions[static_cast<std::size_t>(state) * alphabet + s.code];
    }
    std::size_t state_count() const { return states.size(); }
    std::size_t recurrent_count() const;
};

ConeAutomaton build_automaton(const RewriteSystem& rw);

// State reached by feeding the normal form from the start state. Throws
// std::logic_error if a transition is missing (the word was not a normal
// form, which indicates a bug upstream).
std::int32_t state_of(const NormalForm& x, const ConeAutomaton& a);

// Same state, looked up from the signature suffix in O(signature_length).
std::int32_t state_by_signature(const ConeAutomaton& a, const Word& normal_letters);

// Prefix-cone membership: y lies in the cone rooted at `root`.
bool in_cone(const NormalForm& root, const NormalForm& y);

// Marks states recurrent (on a directed cycle) and returns whether the
// recurrent states form exactly one strongly connected component.
bool recurrence_classify(ConeAutomaton& a);

// Recurrent cone types of the supported presentations are large (one large
// recurrent type makes all of them large once the recurrent subgraph is
// strongly connected); nothing is marked when that verification failed.
void mark_large(ConeAutomaton& a);

// Smallest R <= probe_radius such that every ball of radius R whose center
// sits deep enough in `ball` contains a vertex of the given state;
// std::nullopt when even probe_radius is not enough.
std::optional<int> probe_ubiquity_radius(const ConeAutomaton& a, std::int32_t state,
                                         const BfsBall& ball, int probe_radius);

// recurrence_classify + mark_large + ubiquity probe for one state, recorded
// on the automaton itself.
void mark_large_and_ubiquitous(ConeAutomaton& a, const BfsBall& ball, std::int32_t state,
                               int probe_radius);

// Number of accepted length-n paths from the start state; equals the sphere
// size of the Cayley graph when the acceptor is exactly the normal-form
// language.
std::uint64_t count_paths(const ConeAutomaton& a, int n);

} // namespace conewalk
