#pragma once

#include <cstddef>
#include <vector>

#include "conewalk/letters.hpp"
#include "conewalk/presentation.hpp"

namespace conewalk {

enum class RuleKind { FreeCancellation, LengthReducing, ShortlexFlattening };

// One rewriting rule lhs -> rhs with lhs = rhs as group elements.
// FreeCancellation and LengthReducing rules have |rhs| < |lhs|;
// ShortlexFlattening rules keep the length and strictly decrease shortlex,
// so every application strictly decreases (length, word) in the
// lexicographic well-order and rewriting terminates.
struct RewriteRule {
    Word lhs;
    Word rhs;
    RuleKind kind;
};

// The unique shortlex geodesic representative of a group element.
// Only RewriteSystem produces these; `letters` is irreducible under the
// system's rules and its length is the word-metric distance to the identity.
struct NormalForm {
    Word letters;

    int length() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }
    friend bool operator==(const NormalForm&, const NormalForm&) = default;
};

inline int distance(const NormalForm& x) { return x.length(); }

// Free reduction only: cancel adjacent inverse pairs until none remain.
Word free_reduce(const Word& w);

// A reduction order on words: length first (so oriented rules never lengthen
// a word and irreducible words stay geodesic), then total weight under
// positive per-letter weights, then lexicographic comparison read from the
// left or from the right. Total, well-founded and closed under context,
// which is what completion needs.
struct WordOrder {
    std::vector<int> weights; // per letter code; empty = all ones
    bool lex_from_right = false;

    std::int64_t weight(const Word& w) const;
    bool less(const Word& a, const Word& b) const;
};

// Geodesic rewriting system for a supported presentation.
//
// For a genus-g surface group the seed rules come from the cyclic
// permutations of the relator and its inverse: writing a permutation as u*v,
// a prefix u of length 2g+1 rewrites to the inverse of the remaining suffix
// (length 2g-1, strictly shorter), and the shortlex-larger of the two
// equal-length halves {u, v^-1} (length 2g) flattens to the smaller one.
// The seed rules alone are not confluent (overlapping half-relators hide
// length reductions in words of ten letters and more), so construction runs
// Knuth-Bendix completion over the shortlex order; for these presentations
// the completion is finite and small. The completed system rewrites every
// word to the unique shortlex geodesic representative, which the test suites
// verify against the flattening-free Dehn oracle and the BFS ball rather
// than assume.
class RewriteSystem {
public:
    explicit RewriteSystem(const Presentation& p);

    // Unchecked rule injection, used by negative-control tests.
    RewriteSystem(const Presentation& p, std::vector<RewriteRule> rules);
    RewriteSystem(const Presentation& p, std::vector<RewriteRule> rules, WordOrder order);

    const Presentation& presentation() const { return presentation_; }
    const std::vector<RewriteRule>& rules() const { return rules_; }
    int alphabet_size() const { return alphabet_; }

    // Longest rule left-hand side minus one: the suffix length that decides
    // whether one more letter keeps a word irreducible.
    int signature_length() const { return signature_length_; }

    std::size_t rule_count(RuleKind kind) const;

    NormalForm normal_form(const Word& w) const;

    // normal_form(x * w) with cost proportional to |w| plus the rewrites it
    // triggers at the boundary, not to |x|.
    NormalForm mul(const NormalForm& x, const Word& w) const;

    bool is_reduced(const Word& w) const;

    // True when signature + s contains no redex ending at s, i.e. appending
    // s to any normal form with this signature yields a normal form again.
    bool extension_allowed(const Word& signature, Letter s) const;

    // Appends one letter to an irreducible word, restoring irreducibility.
    // `pending` is caller-provided scratch. The tracked variant additionally
    // maintains `low` (the lowest stack size reached, for words this call
    // shrinks below their initial length) and appends every popped pristine
    // letter to `saved`, which lets walk code recover exact common-prefix
    // lengths between successive positions.
    void push_letter(Word& w, Letter x, Word& pending) const;
    void push_letter_tracked(Word& w, Letter x, Word& pending, std::size_t& low, Word& saved) const;

    // Checks the decreasing-measure contract of every rule: strictly shorter,
    // or equal length and strictly shortlex-smaller. Rule injection skips
    // this so negative-control tests can build broken systems on purpose.
    void validate_rules() const;

    const WordOrder& order() const { return order_; }

private:
    void index_rules();

    Presentation presentation_;
    std::vector<RewriteRule> rules_;
    WordOrder order_;
    int alphabet_ = 0;
    int signature_length_ = 1;
    // rule indices bucketed by the last letter of the lhs, priority order
    std::vector<std::vector<std::uint32_t>> by_last_;
};

// Relator-derived seed rules plus the free-cancellation schemata,
// deduplicated.
std::vector<RewriteRule> build_rules(const Presentation& p);

// Knuth-Bendix completion over the given reduction order, processing
// shortest equations first: resolves every critical pair (overlaps and
// containments of left-hand sides). Surface groups admit no finite
// length-compatible complete system -- completion generates arithmetic rule
// families growing by a fixed block -- so by default exceeding a budget
// throws std::length_error. With suppress_long the result is instead the
// complete system truncated at max_len (every returned rule is sound; words
// long enough to meet a suppressed rule may stay unreduced), and
// *suppressed reports how many rules were cut.
std::vector<RewriteRule> complete_rules(const Presentation& p, std::vector<RewriteRule> seed,
                                        const WordOrder& order, std::size_t max_rules = 20'000,
                                        std::size_t max_len = 64, bool suppress_long = false,
                                        std::size_t* suppressed = nullptr);

// The order used for the shipped systems.
WordOrder geodesic_order(const Presentation& p);

// Free cancellation and the length-reducing rules only. Iterating these to a
// fixpoint realizes Dehn's algorithm: the result is geodesic (so its length
// is the exact word-metric distance) and it is empty iff the word is trivial.
// This needs no confluence and no shortlex choice, which makes it the
// independent oracle the full system is validated against.
std::vector<RewriteRule> dehn_rules(const Presentation& p);

inline RewriteSystem dehn_reducer(const Presentation& p) {
    return RewriteSystem(p, dehn_rules(p));
}

} // namespace conewalk
