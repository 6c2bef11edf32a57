#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace conewalk {

// A signed generator letter. Generators are enumerated a1, b1, a2, b2, ...
// and encoded as code = 2 * generator_index + (1 if inverse). The numeric
// order of codes (a1 < a1^-1 < b1 < b1^-1 < ...) is the global shortlex
// base order; it is fixed once and never depends on the presentation.
struct Letter {
    std::uint8_t code = 0;

    constexpr int generator_index() const { return code >> 1; }
    constexpr int sign() const { return (code & 1u) ? -1 : +1; }
    constexpr Letter inverse() const { return Letter{static_cast<std::uint8_t>(code ^ 1u)}; }

    friend constexpr auto operator<=>(Letter a, Letter b) { return a.code <=> b.code; }
    friend constexpr bool operator==(Letter a, Letter b) { return a.code == b.code; }
};

using Word = std::vector<Letter>;

// Reverse the word and invert every letter, so that w * inverse_word(w)
// freely reduces to the empty word.
Word inverse_word(const Word& w);

// Shortlex: shorter first, then lexicographic on letter codes.
bool shortlex_less(const Word& a, const Word& b);

// Raw bytes of the letter codes; usable as a hash-map key.
std::string word_key(const Word& w);

bool is_prefix(const Word& prefix, const Word& w);

// Length of the longest common prefix.
std::size_t common_prefix_length(const Word& a, const Word& b);

// Text form: "a1b1A1B2" with uppercase marking the inverse. Empty word <-> "".
std::string format_word(const Word& w);
std::string letter_name(Letter l);

// Parses the text form. `alphabet_size` is the number of signed letters
// (4g for a genus-g surface, 2k for a free group of rank k); letters outside
// it are rejected. Throws std::invalid_argument on malformed input.
Word parse_word(std::string_view text, int alphabet_size);

} // namespace conewalk
