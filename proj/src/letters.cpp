#include "conewalk/letters.hpp"

#include <algorithm>
#include <stdexcept>

namespace conewalk {

Word inverse_word(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
    return out;
}

bool shortlex_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string word_key(const Word& w) {
    std::string key;
    key.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) key[i] = static_cast<char>(w[i].code);
    return key;
}

bool is_prefix(const Word& prefix, const Word& w) {
    if (prefix.size() > w.size()) return false;
    return std::equal(prefix.begin(), prefix.end(), w.begin());
}

std::size_t common_prefix_length(const Word& a, const Word& b) {
    const std::size_t limit = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < limit && a[i] == b[i]) ++i;
    return i;
}

std::string letter_name(Letter l) {
    const int gen = l.generator_index();
    char c = (gen % 2 == 0) ? 'a' : 'b';
    if (l.sign() < 0) c = static_cast<char>(c - 'a' + 'A');
    return std::string(1, c) + std::to_string(gen / 2 + 1);
}

std::string format_word(const Word& w) {
    std::string out;
    for (Letter l : w) out += letter_name(l);
    return out;
}

Word parse_word(std::string_view text, int alphabet_size) {
    Word out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        bool inv = false;
        int pair = 0; // 0 for a, 1 for b
        if (c == 'a' || c == 'A') {
            pair = 0;
            inv = (c == 'A');
        } else if (c == 'b' || c == 'B') {
            pair = 1;
            inv = (c == 'B');
        } else {
            throw std::invalid_argument("bad letter '" + std::string(1, c) + "' in word \"" +
                                        std::string(text) + "\"");
        }
        ++i;
        if (i >= text.size() || text[i] < '0' || text[i] > '9')
            throw std::invalid_argument("letter without index in word \"" + std::string(text) + "\"");
        int num = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            num = num * 10 + (text[i] - '0');
            ++i;
        }
        if (num < 1) throw std::invalid_argument("letter index must be >= 1");
        const int gen = (num - 1) * 2 + pair;
        const int code = gen * 2 + (inv ? 1 : 0);
        if (code >= alphabet_size)
            throw std::invalid_argument("letter " + letter_name(Letter{static_cast<std::uint8_t>(code)}) +
                                        " outside the alphabet of this presentation");
        out.push_back(Letter{static_cast<std::uint8_t>(code)});
    }
    return out;
}

} // namespace conewalk
