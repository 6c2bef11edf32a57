#include "conewalk/rewrite.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <cstdlib>
#include <deque>
#include <set>
#include <stdexcept>

namespace conewalk {

namespace {

Word cyclic_shift(const Word& w, std::size_t start) {
    Word out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w[(start + i) % w.size()]);
    return out;
}

bool suffix_matches(const Word& w, const Word& pattern) {
    const std::size_t n = w.size(), m = pattern.size();
    if (m > n) return false;
    for (std::size_t i = 0; i < m; ++i)
        if (w[n - m + i] != pattern[i]) return false;
    return true;
}

} // namespace

Word free_reduce(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (Letter x : w) {
        if (!out.empty() && out.back() == x.inverse())
            out.pop_back();
        else
            out.push_back(x);
    }
    return out;
}

std::vector<RewriteRule> build_rules(const Presentation& p) {
    std::vector<RewriteRule> rules;
    // Free-cancellation schemata, one per signed letter.
    for (int c = 0; c < p.alphabet_size(); ++c) {
        const Letter x{static_cast<std::uint8_t>(c)};
        rules.push_back(RewriteRule{Word{x, x.inverse()}, Word{}, RuleKind::FreeCancellation});
    }
    if (p.kind() == GroupKind::Free) return rules;

    const Word& relator = p.relator();
    const std::size_t len = relator.size(); // 4g
    const std::size_t half = len / 2;       // 2g
    const Word relator_inv = inverse_word(relator);

    std::vector<Word> cyclic_words;
    for (std::size_t s = 0; s < len; ++s) cyclic_words.push_back(cyclic_shift(relator, s));
    for (std::size_t s = 0; s < len; ++s) cyclic_words.push_back(cyclic_shift(relator_inv, s));

    std::set<std::pair<std::string, std::string>> seen;
    auto add_rule = [&](Word lhs, Word rhs, RuleKind kind) {
        auto key = std::make_pair(word_key(lhs), word_key(rhs));
        if (seen.insert(key).second)
            rules.push_back(RewriteRule{std::move(lhs), std::move(rhs), kind});
    };

    for (const Word& w : cyclic_words) {
        // w = u * v with the whole word trivial in the group, so u = v^-1.
        {
            Word u(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(half + 1));
            Word v(w.begin() + static_cast<std::ptrdiff_t>(half + 1), w.end());
            add_rule(std::move(u), inverse_word(v), RuleKind::LengthReducing);
        }
        {
            Word u(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(half));
            Word v(w.begin() + static_cast<std::ptrdiff_t>(half), w.end());
            Word v_inv = inverse_word(v);
            if (shortlex_less(u, v_inv))
                add_rule(std::move(v_inv), std::move(u), RuleKind::ShortlexFlattening);
            else
                add_rule(std::move(u), std::move(v_inv), RuleKind::ShortlexFlattening);
        }
    }
    return rules;
}

std::vector<RewriteRule> dehn_rules(const Presentation& p) {
    std::vector<RewriteRule> rules = build_rules(p);
    std::erase_if(rules, [](const RewriteRule& r) { return r.kind == RuleKind::ShortlexFlattening; });
    return rules;
}

std::int64_t WordOrder::weight(const Word& w) const {
    std::int64_t total = 0;
    for (Letter l : w) total += weights.empty() ? 1 : weights[l.code];
    return total;
}

bool WordOrder::less(const Word& a, const Word& b) const {
    // length first: rules oriented by this order never lengthen a word, so
    // irreducible words stay geodesic; weight and lex only break ties
    if (a.size() != b.size()) return a.size() < b.size();
    const std::int64_t wa = weight(a), wb = weight(b);
    if (wa != wb) return wa < wb;
    if (!lex_from_right) return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

namespace {

// Working state of the Knuth-Bendix completion. Rules live in flat arrays
// with alive flags; normalization uses the same stack strategy as the main
// engine but treats free cancellation as ordinary rules. Equations are
// processed shortest-first so rule families are discovered level by level
// instead of diving down a single infinite family.
struct Completion {
    int alphabet;
    std::size_t max_rules, max_len;
    bool suppress_long; // skip (not throw on) rules beyond max_len
    WordOrder order;
    std::vector<Word> lhs, rhs;
    std::vector<bool> alive;
    std::vector<std::vector<std::int32_t>> by_last;
    std::multimap<std::size_t, std::pair<Word, Word>> equations;
    std::deque<std::int32_t> fresh;
    std::size_t suppressed = 0;

    Completion(int a, std::size_t mr, std::size_t ml, bool sl, WordOrder o)
        : alphabet(a), max_rules(mr), max_len(ml), suppress_long(sl), order(std::move(o)),
          by_last(static_cast<std::size_t>(a)) {}

    void queue_equation(Word a, Word b) {
        const std::size_t key = std::max(a.size(), b.size());
        equations.emplace(key, std::make_pair(std::move(a), std::move(b)));
    }

    Word normalize(const Word& input) const {
        Word out, pending(input.rbegin(), input.rend());
        while (!pending.empty()) {
            const Letter x = pending.back();
            pending.pop_back();
            out.push_back(x);
            for (std::int32_t idx : by_last[x.code]) {
                if (!alive[idx]) continue;
                const Word& l = lhs[idx];
                if (l.size() > out.size()) continue;
                if (!std::equal(l.begin(), l.end(), out.end() - static_cast<std::ptrdiff_t>(l.size())))
                    continue;
                out.resize(out.size() - l.size());
                pending.insert(pending.end(), rhs[idx].rbegin(), rhs[idx].rend());
                break;
            }
        }
        return out;
    }

    bool reducible(const Word& w, std::int32_t skip) const {
        for (std::size_t end = 1; end <= w.size(); ++end) {
            for (std::int32_t idx : by_last[w[end - 1].code]) {
                if (!alive[idx] || idx == skip) continue;
                const Word& l = lhs[idx];
                if (l.size() > end) continue;
                if (std::equal(l.begin(), l.end(),
                               w.begin() + static_cast<std::ptrdiff_t>(end - l.size())))
                    return true;
            }
        }
        return false;
    }

    void add_rule(Word l, Word r) {
        if (std::getenv("CONEWALK_KB_TRACE"))
            std::fprintf(stderr, "rule %zu: %s -> %s\n", lhs.size(), format_word(l).c_str(),
                         format_word(r).c_str());
        if (l.size() > max_len) {
            if (suppress_long) {
                ++suppressed;
                return;
            }
            throw std::length_error("rewrite completion exceeded its length budget; "
                                    "the rule system appears to diverge");
        }
        if (lhs.size() >= max_rules)
            throw std::length_error("rewrite completion exceeded its rule budget; "
                                    "the rule system appears to diverge");
        const auto id = static_cast<std::int32_t>(lhs.size());
        by_last[l.back().code].push_back(id);
        lhs.push_back(std::move(l));
        rhs.push_back(std::move(r));
        alive.push_back(true);
        fresh.push_back(id);
        // interreduce: rules whose lhs the new rule can rewrite go back to
        // the equation queue
        for (std::int32_t other = 0; other < id; ++other) {
            if (!alive[other]) continue;
            if (reducible(lhs[other], other)) {
                alive[other] = false;
                queue_equation(lhs[other], rhs[other]);
            }
        }
    }

    void process_equation(Word a, Word b) {
        a = normalize(a);
        b = normalize(b);
        if (a == b) return;
        if (order.less(a, b)) std::swap(a, b);
        add_rule(std::move(a), std::move(b));
    }

    void overlaps(std::int32_t i, std::int32_t j) {
        const Word &l1 = lhs[i], &l2 = lhs[j];
        // proper overlap: a suffix of l1 is a prefix of l2
        const std::size_t kmax = std::min(l1.size(), l2.size()) - 1;
        for (std::size_t k = 1; k <= kmax; ++k) {
            if (!std::equal(l2.begin(), l2.begin() + static_cast<std::ptrdiff_t>(k),
                            l1.end() - static_cast<std::ptrdiff_t>(k)))
                continue;
            Word left = rhs[i];
            left.insert(left.end(), l2.begin() + static_cast<std::ptrdiff_t>(k), l2.end());
            Word right(l1.begin(), l1.end() - static_cast<std::ptrdiff_t>(k));
            right.insert(right.end(), rhs[j].begin(), rhs[j].end());
            queue_equation(std::move(left), std::move(right));
        }
        // containment: l2 a proper factor of l1
        if (l2.size() < l1.size()) {
            for (std::size_t pos = 0; pos + l2.size() <= l1.size(); ++pos) {
                if (!std::equal(l2.begin(), l2.end(),
                                l1.begin() + static_cast<std::ptrdiff_t>(pos)))
                    continue;
                Word patched(l1.begin(), l1.begin() + static_cast<std::ptrdiff_t>(pos));
                patched.insert(patched.end(), rhs[j].begin(), rhs[j].end());
                patched.insert(patched.end(),
                               l1.begin() + static_cast<std::ptrdiff_t>(pos + l2.size()), l1.end());
                queue_equation(rhs[i], std::move(patched));
            }
        }
    }
};

} // namespace

std::vector<RewriteRule> complete_rules(const Presentation& p, std::vector<RewriteRule> seed,
                                        const WordOrder& order, std::size_t max_rules,
                                        std::size_t max_len, bool suppress_long,
                                        std::size_t* suppressed) {
    Completion kb(p.alphabet_size(), max_rules, max_len, suppress_long, order);
    for (RewriteRule& r : seed) kb.queue_equation(std::move(r.lhs), std::move(r.rhs));

    while (!kb.equations.empty() || !kb.fresh.empty()) {
        if (!kb.equations.empty()) {
            auto it = kb.equations.begin();
            auto [a, b] = std::move(it->second);
            kb.equations.erase(it);
            kb.process_equation(std::move(a), std::move(b));
            continue;
        }
        const std::int32_t i = kb.fresh.front();
        kb.fresh.pop_front();
        if (!kb.alive[i]) continue;
        for (std::int32_t j = 0; j < static_cast<std::int32_t>(kb.lhs.size()); ++j) {
            if (!kb.alive[j] || !kb.alive[i]) continue;
            kb.overlaps(i, j);
            if (j != i) kb.overlaps(j, i);
        }
    }
    if (suppressed) *suppressed = kb.suppressed;

    std::vector<RewriteRule> out;
    for (std::size_t i = 0; i < kb.lhs.size(); ++i) {
        if (!kb.alive[i]) continue;
        RewriteRule r;
        r.lhs = kb.lhs[i];
        r.rhs = kb.normalize(kb.rhs[i]); // right-normalize for canonical form
        if (r.lhs.size() == 2 && r.rhs.empty() && r.lhs[1] == r.lhs[0].inverse())
            r.kind = RuleKind::FreeCancellation;
        else
            r.kind = r.rhs.size() < r.lhs.size() ? RuleKind::LengthReducing
                                                 : RuleKind::ShortlexFlattening;
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const RewriteRule& a, const RewriteRule& b) {
        if (a.lhs != b.lhs) return shortlex_less(a.lhs, b.lhs);
        return shortlex_less(a.rhs, b.rhs);
    });
    return out;
}

WordOrder geodesic_order(const Presentation& p) {
    WordOrder order;
    order.weights.assign(static_cast<std::size_t>(p.alphabet_size()), 1);
    return order;
}

RewriteSystem::RewriteSystem(const Presentation& p)
    : RewriteSystem(p, complete_rules(p, build_rules(p), geodesic_order(p))) {
    validate_rules();
}

RewriteSystem::RewriteSystem(const Presentation& p, std::vector<RewriteRule> rules)
    : RewriteSystem(p, std::move(rules), geodesic_order(p)) {}

RewriteSystem::RewriteSystem(const Presentation& p, std::vector<RewriteRule> rules, WordOrder order)
    : presentation_(p), rules_(std::move(rules)), order_(std::move(order)),
      alphabet_(p.alphabet_size()) {
    index_rules();
}

void RewriteSystem::validate_rules() const {
    for (const RewriteRule& r : rules_) {
        if (r.kind != RuleKind::FreeCancellation && free_reduce(r.lhs) != r.lhs)
            throw std::logic_error("rule lhs not freely reduced");
        switch (r.kind) {
            case RuleKind::FreeCancellation:
            case RuleKind::LengthReducing:
                if (r.rhs.size() >= r.lhs.size())
                    throw std::logic_error("length-reducing rule does not shorten");
                break;
            case RuleKind::ShortlexFlattening:
                if (r.rhs.size() != r.lhs.size() || !order_.less(r.rhs, r.lhs))
                    throw std::logic_error("flattening rule does not decrease the word order");
                break;
        }
    }
}

void RewriteSystem::index_rules() {
    signature_length_ = 1;
    by_last_.assign(static_cast<std::size_t>(alphabet_), {});
    for (std::uint32_t i = 0; i < rules_.size(); ++i) {
        const RewriteRule& r = rules_[i];
        if (r.lhs.empty()) throw std::logic_error("empty rule lhs");
        signature_length_ = std::max(signature_length_, static_cast<int>(r.lhs.size()) - 1);
        if (r.kind == RuleKind::FreeCancellation) continue; // handled inline
        by_last_[r.lhs.back().code].push_back(i);
    }
}

std::size_t RewriteSystem::rule_count(RuleKind kind) const {
    std::size_t n = 0;
    for (const RewriteRule& r : rules_)
        if (r.kind == kind) ++n;
    return n;
}

void RewriteSystem::push_letter(Word& w, Letter x0, Word& pending) const {
    pending.clear();
    pending.push_back(x0);
    while (!pending.empty()) {
        const Letter x = pending.back();
        pending.pop_back();
        if (!w.empty() && w.back() == x.inverse()) {
            w.pop_back();
            continue;
        }
        w.push_back(x);
        for (std::uint32_t idx : by_last_[x.code]) {
            const RewriteRule& r = rules_[idx];
            if (suffix_matches(w, r.lhs)) {
                w.resize(w.size() - r.lhs.size());
                // rhs letters are processed next, before anything already pending
                pending.insert(pending.end(), r.rhs.rbegin(), r.rhs.rend());
                break;
            }
        }
    }
}

void RewriteSystem::push_letter_tracked(Word& w, Letter x0, Word& pending, std::size_t& low,
                                        Word& saved) const {
    pending.clear();
    pending.push_back(x0);
    while (!pending.empty()) {
        const Letter x = pending.back();
        pending.pop_back();
        if (!w.empty() && w.back() == x.inverse()) {
            if (w.size() <= low) {
                saved.push_back(w.back());
                low = w.size() - 1;
            }
            w.pop_back();
            continue;
        }
        w.push_back(x);
        for (std::uint32_t idx : by_last_[x.code]) {
            const RewriteRule& r = rules_[idx];
            if (suffix_matches(w, r.lhs)) {
                const std::size_t target = w.size() - r.lhs.size();
                // letters below `low` are untouched originals; save the ones removed now
                for (std::size_t pos = low; pos-- > target;) saved.push_back(w[pos]);
                low = std::min(low, target);
                w.resize(target);
                pending.insert(pending.end(), r.rhs.rbegin(), r.rhs.rend());
                break;
            }
        }
    }
}

NormalForm RewriteSystem::normal_form(const Word& w) const {
    Word out, pending;
    out.reserve(w.size());
    for (Letter x : w) push_letter(out, x, pending);
    return NormalForm{std::move(out)};
}

NormalForm RewriteSystem::mul(const NormalForm& x, const Word& w) const {
    Word out = x.letters, pending;
    out.reserve(out.size() + w.size());
    for (Letter l : w) push_letter(out, l, pending);
    return NormalForm{std::move(out)};
}

bool RewriteSystem::is_reduced(const Word& w) const {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] == w[i - 1].inverse()) return false;
    for (std::size_t end = 1; end <= w.size(); ++end) {
        for (std::uint32_t idx : by_last_[w[end - 1].code]) {
            const RewriteRule& r = rules_[idx];
            if (r.lhs.size() > end) continue;
            bool match = true;
            for (std::size_t j = 0; j < r.lhs.size(); ++j)
                if (w[end - r.lhs.size() + j] != r.lhs[j]) {
                    match = false;
                    break;
                }
            if (match) return false;
        }
    }
    return true;
}

bool RewriteSystem::extension_allowed(const Word& signature, Letter s) const {
    if (!signature.empty() && signature.back() == s.inverse()) return false;
    for (std::uint32_t idx : by_last_[s.code]) {
        const RewriteRule& r = rules_[idx];
        const std::size_t m = r.lhs.size();
        if (m > signature.size() + 1) continue;
        if (r.lhs.back() != s) continue;
        bool match = true;
        for (std::size_t j = 0; j + 1 < m; ++j)
            if (signature[signature.size() - (m - 1) + j] != r.lhs[j]) {
                match = false;
                break;
            }
        if (match) return false;
    }
    return true;
}

} // namespace conewalk
