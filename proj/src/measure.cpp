#include "conewalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace conewalk {

void DrivingMeasure::finalize() {
    max_word_length = 0;
    cdf.clear();
    cdf.reserve(atoms.size());
    double acc = 0.0;
    for (auto& atom : atoms) {
        atom.word = free_reduce(atom.word);
        max_word_length = std::max(max_word_length, static_cast<int>(atom.word.size()));
        if (!(atom.prob > 0.0)) throw std::invalid_argument("atom probabilities must be positive");
        acc += atom.prob;
        cdf.push_back(acc);
    }
    if (!cdf.empty()) cdf.back() = 1.0; // guard the last bucket against rounding
}

DrivingMeasure simple_random_walk(const Presentation& p) {
    DrivingMeasure m;
    const int n = p.alphabet_size();
    for (int c = 0; c < n; ++c)
        m.atoms.push_back(MeasureAtom{Word{Letter{static_cast<std::uint8_t>(c)}}, 1.0 / n});
    m.finalize();
    return m;
}

MeasureReport validate_measure(DrivingMeasure& m, const RewriteSystem& rw, bool lazy_requested) {
    MeasureReport report;
    if (m.cdf.size() != m.atoms.size()) m.finalize();

    double total = 0.0;
    for (const auto& atom : m.atoms) total += atom.prob;
    report.prob_sum_ok = std::abs(total - 1.0) <= 1e-12;

    // distinctness as group elements
    std::unordered_map<std::string, double> by_element;
    report.atoms_distinct = true;
    for (const auto& atom : m.atoms) {
        const NormalForm nf = rw.normal_form(atom.word);
        auto [it, inserted] = by_element.emplace(word_key(nf.letters), atom.prob);
        if (!inserted) {
            report.atoms_distinct = false;
            it->second += atom.prob;
        }
    }

    // Assumption 2: every signed generator is in the support
    for (int c = 0; c < rw.alphabet_size(); ++c) {
        const Letter s{static_cast<std::uint8_t>(c)};
        if (by_element.find(word_key(Word{s})) == by_element.end())
            report.missing_generators.push_back(letter_name(s));
    }
    report.assumption2 = report.missing_generators.empty();
    m.contains_generators = report.assumption2;

    // symmetry is informational: mu(x) == mu(x^-1) for every atom
    report.symmetric = true;
    for (const auto& atom : m.atoms) {
        const NormalForm inv = rw.normal_form(inverse_word(atom.word));
        auto it = by_element.find(word_key(inv.letters));
        if (it == by_element.end() || std::abs(it->second - atom.prob) > 1e-12) {
            report.symmetric = false;
            break;
        }
    }
    m.symmetric = report.symmetric;

    if (!report.prob_sum_ok) {
        report.message = "atom probabilities do not sum to 1";
        throw std::invalid_argument(report.message);
    }
    if (!report.atoms_distinct) {
        report.message = "two atoms reduce to the same group element";
        throw std::invalid_argument(report.message);
    }
    if (!report.assumption2 && !lazy_requested) {
        report.message = "support misses generators (";
        for (std::size_t i = 0; i < report.missing_generators.size(); ++i)
            report.message += (i ? "," : "") + report.missing_generators[i];
        report.message += "); renewal detection needs them. Set measure.lazy_ell > 1 to run "
                          "through the averaged-convolution driver instead.";
        throw PreconditionError(report.message);
    }
    report.message = report.assumption2 ? "ok" : "generator support restored via lazy driver";
    return report;
}

bool lazy_covers_generators(const LazyAverageDriver& driver, const RewriteSystem& rw) {
    // supports of mu, mu^2, ..., mu^ell, as normal forms
    std::set<std::string> covered;
    std::set<std::string> layer{std::string{}}; // support of mu^0
    for (int i = 1; i <= driver.ell; ++i) {
        std::set<std::string> next;
        for (const std::string& key : layer) {
            Word base;
            base.reserve(key.size());
            for (char ch : key) base.push_back(Letter{static_cast<std::uint8_t>(ch)});
            for (const auto& atom : driver.base.atoms) {
                const NormalForm nf = rw.mul(NormalForm{base}, atom.word);
                next.insert(word_key(nf.letters));
            }
        }
        covered.insert(next.begin(), next.end());
        layer.swap(next);
    }
    for (int c = 0; c < rw.alphabet_size(); ++c) {
        const Letter s{static_cast<std::uint8_t>(c)};
        if (covered.find(word_key(Word{s})) == covered.end()) return false;
    }
    return true;
}

} // namespace conewalk
