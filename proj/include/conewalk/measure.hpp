#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "conewalk/rewrite.hpp"

namespace conewalk {

// A required-assumption check failed (e.g. the recurrent subgraph is not
// strongly connected).
struct AssumptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A statistical precondition failed (too few excursions, effective sample
// size collapsed, ...).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MeasureAtom {
    Word word;
    double prob = 0.0;
};

// Finitely supported driving measure. Finite support gives exponential
// moments for free, so the only assumption that needs checking is whether
// the support contains every signed generator.
struct DrivingMeasure {
    std::vector<MeasureAtom> atoms;
    bool contains_generators = false;
    bool symmetric = false;
    int max_word_length = 0;
    std::vector<double> cdf; // cumulative probabilities for sampling

    void finalize(); // freely reduces atoms, builds cdf, sets flags that need no presentation
};

// Uniform measure on the 2k (free) or 4g (surface) signed generators.
DrivingMeasure simple_random_walk(const Presentation& p);

struct MeasureReport {
    bool prob_sum_ok = false;
    bool atoms_distinct = false;
    bool assumption2 = false;  // support contains the generating set
    bool symmetric = false;
    std::vector<std::string> missing_generators;
    std::string message;
    bool ok() const { return prob_sum_ok && atoms_distinct && assumption2; }
};

// Validates the measure against the presentation. When the support misses
// generators and no lazy driver was requested this throws PreconditionError
// with a hint to enable the lazy averaging driver.
MeasureReport validate_measure(DrivingMeasure& m, const RewriteSystem& rw, bool lazy_requested);

// Simulates the average of the first `ell` convolution powers of `base` by
// drawing U uniform on {1..ell} and composing U base steps per step.
struct LazyAverageDriver {
    DrivingMeasure base;
    int ell = 1;
};

// True when the union of the supports of the first `ell` convolution powers
// contains every signed generator, i.e. the averaged measure restores the
// generator-support assumption.
bool lazy_covers_generators(const LazyAverageDriver& driver, const RewriteSystem& rw);

} // namespace conewalk
