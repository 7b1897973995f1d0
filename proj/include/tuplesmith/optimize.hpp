#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tuplesmith/constructions.hpp"

namespace tuplesmith {

struct SearchBudget {
    double max_seconds = 60.0;
    std::uint64_t max_iterations = 100'000;  // accepted-move cap per restart
    std::uint32_t restarts = 8;
    std::uint64_t seed = 0;
    bool annealing = false;  // accept worsening re-sieves with T0=1, halved per restart

    void validate() const;
};

enum class MoveKind { window_slide, endpoint_exchange, resieve };
const char* move_name(MoveKind m);

struct TraceStep {
    std::uint64_t iteration = 0;
    std::int64_t diameter = 0;
    MoveKind move = MoveKind::resieve;
};

// Improvement log of one search: diameters are nonincreasing and every
// recorded tuple was re-verified admissible when the step was accepted.
struct SearchTrace {
    std::vector<TraceStep> steps;
};

struct SearchResult {
    Tuple tuple;
    SearchTrace trace;
};

// Diameter-shrinking local search. Moves: window slide over a fresh greedy
// survivor set, endpoint exchange (drop an extreme, re-admit an interior
// integer), and seeded greedy re-sieve with randomized tie-breaking.
// Strict improvement only unless budget.annealing is set. Deterministic for
// a fixed budget/seed; restart r uses seed + r.
SearchResult local_search(const Tuple& start, const SearchBudget& budget,
                          PrimeSource& primes);

struct MethodOutcome {
    Method method = Method::zhang_block;
    bool ok = false;
    std::string error;
    std::int64_t construction_diameter = 0;
    std::int64_t optimized_diameter = 0;
};

struct SuiteResult {
    Tuple tuple;
    Method best_method = Method::zhang_block;
    std::vector<MethodOutcome> outcomes;
    SearchTrace trace;  // trace of the winning method's search
    bool new_record_flag = false;
};

// Runs every construction, polishes each with local_search, and returns the
// narrowest verified result with per-method diameters. Construction errors
// are reported per method and only propagate when every method fails.
SuiteResult best_of_suite(std::uint64_t k, const SearchBudget& budget, PrimeSource& primes);

std::string format_trace_csv(const SearchTrace& trace);

}  // namespace tuplesmith
