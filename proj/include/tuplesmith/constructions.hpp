#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tuplesmith/admissibility.hpp"
#include "tuplesmith/primes.hpp"
#include "tuplesmith/tuple.hpp"

namespace tuplesmith {

enum class Method {
    zhang_block,
    shifted_block,
    hensley_richards,
    greedy_sieve,
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);  // ValidationError on unknown

struct ConstructionSpec {
    Method method = Method::zhang_block;
    std::uint64_t k = 1;
    std::uint64_t scan_range = 20'000;  // shift upper bound for the scan methods
    double interval_scale = 1.0;        // greedy interval multiplier, >= 1.0
    std::uint64_t seed = 0;
    bool randomize_ties = false;   // greedy: seed-driven tie-breaking when set
    bool classic_schinzel = false; // greedy: force class 0 for p <= sqrt(x)

    void validate() const;
};

struct ConstructionResult {
    Tuple tuple;  // normalized, verified admissible
    Method method = Method::zhang_block;
    std::int64_t raw_min = 0;  // untranslated extremes of the candidate
    std::int64_t raw_max = 0;
    std::uint64_t shift = 0;   // chosen m for the scan methods

    std::int64_t diameter() const noexcept { return tuple.diameter(); }
};

// The first k primes strictly greater than k; admissible by construction
// (no element is divisible by any p <= k, so class 0 is always missed).
ConstructionResult zhang_block(std::uint64_t k, PrimeSource& primes);

// Narrowest verified-admissible block of k consecutive primes
// p_{m+1}..p_{m+k} over m in [0, scan_range]; ties go to the smaller m.
// NotFoundError (with the narrowest candidate's obstruction) when none is
// admissible in range.
ConstructionResult shifted_block(std::uint64_t k, std::uint64_t scan_range,
                                 PrimeSource& primes);

// Narrowest verified-admissible symmetric candidate built from {-1, +1} and
// consecutive primes mirrored around zero, scanning the starting prime
// index m in [0, scan_range]. Requires k >= 2.
ConstructionResult hensley_richards(std::uint64_t k, std::uint64_t scan_range,
                                    PrimeSource& primes);

struct GreedyOptions {
    double interval_scale = 1.0;
    std::uint64_t seed = 0;
    bool randomize_ties = false;
    bool classic_schinzel = false;
    std::uint32_t max_growths = 50;
};

struct GreedyResult {
    ConstructionResult construction;
    std::vector<std::int64_t> survivors;  // full survivor set of the final interval
    std::int64_t interval_end = 0;        // the x actually used
};

// Sieve [0, x]: for each prime p <= k ascending, delete the residue class
// whose removal costs the fewest survivors, then pick the minimal k-window
// of the survivors. Grows x by 5% and retries while fewer than k survive.
GreedyResult greedy_sieve(std::uint64_t k, const GreedyOptions& options, PrimeSource& primes);

// Single sieve pass over [0, x] with no growth; empty survivors slot in the
// result marks failure to seat k survivors. Shared by greedy_sieve and the
// local-search re-sieve/slide moves.
struct SievePass {
    std::vector<std::int64_t> survivors;
    bool enough = false;         // survivors.size() >= k
    std::size_t window_begin = 0;  // index of the minimal k-window when enough
};
SievePass greedy_sieve_pass(std::uint64_t k, std::int64_t x, const GreedyOptions& options,
                            const PrimeCache& cache, std::uint64_t tie_seed);

// Dispatch on spec.method.
ConstructionResult construct(const ConstructionSpec& spec, PrimeSource& primes);

}  // namespace tuplesmith
