#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tuplesmith/primes.hpp"
#include "tuplesmith/tuple.hpp"

namespace tuplesmith {

// Evidence for one checked prime: either the smallest residue class the
// tuple misses mod p (a witness of admissibility at p), or nothing, meaning
// every class mod p is hit.
struct PrimeEvidence {
    std::uint64_t prime = 0;
    std::optional<std::uint64_t> missed_class;

    bool covered() const noexcept { return !missed_class.has_value(); }
};

struct AdmissibilityReport {
    bool admissible = false;
    // One entry per checked prime, ascending. In full-witness mode this is
    // every prime p <= k; when truncation is requested it stops at the
    // first covered prime.
    std::vector<PrimeEvidence> evidence;
    // Smallest prime whose classes are all covered, when inadmissible.
    std::optional<std::uint64_t> obstruction;
};

// Verdict-only result from the fast path.
struct Verdict {
    bool admissible = false;
    std::optional<std::uint64_t> obstruction;
};

// Fast admissibility verdict: checks exactly the primes p <= k (for p > k a
// k-element tuple can never cover all p classes), with early exit per prime
// both on full coverage and on provably-missed classes. Deterministic: the
// reported obstruction is the smallest covered prime. Larger inputs shard
// the prime range across threads; the merge keeps the sequential answer.
Verdict check_admissible(const Tuple& tuple, PrimeSource& primes);

// Full per-prime report (smallest missed residue per prime). With
// stop_at_first_covered the evidence list is truncated at the obstruction.
AdmissibilityReport admissibility_report(const Tuple& tuple, PrimeSource& primes,
                                         bool stop_at_first_covered = false);

// Exact set of residues the tuple occupies mod p, ascending.
// p must be prime (validated by trial division).
std::vector<std::uint64_t> residue_cover(const Tuple& tuple, std::uint64_t p);

}  // namespace tuplesmith
