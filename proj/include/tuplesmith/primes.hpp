#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "tuplesmith/errors.hpp"

namespace tuplesmith {

// Hard default on how far sieving may ever go. Exceeding it raises
// CapacityError instead of silently growing memory.
inline constexpr std::uint64_t kDefaultCapacityCap = std::uint64_t{1} << 31;

// Immutable sieve of all primes up to a fixed limit.
//
// Storage is an odd-only bitmap (bit i <-> the number 2i+1), built with a
// segmented sieve so the working set per pass stays at cache scale.
// Cumulative prime counts are checkpointed every kCheckpointStride values,
// making prime_count / nth_prime a checkpoint lookup plus one short
// popcount scan. Instances are safe for concurrent readers.
class PrimeCache {
public:
    // ~128 KiB of bitmap touched per segment pass (L2 scale).
    static constexpr std::uint64_t kDefaultSegmentValues = std::uint64_t{1} << 21;
    static constexpr std::uint64_t kCheckpointStride = std::uint64_t{1} << 18;

    static PrimeCache build(std::uint64_t limit,
                            std::uint64_t segment_values = kDefaultSegmentValues,
                            std::uint64_t capacity_cap = kDefaultCapacityCap);

    std::uint64_t limit() const noexcept { return limit_; }
    std::uint64_t total_primes() const noexcept { return total_; }

    // Membership test for 0 <= n <= limit.
    bool is_prime(std::uint64_t n) const;

    // #{p prime : p <= x}.
    std::uint64_t prime_count(std::uint64_t x) const;

    // The i-th prime, 1-based (nth_prime(1) == 2).
    std::uint64_t nth_prime(std::uint64_t i) const;

    // Smallest prime strictly greater than n.
    std::uint64_t first_prime_above(std::uint64_t n) const;

    // All primes p with lo <= p <= hi, ascending.
    std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) const;

    // The first `count` primes strictly greater than n, ascending.
    std::vector<std::uint64_t> first_n_primes_above(std::uint64_t n, std::uint64_t count) const;

    // Raw odd-only bitmap, exposed so tests can compare sieve configurations.
    std::span<const std::uint64_t> words() const noexcept { return words_; }

private:
    PrimeCache() = default;

    [[noreturn]] void throw_capacity(std::uint64_t wanted) const;
    std::uint64_t count_odd_primes_upto(std::uint64_t x) const;

    std::uint64_t limit_ = 0;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> words_;
    // checkpoints_[j] = number of set bits among word indices [0, j * kWordsPerCheckpoint).
    std::vector<std::uint64_t> checkpoints_;
};

// Grow-on-demand owner of a PrimeCache. Readers take an immutable snapshot;
// growth swaps in a bigger cache under a lock. The capacity cap is enforced
// here as well as in PrimeCache::build.
class PrimeSource {
public:
    explicit PrimeSource(std::uint64_t capacity_cap = kDefaultCapacityCap,
                         std::uint64_t segment_values = PrimeCache::kDefaultSegmentValues);

    // Snapshot whose limit is at least `limit` (grows geometrically when short).
    std::shared_ptr<const PrimeCache> at_least(std::uint64_t limit);

    // Snapshot that contains at least `count` primes strictly above `n`.
    std::shared_ptr<const PrimeCache> with_primes_above(std::uint64_t n, std::uint64_t count);

    std::shared_ptr<const PrimeCache> snapshot() const;

    std::uint64_t capacity_cap() const noexcept { return capacity_cap_; }

private:
    mutable std::mutex mu_;
    std::uint64_t capacity_cap_;
    std::uint64_t segment_values_;
    std::shared_ptr<const PrimeCache> cache_;
};

// Upper bound on the n-th prime (p_n <= n(ln n + ln ln n) for n >= 6),
// used to size sieves before the exact answer is known.
std::uint64_t nth_prime_upper_bound(std::uint64_t n);

// Deterministic trial-division primality test (used for validating small
// standalone prime arguments, not for bulk sieving).
bool is_prime_trial(std::uint64_t n);

}  // namespace tuplesmith
