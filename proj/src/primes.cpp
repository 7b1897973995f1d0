#include "tuplesmith/primes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace tuplesmith {

namespace {

constexpr std::uint64_t kWordBits = 64;
// Checkpoint granularity in words: kCheckpointStride values -> stride/2 bits.
constexpr std::uint64_t kWordsPerCheckpoint =
    PrimeCache::kCheckpointStride / 2 / kWordBits;

// Bit index of odd value n (n odd, n >= 1).
constexpr std::uint64_t bit_of(std::uint64_t n) { return (n - 1) / 2; }

std::string capacity_msg(const char* what, std::uint64_t wanted, std::uint64_t limit) {
    std::ostringstream os;
    os << what << " " << wanted << " exceeds sieve limit " << limit;
    return os.str();
}

}  // namespace

PrimeCache PrimeCache::build(std::uint64_t limit, std::uint64_t segment_values,
                             std::uint64_t capacity_cap) {
    if (limit > capacity_cap) {
        throw CapacityError(capacity_msg("sieve limit", limit, capacity_cap), capacity_cap);
    }
    if (segment_values < 256) segment_values = 256;

    PrimeCache cache;
    cache.limit_ = limit;

    const std::uint64_t nbits = limit >= 1 ? (limit + 1) / 2 : 0;
    cache.words_.assign((nbits + kWordBits - 1) / kWordBits, ~std::uint64_t{0});
    if (!cache.words_.empty()) {
        // Mask tail bits past nbits so popcounts stay exact.
        const std::uint64_t tail = nbits % kWordBits;
        if (tail != 0) cache.words_.back() &= (~std::uint64_t{0}) >> (kWordBits - tail);
        cache.words_[0] &= ~std::uint64_t{1};  // 1 is not prime
    }

    // Base primes up to sqrt(limit), by a plain odd sieve.
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
    std::vector<std::uint32_t> base;
    if (root >= 3) {
        std::vector<std::uint8_t> small((root + 1) / 2, 1);  // index i <-> 2i+1
        for (std::uint64_t v = 3; v * v <= root; v += 2) {
            if (!small[bit_of(v)]) continue;
            for (std::uint64_t m = v * v; m <= root; m += 2 * v) small[bit_of(m)] = 0;
        }
        for (std::uint64_t v = 3; v <= root; v += 2) {
            if (small[bit_of(v)]) base.push_back(static_cast<std::uint32_t>(v));
        }
    }

    // Segmented marking over the shared bitmap.
    for (std::uint64_t seg_lo = 3; seg_lo <= limit; seg_lo += segment_values) {
        const std::uint64_t seg_hi = std::min(limit, seg_lo + segment_values - 1);
        for (const std::uint32_t p : base) {
            const std::uint64_t p64 = p;
            std::uint64_t start = p64 * p64;
            if (start > seg_hi) break;
            if (start < seg_lo) {
                std::uint64_t first = ((seg_lo + p64 - 1) / p64) * p64;
                if (first % 2 == 0) first += p64;
                start = std::max(start, first);
            }
            for (std::uint64_t m = start; m <= seg_hi; m += 2 * p64) {
                cache.words_[bit_of(m) / kWordBits] &=
                    ~(std::uint64_t{1} << (bit_of(m) % kWordBits));
            }
        }
    }

    // Cumulative checkpoints + total.
    const std::uint64_t nwords = cache.words_.size();
    cache.checkpoints_.assign(nwords / kWordsPerCheckpoint + 1, 0);
    std::uint64_t running = 0;
    for (std::uint64_t w = 0; w < nwords; ++w) {
        if (w % kWordsPerCheckpoint == 0) cache.checkpoints_[w / kWordsPerCheckpoint] = running;
        running += static_cast<std::uint64_t>(std::popcount(cache.words_[w]));
    }
    if (nwords % kWordsPerCheckpoint == 0) cache.checkpoints_.back() = running;
    cache.total_ = running + (limit >= 2 ? 1 : 0);
    return cache;
}

void PrimeCache::throw_capacity(std::uint64_t wanted) const {
    throw CapacityError(capacity_msg("request", wanted, limit_), limit_);
}

bool PrimeCache::is_prime(std::uint64_t n) const {
    if (n > limit_) throw_capacity(n);
    if (n < 2) return false;
    if (n == 2) return true;
    if (n % 2 == 0) return false;
    return (words_[bit_of(n) / kWordBits] >> (bit_of(n) % kWordBits)) & 1;
}

std::uint64_t PrimeCache::count_odd_primes_upto(std::uint64_t x) const {
    // x >= 3 assumed; counts set bits with value <= x.
    const std::uint64_t hi_bit = bit_of(x % 2 == 1 ? x : x - 1);
    const std::uint64_t hi_word = hi_bit / kWordBits;
    std::uint64_t count = checkpoints_[hi_word / kWordsPerCheckpoint];
    for (std::uint64_t w = (hi_word / kWordsPerCheckpoint) * kWordsPerCheckpoint; w < hi_word; ++w) {
        count += static_cast<std::uint64_t>(std::popcount(words_[w]));
    }
    const std::uint64_t keep = hi_bit % kWordBits + 1;
    const std::uint64_t mask =
        keep == kWordBits ? ~std::uint64_t{0} : ((std::uint64_t{1} << keep) - 1);
    count += static_cast<std::uint64_t>(std::popcount(words_[hi_word] & mask));
    return count;
}

std::uint64_t PrimeCache::prime_count(std::uint64_t x) const {
    if (x > limit_) throw_capacity(x);
    if (x < 2) return 0;
    if (x == 2) return 1;
    return 1 + count_odd_primes_upto(x);
}

std::uint64_t PrimeCache::nth_prime(std::uint64_t i) const {
    if (i == 0) throw ValidationError("nth_prime index is 1-based; got 0");
    if (i > total_) {
        throw CapacityError(capacity_msg("prime index", i, limit_), limit_);
    }
    if (i == 1) return 2;

    const std::uint64_t odd_rank = i - 1;  // rank among odd primes, 1-based
    // First checkpoint block whose cumulative count reaches odd_rank.
    auto it = std::lower_bound(checkpoints_.begin(), checkpoints_.end(), odd_rank);
    std::uint64_t block = static_cast<std::uint64_t>(it - checkpoints_.begin());
    if (block > 0) --block;  // checkpoints_[block] < odd_rank <= checkpoints_[block + 1]
    while (block + 1 < checkpoints_.size() && checkpoints_[block + 1] < odd_rank) ++block;

    std::uint64_t count = checkpoints_[block];
    for (std::uint64_t w = block * kWordsPerCheckpoint; w < words_.size(); ++w) {
        const auto in_word = static_cast<std::uint64_t>(std::popcount(words_[w]));
        if (count + in_word >= odd_rank) {
            std::uint64_t word = words_[w];
            std::uint64_t remaining = odd_rank - count;
            while (true) {
                const auto tz = static_cast<std::uint64_t>(std::countr_zero(word));
                if (--remaining == 0) return 2 * (w * kWordBits + tz) + 1;
                word &= word - 1;
            }
        }
        count += in_word;
    }
    throw CapacityError(capacity_msg("prime index", i, limit_), limit_);
}

std::uint64_t PrimeCache::first_prime_above(std::uint64_t n) const {
    if (n < 2) return limit_ >= 2 ? 2 : (throw_capacity(2), 0);
    std::uint64_t start = n + 1;
    if (start % 2 == 0) ++start;  // even candidates > 2 are composite
    if (start <= limit_) {
        std::uint64_t w = bit_of(start) / kWordBits;
        std::uint64_t word = words_[w] & (~std::uint64_t{0} << (bit_of(start) % kWordBits));
        while (true) {
            if (word != 0) {
                const auto tz = static_cast<std::uint64_t>(std::countr_zero(word));
                const std::uint64_t value = 2 * (w * kWordBits + tz) + 1;
                if (value <= limit_) return value;
                break;
            }
            if (++w >= words_.size()) break;
            word = words_[w];
        }
    }
    throw CapacityError(capacity_msg("first prime above", n, limit_), limit_);
}

std::vector<std::uint64_t> PrimeCache::primes_in_range(std::uint64_t lo, std::uint64_t hi) const {
    if (lo > hi) throw ValidationError("primes_in_range: lo exceeds hi");
    if (hi > limit_) throw_capacity(hi);
    std::vector<std::uint64_t> out;
    if (hi < 2) return out;
    if (lo <= 2) out.push_back(2);
    std::uint64_t v = std::max<std::uint64_t>(lo, 3);
    if (v % 2 == 0) ++v;
    for (; v <= hi; v += 2) {
        if ((words_[bit_of(v) / kWordBits] >> (bit_of(v) % kWordBits)) & 1) out.push_back(v);
    }
    return out;
}

std::vector<std::uint64_t> PrimeCache::first_n_primes_above(std::uint64_t n,
                                                            std::uint64_t count) const {
    std::vector<std::uint64_t> out;
    out.reserve(count);
    std::uint64_t cur = n;
    while (out.size() < count) {
        cur = first_prime_above(cur);  // CapacityError if the cache runs out
        out.push_back(cur);
    }
    return out;
}

PrimeSource::PrimeSource(std::uint64_t capacity_cap, std::uint64_t segment_values)
    : capacity_cap_(capacity_cap), segment_values_(segment_values) {}

std::shared_ptr<const PrimeCache> PrimeSource::at_least(std::uint64_t limit) {
    std::lock_guard<std::mutex> lock(mu_);
    if (cache_ && cache_->limit() >= limit) return cache_;
    if (limit > capacity_cap_) {
        throw CapacityError(capacity_msg("sieve limit", limit, capacity_cap_), capacity_cap_);
    }
    std::uint64_t target = std::max<std::uint64_t>(limit, std::uint64_t{1} << 20);
    if (cache_) target = std::max(target, cache_->limit() + cache_->limit() / 2);
    target = std::min(target, capacity_cap_);
    cache_ = std::make_shared<const PrimeCache>(
        PrimeCache::build(target, segment_values_, capacity_cap_));
    return cache_;
}

std::shared_ptr<const PrimeCache> PrimeSource::with_primes_above(std::uint64_t n,
                                                                 std::uint64_t count) {
    // Conservative first guess, then grow until the cache really holds them.
    auto cache = at_least(std::max<std::uint64_t>(
        64, nth_prime_upper_bound(count + (n > 0 ? n / 8 + 64 : 0))));
    while (true) {
        const std::uint64_t have =
            cache->limit() > n ? cache->total_primes() - cache->prime_count(n) : 0;
        if (have >= count) return cache;
        const std::uint64_t want = cache->limit() + cache->limit() / 2;
        cache = at_least(std::max(want, cache->limit() + 1));  // throws at the cap
    }
}

std::shared_ptr<const PrimeCache> PrimeSource::snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_;
}

std::uint64_t nth_prime_upper_bound(std::uint64_t n) {
    if (n < 6) return 16;
    const double nd = static_cast<double>(n);
    const double bound = nd * (std::log(nd) + std::log(std::log(nd)));
    return static_cast<std::uint64_t>(bound) + 16;
}

bool is_prime_trial(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    if (n % 3 == 0) return n == 3;
    for (std::uint64_t d = 5; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

}  // namespace tuplesmith
