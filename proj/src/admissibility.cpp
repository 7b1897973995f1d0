#include "tuplesmith/admissibility.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <sstream>
#include <thread>

namespace tuplesmith {

namespace {

std::uint64_t residue_of(std::int64_t e, std::uint64_t p) {
    const std::int64_t m = e % static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(m < 0 ? m + static_cast<std::int64_t>(p) : m);
}

// Reusable stamp buffer: stamp[r] == epoch marks residue r as hit for the
// prime currently being scanned, so no per-prime clearing is needed.
struct StampSet {
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;

    void reset(std::size_t size) {
        if (stamp.size() < size) stamp.assign(size, 0), epoch = 0;
    }
    std::uint32_t next_epoch() {
        if (++epoch == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }
        return epoch;
    }
};

// Scans one prime. Returns true when some class mod p is certainly missed.
// Early exits: full coverage (covered -> false), or too few elements left
// to cover the remaining classes (missed -> true).
bool prime_has_missed_class(std::span<const std::int64_t> elems, std::uint64_t p,
                            StampSet& stamps) {
    const std::uint32_t epoch = stamps.next_epoch();
    std::uint64_t marked = 0;
    const std::uint64_t n = elems.size();
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t r = residue_of(elems[i], p);
        if (stamps.stamp[r] != epoch) {
            stamps.stamp[r] = epoch;
            if (++marked == p) return false;
        }
        if (marked + (n - i - 1) < p) return true;
    }
    return marked < p;
}

std::vector<std::uint64_t> primes_up_to_k(const Tuple& tuple, PrimeSource& primes) {
    const auto k = static_cast<std::uint64_t>(tuple.k());
    if (k < 2) return {};  // a singleton misses a class mod every prime
    auto cache = primes.at_least(std::max<std::uint64_t>(k, 4));
    return cache->primes_in_range(2, k);
}

}  // namespace

Verdict check_admissible(const Tuple& tuple, PrimeSource& primes) {
    const auto ps = primes_up_to_k(tuple, primes);
    const auto elems = tuple.elements();
    const auto k = static_cast<std::uint64_t>(tuple.k());

    const std::uint64_t est_work = ps.size() * k;
    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned workers =
        (est_work > 200'000'000 && hw > 1) ? std::min<unsigned>(hw, 16) : 1;

    if (workers == 1) {
        StampSet stamps;
        stamps.reset(k + 1);
        for (const std::uint64_t p : ps) {
            if (!prime_has_missed_class(elems, p, stamps)) return {false, p};
        }
        return {true, std::nullopt};
    }

    // Interleaved shards balance cost; the merge takes the smallest covered
    // prime, which equals the sequential answer.
    std::atomic<std::uint64_t> best{UINT64_MAX};
    auto run_shard = [&](unsigned shard) {
        StampSet stamps;
        stamps.reset(k + 1);
        for (std::size_t i = shard; i < ps.size(); i += workers) {
            const std::uint64_t p = ps[i];
            if (p >= best.load(std::memory_order_relaxed)) break;
            if (!prime_has_missed_class(elems, p, stamps)) {
                std::uint64_t cur = best.load(std::memory_order_relaxed);
                while (p < cur && !best.compare_exchange_weak(cur, p)) {
                }
                break;
            }
        }
    };
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        futs.push_back(std::async(std::launch::async, run_shard, t));
    }
    for (auto& f : futs) f.get();

    const std::uint64_t obstruction = best.load();
    if (obstruction == UINT64_MAX) return {true, std::nullopt};
    return {false, obstruction};
}

AdmissibilityReport admissibility_report(const Tuple& tuple, PrimeSource& primes,
                                         bool stop_at_first_covered) {
    const auto ps = primes_up_to_k(tuple, primes);
    const auto elems = tuple.elements();
    const auto k = static_cast<std::uint64_t>(tuple.k());

    AdmissibilityReport report;
    report.admissible = true;
    report.evidence.reserve(ps.size());

    StampSet stamps;
    stamps.reset(k + 1);
    for (const std::uint64_t p : ps) {
        const std::uint32_t epoch = stamps.next_epoch();
        std::uint64_t marked = 0;
        for (const std::int64_t e : elems) {
            const std::uint64_t r = residue_of(e, p);
            if (stamps.stamp[r] != epoch) {
                stamps.stamp[r] = epoch;
                ++marked;
            }
        }
        if (marked == p) {
            report.evidence.push_back({p, std::nullopt});
            if (report.admissible) {
                report.admissible = false;
                report.obstruction = p;
            }
            if (stop_at_first_covered) break;
        } else {
            std::uint64_t missed = 0;
            while (stamps.stamp[missed] == epoch) ++missed;
            report.evidence.push_back({p, missed});
        }
    }
    return report;
}

std::vector<std::uint64_t> residue_cover(const Tuple& tuple, std::uint64_t p) {
    if (!is_prime_trial(p)) {
        std::ostringstream os;
        os << "residue_cover requires a prime modulus; " << p << " is not prime";
        throw ValidationError(os.str());
    }
    std::vector<std::uint64_t> hit;
    for (const std::int64_t e : tuple.elements()) hit.push_back(residue_of(e, p));
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    return hit;
}

}  // namespace tuplesmith
