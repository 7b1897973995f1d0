#include "tuplesmith/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tuplesmith {

const char* method_name(Method m) {
    switch (m) {
        case Method::zhang_block: return "zhang-block";
        case Method::shifted_block: return "shifted-block";
        case Method::hensley_richards: return "hensley-richards";
        case Method::greedy_sieve: return "greedy-sieve";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "zhang-block") return Method::zhang_block;
    if (name == "shifted-block") return Method::shifted_block;
    if (name == "hensley-richards") return Method::hensley_richards;
    if (name == "greedy-sieve") return Method::greedy_sieve;
    throw ValidationError("unknown construction method: " + name);
}

void ConstructionSpec::validate() const {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (interval_scale < 1.0) throw ValidationError("interval_scale must be >= 1.0");
}

namespace {

Tuple tuple_from_primes(std::span<const std::uint64_t> block) {
    std::vector<std::int64_t> elems(block.begin(), block.end());
    return Tuple::normalize(std::move(elems));
}

}  // namespace

ConstructionResult zhang_block(std::uint64_t k, PrimeSource& primes) {
    if (k < 1) throw ValidationError("zhang_block requires k >= 1");
    auto cache = primes.with_primes_above(k, k);
    const auto block = cache->first_n_primes_above(k, k);

    ConstructionResult result{tuple_from_primes(block), Method::zhang_block,
                              static_cast<std::int64_t>(block.front()),
                              static_cast<std::int64_t>(block.back()), 0};
    return result;
}

ConstructionResult shifted_block(std::uint64_t k, std::uint64_t scan_range,
                                 PrimeSource& primes) {
    if (k < 1) throw ValidationError("shifted_block requires k >= 1");
    auto cache = primes.with_primes_above(0, scan_range + k);
    const auto ps = cache->first_n_primes_above(0, scan_range + k);

    bool have_best = false;
    std::uint64_t best_m = 0;
    std::int64_t best_diam = 0;
    Tuple best_tuple = Tuple::normalize({0});

    // Narrowest inadmissible candidate, for the not-found report.
    bool have_reject = false;
    std::int64_t reject_diam = 0;
    std::uint64_t reject_obstruction = 0;

    for (std::uint64_t m = 0; m + k <= ps.size(); ++m) {
        if (m > scan_range) break;
        const auto diam = static_cast<std::int64_t>(ps[m + k - 1] - ps[m]);
        // Only candidates that would strictly improve are verified; ties
        // keep the earlier m.
        if (have_best && diam >= best_diam) continue;
        Tuple t = tuple_from_primes({ps.data() + m, static_cast<std::size_t>(k)});
        const Verdict v = check_admissible(t, primes);
        if (v.admissible) {
            have_best = true;
            best_m = m;
            best_diam = diam;
            best_tuple = std::move(t);
        } else if (!have_reject || diam < reject_diam) {
            have_reject = true;
            reject_diam = diam;
            reject_obstruction = *v.obstruction;
        }
    }

    if (!have_best) {
        std::ostringstream os;
        os << "no admissible block of " << k << " consecutive primes for shifts 0.."
           << scan_range << "; narrowest candidate is obstructed at p=" << reject_obstruction;
        throw NotFoundError(os.str(), reject_obstruction);
    }
    return {std::move(best_tuple), Method::shifted_block,
            static_cast<std::int64_t>(ps[best_m]),
            static_cast<std::int64_t>(ps[best_m + k - 1]), best_m};
}

namespace {

// Symmetric candidate for shift m: {-1, +1} plus consecutive primes
// mirrored on both sides of zero; odd k gets one extra prime on the
// positive side. Uses 1-based prime indexing (p_{m+1} == ps[m]).
std::vector<std::int64_t> hr_candidate(std::uint64_t k, std::uint64_t m,
                                       std::span<const std::uint64_t> ps) {
    std::vector<std::int64_t> elems{-1, 1};
    const std::uint64_t mirrored = (k % 2 == 0) ? k / 2 - 1 : (k + 1) / 2 - 2;
    for (std::uint64_t i = 1; i <= mirrored; ++i) {
        const auto p = static_cast<std::int64_t>(ps[m + i - 1]);
        elems.push_back(p);
        elems.push_back(-p);
    }
    if (k % 2 == 1) {
        elems.push_back(static_cast<std::int64_t>(ps[m + (k + 1) / 2 - 2]));
    }
    std::sort(elems.begin(), elems.end());
    return elems;
}

}  // namespace

ConstructionResult hensley_richards(std::uint64_t k, std::uint64_t scan_range,
                                    PrimeSource& primes) {
    if (k < 2) throw ValidationError("hensley_richards requires k >= 2");
    const std::uint64_t primes_needed = scan_range + (k + 1) / 2;
    auto cache = primes.with_primes_above(0, primes_needed);
    const auto ps = cache->first_n_primes_above(0, primes_needed);

    std::optional<std::uint64_t> first_obstruction;
    // The candidate diameter grows strictly with m, so the first admissible
    // shift is the narrowest.
    for (std::uint64_t m = 0; m <= scan_range; ++m) {
        auto elems = hr_candidate(k, m, ps);
        const std::int64_t raw_min = elems.front();
        const std::int64_t raw_max = elems.back();
        Tuple t = Tuple::normalize(std::move(elems));
        const Verdict v = check_admissible(t, primes);
        if (v.admissible) {
            return {std::move(t), Method::hensley_richards, raw_min, raw_max, m};
        }
        if (!first_obstruction) first_obstruction = v.obstruction;
    }
    std::ostringstream os;
    os << "no admissible symmetric candidate for k=" << k << " within shifts 0.." << scan_range;
    if (first_obstruction) os << "; narrowest candidate is obstructed at p=" << *first_obstruction;
    throw NotFoundError(os.str(), first_obstruction);
}

SievePass greedy_sieve_pass(std::uint64_t k, std::int64_t x, const GreedyOptions& options,
                            const PrimeCache& cache, std::uint64_t tie_seed) {
    SievePass pass;
    pass.survivors.resize(static_cast<std::size_t>(x) + 1);
    for (std::int64_t v = 0; v <= x; ++v) pass.survivors[static_cast<std::size_t>(v)] = v;

    std::mt19937_64 rng(tie_seed);
    const auto primes =
        k >= 2 ? cache.primes_in_range(2, k) : std::vector<std::uint64_t>{};
    std::vector<std::uint32_t> counts;
    std::vector<std::uint64_t> tied;

    for (const std::uint64_t p : primes) {
        counts.assign(p, 0);
        for (const std::int64_t s : pass.survivors) {
            ++counts[static_cast<std::uint64_t>(s) % p];
        }

        std::uint64_t chosen = 0;
        if (options.classic_schinzel &&
            static_cast<std::int64_t>(p * p) <= x) {
            chosen = 0;
        } else {
            std::uint32_t best = counts[0];
            tied.assign(1, 0);
            for (std::uint64_t r = 1; r < p; ++r) {
                if (counts[r] < best) {
                    best = counts[r];
                    tied.assign(1, r);
                } else if (counts[r] == best) {
                    tied.push_back(r);
                }
            }
            chosen = options.randomize_ties && tied.size() > 1
                         ? tied[rng() % tied.size()]
                         : tied.front();
        }

        std::erase_if(pass.survivors, [&](std::int64_t s) {
            return static_cast<std::uint64_t>(s) % p == chosen;
        });
    }

    if (pass.survivors.size() < k) return pass;
    pass.enough = true;

    std::size_t best_begin = 0;
    std::int64_t best_diam = pass.survivors[k - 1] - pass.survivors[0];
    for (std::size_t i = 1; i + k <= pass.survivors.size(); ++i) {
        const std::int64_t d = pass.survivors[i + k - 1] - pass.survivors[i];
        if (d < best_diam) {
            best_diam = d;
            best_begin = i;
        }
    }
    pass.window_begin = best_begin;
    return pass;
}

GreedyResult greedy_sieve(std::uint64_t k, const GreedyOptions& options, PrimeSource& primes) {
    if (k < 1) throw ValidationError("greedy_sieve requires k >= 1");
    if (options.interval_scale < 1.0) {
        throw ValidationError("interval_scale must be >= 1.0");
    }

    std::int64_t x;
    if (k >= 6) {
        const double kd = static_cast<double>(k);
        x = static_cast<std::int64_t>(
            std::ceil(options.interval_scale * kd * (std::log(kd) + std::log(std::log(kd)))));
    } else {
        x = static_cast<std::int64_t>(4 * k);
    }

    auto cache = primes.at_least(std::max<std::uint64_t>(k, 4));
    for (std::uint32_t growth = 0; growth <= options.max_growths; ++growth) {
        SievePass pass = greedy_sieve_pass(k, x, options, *cache, options.seed + growth);
        if (pass.enough) {
            const std::size_t b = pass.window_begin;
            const std::int64_t raw_min = pass.survivors[b];
            const std::int64_t raw_max = pass.survivors[b + k - 1];
            std::vector<std::int64_t> window(pass.survivors.begin() + static_cast<std::ptrdiff_t>(b),
                                             pass.survivors.begin() + static_cast<std::ptrdiff_t>(b + k));
            GreedyResult result{{Tuple::normalize(std::move(window)), Method::greedy_sieve,
                                 raw_min, raw_max, growth},
                                std::move(pass.survivors),
                                x};
            return result;
        }
        x += std::max<std::int64_t>(1, x / 20);  // grow by 5%
    }
    std::ostringstream os;
    os << "greedy sieve for k=" << k << " exhausted " << options.max_growths
       << " interval growths without seating " << k << " survivors";
    throw SearchFailureError(os.str());
}

ConstructionResult construct(const ConstructionSpec& spec, PrimeSource& primes) {
    spec.validate();
    switch (spec.method) {
        case Method::zhang_block:
            return zhang_block(spec.k, primes);
        case Method::shifted_block:
            return shifted_block(spec.k, spec.scan_range, primes);
        case Method::hensley_richards:
            return hensley_richards(spec.k, spec.scan_range, primes);
        case Method::greedy_sieve: {
            GreedyOptions opt{spec.interval_scale, spec.seed, spec.randomize_ties,
                              spec.classic_schinzel};
            return greedy_sieve(spec.k, opt, primes).construction;
        }
    }
    throw ValidationError("unhandled construction method");
}

}  // namespace tuplesmith
