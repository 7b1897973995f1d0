#include "tuplesmith/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "tuplesmith/milestones.hpp"

namespace tuplesmith {

namespace {

using Clock = std::chrono::steady_clock;

// The endpoint-exchange move keeps residue counts for every prime <= k;
// the table costs O(sum of primes <= k), affordable to about this k.
constexpr std::uint64_t kExchangeMaxK = 10'000;
constexpr int kResieveAttempts = 16;

std::uint64_t residue_of(std::int64_t e, std::uint64_t p) {
    const std::int64_t m = e % static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(m < 0 ? m + static_cast<std::int64_t>(p) : m);
}

// Residue occupancy of the current tuple per prime p <= k, flattened.
struct ResidueTable {
    std::vector<std::uint64_t> primes;
    std::vector<std::size_t> offset;    // offset of prime i's counts
    std::vector<std::uint16_t> counts;  // counts[offset[i] + r]
    std::vector<std::uint32_t> distinct;

    void build(const Tuple& t, std::span<const std::uint64_t> ps) {
        primes.assign(ps.begin(), ps.end());
        offset.resize(primes.size());
        std::size_t total = 0;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            offset[i] = total;
            total += primes[i];
        }
        counts.assign(total, 0);
        distinct.assign(primes.size(), 0);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const std::uint64_t p = primes[i];
            for (const std::int64_t e : t.elements()) {
                auto& c = counts[offset[i] + residue_of(e, p)];
                if (c++ == 0) ++distinct[i];
            }
        }
    }
};

// One endpoint exchange, first-improvement, deterministic. Prefers the
// endpoint whose removal shrinks the diameter more.
std::optional<Tuple> try_endpoint_exchange(const Tuple& cur, const ResidueTable& table,
                                           PrimeSource& primes) {
    const auto elems = cur.elements();
    const std::size_t k = cur.k();
    if (k < 3) return std::nullopt;

    struct Direction {
        bool drop_max;
        std::int64_t removed;
        std::int64_t lo, hi;  // open candidate interval for the re-admitted q
        std::int64_t new_diameter;
    };
    const Direction dirs_raw[2] = {
        {true, elems[k - 1], elems[0], elems[k - 2], elems[k - 2] - elems[0]},
        {false, elems[0], elems[1], elems[k - 1], elems[k - 1] - elems[1]},
    };
    // Better shrink first; tie keeps drop-max.
    const Direction* dirs[2] = {&dirs_raw[0], &dirs_raw[1]};
    if (dirs_raw[1].new_diameter < dirs_raw[0].new_diameter) std::swap(dirs[0], dirs[1]);

    for (const Direction* dp : dirs) {
        const Direction& d = *dp;
        // Primes that would become fully covered by a wrong q: those with
        // exactly one missed class once `removed` is taken out.
        std::vector<std::pair<std::uint64_t, std::uint64_t>> forbidden;  // (p, residue)
        for (std::size_t i = 0; i < table.primes.size(); ++i) {
            const std::uint64_t p = table.primes[i];
            const std::uint64_t removed_r = residue_of(d.removed, p);
            const bool vacated = table.counts[table.offset[i] + removed_r] == 1;
            const std::uint32_t distinct_after = table.distinct[i] - (vacated ? 1 : 0);
            if (distinct_after + 1 == p) {
                // Exactly one missed residue remains; find it.
                for (std::uint64_t r = 0; r < p; ++r) {
                    std::uint32_t after = table.counts[table.offset[i] + r];
                    if (r == removed_r) --after;
                    if (after == 0) {
                        forbidden.emplace_back(p, r);
                        break;
                    }
                }
            }
        }

        for (std::int64_t q = d.lo + 1; q < d.hi; ++q) {
            if (cur.contains(q)) continue;
            bool ok = true;
            for (const auto& [p, r] : forbidden) {
                if (residue_of(q, p) == r) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;

            std::vector<std::int64_t> next(elems.begin(), elems.end());
            next.erase(std::find(next.begin(), next.end(), d.removed));
            next.insert(std::upper_bound(next.begin(), next.end(), q), q);
            Tuple candidate = Tuple::normalize(std::move(next));
            // Every accepted move re-verifies.
            if (check_admissible(candidate, primes).admissible) return candidate;
        }
    }
    return std::nullopt;
}

struct RestartOutcome {
    Tuple tuple;
    SearchTrace trace;
};

struct SearchContext {
    const SearchBudget* budget;
    PrimeSource* primes;
    Clock::time_point deadline;
    bool use_deadline;

    bool expired() const { return use_deadline && Clock::now() >= deadline; }
};

RestartOutcome run_restart(const Tuple& start, std::uint32_t restart_index,
                           const SearchContext& ctx) {
    PrimeSource& primes = *ctx.primes;
    const SearchBudget& budget = *ctx.budget;
    std::mt19937_64 rng(budget.seed + restart_index);

    Tuple cur = start.is_normalized() ? start : start.normalized();
    Tuple best = cur;
    SearchTrace trace;
    std::uint64_t iterations = 0;
    const double temperature =
        budget.annealing ? 1.0 / static_cast<double>(std::uint64_t{1} << std::min<std::uint32_t>(
                                     restart_index, 62))
                         : 0.0;

    const std::uint64_t k = cur.k();
    const bool exchange_enabled = k >= 3 && k <= kExchangeMaxK;
    auto cache = primes.at_least(std::max<std::uint64_t>(k, 4));
    std::vector<std::uint64_t> prime_list =
        k >= 2 ? cache->primes_in_range(2, k) : std::vector<std::uint64_t>{};
    ResidueTable table;

    auto accept = [&](Tuple next, MoveKind move) {
        cur = std::move(next);
        ++iterations;
        if (cur.diameter() < best.diameter()) {
            best = cur;
            trace.steps.push_back({iterations, cur.diameter(), move});
        }
    };
    auto iterations_left = [&] {
        return budget.max_iterations == 0 || iterations < budget.max_iterations;
    };

    int resieve_budget = kResieveAttempts;
    while (!ctx.expired() && iterations_left()) {
        bool progress = false;

        if (exchange_enabled) {
            while (!ctx.expired() && iterations_left()) {
                table.build(cur, prime_list);
                auto next = try_endpoint_exchange(cur, table, primes);
                if (!next) break;
                accept(std::move(*next), MoveKind::endpoint_exchange);
                progress = true;
            }
        }

        if (ctx.expired() || !iterations_left()) break;

        // Window slide: deterministic sieve over a slightly wider interval,
        // then take the best k-window of the survivors.
        if (cur.diameter() > 0) {
            GreedyOptions slide_opt;
            const auto slide_x = static_cast<std::int64_t>(
                static_cast<double>(cur.diameter()) * 1.2);
            auto slide_cache = primes.at_least(std::max<std::uint64_t>(k, 4));
            SievePass pass = greedy_sieve_pass(k, slide_x, slide_opt, *slide_cache, 0);
            if (pass.enough) {
                const std::size_t b = pass.window_begin;
                const std::int64_t diam = pass.survivors[b + k - 1] - pass.survivors[b];
                if (diam < cur.diameter()) {
                    std::vector<std::int64_t> window(
                        pass.survivors.begin() + static_cast<std::ptrdiff_t>(b),
                        pass.survivors.begin() + static_cast<std::ptrdiff_t>(b + k));
                    Tuple candidate = Tuple::normalize(std::move(window));
                    if (check_admissible(candidate, primes).admissible) {
                        accept(std::move(candidate), MoveKind::window_slide);
                        progress = true;
                    }
                }
            }
        }

        // Seeded greedy re-sieve with randomized tie-breaking.
        bool resieve_hit = false;
        while (resieve_budget > 0 && !ctx.expired() && iterations_left()) {
            --resieve_budget;
            GreedyOptions opt;
            opt.randomize_ties = true;
            const std::int64_t margin =
                budget.annealing ? std::max<std::int64_t>(1, cur.diameter() / 20) : 0;
            const std::int64_t x = std::max<std::int64_t>(
                static_cast<std::int64_t>(k), cur.diameter() - 1 + margin);
            auto pass_cache = primes.at_least(std::max<std::uint64_t>(k, 4));
            SievePass pass = greedy_sieve_pass(k, x, opt, *pass_cache, rng());
            if (!pass.enough) continue;
            const std::size_t b = pass.window_begin;
            const std::int64_t diam = pass.survivors[b + k - 1] - pass.survivors[b];
            const std::int64_t delta = diam - cur.diameter();
            bool take = delta < 0;
            if (!take && budget.annealing && temperature > 0.0) {
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                take = unit(rng) <
                       std::exp(-static_cast<double>(delta) / temperature);
            }
            if (!take) continue;
            std::vector<std::int64_t> window(
                pass.survivors.begin() + static_cast<std::ptrdiff_t>(b),
                pass.survivors.begin() + static_cast<std::ptrdiff_t>(b + k));
            Tuple candidate = Tuple::normalize(std::move(window));
            if (!check_admissible(candidate, primes).admissible) continue;
            accept(std::move(candidate), MoveKind::resieve);
            resieve_hit = true;
            break;
        }

        if (!progress && !resieve_hit) break;
    }

    return {std::move(best), std::move(trace)};
}

}  // namespace

void SearchBudget::validate() const {
    if (max_seconds < 0.0) throw ValidationError("max_seconds must be nonnegative");
    if (max_seconds == 0.0 && max_iterations == 0) {
        throw ValidationError("at least one of max_seconds/max_iterations must be positive");
    }
}

const char* move_name(MoveKind m) {
    switch (m) {
        case MoveKind::window_slide: return "window-slide";
        case MoveKind::endpoint_exchange: return "endpoint-exchange";
        case MoveKind::resieve: return "resieve";
    }
    return "unknown";
}

SearchResult local_search(const Tuple& start, const SearchBudget& budget,
                          PrimeSource& primes) {
    budget.validate();
    const Verdict v = check_admissible(start, primes);
    if (!v.admissible) {
        std::ostringstream os;
        os << "local_search start tuple is inadmissible (obstruction p=" << *v.obstruction
           << ")";
        throw ValidationError(os.str());
    }

    SearchContext ctx;
    ctx.budget = &budget;
    ctx.primes = &primes;
    ctx.use_deadline = budget.max_seconds > 0.0;
    ctx.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(budget.max_seconds));

    const std::uint32_t passes = std::max<std::uint32_t>(1, budget.restarts);
    std::vector<RestartOutcome> outcomes(passes);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (passes > 1 && hw > 1) {
        std::vector<std::future<RestartOutcome>> futs;
        futs.reserve(passes);
        for (std::uint32_t r = 0; r < passes; ++r) {
            futs.push_back(std::async(std::launch::async,
                                      [&, r] { return run_restart(start, r, ctx); }));
        }
        for (std::uint32_t r = 0; r < passes; ++r) outcomes[r] = futs[r].get();
    } else {
        for (std::uint32_t r = 0; r < passes; ++r) outcomes[r] = run_restart(start, r, ctx);
    }

    // Best diameter wins; ties go to the lowest restart index.
    std::size_t winner = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r) {
        if (outcomes[r].tuple.diameter() < outcomes[winner].tuple.diameter()) winner = r;
    }
    return {std::move(outcomes[winner].tuple), std::move(outcomes[winner].trace)};
}

SuiteResult best_of_suite(std::uint64_t k, const SearchBudget& budget, PrimeSource& primes) {
    if (k < 1) throw ValidationError("best_of_suite requires k >= 1");
    budget.validate();

    const std::uint64_t scan = std::max<std::uint64_t>(2'000, std::min<std::uint64_t>(k, 20'000));
    std::vector<ConstructionSpec> specs;
    specs.push_back({Method::zhang_block, k});
    specs.push_back({Method::shifted_block, k, scan});
    if (k >= 2) specs.push_back({Method::hensley_richards, k, scan});
    {
        ConstructionSpec greedy{Method::greedy_sieve, k};
        greedy.seed = budget.seed;
        specs.push_back(greedy);
    }

    SearchBudget per_method = budget;
    per_method.max_seconds = budget.max_seconds / static_cast<double>(specs.size());

    SuiteResult result{Tuple::normalize({0})};
    bool have_best = false;
    std::string last_error;

    for (const ConstructionSpec& spec : specs) {
        MethodOutcome outcome;
        outcome.method = spec.method;
        try {
            const ConstructionResult built = construct(spec, primes);
            outcome.construction_diameter = built.diameter();
            SearchResult polished = local_search(built.tuple, per_method, primes);
            outcome.optimized_diameter = polished.tuple.diameter();
            outcome.ok = true;
            const bool better =
                !have_best || polished.tuple.diameter() < result.tuple.diameter();
            if (better) {
                have_best = true;
                result.tuple = std::move(polished.tuple);
                result.trace = std::move(polished.trace);
                result.best_method = spec.method;
            }
        } catch (const Error& e) {
            outcome.error = e.what();
            last_error = e.what();
        }
        result.outcomes.push_back(std::move(outcome));
    }

    if (!have_best) {
        throw SearchFailureError("every construction failed for k=" + std::to_string(k) +
                                 "; last error: " + last_error);
    }
    if (const auto floor = paper_record_floor(k);
        floor && result.tuple.diameter() < *floor) {
        result.new_record_flag = true;
    }
    return result;
}

std::string format_trace_csv(const SearchTrace& trace) {
    std::string out = "iteration,diameter,move\n";
    for (const TraceStep& s : trace.steps) {
        out += std::to_string(s.iteration);
        out += ',';
        out += std::to_string(s.diameter);
        out += ',';
        out += move_name(s.move);
        out += '\n';
    }
    return out;
}

}  // namespace tuplesmith
