#include "tuplesmith/bench.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "tuplesmith/admissibility.hpp"
#include "tuplesmith/constructions.hpp"
#include "tuplesmith/optimize.hpp"

namespace tuplesmith {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

BenchProfile bench_profile_from_name(const std::string& name) {
    if (name == "sieve") return BenchProfile::sieve;
    if (name == "verify") return BenchProfile::verify;
    if (name == "search") return BenchProfile::search;
    throw ValidationError("unknown bench profile: " + name +
                          " (expected sieve, verify, or search)");
}

std::vector<BenchRow> run_bench(BenchProfile profile, PrimeSource& primes) {
    std::vector<BenchRow> rows;
    switch (profile) {
        case BenchProfile::sieve: {
            const auto start = Clock::now();
            const PrimeCache cache = PrimeCache::build(70'000'000);
            const double secs = seconds_since(start);
            rows.push_back({"sieve", "segmented sieve to 70000000 (pi=" +
                                         std::to_string(cache.total_primes()) + ")",
                            secs});
            break;
        }
        case BenchProfile::verify: {
            const ConstructionResult built = zhang_block(34'429, primes);
            const auto start = Clock::now();
            const Verdict v = check_admissible(built.tuple, primes);
            const double secs = seconds_since(start);
            rows.push_back({"verify", "admissibility verdict for the k=34429 prime block (" +
                                          std::string(v.admissible ? "admissible" : "inadmissible") +
                                          ")",
                            secs});
            break;
        }
        case BenchProfile::search: {
            SearchBudget budget;
            budget.max_seconds = 20.0;
            budget.restarts = 2;
            const auto start = Clock::now();
            const SuiteResult suite = best_of_suite(632, budget, primes);
            const double secs = seconds_since(start);
            rows.push_back({"search", "k=632 construction suite (best diameter " +
                                          std::to_string(suite.tuple.diameter()) + ")",
                            secs});
            break;
        }
    }
    return rows;
}

std::string format_bench(const std::vector<BenchRow>& rows, bool csv) {
    std::ostringstream os;
    if (csv) {
        os << "name,workload,seconds\n";
        for (const BenchRow& r : rows) {
            os << r.name << ",\"" << r.workload << "\"," << std::fixed << std::setprecision(3)
               << r.seconds << "\n";
        }
    } else {
        for (const BenchRow& r : rows) {
            os << std::left << std::setw(8) << r.name << std::fixed << std::setprecision(3)
               << std::setw(10) << r.seconds << " s  " << r.workload << "\n";
        }
    }
    return os.str();
}

}  // namespace tuplesmith
