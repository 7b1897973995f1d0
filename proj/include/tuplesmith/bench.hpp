#pragma once

#include <string>
#include <vector>

#include "tuplesmith/primes.hpp"

namespace tuplesmith {

enum class BenchProfile { sieve, verify, search };

BenchProfile bench_profile_from_name(const std::string& name);  // ValidationError on unknown

struct BenchRow {
    std::string name;
    std::string workload;
    double seconds = 0.0;
};

// Deterministic workloads with wall-clock timings.
std::vector<BenchRow> run_bench(BenchProfile profile, PrimeSource& primes);

std::string format_bench(const std::vector<BenchRow>& rows, bool csv);

}  // namespace tuplesmith
