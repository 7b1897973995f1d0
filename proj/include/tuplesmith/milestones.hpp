#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tuplesmith {

class Store;

// One rung of the published bound ladder. Rows marked historical are
// displayed for reference only and never used as pass/fail gates.
struct Milestone {
    std::int64_t bound = 0;              // H value
    std::optional<std::uint64_t> k;      // tuple cardinality when known
    bool approximate = false;            // bound reported only approximately
    bool reproducible = false;           // this artifact can re-derive it
    const char* note = "";
};

std::span<const Milestone> bound_ladder();

// Best diameter this artifact should ever report for a given k without
// raising a review flag (guards against verifier bugs).
std::optional<std::int64_t> paper_record_floor(std::uint64_t k);

struct TimelineRow {
    const Milestone* milestone = nullptr;
    std::string status;  // reproduced | historical | not-run
    std::optional<std::int64_t> local_bound;
};

// Local column comes from the record store when one is supplied.
std::vector<TimelineRow> build_timeline(const Store* store);

std::string format_timeline(const std::vector<TimelineRow>& rows);

}  // namespace tuplesmith
