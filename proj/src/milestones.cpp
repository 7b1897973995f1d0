#include "tuplesmith/milestones.hpp"

#include <array>
#include <sstream>

#include "tuplesmith/store.hpp"

namespace tuplesmith {

namespace {

// The published H_1 ladder, in the order the bounds fell. The two refined
// block estimates cannot be re-derived by this artifact's constructions and
// stay display-only.
constexpr std::array<Milestone, 9> kLadder{{
    {70'000'000, 3'500'000, false, true, "consecutive-prime block, coarse bound"},
    {63'374'611, 3'500'000, false, true, "consecutive-prime block, endpoint bound"},
    {59'874'594, 3'500'000, false, false, "refined block estimate"},
    {59'470'640, 3'500'000, false, false, "computer-assisted block shift"},
    {58'885'998, 3'500'000, false, true, "symmetric prime pattern (extended-scale job)"},
    {48'112'378, 2'947'442, false, true, "consecutive-prime block at reduced k"},
    {390'000, 34'429, true, true, "reduced k after cutoff optimization"},
    {280'000, 26'024, true, true, "reduced k after constant tuning"},
    {4'680, 632, false, true, "final record"},
}};

}  // namespace

std::span<const Milestone> bound_ladder() { return kLadder; }

std::optional<std::int64_t> paper_record_floor(std::uint64_t k) {
    if (k == 632) return 4'680;
    return std::nullopt;
}

std::vector<TimelineRow> build_timeline(const Store* store) {
    std::vector<TimelineRow> rows;
    rows.reserve(kLadder.size());
    for (const Milestone& m : kLadder) {
        TimelineRow row;
        row.milestone = &m;
        if (!m.reproducible) {
            row.status = "historical";
        } else if (store && m.k) {
            if (const auto entry = store->best(*m.k)) {
                row.status = "reproduced";
                row.local_bound = entry->diameter;
            } else {
                row.status = "not-run";
            }
        } else {
            row.status = "not-run";
        }
        rows.push_back(row);
    }
    return rows;
}

std::string format_timeline(const std::vector<TimelineRow>& rows) {
    std::ostringstream os;
    os << "bound\tk\tstatus\tlocal\tnote\n";
    for (const TimelineRow& row : rows) {
        const Milestone& m = *row.milestone;
        os << (m.approximate ? "~" : "") << m.bound << '\t';
        if (m.k) {
            os << *m.k;
        } else {
            os << '-';
        }
        os << '\t' << row.status << '\t';
        if (row.local_bound) {
            os << *row.local_bound;
        } else {
            os << '-';
        }
        os << '\t' << m.note << '\n';
    }
    return os.str();
}

}  // namespace tuplesmith
