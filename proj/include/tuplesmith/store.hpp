#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tuplesmith/admissibility.hpp"
#include "tuplesmith/primes.hpp"
#include "tuplesmith/tuple.hpp"

namespace tuplesmith {

// One verified record: the narrowest known tuple for its k.
struct RecordEntry {
    std::uint64_t k = 0;
    std::int64_t diameter = 0;
    std::string tuple_file;   // filename relative to the store directory
    std::string checksum;     // fnv1a-64 hex of the canonical tuple bytes
    std::string provenance;
    std::string verified_at;  // ISO-8601 UTC
};

enum class IngestStatus { accepted_new_record, accepted_not_better, rejected };

struct IngestOutcome {
    IngestStatus status = IngestStatus::rejected;
    std::uint64_t k = 0;
    std::int64_t diameter = 0;
    std::optional<std::int64_t> incumbent_diameter;
    // For rejections: evidence up to the obstruction prime, plus the full
    // residue cover of the obstruction.
    std::optional<AdmissibilityReport> rejection;
    std::vector<std::uint64_t> obstruction_cover;
    std::string warning;
};

// Verification-gated, single-writer store of best tuples per k.
//
// Layout: one tuple file k<K>_d<H>.txt per record plus a tab-separated
// index (one record per line, LF), all commits via write-temp-then-rename.
// Writers serialize on an advisory flock; readers never observe partial
// writes.
class Store {
public:
    struct Options {
        bool projection_repair = true;
        // Test hook invoked at named points inside mutations; throwing from
        // it simulates a crash between filesystem operations.
        std::function<void(const char*)> crash_hook;
    };

    static constexpr std::uint64_t kSoftKLimit = 5000;
    static constexpr const char* kIndexName = "index.txt";

    Store(std::filesystem::path dir, PrimeSource& primes, Options options = {});

    const std::filesystem::path& dir() const noexcept { return dir_; }

    // Parses, normalizes, verifies, and (when strictly narrower than the
    // incumbent) atomically records the tuple. Equal diameters never
    // replace. With projection_repair, a new record also repairs any
    // strictly-worse existing records below it by endpoint trimming.
    IngestOutcome ingest(std::string_view tuple_text, std::string_view provenance);

    std::optional<RecordEntry> best(std::uint64_t k) const;
    std::vector<RecordEntry> entries() const;  // ascending k

    // Empty iff every record re-verifies, the diameter map is nondecreasing
    // in k, and every diameter >= k-1. With repair, monotonicity violations
    // are fixed by projecting the higher record down. Checksum mismatches
    // raise IntegrityError naming the file.
    std::vector<std::string> consistency_check(bool repair = false);

    // Deterministic archive of records with min_k <= k <= max_k.
    std::string export_archive(std::uint64_t min_k, std::uint64_t max_k) const;

    struct ImportSummary {
        std::size_t accepted_new = 0;
        std::size_t accepted_not_better = 0;
        std::size_t rejected = 0;
        std::vector<std::string> errors;  // per-entry, non-fatal
    };
    ImportSummary import_archive(std::string_view archive);

    // Reads a record's tuple, verifying its checksum first.
    Tuple load_tuple(const RecordEntry& entry) const;

private:
    using EntryMap = std::map<std::uint64_t, RecordEntry>;

    EntryMap load_index() const;
    void save_index(const EntryMap& entries) const;
    std::string write_tuple_file_atomic(const Tuple& tuple, std::uint64_t k,
                                        std::int64_t diameter) const;
    RecordEntry make_entry(const Tuple& tuple, std::uint64_t k, std::string_view provenance,
                           std::string filename) const;
    void cascade_projection(EntryMap& entries, const Tuple& source,
                            std::vector<std::string>* repaired) const;
    void hook(const char* point) const;

    std::filesystem::path dir_;
    PrimeSource* primes_;
    Options options_;
};

// Archive format identifier.
inline constexpr std::string_view kArchiveMagic = "TSR1\n";

}  // namespace tuplesmith
