#include "tuplesmith/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "tuplesmith/checksum.hpp"

namespace tuplesmith {

namespace {

// Advisory single-writer lock on the index.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw Error("cannot open lock file: " + path.string());
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw Error("cannot lock: " + path.string());
        }
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

std::string now_utc_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sanitize_provenance(std::string_view provenance) {
    std::string out(provenance);
    for (char& c : out) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes,
                       const std::function<void(const char*)>& hook, const char* written_point,
                       const char* renamed_point) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("short write: " + tmp.string());
    }
    if (hook) hook(written_point);
    std::filesystem::rename(tmp, path);
    if (hook) hook(renamed_point);
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(std::string("invalid ") + what + ": \"" + std::string(s) + "\"");
    }
    return value;
}

std::int64_t parse_i64(std::string_view s, const char* what) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(std::string("invalid ") + what + ": \"" + std::string(s) + "\"");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

// Iteratively trims one endpoint (whichever keeps the diameter smaller)
// until `target_k` elements remain. Subsets of admissible tuples stay
// admissible, so the result is a valid candidate record.
Tuple trim_to(const Tuple& tuple, std::uint64_t target_k) {
    const auto elems = tuple.elements();
    std::size_t lo = 0;
    std::size_t hi = elems.size() - 1;
    while (hi - lo + 1 > target_k) {
        const std::int64_t drop_max = elems[hi - 1] - elems[lo];
        const std::int64_t drop_min = elems[hi] - elems[lo + 1];
        if (drop_max <= drop_min) {
            --hi;
        } else {
            ++lo;
        }
    }
    std::vector<std::int64_t> kept(elems.begin() + static_cast<std::ptrdiff_t>(lo),
                                   elems.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    return Tuple::normalize(std::move(kept));
}

}  // namespace

Store::Store(std::filesystem::path dir, PrimeSource& primes, Options options)
    : dir_(std::move(dir)), primes_(&primes), options_(std::move(options)) {
    std::filesystem::create_directories(dir_);
    // Clean up leftovers from interrupted commits.
    for (const auto& de : std::filesystem::directory_iterator(dir_)) {
        if (de.path().extension() == ".tmp") std::filesystem::remove(de.path());
    }
}

void Store::hook(const char* point) const {
    if (options_.crash_hook) options_.crash_hook(point);
}

Store::EntryMap Store::load_index() const {
    EntryMap entries;
    const auto index_path = dir_ / kIndexName;
    if (!std::filesystem::exists(index_path)) return entries;
    const std::string bytes = read_file_bytes(index_path);
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < bytes.size()) {
        const std::size_t nl = bytes.find('\n', pos);
        const std::string_view line(bytes.data() + pos,
                                    (nl == std::string::npos ? bytes.size() : nl) - pos);
        pos = nl == std::string::npos ? bytes.size() : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 6) {
            throw IntegrityError("malformed index line " + std::to_string(line_no) + " in " +
                                 index_path.string());
        }
        RecordEntry e;
        e.k = parse_u64(fields[0], "index k");
        e.diameter = parse_i64(fields[1], "index diameter");
        e.tuple_file = std::string(fields[2]);
        e.checksum = std::string(fields[3]);
        e.provenance = std::string(fields[4]);
        e.verified_at = std::string(fields[5]);
        entries[e.k] = std::move(e);
    }
    return entries;
}

void Store::save_index(const EntryMap& entries) const {
    std::string bytes;
    for (const auto& [k, e] : entries) {
        bytes += std::to_string(e.k);
        bytes += '\t';
        bytes += std::to_string(e.diameter);
        bytes += '\t';
        bytes += e.tuple_file;
        bytes += '\t';
        bytes += e.checksum;
        bytes += '\t';
        bytes += e.provenance;
        bytes += '\t';
        bytes += e.verified_at;
        bytes += '\n';
    }
    write_file_atomic(dir_ / kIndexName, bytes, options_.crash_hook, "index-written",
                      "index-renamed");
}

std::string Store::write_tuple_file_atomic(const Tuple& tuple, std::uint64_t k,
                                           std::int64_t diameter) const {
    std::string filename =
        "k" + std::to_string(k) + "_d" + std::to_string(diameter) + ".txt";
    write_file_atomic(dir_ / filename, tuple_to_text(tuple), options_.crash_hook,
                      "tuple-written", "tuple-renamed");
    return filename;
}

RecordEntry Store::make_entry(const Tuple& tuple, std::uint64_t k, std::string_view provenance,
                              std::string filename) const {
    RecordEntry e;
    e.k = k;
    e.diameter = tuple.diameter();
    e.tuple_file = std::move(filename);
    e.checksum = fnv1a64_hex(tuple_to_text(tuple));
    e.provenance = sanitize_provenance(provenance);
    e.verified_at = now_utc_iso8601();
    return e;
}

void Store::cascade_projection(EntryMap& entries, const Tuple& source,
                               std::vector<std::string>* repaired) const {
    // Walk downward from the new record, replacing any existing entry that
    // is strictly wider than the trimmed projection. Missing ks are skipped
    // (projection never invents records); once an entry at or below the
    // projected diameter is found the envelope below it is already sound.
    Tuple proj = source;
    for (std::uint64_t kk = source.k() - 1; kk >= 1; --kk) {
        proj = trim_to(proj, kk);
        auto it = entries.find(kk);
        if (it == entries.end()) {
            if (kk == 1) break;
            continue;
        }
        if (it->second.diameter <= proj.diameter()) break;
        if (!check_admissible(proj, *primes_).admissible) break;  // never store unverified
        const std::string filename = write_tuple_file_atomic(proj, kk, proj.diameter());
        std::string provenance = "projection from k=" + std::to_string(source.k());
        it->second = make_entry(proj, kk, provenance, filename);
        if (repaired) {
            repaired->push_back("repaired k=" + std::to_string(kk) + " by projection (diameter " +
                                std::to_string(proj.diameter()) + ")");
        }
        if (kk == 1) break;
    }
}

IngestOutcome Store::ingest(std::string_view tuple_text, std::string_view provenance) {
    const Tuple tuple = parse_tuple_text(tuple_text).normalized();
    const auto k = static_cast<std::uint64_t>(tuple.k());

    IngestOutcome outcome;
    outcome.k = k;
    outcome.diameter = tuple.diameter();
    if (k > kSoftKLimit) {
        outcome.warning = "k=" + std::to_string(k) + " exceeds the recorded database scope (k <= " +
                          std::to_string(kSoftKLimit) + ")";
    }

    const Verdict verdict = check_admissible(tuple, *primes_);
    if (!verdict.admissible) {
        outcome.status = IngestStatus::rejected;
        outcome.rejection = admissibility_report(tuple, *primes_, /*stop_at_first_covered=*/true);
        outcome.obstruction_cover = residue_cover(tuple, *verdict.obstruction);
        return outcome;
    }

    FileLock lock(dir_ / "index.lock");
    EntryMap entries = load_index();

    const auto incumbent = entries.find(k);
    if (incumbent != entries.end()) {
        outcome.incumbent_diameter = incumbent->second.diameter;
        if (tuple.diameter() >= incumbent->second.diameter) {
            outcome.status = IngestStatus::accepted_not_better;
            return outcome;
        }
    }

    std::string superseded;
    if (incumbent != entries.end()) superseded = incumbent->second.tuple_file;

    const std::string filename = write_tuple_file_atomic(tuple, k, tuple.diameter());
    entries[k] = make_entry(tuple, k, provenance, filename);
    if (options_.projection_repair && k > 1) cascade_projection(entries, tuple, nullptr);
    save_index(entries);

    if (!superseded.empty() && superseded != filename) {
        std::error_code ec;
        std::filesystem::remove(dir_ / superseded, ec);  // orphan cleanup, best-effort
    }

    outcome.status = IngestStatus::accepted_new_record;
    return outcome;
}

std::optional<RecordEntry> Store::best(std::uint64_t k) const {
    const EntryMap entries = load_index();
    const auto it = entries.find(k);
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

std::vector<RecordEntry> Store::entries() const {
    const EntryMap map = load_index();
    std::vector<RecordEntry> out;
    out.reserve(map.size());
    for (const auto& [k, e] : map) out.push_back(e);
    return out;
}

Tuple Store::load_tuple(const RecordEntry& entry) const {
    const auto path = dir_ / entry.tuple_file;
    const std::string bytes = read_file_bytes(path);
    if (fnv1a64_hex(bytes) != entry.checksum) {
        throw IntegrityError("checksum mismatch for " + path.string());
    }
    return parse_tuple_text(bytes);
}

std::vector<std::string> Store::consistency_check(bool repair) {
    std::vector<std::string> violations;
    FileLock lock(dir_ / "index.lock");
    EntryMap entries = load_index();

    for (const auto& [k, e] : entries) {
        const auto path = dir_ / e.tuple_file;
        if (!std::filesystem::exists(path)) {
            violations.push_back("k=" + std::to_string(k) + ": missing tuple file " +
                                 e.tuple_file);
            continue;
        }
        Tuple t = load_tuple(e);  // IntegrityError on checksum mismatch
        if (static_cast<std::uint64_t>(t.k()) != e.k) {
            violations.push_back("k=" + std::to_string(k) + ": tuple file holds k=" +
                                 std::to_string(t.k()));
            continue;
        }
        if (t.diameter() != e.diameter) {
            violations.push_back("k=" + std::to_string(k) + ": recorded diameter " +
                                 std::to_string(e.diameter) + " but tuple has " +
                                 std::to_string(t.diameter()));
            continue;
        }
        if (e.diameter < static_cast<std::int64_t>(k) - 1) {
            violations.push_back("k=" + std::to_string(k) + ": diameter " +
                                 std::to_string(e.diameter) + " below k-1");
        }
        const Verdict v = check_admissible(t, *primes_);
        if (!v.admissible) {
            violations.push_back("k=" + std::to_string(k) +
                                 ": stored tuple fails re-verification (obstruction p=" +
                                 std::to_string(*v.obstruction) + ")");
        }
    }

    // Monotone envelope over the present keys.
    bool changed = true;
    while (changed) {
        changed = false;
        const RecordEntry* prev = nullptr;
        for (auto& [k, e] : entries) {
            if (prev && prev->diameter > e.diameter) {
                violations.push_back("monotonicity: best(" + std::to_string(prev->k) + ")=" +
                                     std::to_string(prev->diameter) + " exceeds best(" +
                                     std::to_string(k) + ")=" + std::to_string(e.diameter));
                if (repair) {
                    Tuple wider = load_tuple(e);
                    std::vector<std::string> repaired;
                    cascade_projection(entries, wider, &repaired);
                    for (auto& msg : repaired) violations.push_back(std::move(msg));
                    changed = true;
                    break;  // map mutated; restart the scan
                }
            }
            prev = &e;
        }
    }
    if (repair) save_index(entries);
    return violations;
}

std::string Store::export_archive(std::uint64_t min_k, std::uint64_t max_k) const {
    if (min_k > max_k) throw ValidationError("export range: min_k exceeds max_k");
    const EntryMap entries = load_index();
    std::string out(kArchiveMagic);
    for (const auto& [k, e] : entries) {
        if (k < min_k || k > max_k) continue;
        const std::string tuple_bytes = read_file_bytes(dir_ / e.tuple_file);
        if (fnv1a64_hex(tuple_bytes) != e.checksum) {
            throw IntegrityError("checksum mismatch for " + (dir_ / e.tuple_file).string());
        }
        out += "E ";
        out += std::to_string(e.k);
        out += ' ';
        out += std::to_string(e.diameter);
        out += ' ';
        out += e.checksum;
        out += ' ';
        out += std::to_string(e.provenance.size());
        out += ' ';
        out += std::to_string(tuple_bytes.size());
        out += '\n';
        out += e.provenance;
        out += '\n';
        out += tuple_bytes;
    }
    return out;
}

Store::ImportSummary Store::import_archive(std::string_view archive) {
    if (archive.substr(0, kArchiveMagic.size()) != kArchiveMagic) {
        throw ParseError("archive does not start with TSR1 header");
    }
    ImportSummary summary;
    std::size_t pos = kArchiveMagic.size();
    std::size_t entry_no = 0;
    while (pos < archive.size()) {
        ++entry_no;
        const std::size_t nl = archive.find('\n', pos);
        if (nl == std::string_view::npos) {
            summary.errors.push_back("entry " + std::to_string(entry_no) +
                                     ": truncated header");
            break;
        }
        const std::string_view header = archive.substr(pos, nl - pos);
        pos = nl + 1;

        // Framing must succeed to keep reading; anything past it is a
        // per-entry failure and does not stop the batch.
        std::uint64_t k = 0;
        std::int64_t diameter = 0;
        std::string checksum;
        std::string_view provenance;
        std::string_view tuple_bytes;
        try {
            const auto fields = split(header, ' ');
            if (fields.size() != 6 || fields[0] != "E") {
                throw ParseError("malformed entry header \"" + std::string(header) + "\"");
            }
            k = parse_u64(fields[1], "archive k");
            diameter = parse_i64(fields[2], "archive diameter");
            checksum = std::string(fields[3]);
            const std::size_t prov_len = parse_u64(fields[4], "provenance length");
            const std::size_t tuple_len = parse_u64(fields[5], "tuple length");
            if (pos + prov_len + 1 + tuple_len > archive.size()) {
                throw ParseError("truncated entry body");
            }
            provenance = archive.substr(pos, prov_len);
            pos += prov_len;
            if (archive[pos] != '\n') throw ParseError("missing provenance terminator");
            ++pos;
            tuple_bytes = archive.substr(pos, tuple_len);
            pos += tuple_len;
        } catch (const Error& e) {
            summary.errors.push_back("entry " + std::to_string(entry_no) + ": " + e.what());
            break;  // remaining bytes cannot be framed reliably
        }

        try {
            if (fnv1a64_hex(tuple_bytes) != checksum) {
                throw IntegrityError("entry k=" + std::to_string(k) + ": checksum mismatch");
            }
            const IngestOutcome outcome = ingest(tuple_bytes, provenance);
            switch (outcome.status) {
                case IngestStatus::accepted_new_record:
                    ++summary.accepted_new;
                    break;
                case IngestStatus::accepted_not_better:
                    ++summary.accepted_not_better;
                    break;
                case IngestStatus::rejected:
                    ++summary.rejected;
                    break;
            }
            if (outcome.diameter != diameter && outcome.status != IngestStatus::rejected) {
                summary.errors.push_back("entry k=" + std::to_string(k) +
                                         ": archived diameter " + std::to_string(diameter) +
                                         " disagrees with tuple (" +
                                         std::to_string(outcome.diameter) + ")");
            }
        } catch (const Error& e) {
            summary.errors.push_back("entry " + std::to_string(entry_no) + ": " + e.what());
        }
    }
    return summary;
}

}  // namespace tuplesmith
