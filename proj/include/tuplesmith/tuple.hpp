#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tuplesmith/errors.hpp"

namespace tuplesmith {

// A candidate admissible tuple: strictly ascending distinct integers.
// Normalized form is translated so the smallest element is 0; that is the
// canonical form for storage and hashing, but any translation is a valid
// in-memory value.
class Tuple {
public:
    // Sorts, rejects duplicates (naming one), translates so min == 0.
    static Tuple normalize(std::vector<std::int64_t> raw);

    // Accepts an already strictly-ascending list without translating it.
    static Tuple from_ascending(std::vector<std::int64_t> elements);

    std::size_t k() const noexcept { return elements_.size(); }
    std::int64_t diameter() const noexcept { return elements_.back() - elements_.front(); }
    std::span<const std::int64_t> elements() const noexcept { return elements_; }
    std::int64_t min() const noexcept { return elements_.front(); }
    std::int64_t max() const noexcept { return elements_.back(); }

    bool is_normalized() const noexcept { return elements_.front() == 0; }
    Tuple normalized() const;
    Tuple translated(std::int64_t delta) const;
    // Mirror image: {-e : e in tuple}, kept ascending (not normalized).
    Tuple reflected() const;
    bool contains(std::int64_t value) const;

    bool operator==(const Tuple&) const = default;
    // Lexicographic on elements; used for deterministic tie-breaking.
    bool operator<(const Tuple& other) const { return elements_ < other.elements_; }

private:
    explicit Tuple(std::vector<std::int64_t> elements) : elements_(std::move(elements)) {}

    std::vector<std::int64_t> elements_;
};

// Tuple file format: ASCII, optional '#' comment lines, one integer per
// line, strictly ascending, LF newlines. Writers always emit the
// normalized form with no comments; that byte sequence is the canonical
// form used for checksums.
Tuple parse_tuple_text(std::string_view text);
Tuple read_tuple_file(const std::filesystem::path& path);
std::string tuple_to_text(const Tuple& tuple);
void write_tuple_file(const std::filesystem::path& path, const Tuple& tuple);

}  // namespace tuplesmith
