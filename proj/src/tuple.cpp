#include "tuplesmith/tuple.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tuplesmith {

Tuple Tuple::normalize(std::vector<std::int64_t> raw) {
    if (raw.empty()) throw ValidationError("tuple must be nonempty");
    std::sort(raw.begin(), raw.end());
    auto dup = std::adjacent_find(raw.begin(), raw.end());
    if (dup != raw.end()) {
        std::ostringstream os;
        os << "duplicate element " << *dup;
        throw ValidationError(os.str());
    }
    const std::int64_t base = raw.front();
    for (auto& e : raw) e -= base;
    return Tuple(std::move(raw));
}

Tuple Tuple::from_ascending(std::vector<std::int64_t> elements) {
    if (elements.empty()) throw ValidationError("tuple must be nonempty");
    for (std::size_t i = 1; i < elements.size(); ++i) {
        if (elements[i] <= elements[i - 1]) {
            std::ostringstream os;
            os << "elements not strictly ascending at " << elements[i];
            throw ValidationError(os.str());
        }
    }
    return Tuple(std::move(elements));
}

Tuple Tuple::normalized() const { return translated(-elements_.front()); }

Tuple Tuple::translated(std::int64_t delta) const {
    std::vector<std::int64_t> out(elements_);
    for (auto& e : out) e += delta;
    return Tuple(std::move(out));
}

Tuple Tuple::reflected() const {
    std::vector<std::int64_t> out;
    out.reserve(elements_.size());
    for (auto it = elements_.rbegin(); it != elements_.rend(); ++it) out.push_back(-*it);
    return Tuple(std::move(out));
}

bool Tuple::contains(std::int64_t value) const {
    return std::binary_search(elements_.begin(), elements_.end(), value);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

Tuple parse_tuple_text(std::string_view text) {
    std::vector<std::int64_t> values;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;

        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            std::ostringstream os;
            os << "line " << line_no << ": expected an integer, got \"" << line << "\"";
            throw ParseError(os.str());
        }
        if (!values.empty() && value <= values.back()) {
            std::ostringstream os;
            os << "line " << line_no << ": elements must be strictly ascending (" << value
               << " after " << values.back() << ")";
            throw ParseError(os.str());
        }
        values.push_back(value);
    }
    if (values.empty()) throw ParseError("no tuple elements found");
    return Tuple::from_ascending(std::move(values));
}

Tuple read_tuple_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open tuple file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tuple_text(buf.str());
}

std::string tuple_to_text(const Tuple& tuple) {
    const Tuple norm = tuple.is_normalized() ? tuple : tuple.normalized();
    std::string out;
    for (const std::int64_t e : norm.elements()) {
        out += std::to_string(e);
        out += '\n';
    }
    return out;
}

void write_tuple_file(const std::filesystem::path& path, const Tuple& tuple) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write tuple file: " + path.string());
    out << tuple_to_text(tuple);
    if (!out) throw Error("short write to tuple file: " + path.string());
}

}  // namespace tuplesmith
