#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "tensor.hpp"

namespace agtensor {

/// Line-oriented text formats.  Each file starts with a header line naming
/// the object and its shape; values follow row by row, space separated.
/// Blank lines and lines starting with '#' are ignored on input.
///
///   grid <modulus> <width> <height>      then <height> rows of <width> values
///   matrix <modulus> <rows> <cols>       then <rows> rows of <cols> values
///   cells <count>                        then <count> lines of "x y"

namespace detail {

inline std::string next_content_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        return line;
    }
    throw std::runtime_error("serialize: unexpected end of input");
}

inline std::vector<std::int64_t> parse_fields(const std::string& line, std::size_t expected) {
    std::istringstream ss(line);
    std::vector<std::int64_t> out;
    std::int64_t v;
    while (ss >> v) out.push_back(v);
    if (out.size() != expected)
        throw std::runtime_error("serialize: expected " + std::to_string(expected) +
                                 " fields, got " + std::to_string(out.size()));
    return out;
}

}  // namespace detail

inline void write_grid(std::ostream& out, const Grid& grid) {
    out << "grid " << grid.field().modulus() << ' ' << grid.width() << ' ' << grid.height()
        << '\n';
    for (std::int64_t y = 0; y < grid.height(); ++y) {
        const std::uint32_t* p = grid.row_ptr(y);
        for (std::int64_t x = 0; x < grid.width(); ++x) {
            if (x) out << ' ';
            out << p[x];
        }
        out << '\n';
    }
}

inline Grid read_grid(std::istream& in) {
    std::string header = detail::next_content_line(in);
    std::istringstream hs(header);
    std::string tag;
    std::int64_t modulus = 0, width = 0, height = 0;
    if (!(hs >> tag >> modulus >> width >> height) || tag != "grid")
        throw std::runtime_error("read_grid: malformed header: " + header);
    PrimeField field{std::uint64_t(modulus)};
    Grid grid(field, width, height);
    for (std::int64_t y = 0; y < height; ++y) {
        std::vector<std::int64_t> row =
            detail::parse_fields(detail::next_content_line(in), std::size_t(width));
        for (std::int64_t x = 0; x < width; ++x) {
            if (row[std::size_t(x)] < 0 || row[std::size_t(x)] >= modulus)
                throw std::runtime_error("read_grid: value out of field range");
            grid.set(x, y, std::uint32_t(row[std::size_t(x)]));
        }
    }
    return grid;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
    out << "matrix " << m.field().modulus() << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << m.get(r, c);
        }
        out << '\n';
    }
}

inline Matrix read_matrix(std::istream& in) {
    std::string header = detail::next_content_line(in);
    std::istringstream hs(header);
    std::string tag;
    std::int64_t modulus = 0, rows = 0, cols = 0;
    if (!(hs >> tag >> modulus >> rows >> cols) || tag != "matrix" || rows < 0 || cols < 0)
        throw std::runtime_error("read_matrix: malformed header: " + header);
    PrimeField field{std::uint64_t(modulus)};
    Matrix m(field, std::size_t(rows), std::size_t(cols));
    for (std::int64_t r = 0; r < rows; ++r) {
        std::vector<std::int64_t> row =
            detail::parse_fields(detail::next_content_line(in), std::size_t(cols));
        for (std::int64_t c = 0; c < cols; ++c) {
            if (row[std::size_t(c)] < 0 || row[std::size_t(c)] >= modulus)
                throw std::runtime_error("read_matrix: value out of field range");
            m.set(std::size_t(r), std::size_t(c), std::uint32_t(row[std::size_t(c)]));
        }
    }
    return m;
}

inline void write_cells(std::ostream& out, const std::vector<Cell>& cells) {
    out << "cells " << cells.size() << '\n';
    for (const Cell& c : cells) out << c.x << ' ' << c.y << '\n';
}

inline std::vector<Cell> read_cells(std::istream& in) {
    std::string header = detail::next_content_line(in);
    std::istringstream hs(header);
    std::string tag;
    std::int64_t count = 0;
    if (!(hs >> tag >> count) || tag != "cells" || count < 0)
        throw std::runtime_error("read_cells: malformed header: " + header);
    std::vector<Cell> cells;
    cells.reserve(std::size_t(count));
    for (std::int64_t i = 0; i < count; ++i) {
        std::vector<std::int64_t> f = detail::parse_fields(detail::next_content_line(in), 2);
        cells.push_back({f[0], f[1]});
    }
    return cells;
}

/// Ordered key/value configuration text: one `key = value` per line, blank
/// lines and '#' comments skipped.  Order is preserved so canonical files
/// round-trip byte for byte.
using KvPairs = std::vector<std::pair<std::string, std::string>>;

inline std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline KvPairs parse_kv(std::istream& in) {
    KvPairs out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("parse_kv: line " + std::to_string(lineno) +
                                     " has no '=': " + t);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("parse_kv: line " + std::to_string(lineno) +
                                     " has an empty key");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

inline std::string serialize_kv(const KvPairs& pairs) {
    std::ostringstream out;
    for (const auto& [key, value] : pairs) out << key << " = " << value << '\n';
    return out.str();
}

/// FNV-1a 64-bit content digest, rendered as 16 lowercase hex digits.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string digest_hex(std::string_view data) {
    static const char* hex = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[std::size_t(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace agtensor
