#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rifs/error.hpp"

namespace rifs {

/// Binary64 round-trip decimal formatting (shared by every CSV emission).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Minimal deterministic CSV writer: header once, then rows of preformatted
/// cells; floats go through format_double.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) fail(ErrorCode::io, "cannot open " + path + " for writing");
    }

    void header(const std::vector<std::string>& names) { raw_row(names); }

    void row(const std::vector<std::string>& cells) { raw_row(cells); }

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(long long v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }

private:
    void raw_row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ofstream out_;
};

/// FNV-1a hash of a byte string (used for config hashes in manifests).
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace rifs
