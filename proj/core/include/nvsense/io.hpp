#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>

#include "nvsense/errors.hpp"

namespace nvsense::io {

/// Shortest decimal string that round-trips the double exactly.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Write `content` to `path` atomically (temp file in the same directory,
/// then rename over the target).
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::FILE* f = std::fopen(tmp.string().c_str(), "wb");
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        const size_t n = std::fwrite(content.data(), 1, content.size(), f);
        const int rc = std::fclose(f);
        if (n != content.size() || rc != 0) {
            throw Error("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

/// FNV-1a, stable across platforms; used for config provenance hashes.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace nvsense::io
