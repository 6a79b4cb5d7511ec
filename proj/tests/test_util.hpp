#pragma once

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>

#include "putforge/fs_util.hpp"

namespace putforge::testutil {

namespace fs = std::filesystem;

/// Unique scratch directory removed on destruction.
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& prefix = "putforge_test") {
        static std::atomic<unsigned> counter{0};
        const auto stamp = std::to_string(::getpid()) + "_" +
                           std::to_string(counter.fetch_add(1)) + "_" +
                           std::to_string(std::chrono::steady_clock::now()
                                              .time_since_epoch()
                                              .count());
        path = fs::temp_directory_path() / (prefix + "_" + stamp);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    fs::path file(const std::string& rel, std::string_view contents) const {
        const fs::path p = path / rel;
        write_file(p, contents);
        return p;
    }
};

/// Repository root, as configured by CMake.
inline fs::path source_root() {
#ifdef PUTFORGE_SOURCE_ROOT
    return fs::path(PUTFORGE_SOURCE_ROOT);
#else
    return fs::current_path();
#endif
}

inline fs::path fixture_dir(const std::string& name) {
    return source_root() / "fixtures" / name;
}

/// Path of the putforge CLI binary, as configured by CMake.
inline fs::path cli_binary() {
#ifdef PUTFORGE_BIN_PATH
    return fs::path(PUTFORGE_BIN_PATH);
#else
    return {};
#endif
}

}  // namespace putforge::testutil
