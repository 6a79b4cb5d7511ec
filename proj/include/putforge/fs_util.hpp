#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace putforge {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);  // creates parents

/// Recursively copies src into dst (dst must not exist). Entries for which
/// `skip` returns true (paths relative to src, generic form) are not copied.
void copy_tree(const fs::path& src, const fs::path& dst,
               const std::function<bool(const fs::path&)>& skip = nullptr);

/// All regular files under root in sorted relative-path order, filtered by
/// extension set (e.g. {".cpp", ".hpp"}); `skip` as in copy_tree.
std::vector<fs::path> list_files(const fs::path& root,
                                 const std::vector<std::string>& extensions,
                                 const std::function<bool(const fs::path&)>& skip = nullptr);

/// Line/column (1-based) of a byte offset, for diagnostics.
std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset);

}  // namespace putforge
