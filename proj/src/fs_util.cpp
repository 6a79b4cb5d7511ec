#include "putforge/fs_util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "putforge/error.hpp"

namespace putforge {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write: " + path.string());
}

void copy_tree(const fs::path& src, const fs::path& dst,
               const std::function<bool(const fs::path&)>& skip) {
    if (fs::exists(dst)) throw Error("copy destination already exists: " + dst.string());
    fs::create_directories(dst);
    std::vector<fs::path> entries;
    for (const auto& entry : fs::recursive_directory_iterator(src)) {
        entries.push_back(entry.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& p : entries) {
        const fs::path rel = fs::relative(p, src);
        if (skip && skip(rel)) continue;
        // inside a skipped directory?
        bool skipped_parent = false;
        if (skip) {
            fs::path acc;
            for (const auto& part : rel) {
                acc /= part;
                if (acc != rel && skip(acc)) {
                    skipped_parent = true;
                    break;
                }
            }
        }
        if (skipped_parent) continue;
        const fs::path target = dst / rel;
        if (fs::is_directory(p)) {
            fs::create_directories(target);
        } else if (fs::is_regular_file(p)) {
            fs::create_directories(target.parent_path());
            fs::copy_file(p, target, fs::copy_options::none);
            fs::permissions(target, fs::status(p).permissions());
        }
    }
}

std::vector<fs::path> list_files(const fs::path& root,
                                 const std::vector<std::string>& extensions,
                                 const std::function<bool(const fs::path&)>& skip) {
    std::vector<fs::path> out;
    if (!fs::exists(root)) return out;
    for (auto it = fs::recursive_directory_iterator(root);
         it != fs::recursive_directory_iterator(); ++it) {
        const fs::path rel = fs::relative(it->path(), root);
        if (skip && skip(rel)) {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (!it->is_regular_file()) continue;
        const std::string ext = it->path().extension().string();
        if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end()) continue;
        out.push_back(rel);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace putforge
