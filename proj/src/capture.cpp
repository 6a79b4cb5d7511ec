#include "putforge/capture.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"
#include "putforge/error.hpp"

namespace putforge {

std::vector<CaptureRecord> load_capture_log(
    const fs::path& log_path,
    const std::map<std::string, std::vector<ScalarKind>>& target_kinds,
    LoadDiagnostics* diagnostics) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) throw Error("cannot read capture log: " + log_path.string());

    LoadDiagnostics local;
    LoadDiagnostics& diag = diagnostics ? *diagnostics : local;

    std::vector<CaptureRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (true) {
        line.clear();
        if (!std::getline(in, line)) break;
        ++line_no;
        const bool has_newline = !in.eof();  // getline stops at '\n' or EOF
        if (line.empty()) continue;

        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        const bool malformed = j.is_discarded() || !j.is_object() || !j.contains("t") ||
                               !j.contains("a") || !j.contains("c") || !j.contains("n");
        if (malformed) {
            if (!has_newline) {
                diag.truncated_tail = true;  // crash-truncated tail, skip silently
            } else {
                diag.rejected.push_back("line " + std::to_string(line_no) +
                                        ": malformed record");
            }
            continue;
        }
        CaptureRecord rec;
        try {
            rec.target_id = j.at("t").get<std::string>();
            rec.context = j.at("c").get<std::string>() == "test" ? CaptureContext::Test
                                                                 : CaptureContext::Field;
            if (j.contains("id") && !j.at("id").is_null())
                rec.test_id = j.at("id").get<std::string>();
            rec.seq = j.at("n").get<std::uint64_t>();
            for (const auto& item : j.at("a")) {
                rec.tuple.push_back(item.get<std::string>());
            }
        } catch (const nlohmann::json::exception& e) {
            diag.rejected.push_back("line " + std::to_string(line_no) + ": " + e.what());
            continue;
        }

        const auto it = target_kinds.find(rec.target_id);
        if (it == target_kinds.end()) {
            diag.rejected.push_back("line " + std::to_string(line_no) +
                                    ": unknown target '" + rec.target_id + "'");
            continue;
        }
        if (rec.tuple.size() != it->second.size()) {
            diag.rejected.push_back("line " + std::to_string(line_no) +
                                    ": arity mismatch for '" + rec.target_id + "'");
            continue;
        }
        bool kinds_ok = true;
        for (std::size_t i = 0; i < rec.tuple.size(); ++i) {
            if (!encoding_matches_kind(rec.tuple[i], it->second[i])) {
                kinds_ok = false;
                break;
            }
        }
        if (!kinds_ok) {
            diag.rejected.push_back("line " + std::to_string(line_no) +
                                    ": kind mismatch for '" + rec.target_id + "'");
            continue;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::optional<std::size_t> CaptureUnion::index_of(const CanonicalTuple& tuple) const {
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (tuples[i] == tuple) return i;
    }
    return std::nullopt;
}

std::map<std::string, CaptureUnion> build_union(
    const std::vector<CaptureRecord>& records,
    const std::map<std::string, std::vector<CanonicalTuple>>& originals,
    std::size_t* skipped_markers) {
    struct Accum {
        // key -> flags; insertion bookkeeping is separate for ordering
        std::map<std::string, ProvenanceFlags> flags;
        std::map<std::string, CanonicalTuple> tuples;
    };
    std::map<std::string, Accum> acc;

    std::size_t skipped = 0;
    for (const CaptureRecord& rec : records) {
        if (tuple_has_marker(rec.tuple)) {
            ++skipped;
            continue;
        }
        Accum& a = acc[rec.target_id];
        const std::string key = tuple_key(rec.tuple);
        a.tuples.emplace(key, rec.tuple);
        ProvenanceFlags& f = a.flags[key];
        if (rec.context == CaptureContext::Test) f.test = true;
        else f.field = true;
    }
    for (const auto& [target_id, tuples] : originals) {
        Accum& a = acc[target_id];
        for (const CanonicalTuple& t : tuples) {
            const std::string key = tuple_key(t);
            a.tuples.emplace(key, t);
            a.flags[key].original = true;
        }
    }
    if (skipped_markers) *skipped_markers = skipped;

    std::map<std::string, CaptureUnion> out;
    for (auto& [target_id, a] : acc) {
        CaptureUnion u;
        u.target_id = target_id;

        std::set<std::string> placed;
        auto it = originals.find(target_id);
        if (it != originals.end()) {
            for (const CanonicalTuple& t : it->second) {  // source order
                const std::string key = tuple_key(t);
                if (!placed.insert(key).second) continue;
                u.tuples.push_back(t);
                u.provenance.push_back(a.flags.at(key));
            }
        }
        u.original_count = u.tuples.size();
        for (const auto& [key, tuple] : a.tuples) {  // lexicographic by dedup key
            if (placed.count(key)) continue;
            u.tuples.push_back(tuple);
            u.provenance.push_back(a.flags.at(key));
        }
        out.emplace(target_id, std::move(u));
    }
    return out;
}

CoverageGain coverage_gain(const CaptureUnion& u, std::size_t original_count) {
    CoverageGain g;
    g.original_count = original_count;
    g.union_count = u.tuples.size();
    const std::size_t denom = std::max<std::size_t>(original_count, 1);
    g.factor = static_cast<double>(g.union_count) / static_cast<double>(denom);
    // integer loop avoids log10 edge cases at exact powers of ten
    int orders = 0;
    unsigned long long power = 1;
    while (g.union_count >= denom * power * 10) {
        power *= 10;
        ++orders;
    }
    g.orders_of_magnitude = orders;
    return g;
}

}  // namespace putforge
