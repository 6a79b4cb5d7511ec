#include "putforge/config.hpp"

#include <cctype>
#include <charconv>

#include "putforge/error.hpp"

namespace putforge {

namespace {

const AdapterInfo kDoctestAdapter = {
    "doctest",
    {"TEST_CASE", "DOCTEST_TEST_CASE"},
    {
        "CHECK", "CHECK_EQ", "CHECK_NE", "CHECK_GT", "CHECK_LT", "CHECK_GE", "CHECK_LE",
        "CHECK_FALSE", "CHECK_UNARY", "CHECK_UNARY_FALSE", "CHECK_THROWS", "CHECK_THROWS_AS",
        "CHECK_NOTHROW", "REQUIRE", "REQUIRE_EQ", "REQUIRE_NE", "REQUIRE_GT", "REQUIRE_LT",
        "REQUIRE_GE", "REQUIRE_LE", "REQUIRE_FALSE", "REQUIRE_UNARY", "REQUIRE_THROWS",
        "REQUIRE_THROWS_AS", "REQUIRE_NOTHROW",
    },
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string parse_toml_string(std::string_view v, const std::string& key) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
        throw ConfigError("value for '" + key + "' must be a quoted string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        char c = v[i];
        if (c == '\\' && i + 2 < v.size()) {
            char e = v[++i];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: out += e;
            }
        } else {
            out += c;
        }
    }
    return out;
}

std::vector<std::string> parse_toml_array(std::string_view v, const std::string& key) {
    v = trim(v);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("value for '" + key + "' must be an array of strings");
    std::vector<std::string> out;
    std::string_view body = v.substr(1, v.size() - 2);
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() &&
               (std::isspace(static_cast<unsigned char>(body[i])) || body[i] == ','))
            ++i;
        if (i >= body.size()) break;
        if (body[i] != '"') throw ConfigError("array for '" + key + "' must contain strings");
        std::size_t j = i + 1;
        std::string item;
        while (j < body.size() && body[j] != '"') {
            if (body[j] == '\\' && j + 1 < body.size()) ++j;
            item += body[j++];
        }
        if (j >= body.size()) throw ConfigError("unterminated string in '" + key + "'");
        out.push_back(std::move(item));
        i = j + 1;
    }
    return out;
}

long parse_toml_int(std::string_view v, const std::string& key) {
    long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError("value for '" + key + "' must be an integer");
    return out;
}

double parse_toml_number(std::string_view v, const std::string& key) {
    try {
        std::size_t used = 0;
        double out = std::stod(std::string(v), &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("value for '" + key + "' must be a number");
    }
}

bool parse_toml_bool(std::string_view v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("value for '" + key + "' must be true or false");
}

}  // namespace

const AdapterInfo& adapter_info(const std::string& id) {
    if (id == kDoctestAdapter.id) return kDoctestAdapter;
    throw ConfigError("unknown adapter: " + id);
}

fs::path Config::workspace_path() const {
    fs::path w(workspace);
    if (w.is_absolute()) return w;
    return project_root / w;
}

AnalysisOptions Config::analysis_options() const {
    const AdapterInfo& info = adapter_info(adapter);
    AnalysisOptions o;
    o.test_macros = info.test_macros;
    o.assertion_macros = assertions();
    o.exclude_paths = exclude_paths;
    fs::path w(workspace);
    if (!w.is_absolute()) o.workspace_dir = fs::path(workspace).generic_string();
    return o;
}

std::vector<std::string> Config::assertions() const {
    if (!assertion_allow_list.empty()) return assertion_allow_list;
    return adapter_info(adapter).assertion_macros;
}

Config load_config(const fs::path& project_root) {
    Config cfg;
    cfg.project_root = project_root;
    const fs::path file = project_root / "putforge.toml";
    if (!fs::exists(file)) {
        validate_config(cfg);
        return cfg;
    }
    const std::string text = read_file(file);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line(text.data() + pos,
                              (eol == std::string::npos ? text.size() : eol) - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("putforge.toml:" + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "workspace") cfg.workspace = parse_toml_string(value, key);
        else if (key == "adapter") cfg.adapter = parse_toml_string(value, key);
        else if (key == "build_command") cfg.build_command = parse_toml_string(value, key);
        else if (key == "test_command") cfg.test_command = parse_toml_string(value, key);
        else if (key == "workload_command") cfg.workload_command = parse_toml_string(value, key);
        else if (key == "put_command") cfg.put_command = parse_toml_string(value, key);
        else if (key == "assertion_allow_list")
            cfg.assertion_allow_list = parse_toml_array(value, key);
        else if (key == "exclude_paths") cfg.exclude_paths = parse_toml_array(value, key);
        else if (key == "provider_row_cap") cfg.provider_row_cap = parse_toml_int(value, key);
        else if (key == "max_records_per_target")
            cfg.max_records_per_target = parse_toml_int(value, key);
        else if (key == "per_row_timeout_s")
            cfg.per_row_timeout_s = parse_toml_number(value, key);
        else if (key == "retries") cfg.retries = static_cast<int>(parse_toml_int(value, key));
        else if (key == "per_site_variants") cfg.per_site_variants = parse_toml_bool(value, key);
        else if (key == "parallel_puts")
            cfg.parallel_puts = static_cast<int>(parse_toml_int(value, key));
        else
            throw ConfigError("putforge.toml:" + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const Config& cfg) {
    if (!fs::exists(cfg.project_root))
        throw ConfigError("project root does not exist: " + cfg.project_root.string());
    if (cfg.workspace.empty()) throw ConfigError("workspace must not be empty");
    std::error_code ec;
    const fs::path ws = fs::weakly_canonical(cfg.workspace_path(), ec);
    const fs::path root = fs::weakly_canonical(cfg.project_root, ec);
    if (ws == root) throw ConfigError("workspace must differ from the project root");
    if (cfg.provider_row_cap <= 0) throw ConfigError("provider_row_cap must be positive");
    if (cfg.max_records_per_target <= 0)
        throw ConfigError("max_records_per_target must be positive");
    if (cfg.per_row_timeout_s <= 0) throw ConfigError("per_row_timeout_s must be positive");
    if (cfg.retries < 0) throw ConfigError("retries must be non-negative");
    adapter_info(cfg.adapter);
}

}  // namespace putforge
