#include "putforge/scalar.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "putforge/error.hpp"

namespace putforge {

namespace {

bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

unsigned hex_value(char c) {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    return static_cast<unsigned>(c - 'A' + 10);
}

std::string hex_bits(std::uint64_t bits, int digits) {
    static const char* kHex = "0123456789abcdef";
    std::string out(static_cast<std::size_t>(digits), '0');
    for (int i = digits - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[bits & 0xf];
        bits >>= 4;
    }
    return out;
}

std::uint64_t parse_hex(std::string_view s) {
    std::uint64_t v = 0;
    for (char c : s) {
        if (!is_hex_digit(c)) throw EncodingError("bad hex digit in float encoding");
        v = (v << 4) | hex_value(c);
    }
    return v;
}

// Bounds of an integer kind.
std::int64_t int_min(const ScalarKind& k) {
    if (!k.is_signed) return 0;
    if (k.width == 64) return INT64_MIN;
    return -(std::int64_t{1} << (k.width - 1));
}

std::uint64_t uint_max(const ScalarKind& k) {
    if (k.width == 64) return k.is_signed ? static_cast<std::uint64_t>(INT64_MAX) : UINT64_MAX;
    const int effective = k.is_signed ? k.width - 1 : k.width;
    return (std::uint64_t{1} << effective) - 1;
}

bool int_fits(const ScalarKind& k, bool negative, std::uint64_t magnitude) {
    if (negative) {
        if (!k.is_signed) return false;
        // |int_min| as unsigned magnitude
        const std::uint64_t limit = static_cast<std::uint64_t>(uint_max(k)) + 1;
        return magnitude <= limit;
    }
    return magnitude <= uint_max(k);
}

}  // namespace

std::string ScalarKind::tag() const {
    switch (type) {
        case ScalarType::Boolean: return "bool";
        case ScalarType::Integer:
            return (is_signed ? "i" : "u") + std::to_string(width);
        case ScalarType::Float: return "f" + std::to_string(width);
        case ScalarType::Character: return "c";
        case ScalarType::Text: return "s";
        case ScalarType::NullableText: return "ns";
    }
    return "?";
}

std::optional<ScalarKind> ScalarKind::from_tag(std::string_view tag) {
    if (tag == "bool") return ScalarKind::boolean();
    if (tag == "c") return ScalarKind::character();
    if (tag == "s") return ScalarKind::text();
    if (tag == "ns") return ScalarKind::nullable_text();
    if (tag == "f32") return ScalarKind::f32();
    if (tag == "f64") return ScalarKind::f64();
    if (tag.size() >= 2 && (tag[0] == 'i' || tag[0] == 'u')) {
        const bool sign = tag[0] == 'i';
        const std::string_view w = tag.substr(1);
        for (int width : {8, 16, 32, 64}) {
            if (w == std::to_string(width)) return ScalarKind::integer(width, sign);
        }
    }
    return std::nullopt;
}

std::string escape_text_bytes(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    for (unsigned char c : bytes) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c >= 0x20 && c <= 0x7e) {
                    out += static_cast<char>(c);
                } else {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
                    out += buf;
                }
        }
    }
    return out;
}

std::string unescape_text_bytes(std::string_view escaped) {
    std::string out;
    out.reserve(escaped.size());
    for (std::size_t i = 0; i < escaped.size(); ++i) {
        char c = escaped[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        if (i + 1 >= escaped.size()) throw EncodingError("dangling backslash in text encoding");
        char esc = escaped[++i];
        switch (esc) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case '/': out += '/'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 't': out += '\t'; break;
            case 'b': out += '\b'; break;
            case 'f': out += '\f'; break;
            case 'u': {
                if (i + 4 >= escaped.size()) throw EncodingError("truncated \\u escape");
                unsigned v = 0;
                for (int k = 0; k < 4; ++k) {
                    char h = escaped[++i];
                    if (!is_hex_digit(h)) throw EncodingError("bad \\u escape");
                    v = (v << 4) | hex_value(h);
                }
                if (v > 0xff)
                    throw EncodingError("\\u escape above 0x00ff in byte-oriented text encoding");
                out += static_cast<char>(v);
                break;
            }
            default: throw EncodingError(std::string("unknown escape \\") + esc);
        }
    }
    return out;
}

std::string encode(const ScalarValue& v) {
    switch (v.kind.type) {
        case ScalarType::Boolean:
            return v.bool_v ? "true" : "false";
        case ScalarType::Integer: {
            std::string tag = v.kind.tag() + ":";
            if (v.kind.is_signed) return tag + std::to_string(v.int_v);
            return tag + std::to_string(v.uint_v);
        }
        case ScalarType::Float:
            if (v.kind.width == 32) return "f32:" + hex_bits(v.float_bits & 0xffffffffull, 8);
            return "f64:" + hex_bits(v.float_bits, 16);
        case ScalarType::Character:
            return "c:" + std::to_string(static_cast<unsigned>(v.char_v));
        case ScalarType::Text:
            return "s:" + escape_text_bytes(v.text);
        case ScalarType::NullableText:
            if (v.is_null) return "nil";
            return "s:" + escape_text_bytes(v.text);
    }
    throw EncodingError("unknown scalar type");
}

ScalarValue decode(std::string_view e) {
    if (e == "true") return make_bool(true);
    if (e == "false") return make_bool(false);
    if (e == "nil") return make_nullable(std::nullopt);
    if (e == kUnserializableMarker) throw EncodingError("unserializable marker has no value");

    const std::size_t colon = e.find(':');
    if (colon == std::string_view::npos)
        throw EncodingError("malformed scalar encoding: " + std::string(e));
    const std::string_view tag = e.substr(0, colon);
    const std::string_view body = e.substr(colon + 1);

    if (tag == "s") {
        return make_text(unescape_text_bytes(body));
    }
    if (tag == "c") {
        unsigned v = 0;
        auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc{} || p != body.data() + body.size() || v > 0xff)
            throw EncodingError("bad character encoding: " + std::string(e));
        return make_char(static_cast<unsigned char>(v));
    }
    if (tag == "f32") {
        if (body.size() != 8) throw EncodingError("f32 encoding must be 8 hex digits");
        return make_f32(static_cast<std::uint32_t>(parse_hex(body)));
    }
    if (tag == "f64") {
        if (body.size() != 16) throw EncodingError("f64 encoding must be 16 hex digits");
        return make_f64(parse_hex(body));
    }
    auto kind = ScalarKind::from_tag(tag);
    if (!kind || kind->type != ScalarType::Integer)
        throw EncodingError("unknown scalar tag: " + std::string(tag));
    if (body.empty()) throw EncodingError("empty integer encoding");
    if (kind->is_signed) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc{} || p != body.data() + body.size())
            throw EncodingError("bad integer encoding: " + std::string(e));
        if (v < int_min(*kind) || (v > 0 && static_cast<std::uint64_t>(v) > uint_max(*kind)))
            throw EncodingError("integer out of range for " + kind->tag() + ": " + std::string(e));
        return make_int(*kind, v);
    }
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc{} || p != body.data() + body.size())
        throw EncodingError("bad integer encoding: " + std::string(e));
    if (v > uint_max(*kind))
        throw EncodingError("integer out of range for " + kind->tag() + ": " + std::string(e));
    return make_uint(*kind, v);
}

bool encoding_matches_kind(std::string_view encoding, const ScalarKind& kind) {
    if (encoding == kUnserializableMarker) return true;  // placeholder position
    try {
        ScalarValue v = decode(encoding);
        if (v.kind == kind) return true;
        // "s:..." decodes as Text but also satisfies NullableText.
        return v.kind.type == ScalarType::Text && kind.type == ScalarType::NullableText;
    } catch (const EncodingError&) {
        return false;
    }
}

ScalarValue make_bool(bool v) {
    ScalarValue s;
    s.kind = ScalarKind::boolean();
    s.bool_v = v;
    return s;
}

ScalarValue make_int(const ScalarKind& kind, std::int64_t v) {
    ScalarValue s;
    s.kind = kind;
    s.int_v = v;
    return s;
}

ScalarValue make_uint(const ScalarKind& kind, std::uint64_t v) {
    ScalarValue s;
    s.kind = kind;
    s.uint_v = v;
    return s;
}

ScalarValue make_f32(std::uint32_t bits) {
    ScalarValue s;
    s.kind = ScalarKind::f32();
    s.float_bits = bits;
    return s;
}

ScalarValue make_f64(std::uint64_t bits) {
    ScalarValue s;
    s.kind = ScalarKind::f64();
    s.float_bits = bits;
    return s;
}

ScalarValue make_char(unsigned char code) {
    ScalarValue s;
    s.kind = ScalarKind::character();
    s.char_v = code;
    return s;
}

ScalarValue make_text(std::string bytes) {
    ScalarValue s;
    s.kind = ScalarKind::text();
    s.text = std::move(bytes);
    return s;
}

ScalarValue make_nullable(std::optional<std::string> bytes) {
    ScalarValue s;
    s.kind = ScalarKind::nullable_text();
    if (bytes) {
        s.text = std::move(*bytes);
    } else {
        s.is_null = true;
    }
    return s;
}

std::string tuple_key(const CanonicalTuple& tuple) {
    std::string key;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i) key += '\x1f';
        key += tuple[i];
    }
    return key;
}

bool tuple_has_marker(const CanonicalTuple& tuple) {
    return std::any_of(tuple.begin(), tuple.end(),
                       [](const std::string& e) { return e == kUnserializableMarker; });
}

// --- C++ source mapping -----------------------------------------------------

namespace {

// Normalizes a declared type: strips const/volatile/&, collapses whitespace,
// drops a leading "std::".
std::string normalize_type(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            words.push_back(cur);
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else if (c == '&') {
            flush();  // references bind fine to values; ignore
        } else {
            cur += c;
        }
    }
    flush();
    std::string joined;
    for (const auto& w : words) {
        if (w == "const" || w == "volatile") continue;
        if (!joined.empty()) joined += ' ';
        joined += w;
    }
    if (joined.rfind("std::", 0) == 0) joined = joined.substr(5);
    return joined;
}

}  // namespace

std::optional<ScalarKind> kind_from_cpp_type(std::string_view type_text) {
    const std::string t = normalize_type(type_text);
    if (t.find('*') != std::string::npos) return std::nullopt;  // pointers excluded

    if (t == "bool") return ScalarKind::boolean();
    if (t == "char") return ScalarKind::character();
    if (t == "float") return ScalarKind::f32();
    if (t == "double") return ScalarKind::f64();
    if (t == "string" || t == "string_view") return ScalarKind::text();
    if (t == "optional<string>" || t == "optional<std::string>")
        return ScalarKind::nullable_text();

    struct IntName {
        const char* name;
        int width;
        bool is_signed;
    };
    // LP64 assumed: long and long long are 64-bit.
    static const IntName kInts[] = {
        {"signed char", 8, true},    {"unsigned char", 8, false},
        {"int8_t", 8, true},         {"uint8_t", 8, false},
        {"short", 16, true},         {"short int", 16, true},
        {"unsigned short", 16, false}, {"unsigned short int", 16, false},
        {"int16_t", 16, true},       {"uint16_t", 16, false},
        {"int", 32, true},           {"signed", 32, true},
        {"signed int", 32, true},    {"unsigned", 32, false},
        {"unsigned int", 32, false}, {"int32_t", 32, true},
        {"uint32_t", 32, false},     {"long", 64, true},
        {"long int", 64, true},      {"unsigned long", 64, false},
        {"unsigned long int", 64, false}, {"long long", 64, true},
        {"long long int", 64, true}, {"unsigned long long", 64, false},
        {"unsigned long long int", 64, false}, {"int64_t", 64, true},
        {"uint64_t", 64, false},     {"size_t", 64, false},
        {"ptrdiff_t", 64, true},
    };
    for (const auto& entry : kInts) {
        if (t == entry.name) return ScalarKind::integer(entry.width, entry.is_signed);
    }
    return std::nullopt;
}

std::string cpp_value_type(const ScalarKind& kind) {
    switch (kind.type) {
        case ScalarType::Boolean: return "bool";
        case ScalarType::Integer:
            return "std::" + std::string(kind.is_signed ? "int" : "uint") +
                   std::to_string(kind.width) + "_t";
        case ScalarType::Float: return kind.width == 32 ? "float" : "double";
        case ScalarType::Character: return "char";
        case ScalarType::Text: return "std::string";
        case ScalarType::NullableText: return "std::optional<std::string>";
    }
    return "void";
}

namespace {

// Renders text bytes as a C++ string literal body using 3-digit octal escapes
// for anything outside plain printable ASCII; octal is bounded at three
// digits, so a following digit cannot extend the escape.
std::string cpp_string_literal(std::string_view bytes) {
    std::string out = "\"";
    for (unsigned char c : bytes) {
        if (c == '"') {
            out += "\\\"";
        } else if (c == '\\') {
            out += "\\\\";
        } else if (c >= 0x20 && c <= 0x7e) {
            out += static_cast<char>(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\%03o", static_cast<unsigned>(c));
            out += buf;
        }
    }
    out += '"';
    return out;
}

}  // namespace

std::string render_cpp_value(const ScalarKind& kind, std::string_view encoding) {
    const ScalarValue v = decode(encoding);
    switch (kind.type) {
        case ScalarType::Boolean:
            return v.bool_v ? "true" : "false";
        case ScalarType::Integer: {
            const std::string type = cpp_value_type(kind);
            if (kind.is_signed) {
                if (kind.width == 64 && v.int_v == INT64_MIN)
                    return "static_cast<std::int64_t>(-9223372036854775807LL - 1)";
                return "static_cast<" + type + ">(" + std::to_string(v.int_v) +
                       (kind.width == 64 ? "LL" : "") + ")";
            }
            return "static_cast<" + type + ">(" + std::to_string(v.uint_v) + "ULL)";
        }
        case ScalarType::Float:
            if (kind.width == 32)
                return "std::bit_cast<float>(static_cast<std::uint32_t>(0x" +
                       hex_bits(v.float_bits & 0xffffffffull, 8) + "u))";
            return "std::bit_cast<double>(static_cast<std::uint64_t>(0x" +
                   hex_bits(v.float_bits, 16) + "ull))";
        case ScalarType::Character: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "static_cast<char>(0x%02x)",
                          static_cast<unsigned>(v.char_v));
            return buf;
        }
        case ScalarType::Text:
            return "std::string(" + cpp_string_literal(v.text) + ", " +
                   std::to_string(v.text.size()) + ")";
        case ScalarType::NullableText:
            if (v.is_null) return "std::optional<std::string>()";
            return "std::optional<std::string>(std::string(" + cpp_string_literal(v.text) +
                   ", " + std::to_string(v.text.size()) + "))";
    }
    throw EncodingError("unknown scalar type");
}

// --- literal folding ----------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Parses a C++ string-literal body (no raw strings) into bytes.
std::optional<std::string> parse_string_literal(std::string_view expr) {
    if (expr.size() < 2 || expr.front() != '"' || expr.back() != '"') return std::nullopt;
    std::string_view body = expr.substr(1, expr.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '"') return std::nullopt;  // concatenated literals: not folded
        if (c != '\\') {
            out += c;
            continue;
        }
        if (i + 1 >= body.size()) return std::nullopt;
        char e = body[++i];
        switch (e) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '0': out += '\0'; break;
            case '\\': out += '\\'; break;
            case '\'': out += '\''; break;
            case '"': out += '"'; break;
            case 'a': out += '\a'; break;
            case 'b': out += '\b'; break;
            case 'f': out += '\f'; break;
            case 'v': out += '\v'; break;
            case 'x': {
                unsigned v = 0;
                std::size_t n = 0;
                while (i + 1 < body.size() && is_hex_digit(body[i + 1]) && n < 2) {
                    v = (v << 4) | hex_value(body[++i]);
                    ++n;
                }
                if (n == 0) return std::nullopt;
                out += static_cast<char>(v);
                break;
            }
            default:
                return std::nullopt;  // unsupported escape: leave to runtime capture
        }
    }
    return out;
}

struct NumericLiteral {
    bool negative = false;
    bool is_float = false;
    std::uint64_t magnitude = 0;  // integers
    double float_value = 0.0;
    bool float_is_f32 = false;
};

std::optional<NumericLiteral> parse_numeric(std::string_view expr) {
    NumericLiteral lit;
    std::string_view s = trim(expr);
    while (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        if (s.front() == '-') lit.negative = !lit.negative;
        s = trim(s.substr(1));
    }
    if (s.empty()) return std::nullopt;

    std::string cleaned;  // digit separators removed
    for (char c : s) {
        if (c == '\'') continue;
        cleaned += c;
    }
    s = cleaned;

    const bool looks_float =
        s.find('.') != std::string::npos ||
        ((s.rfind("0x", 0) != 0 && s.rfind("0X", 0) != 0) &&
         (s.find('e') != std::string::npos || s.find('E') != std::string::npos)) ||
        s.back() == 'f' || s.back() == 'F';
    if (looks_float) {
        std::string body(s);
        lit.is_float = true;
        if (body.back() == 'f' || body.back() == 'F') {
            lit.float_is_f32 = true;
            body.pop_back();
        }
        char* end = nullptr;
        errno = 0;
        lit.float_value = std::strtod(body.c_str(), &end);
        if (end != body.c_str() + body.size()) return std::nullopt;
        return lit;
    }

    std::string body(s);
    // strip integer suffixes
    while (!body.empty()) {
        char c = body.back();
        if (c == 'u' || c == 'U' || c == 'l' || c == 'L') {
            body.pop_back();
        } else {
            break;
        }
    }
    if (body.empty()) return std::nullopt;
    int base = 10;
    std::size_t start = 0;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
        base = 16;
        start = 2;
    } else if (body.size() > 2 && body[0] == '0' && (body[1] == 'b' || body[1] == 'B')) {
        base = 2;
        start = 2;
    } else if (body.size() > 1 && body[0] == '0') {
        base = 8;
        start = 1;
    }
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(body.data() + start, body.data() + body.size(), v, base);
    if (ec != std::errc{} || p != body.data() + body.size()) return std::nullopt;
    lit.magnitude = v;
    return lit;
}

std::optional<char> parse_char_literal(std::string_view expr) {
    if (expr.size() < 3 || expr.front() != '\'' || expr.back() != '\'') return std::nullopt;
    std::string_view body = expr.substr(1, expr.size() - 2);
    if (body.size() == 1 && body[0] != '\\') return body[0];
    if (body.size() >= 2 && body[0] == '\\') {
        switch (body[1]) {
            case 'n': return '\n';
            case 't': return '\t';
            case 'r': return '\r';
            case '0': return '\0';
            case '\\': return '\\';
            case '\'': return '\'';
            case '"': return '"';
            default: return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> parse_cpp_literal(std::string_view expr, const ScalarKind& kind) {
    const std::string_view s = trim(expr);
    switch (kind.type) {
        case ScalarType::Boolean:
            if (s == "true") return encode(make_bool(true));
            if (s == "false") return encode(make_bool(false));
            return std::nullopt;
        case ScalarType::Character:
            if (auto c = parse_char_literal(s))
                return encode(make_char(static_cast<unsigned char>(*c)));
            return std::nullopt;
        case ScalarType::Text:
            if (auto bytes = parse_string_literal(s)) return encode(make_text(std::move(*bytes)));
            return std::nullopt;
        case ScalarType::NullableText:
            if (s == "std::nullopt" || s == "nullopt" || s == "{}")
                return encode(make_nullable(std::nullopt));
            if (auto bytes = parse_string_literal(s)) {
                ScalarValue v = make_nullable(std::move(*bytes));
                return encode(v);
            }
            return std::nullopt;
        case ScalarType::Integer: {
            auto lit = parse_numeric(s);
            if (!lit || lit->is_float) return std::nullopt;
            if (!int_fits(kind, lit->negative, lit->magnitude))
                throw EncodingError("literal " + std::string(s) + " out of range for " +
                                    kind.tag());
            if (kind.is_signed) {
                std::int64_t v;
                if (lit->negative) {
                    v = (lit->magnitude == static_cast<std::uint64_t>(INT64_MAX) + 1)
                            ? INT64_MIN
                            : -static_cast<std::int64_t>(lit->magnitude);
                } else {
                    v = static_cast<std::int64_t>(lit->magnitude);
                }
                return encode(make_int(kind, v));
            }
            return encode(make_uint(kind, lit->magnitude));
        }
        case ScalarType::Float: {
            auto lit = parse_numeric(s);
            if (!lit) return std::nullopt;
            double value = lit->is_float ? lit->float_value
                                         : static_cast<double>(lit->magnitude);
            if (lit->negative) value = -value;
            if (kind.width == 32) {
                const float f = static_cast<float>(value);
                std::uint32_t bits;
                std::memcpy(&bits, &f, sizeof bits);
                return encode(make_f32(bits));
            }
            std::uint64_t bits;
            std::memcpy(&bits, &value, sizeof bits);
            return encode(make_f64(bits));
        }
    }
    return std::nullopt;
}

}  // namespace putforge
