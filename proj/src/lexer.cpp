#include "putforge/lexer.hpp"

#include <cctype>
#include <unordered_set>

#include "putforge/error.hpp"

namespace putforge {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

bool is_cpp_keyword(std::string_view ident) {
    static const std::unordered_set<std::string_view> kKeywords = {
        "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor", "bool",
        "break", "case", "catch", "char", "char8_t", "char16_t", "char32_t", "class",
        "co_await", "co_return", "co_yield", "compl", "concept", "const", "consteval",
        "constexpr", "constinit", "const_cast", "continue", "decltype", "default", "delete",
        "do", "double", "dynamic_cast", "else", "enum", "explicit", "export", "extern",
        "false", "float", "for", "friend", "goto", "if", "inline", "int", "long", "mutable",
        "namespace", "new", "noexcept", "not", "not_eq", "nullptr", "operator", "or",
        "or_eq", "private", "protected", "public", "register", "reinterpret_cast",
        "requires", "return", "short", "signed", "sizeof", "static", "static_assert",
        "static_cast", "struct", "switch", "template", "this", "thread_local", "throw",
        "true", "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
        "virtual", "void", "volatile", "wchar_t", "while", "xor", "xor_eq",
    };
    return kKeywords.count(ident) > 0;
}

std::vector<Token> tokenize(std::string_view src, const std::string& file) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    bool at_line_start = true;

    auto skip_string = [&](char quote) {
        const std::size_t start = i;
        ++i;  // opening quote
        while (i < n) {
            if (src[i] == '\\') {
                i += 2;
                continue;
            }
            if (src[i] == quote) {
                ++i;
                return;
            }
            if (src[i] == '\n' && quote != '\0') {
                throw ParseError(file, start, "unterminated literal");
            }
            ++i;
        }
        throw ParseError(file, start, "unterminated literal");
    };

    while (i < n) {
        const char c = src[i];

        if (c == '\n') {
            at_line_start = true;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }

        // preprocessor directive: consume the (possibly continued) line
        if (c == '#' && at_line_start) {
            while (i < n) {
                if (src[i] == '\\' && i + 1 < n && src[i + 1] == '\n') {
                    i += 2;
                    continue;
                }
                if (src[i] == '\n') break;
                // a comment may open inside a directive
                if (src[i] == '/' && i + 1 < n && src[i + 1] == '*') {
                    const std::size_t start = i;
                    i += 2;
                    while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
                    if (i + 1 >= n) throw ParseError(file, start, "unterminated comment");
                    i += 2;
                    continue;
                }
                ++i;
            }
            continue;
        }
        at_line_start = false;

        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            const std::size_t start = i;
            i += 2;
            while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
            if (i + 1 >= n) throw ParseError(file, start, "unterminated comment");
            i += 2;
            continue;
        }

        // raw string (with optional encoding prefix)
        if (c == 'R' && i + 1 < n && src[i + 1] == '"') {
            const std::size_t start = i;
            i += 2;
            std::string delim;
            while (i < n && src[i] != '(') {
                delim += src[i++];
            }
            if (i >= n) throw ParseError(file, start, "malformed raw string");
            ++i;  // '('
            const std::string closer = ")" + delim + "\"";
            const std::size_t pos = src.find(closer, i);
            if (pos == std::string_view::npos)
                throw ParseError(file, start, "unterminated raw string");
            i = pos + closer.size();
            out.push_back({TokenKind::RawString, start, i});
            continue;
        }

        if (ident_start(c)) {
            const std::size_t start = i;
            while (i < n && ident_char(src[i])) ++i;
            // string/char literal with prefix (u8"..." / L'x' ...)
            if (i < n && (src[i] == '"' || src[i] == '\'')) {
                const std::string_view prefix = src.substr(start, i - start);
                if (prefix == "u8" || prefix == "u" || prefix == "U" || prefix == "L") {
                    const char quote = src[i];
                    skip_string(quote);
                    out.push_back(
                        {quote == '"' ? TokenKind::String : TokenKind::CharLit, start, i});
                    continue;
                }
            }
            out.push_back({TokenKind::Ident, start, i});
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            const std::size_t start = i;
            ++i;
            while (i < n) {
                const char d = src[i];
                if (ident_char(d) || d == '.' || d == '\'') {
                    ++i;
                } else if ((d == '+' || d == '-') && i > start &&
                           (src[i - 1] == 'e' || src[i - 1] == 'E' || src[i - 1] == 'p' ||
                            src[i - 1] == 'P')) {
                    ++i;  // exponent sign
                } else {
                    break;
                }
            }
            out.push_back({TokenKind::Number, start, i});
            continue;
        }

        if (c == '"') {
            const std::size_t start = i;
            skip_string('"');
            out.push_back({TokenKind::String, start, i});
            continue;
        }
        if (c == '\'') {
            const std::size_t start = i;
            skip_string('\'');
            out.push_back({TokenKind::CharLit, start, i});
            continue;
        }

        if (c == ':' && i + 1 < n && src[i + 1] == ':') {
            out.push_back({TokenKind::Punct, i, i + 2});
            i += 2;
            continue;
        }
        out.push_back({TokenKind::Punct, i, i + 1});
        ++i;
    }
    out.push_back({TokenKind::End, n, n});
    return out;
}

}  // namespace putforge
