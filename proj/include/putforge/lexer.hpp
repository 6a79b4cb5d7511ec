#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace putforge {

enum class TokenKind {
    Ident,
    Number,
    String,     // "..." (cooked), span includes quotes and any prefix
    CharLit,    // '...'
    RawString,  // R"delim(...)delim"
    Punct,      // single char, or "::"
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::size_t begin = 0;
    std::size_t end = 0;

    std::string_view text(std::string_view src) const { return src.substr(begin, end - begin); }
};

/// Tokenizes a C++ source fragment. Comments and preprocessor directives are
/// skipped (directives honour backslash continuations). Throws ParseError for
/// unterminated strings/comments. A trailing End token is always appended.
std::vector<Token> tokenize(std::string_view src, const std::string& file_for_errors);

bool is_cpp_keyword(std::string_view ident);

}  // namespace putforge
