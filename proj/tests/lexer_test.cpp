#include "putforge/lexer.hpp"

#include <string>

#include "doctest.h"
#include "putforge/error.hpp"

using namespace putforge;

namespace {

std::vector<std::string> texts(const std::string& src) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(src, "mem")) {
        if (t.kind != TokenKind::End) out.emplace_back(t.text(src));
    }
    return out;
}

}  // namespace

TEST_CASE("comments, directives, and strings are handled") {
    const std::string src =
        "#include <foo> // trail\n"
        "int x = 1; /* block\n comment */ std::string s = \"a\\\"b\"; // c\n"
        "char c = 'x';\n";
    auto t = texts(src);
    CHECK(t == std::vector<std::string>{"int", "x", "=", "1", ";", "std", "::", "string", "s",
                                        "=", "\"a\\\"b\"", ";", "char", "c", "=", "'x'", ";"});
}

TEST_CASE("raw strings scan to the custom delimiter") {
    const std::string src = "auto s = R\"pf(hello )\" world)pf\"; int y;";
    auto t = texts(src);
    REQUIRE(t.size() >= 4);
    CHECK(t[3] == "R\"pf(hello )\" world)pf\"");
}

TEST_CASE("spans reproduce source bytes verbatim") {
    const std::string src = "void f(int  a) { g(a + 1); }";
    for (const Token& tok : tokenize(src, "mem")) {
        if (tok.kind == TokenKind::End) continue;
        CHECK(src.substr(tok.begin, tok.end - tok.begin) == tok.text(src));
    }
}

TEST_CASE("numbers keep suffixes and exponents together") {
    auto t = texts("x = 1'000ull + 2.5e-3f + 0x1Fp+2;");
    CHECK(t[2] == "1'000ull");
    CHECK(t[4] == "2.5e-3f");
    CHECK(t[6] == "0x1Fp+2");
}

TEST_CASE("continued preprocessor lines are skipped whole") {
    auto t = texts("#define M(a) \\\n  ((a) + 1)\nint z;");
    CHECK(t == std::vector<std::string>{"int", "z", ";"});
}

TEST_CASE("unterminated literals raise parse errors") {
    CHECK_THROWS_AS(tokenize("auto s = \"abc", "mem"), ParseError);
    CHECK_THROWS_AS(tokenize("/* never closed", "mem"), ParseError);
}
