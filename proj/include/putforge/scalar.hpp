#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace putforge {

enum class ScalarType {
    Boolean,
    Integer,
    Float,
    Character,
    Text,
    NullableText,
};

/// The closed set of capturable parameter kinds. Integers carry width and
/// signedness; floats carry width. Nothing else is representable.
struct ScalarKind {
    ScalarType type = ScalarType::Boolean;
    int width = 0;         // integer: 8/16/32/64, float: 32/64
    bool is_signed = true; // integers only

    bool operator==(const ScalarKind&) const = default;

    /// Short tag used in target ids and encodings: bool, i8..i64, u8..u64,
    /// f32, f64, c, s, ns.
    std::string tag() const;
    static std::optional<ScalarKind> from_tag(std::string_view tag);

    static ScalarKind boolean() { return {ScalarType::Boolean, 0, true}; }
    static ScalarKind integer(int width, bool is_signed) {
        return {ScalarType::Integer, width, is_signed};
    }
    static ScalarKind f32() { return {ScalarType::Float, 32, true}; }
    static ScalarKind f64() { return {ScalarType::Float, 64, true}; }
    static ScalarKind character() { return {ScalarType::Character, 0, true}; }
    static ScalarKind text() { return {ScalarType::Text, 0, true}; }
    static ScalarKind nullable_text() { return {ScalarType::NullableText, 0, true}; }
};

/// A scalar value in decoded form. Exactly one of the payload members is
/// meaningful, selected by kind.type (and is_null for nullable text).
struct ScalarValue {
    ScalarKind kind;
    bool bool_v = false;
    std::int64_t int_v = 0;            // signed integers
    std::uint64_t uint_v = 0;          // unsigned integers
    std::uint64_t float_bits = 0;      // IEEE-754 bit pattern (32 or 64 valid bits)
    unsigned char char_v = 0;          // character code unit
    std::string text;                  // text bytes (may contain NUL, non-UTF-8)
    bool is_null = false;              // nullable-text null

    bool operator==(const ScalarValue&) const = default;
};

// Canonical text encodings. Two runtime values are equal iff their encodings
// are byte-equal, so NaN == NaN (same payload) and -0.0 != +0.0.
//
//   boolean        true | false
//   integer        i32:-5, u64:18446744073709551615, ... (minimal decimal)
//   float          f32:xxxxxxxx, f64:xxxxxxxxxxxxxxxx (lowercase hex of bits)
//   character      c:97 (decimal code unit 0..255)
//   text           s:<escaped bytes>  (printable ASCII; see escape_text_bytes)
//   nullable null  nil
//   unserializable !
std::string encode(const ScalarValue& v);
ScalarValue decode(std::string_view encoding);

/// The emitter's marker for an argument position that could not be serialized.
inline constexpr std::string_view kUnserializableMarker = "!";

/// True when the encoding is a value of the given kind. "s:..." satisfies both
/// text and nullable-text; "nil" satisfies only nullable-text.
bool encoding_matches_kind(std::string_view encoding, const ScalarKind& kind);

/// Escapes raw bytes to printable ASCII: \" \\ \n \r \t plus \u00XX for every
/// other byte outside 0x20..0x7E. The result is valid inside a JSON string and
/// round-trips arbitrary byte sequences exactly.
std::string escape_text_bytes(std::string_view bytes);
std::string unescape_text_bytes(std::string_view escaped);  // throws EncodingError

// Convenience constructors.
ScalarValue make_bool(bool v);
ScalarValue make_int(const ScalarKind& kind, std::int64_t v);   // signed kinds
ScalarValue make_uint(const ScalarKind& kind, std::uint64_t v); // unsigned kinds
ScalarValue make_f32(std::uint32_t bits);
ScalarValue make_f64(std::uint64_t bits);
ScalarValue make_char(unsigned char code);
ScalarValue make_text(std::string bytes);
ScalarValue make_nullable(std::optional<std::string> bytes);

/// An argument tuple in canonical form: one encoding per parameter.
using CanonicalTuple = std::vector<std::string>;

/// Byte key used for deduplication: encodings joined with 0x1F unit separators.
std::string tuple_key(const CanonicalTuple& tuple);

/// True if any position carries the unserializable marker.
bool tuple_has_marker(const CanonicalTuple& tuple);

// --- C++ source mapping -----------------------------------------------------

/// Maps a declared C++ parameter type (verbatim token text, e.g.
/// "const std::string &") to a scalar kind. Returns nullopt for anything
/// outside the closed kind set.
std::optional<ScalarKind> kind_from_cpp_type(std::string_view type_text);

/// The C++ type used for a provider tuple element of this kind.
std::string cpp_value_type(const ScalarKind& kind);

/// Renders a canonical encoding as a C++ expression of cpp_value_type(kind).
/// Bit-exact for floats (std::bit_cast from the hex pattern) and byte-exact
/// for text (std::string with explicit length).
std::string render_cpp_value(const ScalarKind& kind, std::string_view encoding);

/// Parses a C++ literal expression (optionally signed numeric literal, string,
/// char, bool, or std::nullopt) against an expected kind. Returns nullopt when
/// the expression is not a foldable literal; throws EncodingError when it is a
/// literal that cannot be represented in the kind (e.g. out-of-range integer).
std::optional<std::string> parse_cpp_literal(std::string_view expr, const ScalarKind& kind);

}  // namespace putforge
