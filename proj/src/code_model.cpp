#include "putforge/code_model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

#include "putforge/error.hpp"
#include "putforge/lexer.hpp"

namespace putforge {

namespace {

// A callable gathered while scanning (declaration or definition).
struct Callable {
    std::string qualified_name;
    std::string short_name;
    std::vector<ParamInfo> params;  // kind meaningless when !scalar_ok[i]
    std::vector<bool> scalar_ok;
    bool has_default_args = false;
    bool is_member = false;
    bool is_ctor = false;
    bool has_body = false;
    std::string file;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
    std::size_t body_lbrace = 0;

    bool all_scalar() const {
        return std::all_of(scalar_ok.begin(), scalar_ok.end(), [](bool b) { return b; });
    }
    std::string signature_key() const {
        std::string key = qualified_name + "(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) key += ",";
            key += scalar_ok[i] ? params[i].kind.tag() : ("?" + params[i].type_text);
        }
        return key + ")";
    }
    std::string target_id() const {
        std::string id = qualified_name + "(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) id += ",";
            id += params[i].kind.tag();
        }
        return id + ")";
    }
};

struct RawTest {
    std::string id;
    std::string file;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
    std::size_t body_begin = 0;
    std::size_t body_end = 0;
};

struct ScanResult {
    std::vector<Callable> callables;
    std::vector<RawTest> tests;
};

bool contains(const std::vector<std::string>& v, std::string_view s) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& e) { return e == s; });
}

// Joins tokens into type text: space only between adjacent word-like tokens.
std::string join_tokens(std::string_view src, const std::vector<Token>& toks, std::size_t from,
                        std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        const std::string_view t = toks[i].text(src);
        if (!out.empty()) {
            const bool prev_word = std::isalnum(static_cast<unsigned char>(out.back())) ||
                                   out.back() == '_';
            const bool cur_word =
                !t.empty() && (std::isalnum(static_cast<unsigned char>(t.front())) ||
                               t.front() == '_');
            if (prev_word && cur_word) out += ' ';
        }
        out += t;
    }
    return out;
}

class FileScanner {
public:
    FileScanner(std::string file, std::string_view src, const AnalysisOptions& options)
        : file_(std::move(file)),
          src_(src),
          toks_(tokenize(src, file_)),
          options_(options) {}

    ScanResult scan() {
        while (!at_end(pos_)) {
            top_level_item();
        }
        if (!scopes_.empty()) {
            throw ParseError(file_, src_.size(), "unbalanced braces at end of file");
        }
        return std::move(result_);
    }

private:
    struct Scope {
        enum Kind { Namespace, Class, Extern, Generic } kind;
        std::string name;
    };

    bool at_end(std::size_t i) const { return toks_[i].kind == TokenKind::End; }
    const Token& tok(std::size_t i) const {
        return toks_[std::min(i, toks_.size() - 1)];
    }
    std::string_view text(std::size_t i) const { return tok(i).text(src_); }
    bool is_punct(std::size_t i, std::string_view p) const {
        return tok(i).kind == TokenKind::Punct && text(i) == p;
    }
    bool is_ident(std::size_t i, std::string_view w) const {
        return tok(i).kind == TokenKind::Ident && text(i) == w;
    }

    // Advances past a balanced (), {}, or [] group; `i` must sit on the opener.
    std::size_t skip_balanced(std::size_t i) const {
        const std::string_view open = text(i);
        std::string_view close;
        if (open == "(") close = ")";
        else if (open == "{") close = "}";
        else if (open == "[") close = "]";
        else return i + 1;
        int depth = 0;
        for (std::size_t j = i; !at_end(j); ++j) {
            if (tok(j).kind != TokenKind::Punct) continue;
            const std::string_view t = text(j);
            if (t == open) ++depth;
            else if (t == close && --depth == 0) return j + 1;
        }
        throw ParseError(file_, tok(i).begin, "unbalanced " + std::string(open));
    }

    std::size_t skip_to_semicolon(std::size_t i) const {
        while (!at_end(i)) {
            if (is_punct(i, ";")) return i + 1;
            if (is_punct(i, "(") || is_punct(i, "{") || is_punct(i, "[")) {
                i = skip_balanced(i);
                continue;
            }
            if (is_punct(i, "}")) return i;  // let caller see the scope close
            ++i;
        }
        return i;
    }

    // Skips one unrecognized declaration-like entity: stops after a top-level
    // ';' or after a brace body (function definitions end without ';').
    std::size_t skip_entity(std::size_t i) const {
        while (!at_end(i)) {
            if (is_punct(i, ";")) return i + 1;
            if (is_punct(i, "}")) return i;  // scope close belongs to the caller
            if (is_punct(i, "(") || is_punct(i, "[")) {
                i = skip_balanced(i);
                continue;
            }
            if (is_punct(i, "{")) {
                i = skip_balanced(i);
                if (is_punct(i, ";")) ++i;
                return i;
            }
            ++i;
        }
        return i;
    }

    bool in_namespace_scope() const {
        return std::all_of(scopes_.begin(), scopes_.end(), [](const Scope& s) {
            return s.kind == Scope::Namespace || s.kind == Scope::Extern;
        });
    }

    const Scope* enclosing_class() const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            if (it->kind == Scope::Class) return &*it;
            if (it->kind == Scope::Generic) return nullptr;
        }
        return nullptr;
    }

    std::string qualify(const std::vector<std::string>& name_parts) const {
        std::string q;
        for (const auto& s : scopes_) {
            if ((s.kind == Scope::Namespace || s.kind == Scope::Class) && !s.name.empty()) {
                if (!q.empty()) q += "::";
                q += s.name;
            }
        }
        for (const auto& part : name_parts) {
            if (!q.empty()) q += "::";
            q += part;
        }
        return q;
    }

    void top_level_item() {
        const Token& t = tok(pos_);
        if (t.kind == TokenKind::Punct) {
            const std::string_view p = text(pos_);
            if (p == "{") {
                scopes_.push_back({Scope::Generic, ""});
                ++pos_;
            } else if (p == "}") {
                if (scopes_.empty())
                    throw ParseError(file_, t.begin, "unbalanced '}'");
                scopes_.pop_back();
                ++pos_;
            } else if (p == ";") {
                ++pos_;
            } else if (p == "[") {  // [[attribute]]
                pos_ = skip_balanced(pos_);
            } else if (p == "~") {  // destructor
                pos_ = skip_entity(pos_);
            } else {
                ++pos_;
            }
            return;
        }
        if (t.kind != TokenKind::Ident) {
            ++pos_;
            return;
        }
        const std::string_view w = text(pos_);
        if (w == "template") {
            skip_template_header();
            skip_templated_entity();
            return;
        }
        if (w == "namespace") {
            handle_namespace();
            return;
        }
        if (w == "using" || w == "typedef" || w == "friend" || w == "static_assert") {
            pos_ = skip_to_semicolon(pos_);
            return;
        }
        if (w == "enum") {
            handle_enum();
            return;
        }
        if (w == "class" || w == "struct" || w == "union") {
            handle_class();
            return;
        }
        if (w == "extern" && tok(pos_ + 1).kind == TokenKind::String) {
            if (is_punct(pos_ + 2, "{")) {
                scopes_.push_back({Scope::Extern, ""});
                pos_ += 3;
            } else {
                pos_ += 2;  // extern "C" <declaration>
            }
            return;
        }
        if ((w == "public" || w == "private" || w == "protected") && is_punct(pos_ + 1, ":")) {
            pos_ += 2;
            return;
        }
        if (in_namespace_scope() && contains(options_.test_macros, w) &&
            is_punct(pos_ + 1, "(")) {
            handle_test_block();
            return;
        }
        parse_declaration();
    }

    void skip_template_header() {
        ++pos_;  // 'template'
        if (!is_punct(pos_, "<")) return;
        int depth = 0;
        while (!at_end(pos_)) {
            if (is_punct(pos_, "<")) ++depth;
            else if (is_punct(pos_, ">") && --depth == 0) {
                ++pos_;
                return;
            }
            ++pos_;
        }
    }

    // Skips a templated class or function entirely; they are outside the
    // supported target subset.
    void skip_templated_entity() {
        while (!at_end(pos_)) {
            if (is_punct(pos_, ";")) {
                ++pos_;
                return;
            }
            if (is_punct(pos_, "{")) {
                pos_ = skip_balanced(pos_);
                if (is_punct(pos_, ";")) ++pos_;
                return;
            }
            if (is_punct(pos_, "(") || is_punct(pos_, "[")) {
                pos_ = skip_balanced(pos_);
                continue;
            }
            ++pos_;
        }
    }

    void handle_namespace() {
        ++pos_;  // 'namespace'
        std::string name;
        while (tok(pos_).kind == TokenKind::Ident || is_punct(pos_, "::")) {
            name += text(pos_);
            ++pos_;
        }
        if (is_punct(pos_, "=")) {  // namespace alias
            pos_ = skip_to_semicolon(pos_);
            return;
        }
        if (is_punct(pos_, "{")) {
            scopes_.push_back({Scope::Namespace, name});
            ++pos_;
        } else {
            pos_ = skip_to_semicolon(pos_);
        }
    }

    void handle_enum() {
        ++pos_;
        while (!at_end(pos_) && !is_punct(pos_, "{") && !is_punct(pos_, ";")) ++pos_;
        if (is_punct(pos_, "{")) {
            pos_ = skip_balanced(pos_);
            pos_ = skip_to_semicolon(pos_);
        } else if (is_punct(pos_, ";")) {
            ++pos_;
        }
    }

    void handle_class() {
        ++pos_;  // class/struct/union keyword
        while (is_punct(pos_, "[")) pos_ = skip_balanced(pos_);  // attributes
        std::string name;
        if (tok(pos_).kind == TokenKind::Ident) {
            name = std::string(text(pos_));
            ++pos_;
        }
        // scan to '{' (definition), ';' (forward decl), or treat as elaborated type
        std::size_t j = pos_;
        while (!at_end(j) && !is_punct(j, "{") && !is_punct(j, ";") && !is_punct(j, "(")) ++j;
        if (is_punct(j, "{")) {
            scopes_.push_back({Scope::Class, name});
            pos_ = j + 1;
            return;
        }
        if (is_punct(j, ";")) {
            pos_ = j + 1;
            return;
        }
        // "struct X f(...)" style: fall through into declaration parsing
        parse_declaration();
    }

    void handle_test_block() {
        const std::size_t start = pos_;
        const std::size_t open = pos_ + 1;
        const std::size_t close = skip_balanced(open);  // past ')'
        // the name is the first string literal between the parens
        std::string name;
        bool found = false;
        for (std::size_t j = open + 1; j + 1 < close; ++j) {
            if (tok(j).kind == TokenKind::String) {
                const std::string_view raw = text(j);
                auto parsed = parse_cpp_literal(raw, ScalarKind::text());
                if (parsed) {
                    name = decode(*parsed).text;
                    found = true;
                }
                break;
            }
        }
        if (!found)
            throw ParseError(file_, tok(start).begin, "test macro without a string name");
        if (!is_punct(close, "{"))
            throw ParseError(file_, tok(close).begin, "test macro without a body");
        const std::size_t after = skip_balanced(close);
        RawTest t;
        t.id = name;
        t.file = file_;
        t.span_begin = tok(start).begin;
        t.span_end = tok(after - 1).end;
        t.body_begin = tok(close).end;       // byte after '{'
        t.body_end = tok(after - 1).begin;   // byte of matching '}'
        result_.tests.push_back(std::move(t));
        pos_ = after;
        if (is_punct(pos_, ";")) ++pos_;
    }

    // Parses one declaration at namespace or class scope; registers callables.
    void parse_declaration() {
        const std::size_t start = pos_;
        std::size_t j = pos_;
        std::ptrdiff_t last_ident = -1;
        bool saw_operator = false;
        bool saw_tilde = false;
        while (true) {
            const Token& t = tok(j);
            if (t.kind == TokenKind::End) {
                pos_ = j;
                return;
            }
            if (t.kind == TokenKind::Punct) {
                const std::string_view p = text(j);
                if (p == "(") {
                    if (last_ident != static_cast<std::ptrdiff_t>(j) - 1 || saw_operator ||
                        saw_tilde) {
                        pos_ = skip_entity(start);
                        return;
                    }
                    break;
                }
                if (p == ";") {
                    pos_ = j + 1;
                    return;
                }
                if (p == "=") {
                    pos_ = skip_to_semicolon(j);
                    return;
                }
                if (p == "{") {  // brace-initialized variable or stray block
                    pos_ = skip_balanced(j);
                    if (is_punct(pos_, ";")) ++pos_;
                    return;
                }
                if (p == "}") {
                    pos_ = j;
                    return;
                }
                if (p == "[") {
                    j = skip_balanced(j);
                    continue;
                }
                if (p == "~") saw_tilde = true;
            } else if (t.kind == TokenKind::Ident) {
                if (text(j) == "operator") {
                    pos_ = skip_entity(start);
                    return;
                }
                last_ident = static_cast<std::ptrdiff_t>(j);
            }
            ++j;
        }

        // j sits on '(' and tokens[j-1] is the function name
        std::size_t name_lo = j - 1;
        while (name_lo >= start + 2 && is_punct(name_lo - 1, "::") &&
               tok(name_lo - 2).kind == TokenKind::Ident) {
            name_lo -= 2;
        }
        std::vector<std::string> name_parts;
        for (std::size_t k = name_lo; k < j; k += 2) {
            name_parts.emplace_back(text(k));
        }
        if (is_cpp_keyword(name_parts.back())) {
            pos_ = skip_entity(start);
            return;
        }

        Callable c;
        c.short_name = name_parts.back();
        c.qualified_name = qualify(name_parts);
        c.file = file_;
        c.span_begin = tok(start).begin;

        // constructor detection
        const Scope* cls = enclosing_class();
        const bool no_return_type = name_lo == start ||
                                    only_specifiers_before(start, name_lo);
        if (cls && name_parts.size() == 1 && name_parts[0] == cls->name && no_return_type) {
            c.is_ctor = true;
        } else if (name_parts.size() >= 2 &&
                   name_parts[name_parts.size() - 1] == name_parts[name_parts.size() - 2] &&
                   no_return_type) {
            c.is_ctor = true;  // out-of-line X::X
            c.qualified_name = qualify(name_parts);
        }
        c.is_member = cls != nullptr || name_parts.size() >= 2 || c.is_ctor;
        if (cls == nullptr && name_parts.size() == 1) c.is_member = false;

        const std::size_t params_end = skip_balanced(j);  // past ')'
        parse_params(j + 1, params_end - 1, c);

        // trailing specifiers
        std::size_t q = params_end;
        while (true) {
            if (tok(q).kind == TokenKind::Ident) {
                const std::string_view w = text(q);
                if (w == "const" || w == "override" || w == "final" || w == "mutable") {
                    ++q;
                    continue;
                }
                if (w == "noexcept" || w == "throw") {
                    ++q;
                    if (is_punct(q, "(")) q = skip_balanced(q);
                    continue;
                }
            }
            break;
        }
        if (is_punct(q, "-") || (tok(q).kind == TokenKind::Punct && text(q) == "->")) {
            // trailing return type: unsupported subset; skip the whole entity
            while (!at_end(q) && !is_punct(q, "{") && !is_punct(q, ";")) ++q;
            if (is_punct(q, "{")) q = skip_balanced(q);
            else if (is_punct(q, ";")) ++q;
            pos_ = q;
            return;
        }
        if (is_punct(q, "=")) {  // = default / = delete / = 0
            pos_ = skip_to_semicolon(q);
            c.span_end = tok(pos_ - 1).end;
            result_.callables.push_back(std::move(c));
            return;
        }
        if (is_punct(q, ":")) {  // ctor member-init list
            ++q;
            while (!at_end(q) && !is_punct(q, "{")) {
                if (is_punct(q, "(") || is_punct(q, "[")) {
                    q = skip_balanced(q);
                    continue;
                }
                // braced member init: id{...}
                if (is_punct(q, "{") ) break;
                if (tok(q).kind == TokenKind::Ident && is_punct(q + 1, "{")) {
                    q = skip_balanced(q + 1);
                    continue;
                }
                ++q;
            }
        }
        if (is_punct(q, "{")) {
            c.has_body = true;
            c.body_lbrace = tok(q).begin;
            const std::size_t after = skip_balanced(q);
            c.span_end = tok(after - 1).end;
            result_.callables.push_back(std::move(c));
            pos_ = after;
            if (is_punct(pos_, ";")) ++pos_;
            return;
        }
        if (is_punct(q, ";")) {
            c.span_end = tok(q).end;
            result_.callables.push_back(std::move(c));
            pos_ = q + 1;
            return;
        }
        pos_ = skip_to_semicolon(q);
    }

    // True if tokens [lo, hi) are only declaration specifiers (no type words).
    bool only_specifiers_before(std::size_t lo, std::size_t hi) const {
        for (std::size_t k = lo; k < hi; ++k) {
            if (tok(k).kind != TokenKind::Ident) return false;
            const std::string_view w = text(k);
            if (w != "explicit" && w != "inline" && w != "constexpr" && w != "static")
                return false;
        }
        return true;
    }

    void parse_params(std::size_t lo, std::size_t hi, Callable& c) {
        if (lo >= hi) return;  // ()
        if (hi - lo == 1 && is_ident(lo, "void")) return;  // (void)
        std::vector<std::pair<std::size_t, std::size_t>> pieces;
        std::size_t piece_start = lo;
        int depth = 0;
        for (std::size_t k = lo; k < hi; ++k) {
            if (tok(k).kind != TokenKind::Punct) continue;
            const std::string_view p = text(k);
            if (p == "(" || p == "[" || p == "{" || p == "<") ++depth;
            else if (p == ")" || p == "]" || p == "}" || p == ">") --depth;
            else if (p == "," && depth == 0) {
                pieces.push_back({piece_start, k});
                piece_start = k + 1;
            }
        }
        pieces.push_back({piece_start, hi});

        for (auto [plo, phi] : pieces) {
            ParamInfo info;
            bool scalar = false;
            // default argument?
            std::size_t value_end = phi;
            int d2 = 0;
            for (std::size_t k = plo; k < phi; ++k) {
                if (tok(k).kind != TokenKind::Punct) continue;
                const std::string_view p = text(k);
                if (p == "(" || p == "[" || p == "{" || p == "<") ++d2;
                else if (p == ")" || p == "]" || p == "}" || p == ">") --d2;
                else if (p == "=" && d2 == 0) {
                    value_end = k;
                    c.has_default_args = true;
                    break;
                }
            }
            // try "type name" first, then unnamed "type"
            if (value_end - plo >= 2 && tok(value_end - 1).kind == TokenKind::Ident &&
                !is_cpp_keyword(text(value_end - 1))) {
                const std::string type_text = join_tokens(src_, toks_, plo, value_end - 1);
                if (auto kind = kind_from_cpp_type(type_text)) {
                    info.type_text = type_text;
                    info.name = std::string(text(value_end - 1));
                    info.kind = *kind;
                    scalar = true;
                }
            }
            if (!scalar) {
                const std::string type_text = join_tokens(src_, toks_, plo, value_end);
                if (auto kind = kind_from_cpp_type(type_text)) {
                    info.type_text = type_text;
                    info.kind = *kind;
                    scalar = true;
                } else {
                    // non-scalar: keep name heuristically for diagnostics
                    info.type_text = type_text;
                }
            }
            c.params.push_back(std::move(info));
            c.scalar_ok.push_back(scalar);
        }
    }

    std::string file_;
    std::string_view src_;
    std::vector<Token> toks_;
    const AnalysisOptions& options_;
    std::size_t pos_ = 0;
    std::vector<Scope> scopes_;
    ScanResult result_;
};

// --- project index ------------------------------------------------------------

struct ProjectIndex {
    std::vector<Callable> entries;  // merged decl+def
    // short name -> entry indices
    std::unordered_map<std::string, std::vector<std::size_t>> by_short_name;
    std::unordered_map<std::string, std::vector<std::size_t>> by_qualified;
    std::set<std::string> ctor_classes;  // class short names with any ctor entry

    void build_lookup() {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            by_short_name[entries[i].short_name].push_back(i);
            by_qualified[entries[i].qualified_name].push_back(i);
            if (entries[i].is_ctor) ctor_classes.insert(entries[i].short_name);
        }
    }
};

ProjectIndex merge_callables(std::vector<Callable> raw) {
    // merge declarations with definitions by signature key; definitions win
    std::map<std::string, Callable> merged;
    for (auto& c : raw) {
        const std::string key = c.signature_key();
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, std::move(c));
            continue;
        }
        Callable& kept = it->second;
        // definitions win for location; default-arg markers and parameter
        // names survive from whichever declaration carries them
        if (c.has_body && !kept.has_body) {
            c.has_default_args |= kept.has_default_args;
            for (std::size_t i = 0; i < c.params.size() && i < kept.params.size(); ++i) {
                if (c.params[i].name.empty()) c.params[i].name = kept.params[i].name;
            }
            kept = std::move(c);
        } else {
            // duplicate definitions would be an ODR issue in the subject;
            // the first scanned one is kept
            kept.has_default_args |= c.has_default_args;
            for (std::size_t i = 0; i < kept.params.size() && i < c.params.size(); ++i) {
                if (kept.params[i].name.empty()) kept.params[i].name = c.params[i].name;
            }
        }
    }
    ProjectIndex index;
    for (auto& [key, c] : merged) index.entries.push_back(std::move(c));
    index.build_lookup();
    return index;
}

// --- test body analysis ---------------------------------------------------------

struct BodyAnalyzer {
    std::string_view src;
    const std::vector<Token>& toks;
    std::size_t body_lo_tok;  // first token inside body
    std::size_t body_hi_tok;  // one past last token inside body
    const AnalysisOptions& options;
    const ProjectIndex& index;
    ExclusionStats* stats;

    std::vector<std::pair<std::size_t, std::size_t>> lambda_spans;  // byte ranges

    bool in_lambda(std::size_t byte) const {
        for (auto [lo, hi] : lambda_spans) {
            if (byte >= lo && byte < hi) return true;
        }
        return false;
    }

    bool is_punct(std::size_t i, std::string_view p) const {
        return toks[i].kind == TokenKind::Punct && toks[i].text(src) == p;
    }

    std::size_t match_forward(std::size_t i) const {  // i on opener token
        const std::string_view open = toks[i].text(src);
        std::string_view close = open == "(" ? ")" : open == "{" ? "}" : "]";
        int depth = 0;
        for (std::size_t j = i; j < body_hi_tok; ++j) {
            if (toks[j].kind != TokenKind::Punct) continue;
            const std::string_view t = toks[j].text(src);
            if (t == open) ++depth;
            else if (t == close && --depth == 0) return j;
        }
        return body_hi_tok;
    }

    void find_lambdas() {
        for (std::size_t i = body_lo_tok; i < body_hi_tok; ++i) {
            if (!is_punct(i, "[")) continue;
            if (i > body_lo_tok) {
                const Token& prev = toks[i - 1];
                const std::string_view pt = prev.text(src);
                if (prev.kind == TokenKind::Ident || prev.kind == TokenKind::String ||
                    pt == ")" || pt == "]")
                    continue;  // subscript
                if (pt == "[") continue;  // attribute [[...]]
            }
            std::size_t j = match_forward(i);
            if (j >= body_hi_tok) continue;
            std::size_t k = j + 1;
            if (is_punct(k, "(")) k = match_forward(k) + 1;
            while (k < body_hi_tok && toks[k].kind == TokenKind::Ident &&
                   (toks[k].text(src) == "mutable" || toks[k].text(src) == "noexcept"))
                ++k;
            if (k < body_hi_tok && is_punct(k, "{")) {
                const std::size_t close = match_forward(k);
                if (close < body_hi_tok) {
                    lambda_spans.push_back({toks[k].begin, toks[close].end});
                }
            }
        }
    }

    std::vector<Statement> split_statements(std::size_t body_begin_byte,
                                            std::size_t body_end_byte) const {
        std::vector<Statement> out;
        int brace = 0, paren = 0;
        std::size_t stmt_start_tok = body_lo_tok;
        auto push = [&](std::size_t from_tok, std::size_t to_tok_incl) {
            if (from_tok > to_tok_incl || from_tok >= body_hi_tok) return;
            Statement s;
            s.begin = toks[from_tok].begin;
            s.end = toks[to_tok_incl].end;
            if (s.begin >= body_begin_byte && s.end <= body_end_byte) out.push_back(s);
        };
        for (std::size_t i = body_lo_tok; i < body_hi_tok; ++i) {
            if (toks[i].kind != TokenKind::Punct) continue;
            const std::string_view t = toks[i].text(src);
            if (t == "(") ++paren;
            else if (t == ")") --paren;
            else if (t == "{") ++brace;
            else if (t == "}") {
                --brace;
                if (brace == 0 && paren == 0) {
                    push(stmt_start_tok, i);
                    stmt_start_tok = i + 1;
                }
            } else if (t == ";" && brace == 0 && paren == 0) {
                push(stmt_start_tok, i);
                stmt_start_tok = i + 1;
            }
        }
        if (stmt_start_tok < body_hi_tok) push(stmt_start_tok, body_hi_tok - 1);
        return out;
    }

    // The whole statement containing token i at its nesting level: expands to
    // the enclosing ';' (or closing brace boundary).
    std::pair<std::size_t, std::size_t> statement_around(std::size_t i) const {
        // walk back to previous ';', '{', or '}' at the same level
        int depth = 0;
        std::size_t lo = body_lo_tok;
        for (std::size_t j = i; j-- > body_lo_tok;) {
            if (toks[j].kind != TokenKind::Punct) continue;
            const std::string_view t = toks[j].text(src);
            if (t == ")" || t == "}" || t == "]") ++depth;
            else if (t == "(" || t == "[") {
                if (depth == 0) {
                    lo = j + 1;
                    break;
                }
                --depth;
            } else if (t == "{") {
                if (depth == 0) {
                    lo = j + 1;
                    break;
                }
                --depth;
            } else if (t == ";" && depth == 0) {
                lo = j + 1;
                break;
            }
        }
        // forward to the next ';' at the same level
        depth = 0;
        std::size_t hi = body_hi_tok - 1;
        for (std::size_t j = i; j < body_hi_tok; ++j) {
            if (toks[j].kind != TokenKind::Punct) continue;
            const std::string_view t = toks[j].text(src);
            if (t == "(" || t == "{" || t == "[") ++depth;
            else if (t == ")" || t == "}" || t == "]") {
                if (depth == 0) {
                    hi = j > i ? j - 1 : i;
                    break;
                }
                --depth;
            } else if (t == ";" && depth == 0) {
                hi = j;
                break;
            }
        }
        return {lo, hi};
    }

    std::vector<AssertionSite> find_assertions() {
        std::vector<AssertionSite> out;
        for (std::size_t i = body_lo_tok; i < body_hi_tok; ++i) {
            if (toks[i].kind != TokenKind::Ident) continue;
            const std::string_view w = toks[i].text(src);
            if (!contains(options.assertion_macros, w)) continue;
            if (!is_punct(i + 1, "(")) continue;
            if (in_lambda(toks[i].begin)) continue;
            auto [lo, hi] = statement_around(i);
            AssertionSite site;
            site.begin = toks[lo].begin;
            site.end = toks[hi].end;
            site.macro = std::string(w);
            // flagged when nested in a block or guarded by a control keyword
            int depth = 0;
            for (std::size_t j = body_lo_tok; j < i; ++j) {
                if (toks[j].kind != TokenKind::Punct) continue;
                const std::string_view t = toks[j].text(src);
                if (t == "{") ++depth;
                else if (t == "}") --depth;
            }
            site.flagged = depth > 0;
            if (!site.flagged) {
                for (std::size_t j = lo; j < i; ++j) {
                    if (toks[j].kind != TokenKind::Ident) continue;
                    const std::string_view t = toks[j].text(src);
                    if (t == "if" || t == "for" || t == "while" || t == "do" ||
                        t == "else" || t == "switch") {
                        site.flagged = true;
                        break;
                    }
                }
            }
            out.push_back(std::move(site));
        }
        std::sort(out.begin(), out.end(),
                  [](const AssertionSite& a, const AssertionSite& b) { return a.begin < b.begin; });
        for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
        return out;
    }

    std::vector<TargetCallSite> find_target_calls() {
        std::vector<TargetCallSite> out;
        for (std::size_t i = body_lo_tok; i < body_hi_tok; ++i) {
            if (toks[i].kind != TokenKind::Ident) continue;
            if (!is_punct(i + 1, "(")) continue;
            const std::string_view name = toks[i].text(src);
            if (is_cpp_keyword(name)) continue;
            if (contains(options.assertion_macros, name)) continue;
            if (contains(options.test_macros, name) || name == "SUBCASE") continue;

            // receiver / qualification context
            bool member_call = false;
            std::vector<std::string> qual_parts;
            std::size_t name_lo = i;
            if (i > body_lo_tok) {
                const std::string_view prev = toks[i - 1].text(src);
                if (prev == "." || prev == "->") {
                    member_call = true;
                } else if (prev == "::") {
                    std::size_t k = i;
                    while (k >= body_lo_tok + 2 && is_punct(k - 1, "::") &&
                           toks[k - 2].kind == TokenKind::Ident) {
                        k -= 2;
                    }
                    name_lo = k;
                    for (std::size_t q = k; q < i; q += 2)
                        qual_parts.emplace_back(toks[q].text(src));
                }
            }
            qual_parts.emplace_back(name);

            if (in_lambda(toks[i].begin)) {
                if (resolvable(qual_parts, member_call)) stats->in_lambda++;
                continue;
            }

            const std::size_t close = match_forward(i + 1);
            if (close >= body_hi_tok) continue;
            std::vector<ArgExpr> args = split_args(i + 1, close);

            // constructor form: "Type var(args)" — the ident before the name
            // is a class with a constructor in the index
            std::optional<std::string> ctor_class;
            if (!member_call && qual_parts.size() == 1 && i >= body_lo_tok + 1 &&
                toks[i - 1].kind == TokenKind::Ident) {
                const std::string prev(toks[i - 1].text(src));
                if (index.ctor_classes.count(prev)) ctor_class = prev;
            }
            const Callable* resolved = resolve(qual_parts, member_call, args.size(),
                                               ctor_class, args);
            if (!resolved) continue;

            TargetCallSite site;
            site.target_id = resolved->target_id();
            site.begin = toks[name_lo].begin;
            site.end = toks[close].end;
            site.args = std::move(args);
            site.member_call = member_call;
            out.push_back(std::move(site));
        }
        std::sort(out.begin(), out.end(),
                  [](const TargetCallSite& a, const TargetCallSite& b) {
                      return a.begin < b.begin;
                  });
        std::map<std::string, std::size_t> ordinals;
        for (auto& s : out) s.site_ordinal = ordinals[s.target_id]++;
        return out;
    }

    std::vector<ArgExpr> split_args(std::size_t open_tok, std::size_t close_tok) const {
        std::vector<ArgExpr> out;
        if (close_tok == open_tok + 1) return out;  // ()
        int depth = 0;
        std::size_t arg_start = open_tok + 1;
        auto push = [&](std::size_t from_tok, std::size_t to_tok_excl) {
            ArgExpr a;
            a.begin = toks[from_tok].begin;
            a.end = toks[to_tok_excl - 1].end;
            a.text = std::string(src.substr(a.begin, a.end - a.begin));
            out.push_back(std::move(a));
        };
        for (std::size_t j = open_tok + 1; j < close_tok; ++j) {
            if (toks[j].kind != TokenKind::Punct) continue;
            const std::string_view t = toks[j].text(src);
            if (t == "(" || t == "{" || t == "[") ++depth;
            else if (t == ")" || t == "}" || t == "]") --depth;
            else if (t == "," && depth == 0) {
                push(arg_start, j);
                arg_start = j + 1;
            }
        }
        push(arg_start, close_tok);
        return out;
    }

    bool resolvable(const std::vector<std::string>& qual_parts, bool member_call) const {
        auto it = index.by_short_name.find(qual_parts.back());
        if (it == index.by_short_name.end()) return false;
        for (std::size_t idx : it->second) {
            const Callable& c = index.entries[idx];
            if (member_call && !c.is_member) continue;
            return true;
        }
        return false;
    }

    const Callable* resolve(const std::vector<std::string>& qual_parts, bool member_call,
                            std::size_t arity, const std::optional<std::string>& ctor_class,
                            const std::vector<ArgExpr>& args) {
        std::vector<const Callable*> candidates;
        auto add_candidates = [&](const std::string& short_name, bool ctor_only) {
            auto it = index.by_short_name.find(short_name);
            if (it == index.by_short_name.end()) return;
            for (std::size_t idx : it->second) {
                const Callable& c = index.entries[idx];
                if (ctor_only && !c.is_ctor) continue;
                if (!ctor_only) {
                    if (member_call && !(c.is_member && !c.is_ctor)) continue;
                    if (!member_call && c.is_member && !c.is_ctor) {
                        // free-form call to a member: allow only qualified matches
                        if (qual_parts.size() < 2) continue;
                    }
                }
                if (qual_parts.size() >= 2) {
                    std::string suffix;
                    for (const auto& part : qual_parts) {
                        if (!suffix.empty()) suffix += "::";
                        suffix += part;
                    }
                    if (c.qualified_name != suffix) {
                        const std::string tail = "::" + suffix;
                        if (c.qualified_name.size() <= tail.size() ||
                            c.qualified_name.compare(c.qualified_name.size() - tail.size(),
                                                     tail.size(), tail) != 0)
                            continue;
                    }
                }
                candidates.push_back(&c);
            }
        };
        if (ctor_class) {
            add_candidates(*ctor_class, true);
        }
        if (candidates.empty()) {
            add_candidates(qual_parts.back(), false);
            // plain "Type(args)" constructor invocation
            if (candidates.empty() && !member_call &&
                index.ctor_classes.count(qual_parts.back())) {
                add_candidates(qual_parts.back(), true);
            }
        }
        if (candidates.empty()) {
            stats->unresolved++;
            return nullptr;
        }
        std::vector<const Callable*> arity_ok;
        for (const Callable* c : candidates) {
            if (c->params.size() == arity) arity_ok.push_back(c);
        }
        if (arity_ok.empty()) {
            stats->arity_mismatch++;
            return nullptr;
        }
        std::vector<const Callable*> viable;
        for (const Callable* c : arity_ok) {
            if (!c->all_scalar()) continue;
            if (c->params.empty()) continue;
            if (c->has_default_args) continue;
            if (!c->has_body) continue;
            viable.push_back(c);
        }
        if (viable.empty()) {
            const Callable* c = arity_ok.front();
            if (c->params.empty()) stats->zero_params++;
            else if (!c->all_scalar()) stats->non_scalar++;
            else if (c->has_default_args) stats->default_args++;
            else if (!c->has_body) stats->no_definition++;
            else stats->non_scalar++;
            return nullptr;
        }
        if (viable.size() == 1) return viable.front();
        // same-arity overloads: pick by literal-kind match when unique
        std::vector<const Callable*> literal_match;
        for (const Callable* c : viable) {
            bool all_ok = true;
            for (std::size_t k = 0; k < args.size(); ++k) {
                try {
                    if (!parse_cpp_literal(args[k].text, c->params[k].kind)) {
                        all_ok = false;
                        break;
                    }
                } catch (const EncodingError&) {
                    all_ok = false;
                    break;
                }
            }
            if (all_ok) literal_match.push_back(c);
        }
        if (literal_match.size() == 1) return literal_match.front();
        stats->ambiguous++;
        return nullptr;
    }
};

}  // namespace

const TargetMethod* CodeModel::find_target(const std::string& id) const {
    for (const auto& t : targets) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

bool path_excluded(const fs::path& rel, const AnalysisOptions& options) {
    const std::string generic = rel.generic_string();
    const std::string base = rel.filename().string();
    if (base == "doctest.h") return true;
    if (!options.workspace_dir.empty()) {
        if (generic == options.workspace_dir ||
            generic.rfind(options.workspace_dir + "/", 0) == 0)
            return true;
    }
    for (const auto& part : rel) {
        const std::string p = part.string();
        if (p == "generated-puts" || p == "finalized-puts" || (!p.empty() && p[0] == '.'))
            return true;
    }
    for (const auto& ex : options.exclude_paths) {
        if (generic == ex || generic.rfind(ex + "/", 0) == 0 || base == ex) return true;
        if (!ex.empty() && ex.back() == '/' && generic.rfind(ex, 0) == 0) return true;
    }
    return false;
}

std::string sanitize_identifier(std::string_view text) {
    std::string out;
    for (char c : text) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(0, "t_");
    return out;
}

CodeModel analyze_project(const fs::path& project_root, const AnalysisOptions& options) {
    if (!fs::exists(project_root) || !fs::is_directory(project_root))
        throw ConfigError("project root does not exist: " + project_root.string());

    const std::vector<std::string> exts = {".cpp", ".cc", ".cxx", ".h", ".hpp"};
    auto skip = [&](const fs::path& rel) { return path_excluded(rel, options); };
    const std::vector<fs::path> files = list_files(project_root, exts, skip);

    std::vector<Callable> callables;
    std::vector<RawTest> raw_tests;
    std::map<std::string, std::string> sources;
    for (const auto& rel : files) {
        const std::string bytes = read_file(project_root / rel);
        const std::string name = rel.generic_string();
        FileScanner scanner(name, bytes, options);
        ScanResult r = scanner.scan();
        for (auto& c : r.callables) callables.push_back(std::move(c));
        for (auto& t : r.tests) raw_tests.push_back(std::move(t));
        sources.emplace(name, bytes);
    }

    // duplicate test names break per-test filtering contracts
    {
        std::map<std::string, std::string> seen;
        for (const auto& t : raw_tests) {
            auto [it, inserted] = seen.emplace(t.id, t.file);
            if (!inserted) {
                throw ParseError(t.file, t.span_begin,
                                 "duplicate test name '" + t.id + "' (also in " + it->second +
                                     ")");
            }
        }
    }

    ProjectIndex index = merge_callables(std::move(callables));

    CodeModel model;
    std::set<std::string> referenced;
    std::map<std::string, const Callable*> by_target_id;
    for (const auto& c : index.entries) {
        if (c.all_scalar() && !c.params.empty() && c.has_body && !c.has_default_args) {
            by_target_id.emplace(c.target_id(), &c);
        }
    }

    for (const auto& raw : raw_tests) {
        const std::string& bytes = sources[raw.file];
        const std::vector<Token> toks = tokenize(bytes, raw.file);
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (toks[i].begin >= raw.body_begin && lo == 0 && toks[i].end <= raw.body_end)
                lo = i;
            if (toks[i].end <= raw.body_end && toks[i].begin >= raw.body_begin) hi = i + 1;
        }
        if (lo == 0) {
            // find first token at/after body_begin
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (toks[i].begin >= raw.body_begin) {
                    lo = i;
                    break;
                }
            }
        }

        BodyAnalyzer analyzer{bytes, toks, lo, hi, options, index, &model.excluded, {}};
        analyzer.find_lambdas();

        TestCase tc;
        tc.id = raw.id;
        tc.file = raw.file;
        tc.span_begin = raw.span_begin;
        tc.span_end = raw.span_end;
        tc.body_begin = raw.body_begin;
        tc.body_end = raw.body_end;
        tc.statements = analyzer.split_statements(raw.body_begin, raw.body_end);
        tc.assertions = analyzer.find_assertions();
        for (auto& a : tc.assertions) {
            a.text = bytes.substr(a.begin, a.end - a.begin);
        }
        tc.target_calls = analyzer.find_target_calls();
        for (const auto& site : tc.target_calls) referenced.insert(site.target_id);
        model.tests.push_back(std::move(tc));
    }

    std::sort(model.tests.begin(), model.tests.end(), [](const TestCase& a, const TestCase& b) {
        return a.file != b.file ? a.file < b.file : a.span_begin < b.span_begin;
    });

    for (const auto& id : referenced) {
        auto it = by_target_id.find(id);
        if (it == by_target_id.end()) continue;
        const Callable& c = *it->second;
        TargetMethod t;
        t.id = id;
        t.qualified_name = c.qualified_name;
        t.short_name = c.short_name;
        t.params = c.params;
        t.file = c.file;
        t.span_begin = c.span_begin;
        t.span_end = c.span_end;
        t.body_lbrace = c.body_lbrace;
        t.is_member = c.is_member;
        t.is_ctor = c.is_ctor;
        model.targets.push_back(std::move(t));
    }
    std::sort(model.targets.begin(), model.targets.end(),
              [](const TargetMethod& a, const TargetMethod& b) { return a.id < b.id; });
    return model;
}

std::optional<CanonicalTuple> resolve_original_arguments(const TargetCallSite& site,
                                                         const TargetMethod& target) {
    if (site.args.size() != target.params.size())
        throw Error("call arity does not match target " + target.id);
    CanonicalTuple tuple;
    for (std::size_t i = 0; i < site.args.size(); ++i) {
        auto enc = parse_cpp_literal(site.args[i].text, target.params[i].kind);
        if (!enc) return std::nullopt;
        tuple.push_back(std::move(*enc));
    }
    return tuple;
}

}  // namespace putforge
