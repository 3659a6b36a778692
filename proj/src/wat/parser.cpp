// sentinel: differential bug detection for WebAssembly runtimes
// Copyright 2026 The Sentinel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sentinel/wat/wat.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <limits>
#include <map>
#include <unordered_map>

namespace sentinel::wat {
namespace {

enum class TokKind { LParen, RParen, Keyword, Id, String };

struct Token {
    TokKind kind;
    std::string text;  // keyword / id (without '$') / decoded string bytes
    size_t line;
    size_t column;
};

class Lexer
{
public:
    explicit Lexer(std::string_view src) : src_{src} {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;)
        {
            skip_space_and_comments();
            if (pos_ >= src_.size())
                return out;
            const size_t line = line_, col = col_;
            const char c = src_[pos_];
            if (c == '(')
            {
                advance();
                out.push_back({TokKind::LParen, "(", line, col});
            }
            else if (c == ')')
            {
                advance();
                out.push_back({TokKind::RParen, ")", line, col});
            }
            else if (c == '"')
            {
                out.push_back({TokKind::String, string_literal(), line, col});
            }
            else
            {
                std::string word;
                while (pos_ < src_.size() && is_idchar(src_[pos_]))
                {
                    word.push_back(src_[pos_]);
                    advance();
                }
                if (word.empty())
                    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
                if (word[0] == '$')
                {
                    if (word.size() == 1)
                        throw ParseError(line, col, "empty identifier");
                    out.push_back({TokKind::Id, word.substr(1), line, col});
                }
                else
                {
                    out.push_back({TokKind::Keyword, word, line, col});
                }
            }
        }
    }

private:
    static bool is_idchar(char c)
    {
        if (c <= ' ' || c == 0x7F)
            return false;
        return c != '(' && c != ')' && c != '"' && c != ';' && c != ',';
    }

    void advance()
    {
        if (src_[pos_] == '\n')
        {
            ++line_;
            col_ = 1;
        }
        else
        {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments()
    {
        while (pos_ < src_.size())
        {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
            {
                advance();
            }
            else if (c == ';' && pos_ + 1 < src_.size() && src_[pos_ + 1] == ';')
            {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
            }
            else if (c == '(' && pos_ + 1 < src_.size() && src_[pos_ + 1] == ';')
            {
                const size_t line = line_, col = col_;
                advance();
                advance();
                int depth = 1;
                while (depth > 0)
                {
                    if (pos_ + 1 >= src_.size())
                        throw ParseError(line, col, "unterminated block comment");
                    if (src_[pos_] == ';' && src_[pos_ + 1] == ')')
                    {
                        --depth;
                        advance();
                        advance();
                    }
                    else if (src_[pos_] == '(' && src_[pos_ + 1] == ';')
                    {
                        ++depth;
                        advance();
                        advance();
                    }
                    else
                    {
                        advance();
                    }
                }
            }
            else
            {
                return;
            }
        }
    }

    static int hex_value(char c)
    {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    }

    static void append_utf8(std::string& out, uint32_t cp)
    {
        if (cp < 0x80)
            out.push_back(static_cast<char>(cp));
        else if (cp < 0x800)
        {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        else if (cp < 0x10000)
        {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        else
        {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    std::string string_literal()
    {
        const size_t line = line_, col = col_;
        advance();  // opening quote
        std::string out;
        for (;;)
        {
            if (pos_ >= src_.size() || src_[pos_] == '\n')
                throw ParseError(line, col, "unterminated string");
            const char c = src_[pos_];
            if (c == '"')
            {
                advance();
                return out;
            }
            if (c != '\\')
            {
                out.push_back(c);
                advance();
                continue;
            }
            const size_t eline = line_, ecol = col_;
            advance();
            if (pos_ >= src_.size())
                throw ParseError(eline, ecol, "unterminated escape");
            const char e = src_[pos_];
            advance();
            switch (e)
            {
            case 'n':
                out.push_back('\n');
                break;
            case 't':
                out.push_back('\t');
                break;
            case 'r':
                out.push_back('\r');
                break;
            case '\\':
            case '\'':
            case '"':
                out.push_back(e);
                break;
            case 'u': {
                if (pos_ >= src_.size() || src_[pos_] != '{')
                    throw ParseError(eline, ecol, "malformed unicode escape");
                advance();
                uint32_t cp = 0;
                int digits = 0;
                while (pos_ < src_.size() && src_[pos_] != '}')
                {
                    const int h = hex_value(src_[pos_]);
                    if (h < 0 || ++digits > 6)
                        throw ParseError(eline, ecol, "malformed unicode escape");
                    cp = cp * 16 + static_cast<uint32_t>(h);
                    advance();
                }
                if (pos_ >= src_.size() || digits == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp < 0xE000))
                    throw ParseError(eline, ecol, "malformed unicode escape");
                advance();
                append_utf8(out, cp);
                break;
            }
            default: {
                const int hi = hex_value(e);
                const int lo = pos_ < src_.size() ? hex_value(src_[pos_]) : -1;
                if (hi < 0 || lo < 0)
                    throw ParseError(eline, ecol, std::string("unknown escape '\\") + e + "'");
                advance();
                out.push_back(static_cast<char>(hi * 16 + lo));
                break;
            }
            }
        }
    }

    std::string_view src_;
    size_t pos_ = 0;
    size_t line_ = 1;
    size_t col_ = 1;
};

struct Node {
    Token tok;  // atom token, or the '(' of a list
    bool is_list = false;
    std::vector<Node> items;

    bool is_keyword(std::string_view kw) const { return !is_list && tok.kind == TokKind::Keyword && tok.text == kw; }
    bool is_list_headed(std::string_view kw) const { return is_list && !items.empty() && items[0].is_keyword(kw); }
};

[[noreturn]] void fail(const Token& at, const std::string& msg)
{
    throw ParseError(at.line, at.column, msg);
}

[[noreturn]] void fail(const Node& at, const std::string& msg)
{
    fail(at.tok, msg);
}

Node build_tree(const std::vector<Token>& toks, size_t& pos)
{
    const Token& t = toks[pos];
    if (t.kind == TokKind::RParen)
        fail(t, "expected expression, found ')'");
    if (t.kind != TokKind::LParen)
    {
        ++pos;
        return Node{t, false, {}};
    }
    Node list{t, true, {}};
    ++pos;
    for (;;)
    {
        if (pos >= toks.size())
            fail(t, "expected ')' to close list");
        if (toks[pos].kind == TokKind::RParen)
        {
            ++pos;
            return list;
        }
        list.items.push_back(build_tree(toks, pos));
    }
}

// ---------------------------------------------------------------------------
// Number literals

std::string strip_underscores(const Node& n, std::string_view s)
{
    std::string out;
    for (size_t i = 0; i < s.size(); ++i)
    {
        if (s[i] == '_')
        {
            if (i == 0 || i + 1 == s.size() || s[i + 1] == '_' || !std::isxdigit(static_cast<unsigned char>(s[i - 1])))
                fail(n, "misplaced '_' in number");
            continue;
        }
        out.push_back(s[i]);
    }
    return out;
}

/// Parses an integer literal into magnitude and sign. Returns false if not an integer.
bool parse_int_parts(const Node& n, bool& negative, uint64_t& magnitude)
{
    if (n.is_list || n.tok.kind != TokKind::Keyword)
        return false;
    std::string s = n.tok.text;
    negative = false;
    size_t i = 0;
    if (!s.empty() && (s[0] == '+' || s[0] == '-'))
    {
        negative = s[0] == '-';
        i = 1;
    }
    std::string_view body = std::string_view(s).substr(i);
    int base = 10;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X'))
    {
        base = 16;
        body.remove_prefix(2);
    }
    if (body.empty())
        return false;
    const std::string digits = strip_underscores(n, body);
    if (digits.empty())
        return false;
    uint64_t v = 0;
    for (const char c : digits)
    {
        int d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (base == 16 && c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else if (base == 16 && c >= 'A' && c <= 'F')
            d = c - 'A' + 10;
        else
            return false;
        if (v > (std::numeric_limits<uint64_t>::max() - static_cast<uint64_t>(d)) / static_cast<uint64_t>(base))
            fail(n, "integer literal out of range");
        v = v * static_cast<uint64_t>(base) + static_cast<uint64_t>(d);
    }
    magnitude = v;
    return true;
}

uint64_t parse_int_bits(const Node& n, unsigned bits)
{
    bool negative;
    uint64_t mag;
    if (!parse_int_parts(n, negative, mag))
        fail(n, "expected integer literal");
    const uint64_t umax = bits == 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
    const uint64_t neg_limit = uint64_t{1} << (bits - 1);
    if (negative)
    {
        if (mag > neg_limit)
            fail(n, "integer literal out of range");
        return (~mag + 1) & umax;
    }
    if (mag > umax)
        fail(n, "integer literal out of range");
    return mag;
}

uint32_t parse_u32(const Node& n)
{
    bool negative;
    uint64_t mag;
    if (!parse_int_parts(n, negative, mag) || negative || mag > 0xFFFFFFFFu)
        fail(n, "expected unsigned 32-bit integer");
    return static_cast<uint32_t>(mag);
}

template <typename Bits>
Bits parse_float_bits(const Node& n)
{
    constexpr bool is32 = std::is_same_v<Bits, uint32_t>;
    constexpr unsigned mant_bits = is32 ? 23 : 52;
    constexpr Bits sign_mask = Bits{1} << (is32 ? 31 : 63);
    constexpr Bits exp_mask = static_cast<Bits>(is32 ? 0x7F800000ull : 0x7FF0000000000000ull);
    constexpr Bits mant_mask = (Bits{1} << mant_bits) - 1;

    if (n.is_list || n.tok.kind != TokKind::Keyword)
        fail(n, "expected float literal");
    std::string s = n.tok.text;
    bool negative = false;
    size_t i = 0;
    if (!s.empty() && (s[0] == '+' || s[0] == '-'))
    {
        negative = s[0] == '-';
        i = 1;
    }
    const std::string body = s.substr(i);
    const Bits sign = negative ? sign_mask : 0;

    if (body == "inf")
        return sign | exp_mask;
    if (body == "nan")
        return sign | exp_mask | (Bits{1} << (mant_bits - 1));
    if (body.rfind("nan:0x", 0) == 0)
    {
        const std::string hex = strip_underscores(n, body.substr(6));
        if (hex.empty())
            fail(n, "malformed NaN payload");
        Bits payload = 0;
        for (const char c : hex)
        {
            if (!std::isxdigit(static_cast<unsigned char>(c)))
                fail(n, "malformed NaN payload");
            if (payload > (mant_mask >> 4))
                fail(n, "NaN payload out of range");
            const int digit = std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : std::tolower(c) - 'a' + 10;
            payload = static_cast<Bits>(payload * 16 + static_cast<Bits>(digit));
        }
        if (payload == 0 || payload > mant_mask)
            fail(n, "NaN payload out of range");
        return sign | exp_mask | payload;
    }

    const std::string clean = strip_underscores(n, body);
    if (clean.empty())
        fail(n, "expected float literal");
    const bool hex = clean.size() > 2 && clean[0] == '0' && (clean[1] == 'x' || clean[1] == 'X');
    for (size_t k = hex ? 2 : 0; k < clean.size(); ++k)
    {
        const char c = clean[k];
        const bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                        (hex ? (std::isxdigit(static_cast<unsigned char>(c)) || c == 'p' || c == 'P' || c == '+' ||
                                c == '-')
                             : (c == 'e' || c == 'E' || c == '+' || c == '-'));
        if (!ok)
            fail(n, "expected float literal");
    }
    const std::string text = (negative ? "-" : "") + clean;
    errno = 0;
    char* end = nullptr;
    Bits bits;
    if constexpr (is32)
    {
        const float v = std::strtof(text.c_str(), &end);
        bits = std::bit_cast<uint32_t>(v);
    }
    else
    {
        const double v = std::strtod(text.c_str(), &end);
        bits = std::bit_cast<uint64_t>(v);
    }
    if (end == nullptr || *end != '\0')
        fail(n, "expected float literal");
    if ((bits & exp_mask) == exp_mask && (bits & mant_mask) == 0)
        fail(n, "float literal out of range");
    return bits;
}

// ---------------------------------------------------------------------------
// Module parser

std::optional<ValType> val_type_keyword(const Node& n)
{
    if (n.is_list || n.tok.kind != TokKind::Keyword)
        return std::nullopt;
    const auto& s = n.tok.text;
    if (s == "i32")
        return ValType::I32;
    if (s == "i64")
        return ValType::I64;
    if (s == "f32")
        return ValType::F32;
    if (s == "f64")
        return ValType::F64;
    if (s == "v128")
        return ValType::V128;
    return std::nullopt;
}

ValType expect_val_type(const Node& n)
{
    const auto t = val_type_keyword(n);
    if (!t)
        fail(n, "expected value type (i32, i64, f32, f64, v128)");
    return *t;
}

std::string expect_string(const Node& n, const char* what)
{
    if (n.is_list || n.tok.kind != TokKind::String)
        fail(n, std::string("expected string for ") + what);
    return n.tok.text;
}

class NameSpace
{
public:
    explicit NameSpace(const char* kind) : kind_{kind} {}

    void define(const Token& at, const std::string& name, uint32_t index)
    {
        if (!map_.emplace(name, index).second)
            fail(at, std::string("duplicate ") + kind_ + " name $" + name);
    }

    uint32_t resolve(const Node& ref) const
    {
        if (!ref.is_list && ref.tok.kind == TokKind::Id)
        {
            const auto it = map_.find(ref.tok.text);
            if (it == map_.end())
                throw UnresolvedName(ref.tok.line, ref.tok.column, std::string("unknown ") + kind_ + " $" + ref.tok.text);
            return it->second;
        }
        return parse_u32(ref);
    }

private:
    const char* kind_;
    std::unordered_map<std::string, uint32_t> map_;
};

struct PendingFunc {
    const Node* node;
    size_t body_start;
    uint32_t local_index;
};

class ModuleParser
{
public:
    Module parse(const Node& root)
    {
        if (!root.is_list_headed("module"))
            fail(root, "expected (module ...)");
        size_t first = 1;
        if (first < root.items.size() && !root.items[first].is_list && root.items[first].tok.kind == TokKind::Id)
            ++first;

        // Pass 1: index spaces, signatures, names.
        for (size_t i = first; i < root.items.size(); ++i)
            declare_field(root.items[i]);
        // Pass 2: bodies and references.
        for (size_t i = first; i < root.items.size(); ++i)
            define_field(root.items[i]);

        finish_customs();
        normalize_export_names(m_);
        return std::move(m_);
    }

private:
    static const std::string& head(const Node& field)
    {
        if (!field.is_list || field.items.empty() || field.items[0].is_list ||
            field.items[0].tok.kind != TokKind::Keyword)
            fail(field, "expected module field");
        return field.items[0].tok.text;
    }

    // Returns index of first item after an optional $id, defining the name.
    size_t take_id(const Node& field, NameSpace& ns, uint32_t index)
    {
        if (field.items.size() > 1 && !field.items[1].is_list && field.items[1].tok.kind == TokKind::Id)
        {
            ns.define(field.items[1].tok, field.items[1].tok.text, index);
            return 2;
        }
        return 1;
    }

    static const Node* inline_import(const Node& field, size_t pos)
    {
        if (pos < field.items.size() && field.items[pos].is_list_headed("import"))
            return &field.items[pos];
        return nullptr;
    }

    void check_import_order(const Node& at)
    {
        if (defined_any_)
            fail(at, "imports must precede function, memory and global definitions");
    }

    /// Reads (param ...) (result ...) groups starting at `pos`; returns position after them.
    size_t read_signature(const Node& field, size_t pos, FuncType& sig, NameSpace* locals)
    {
        while (pos < field.items.size() && field.items[pos].is_list_headed("param"))
        {
            const Node& p = field.items[pos];
            if (p.items.size() >= 2 && !p.items[1].is_list && p.items[1].tok.kind == TokKind::Id)
            {
                if (p.items.size() != 3)
                    fail(p, "named param takes exactly one type");
                if (locals != nullptr)
                    locals->define(p.items[1].tok, p.items[1].tok.text, static_cast<uint32_t>(sig.params.size()));
                sig.params.push_back(expect_val_type(p.items[2]));
            }
            else
            {
                for (size_t k = 1; k < p.items.size(); ++k)
                    sig.params.push_back(expect_val_type(p.items[k]));
            }
            ++pos;
        }
        while (pos < field.items.size() && field.items[pos].is_list_headed("result"))
        {
            const Node& r = field.items[pos];
            for (size_t k = 1; k < r.items.size(); ++k)
                sig.results.push_back(expect_val_type(r.items[k]));
            ++pos;
        }
        if (pos < field.items.size() && field.items[pos].is_list_headed("param"))
            fail(field.items[pos], "param after result");
        return pos;
    }

    size_t read_inline_exports(const Node& field, size_t pos, ExternKind kind, uint32_t index)
    {
        while (pos < field.items.size() && field.items[pos].is_list_headed("export"))
        {
            const Node& e = field.items[pos];
            if (e.items.size() != 2)
                fail(e, "expected (export \"name\")");
            pending_exports_.push_back({&e, Export{expect_string(e.items[1], "export name"), kind, index}});
            ++pos;
        }
        return pos;
    }

    Limits read_limits(const Node& field, size_t pos)
    {
        const size_t remaining = field.items.size() - pos;
        if (remaining < 1 || remaining > 2)
            fail(field, "expected memory limits: min [max]");
        Limits l;
        l.min = parse_u32(field.items[pos]);
        if (remaining == 2)
            l.max = parse_u32(field.items[pos + 1]);
        return l;
    }

    GlobalType read_global_type(const Node& n)
    {
        if (n.is_list_headed("mut"))
        {
            if (n.items.size() != 2)
                fail(n, "expected (mut <type>)");
            return GlobalType{expect_val_type(n.items[1]), true};
        }
        return GlobalType{expect_val_type(n), false};
    }

    void declare_field(const Node& field)
    {
        const std::string& kind = head(field);
        if (kind == "func")
            declare_func(field);
        else if (kind == "memory")
            declare_memory(field);
        else if (kind == "global")
            declare_global(field);
        else if (kind == "import")
            declare_import(field);
        else if (kind == "export" || kind == "start" || kind == "data" || kind == "@custom")
            return;
        else
            fail(field, "unsupported module field '" + kind + "'");
    }

    void declare_func(const Node& field)
    {
        const uint32_t index = func_count_++;
        size_t pos = take_id(field, funcs_, index);
        pos = read_inline_exports(field, pos, ExternKind::Func, index);
        if (const Node* imp = inline_import(field, pos))
        {
            check_import_order(field);
            FuncType sig;
            const size_t end = read_signature(field, pos + 1, sig, nullptr);
            if (end != field.items.size())
                fail(field.items[end], "imported function cannot have a body");
            add_import(*imp, sig);
            return;
        }
        defined_any_ = true;
        pending_funcs_.push_back({&field, pos, index});
        FuncDef f;
        FuncType sig;
        read_signature(field, pos, sig, nullptr);
        f.params = sig.params;
        f.results = sig.results;
        m_.intern_type(sig);
        m_.funcs.push_back(std::move(f));
    }

    void declare_memory(const Node& field)
    {
        const uint32_t index = memory_count_++;
        size_t pos = take_id(field, memories_, index);
        pos = read_inline_exports(field, pos, ExternKind::Memory, index);
        if (const Node* imp = inline_import(field, pos))
        {
            check_import_order(field);
            add_import(*imp, read_limits(field, pos + 1));
            return;
        }
        defined_any_ = true;
        m_.memories.push_back(read_limits(field, pos));
    }

    void declare_global(const Node& field)
    {
        const uint32_t index = global_count_++;
        size_t pos = take_id(field, globals_, index);
        pos = read_inline_exports(field, pos, ExternKind::Global, index);
        if (const Node* imp = inline_import(field, pos))
        {
            check_import_order(field);
            if (pos + 2 != field.items.size())
                fail(field, "expected global type after inline import");
            add_import(*imp, read_global_type(field.items[pos + 1]));
            return;
        }
        defined_any_ = true;
        if (pos + 2 != field.items.size())
            fail(field, "expected (global <type> <init-expr>)");
        global_fields_.push_back(&field.items[pos + 1]);
        m_.globals.push_back(Global{read_global_type(field.items[pos]), Instr{}});
    }

    void add_import(const Node& imp, std::variant<FuncType, Limits, GlobalType> desc)
    {
        if (imp.items.size() != 3)
            fail(imp, "expected (import \"module\" \"name\")");
        Import i;
        i.module_name = expect_string(imp.items[1], "import module");
        i.item_name = expect_string(imp.items[2], "import name");
        if (const auto* sig = std::get_if<FuncType>(&desc))
            m_.intern_type(*sig);
        i.desc = std::move(desc);
        m_.imports.push_back(std::move(i));
    }

    void declare_import(const Node& field)
    {
        check_import_order(field);
        if (field.items.size() != 4)
            fail(field, "expected (import \"module\" \"name\" (<kind> ...))");
        const Node& desc = field.items[3];
        const std::string& kind = head(desc);
        Node header{field.tok, true, {field.items[0], field.items[1], field.items[2]}};
        if (kind == "func")
        {
            const uint32_t index = func_count_++;
            const size_t pos = take_id(desc, funcs_, index);
            FuncType sig;
            const size_t end = read_signature(desc, pos, sig, nullptr);
            if (end != desc.items.size())
                fail(desc.items[end], "unexpected token in imported function type");
            add_import(header, sig);
        }
        else if (kind == "memory")
        {
            const uint32_t index = memory_count_++;
            const size_t pos = take_id(desc, memories_, index);
            add_import(header, read_limits(desc, pos));
        }
        else if (kind == "global")
        {
            const uint32_t index = global_count_++;
            const size_t pos = take_id(desc, globals_, index);
            if (pos + 1 != desc.items.size())
                fail(desc, "expected global type");
            add_import(header, read_global_type(desc.items[pos]));
        }
        else
        {
            fail(desc, "unsupported import kind '" + kind + "'");
        }
    }

    // -- pass 2 -------------------------------------------------------------

    void define_field(const Node& field)
    {
        const std::string& kind = head(field);
        if (kind == "func")
        {
            if (next_func_ < pending_funcs_.size() && pending_funcs_[next_func_].node == &field)
                define_func(pending_funcs_[next_func_++]);
        }
        else if (kind == "global")
        {
            if (next_global_ < global_fields_.size() && is_child_of(*global_fields_[next_global_], field))
            {
                const uint32_t local = static_cast<uint32_t>(next_global_);
                m_.globals[local].init = const_expr(*global_fields_[next_global_]);
                ++next_global_;
            }
        }
        else if (kind == "export")
            define_export(field);
        else if (kind == "start")
        {
            if (field.items.size() != 2)
                fail(field, "expected (start <func>)");
            if (m_.start)
                fail(field, "multiple start functions");
            m_.start = funcs_.resolve(field.items[1]);
        }
        else if (kind == "data")
            define_data(field);
        else if (kind == "@custom")
            define_custom(field);

        flush_exports_up_to(field);
    }

    static bool is_child_of(const Node& child, const Node& parent)
    {
        for (const auto& item : parent.items)
            if (&item == &child)
                return true;
        return false;
    }

    void flush_exports_up_to(const Node& field)
    {
        // Inline exports keep their textual position relative to standalone exports.
        while (next_pending_export_ < pending_exports_.size() &&
               is_child_of(*pending_exports_[next_pending_export_].first, field))
        {
            m_.exports.push_back(pending_exports_[next_pending_export_].second);
            ++next_pending_export_;
        }
    }

    void define_export(const Node& field)
    {
        if (field.items.size() != 3 || !field.items[2].is_list || field.items[2].items.size() != 2)
            fail(field, "expected (export \"name\" (<kind> <index>))");
        Export e;
        e.name = expect_string(field.items[1], "export name");
        const Node& desc = field.items[2];
        const std::string& kind = head(desc);
        if (kind == "func")
        {
            e.kind = ExternKind::Func;
            e.index = funcs_.resolve(desc.items[1]);
        }
        else if (kind == "memory")
        {
            e.kind = ExternKind::Memory;
            e.index = memories_.resolve(desc.items[1]);
        }
        else if (kind == "global")
        {
            e.kind = ExternKind::Global;
            e.index = globals_.resolve(desc.items[1]);
        }
        else
        {
            fail(desc, "unsupported export kind '" + kind + "'");
        }
        m_.exports.push_back(std::move(e));
    }

    Instr const_expr(const Node& n)
    {
        if (!n.is_list || n.items.empty())
            fail(n, "expected folded constant expression");
        NameSpace no_locals("local");
        std::vector<Instr> out;
        emit_folded(n, no_locals, out);
        if (out.size() != 1)
            fail(n, "constant expression must be a single instruction");
        return out[0];
    }

    void define_data(const Node& field)
    {
        size_t pos = 1;
        if (pos < field.items.size() && !field.items[pos].is_list && field.items[pos].tok.kind == TokKind::Id)
            ++pos;
        if (pos < field.items.size() && field.items[pos].is_list_headed("memory"))
        {
            if (field.items[pos].items.size() != 2 || memories_.resolve(field.items[pos].items[1]) != 0)
                fail(field.items[pos], "only memory 0 is supported");
            ++pos;
        }
        if (pos >= field.items.size() || !field.items[pos].is_list)
            fail(field, "expected data offset expression (passive segments are unsupported)");
        DataSegment d;
        const Node& off = field.items[pos];
        if (off.is_list_headed("offset"))
        {
            if (off.items.size() != 2)
                fail(off, "expected (offset <instr>)");
            d.offset = const_expr(off.items[1]);
        }
        else
        {
            d.offset = const_expr(off);
        }
        for (++pos; pos < field.items.size(); ++pos)
        {
            const std::string s = expect_string(field.items[pos], "data bytes");
            d.bytes.insert(d.bytes.end(), s.begin(), s.end());
        }
        m_.data.push_back(std::move(d));
    }

    static std::optional<uint8_t> section_id(std::string_view name)
    {
        static const std::map<std::string_view, uint8_t> ids = {
            {"type", 1},  {"import", 2}, {"func", 3}, {"table", 4}, {"memory", 5}, {"global", 6},
            {"export", 7}, {"start", 8},  {"elem", 9}, {"code", 10}, {"data", 11},
        };
        if (const auto it = ids.find(name); it != ids.end())
            return it->second;
        return std::nullopt;
    }

    void define_custom(const Node& field)
    {
        if (field.items.size() < 2)
            fail(field, "expected (@custom \"name\" ...)");
        CustomSection c;
        c.name = expect_string(field.items[1], "custom section name");
        c.after = 11;
        size_t pos = 2;
        if (pos < field.items.size() && field.items[pos].is_list)
        {
            const Node& place = field.items[pos];
            if (place.items.size() != 2 || place.items[0].is_list || place.items[1].is_list)
                fail(place, "expected (before first) or (after <section>)");
            const std::string& where = place.items[0].tok.text;
            const std::string& what = place.items[1].tok.text;
            if (where == "before" && what == "first")
                c.after = 0;
            else if (where == "after" && what == "last")
                c.after = 11;
            else if (where == "after" && section_id(what))
                c.after = *section_id(what);
            else if (where == "before" && section_id(what))
                c.after = static_cast<uint8_t>(*section_id(what) - 1);
            else
                fail(place, "unknown custom section placement");
            ++pos;
        }
        for (; pos < field.items.size(); ++pos)
        {
            const std::string s = expect_string(field.items[pos], "custom section bytes");
            c.bytes.insert(c.bytes.end(), s.begin(), s.end());
        }
        m_.customs.push_back(std::move(c));
    }

    /// Clamps custom placements to the last standard section actually emitted before them,
    /// matching what a decoder observes, and orders them by placement.
    void finish_customs()
    {
        std::array<bool, 12> present{};
        present[1] = !m_.types.empty();
        present[2] = !m_.imports.empty();
        present[3] = !m_.funcs.empty();
        present[5] = !m_.memories.empty();
        present[6] = !m_.globals.empty();
        present[7] = !m_.exports.empty();
        present[8] = m_.start.has_value();
        present[10] = !m_.funcs.empty();
        present[11] = !m_.data.empty();
        for (auto& c : m_.customs)
        {
            uint8_t a = c.after;
            while (a > 0 && !present[a])
                --a;
            c.after = a;
        }
        std::stable_sort(m_.customs.begin(), m_.customs.end(),
                         [](const CustomSection& a, const CustomSection& b) { return a.after < b.after; });
    }

    void define_func(const PendingFunc& pf)
    {
        const Node& field = *pf.node;
        const uint32_t local_index = pf.local_index - m_.imported_func_count();
        FuncDef& f = m_.funcs[local_index];
        NameSpace locals("local");
        FuncType sig;
        size_t pos = read_signature(field, pf.body_start, sig, &locals);
        while (pos < field.items.size() && field.items[pos].is_list_headed("local"))
        {
            const Node& l = field.items[pos];
            const auto base = static_cast<uint32_t>(f.params.size() + f.locals.size());
            if (l.items.size() >= 2 && !l.items[1].is_list && l.items[1].tok.kind == TokKind::Id)
            {
                if (l.items.size() != 3)
                    fail(l, "named local takes exactly one type");
                locals.define(l.items[1].tok, l.items[1].tok.text, base);
                f.locals.push_back(expect_val_type(l.items[2]));
            }
            else
            {
                for (size_t k = 1; k < l.items.size(); ++k)
                    f.locals.push_back(expect_val_type(l.items[k]));
            }
            ++pos;
        }
        while (pos < field.items.size())
        {
            const Node& n = field.items[pos];
            if (n.is_list)
            {
                emit_folded(n, locals, f.body);
                ++pos;
            }
            else
            {
                pos = emit_flat(field.items, pos, locals, f.body);
            }
        }
    }

    Opcode expect_opcode(const Node& n)
    {
        if (n.is_list || n.tok.kind != TokKind::Keyword)
            fail(n, "expected instruction");
        const auto op = opcode_by_name(n.tok.text);
        if (!op)
            fail(n, "unknown or unsupported instruction '" + n.tok.text + "'");
        return *op;
    }

    static bool is_memarg_keyword(const Node& n, std::string_view prefix)
    {
        return !n.is_list && n.tok.kind == TokKind::Keyword && n.tok.text.rfind(prefix, 0) == 0;
    }

    /// Parses immediates of `op` from items[pos...]; returns position after them.
    size_t read_immediates(Opcode op, const std::vector<Node>& items, size_t pos, const Node& at,
                           NameSpace& locals, Instr& out)
    {
        const auto& info = op_info(op);
        const auto need = [&]() -> const Node& {
            if (pos >= items.size() || items[pos].is_list)
                fail(at, "missing immediate for " + std::string(info.name));
            return items[pos++];
        };
        switch (info.imm)
        {
        case ImmKind::None:
        case ImmKind::MemoryZero:
            break;
        case ImmKind::LocalIndex:
            out.imm = Index{locals.resolve(need())};
            break;
        case ImmKind::GlobalIndex:
            out.imm = Index{globals_.resolve(need())};
            break;
        case ImmKind::FuncIndex:
            out.imm = Index{funcs_.resolve(need())};
            break;
        case ImmKind::I32:
            out.imm = static_cast<int32_t>(static_cast<uint32_t>(parse_int_bits(need(), 32)));
            break;
        case ImmKind::I64:
            out.imm = static_cast<int64_t>(parse_int_bits(need(), 64));
            break;
        case ImmKind::F32:
            out.imm = F32Bits{parse_float_bits<uint32_t>(need())};
            break;
        case ImmKind::F64:
            out.imm = F64Bits{parse_float_bits<uint64_t>(need())};
            break;
        case ImmKind::V128:
            out.imm = read_v128(items, pos, at);
            break;
        case ImmKind::MemArg: {
            MemArg m{info.natural_align, 0};
            if (pos < items.size() && is_memarg_keyword(items[pos], "offset="))
            {
                const Node& n = items[pos++];
                Node num{Token{TokKind::Keyword, n.tok.text.substr(7), n.tok.line, n.tok.column}, false, {}};
                m.offset = parse_u32(num);
            }
            if (pos < items.size() && is_memarg_keyword(items[pos], "align="))
            {
                const Node& n = items[pos++];
                Node num{Token{TokKind::Keyword, n.tok.text.substr(6), n.tok.line, n.tok.column}, false, {}};
                const uint32_t bytes = parse_u32(num);
                if (bytes == 0 || (bytes & (bytes - 1)) != 0)
                    fail(n, "alignment must be a power of two");
                m.align = static_cast<uint32_t>(std::countr_zero(bytes));
            }
            out.imm = m;
            break;
        }
        case ImmKind::Lane: {
            const Node& n = need();
            const uint32_t lane = parse_u32(n);
            if (lane > 255)
                fail(n, "lane index out of range");
            out.imm = LaneIndex{static_cast<uint8_t>(lane)};
            break;
        }
        }
        return pos;
    }

    V128Bytes read_v128(const std::vector<Node>& items, size_t& pos, const Node& at)
    {
        if (pos >= items.size() || items[pos].is_list || items[pos].tok.kind != TokKind::Keyword)
            fail(at, "expected v128 shape (i8x16, i16x8, i32x4, i64x2, f32x4, f64x2)");
        const Node& shape_node = items[pos++];
        const std::string& shape = shape_node.tok.text;
        unsigned lanes;
        unsigned width;
        bool is_float = false;
        if (shape == "i8x16")
            lanes = 16, width = 1;
        else if (shape == "i16x8")
            lanes = 8, width = 2;
        else if (shape == "i32x4")
            lanes = 4, width = 4;
        else if (shape == "i64x2")
            lanes = 2, width = 8;
        else if (shape == "f32x4")
            lanes = 4, width = 4, is_float = true;
        else if (shape == "f64x2")
            lanes = 2, width = 8, is_float = true;
        else
            fail(shape_node, "unknown v128 shape '" + shape + "'");

        V128Bytes v;
        for (unsigned lane = 0; lane < lanes; ++lane)
        {
            if (pos >= items.size() || items[pos].is_list)
                fail(at, "v128.const " + shape + " needs " + std::to_string(lanes) + " lane values");
            const Node& n = items[pos++];
            uint64_t bits;
            if (is_float)
                bits = width == 4 ? parse_float_bits<uint32_t>(n) : parse_float_bits<uint64_t>(n);
            else
                bits = parse_int_bits(n, width * 8);
            for (unsigned b = 0; b < width; ++b)
                v.bytes[lane * width + b] = static_cast<uint8_t>(bits >> (8 * b));
        }
        return v;
    }

    size_t emit_flat(const std::vector<Node>& items, size_t pos, NameSpace& locals, std::vector<Instr>& out)
    {
        const Node& n = items[pos];
        Instr instr{expect_opcode(n), {}};
        pos = read_immediates(instr.op, items, pos + 1, n, locals, instr);
        out.push_back(instr);
        return pos;
    }

    void emit_folded(const Node& list, NameSpace& locals, std::vector<Instr>& out)
    {
        if (list.items.empty())
            fail(list, "empty folded instruction");
        const Node& opnode = list.items[0];
        Instr instr{expect_opcode(opnode), {}};
        size_t pos = read_immediates(instr.op, list.items, 1, opnode, locals, instr);
        for (; pos < list.items.size(); ++pos)
        {
            if (!list.items[pos].is_list)
                fail(list.items[pos], "unexpected token in folded instruction");
            emit_folded(list.items[pos], locals, out);
        }
        out.push_back(instr);
    }

    Module m_;
    NameSpace funcs_{"function"};
    NameSpace memories_{"memory"};
    NameSpace globals_{"global"};
    uint32_t func_count_ = 0;
    uint32_t memory_count_ = 0;
    uint32_t global_count_ = 0;
    bool defined_any_ = false;
    std::vector<PendingFunc> pending_funcs_;
    std::vector<const Node*> global_fields_;
    std::vector<std::pair<const Node*, Export>> pending_exports_;
    size_t next_func_ = 0;
    size_t next_global_ = 0;
    size_t next_pending_export_ = 0;
};

}  // namespace

Module parse_wat(std::string_view text)
{
    const auto tokens = Lexer(text).run();
    if (tokens.empty())
        throw ParseError(1, 1, "expected (module ...)");
    size_t pos = 0;
    const Node root = build_tree(tokens, pos);
    if (pos != tokens.size())
        fail(tokens[pos], "unexpected tokens after module");
    return ModuleParser().parse(root);
}

}  // namespace sentinel::wat
