#pragma once

// Parser for the guarded-update modelling language.
//
//   module NAME:
//     var a, b : [0..3]
//     var flag : bool
//   init: a=0 & !flag
//   error: ...                       (optional; defaults to err=1)
//   function f(x : [0..3]) {
//     local var t : [0..7]
//     s=0 & a<3 ==> a'=a+1 & s'=1;
//   }
//   endmodule
//
// `err` is declared implicitly as a global boolean; every function owns an
// implicit location counter `s` ranging over [0..L], L being the largest
// location literal its rules compare `s` with or assign to it.

#include "ifsynth/errors.hpp"
#include "ifsynth/model.hpp"
#include "ifsynth/symstate.hpp"

#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ifsynth {

namespace detail {

struct Token {
    enum class Kind { ident, number, symbol, end };
    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view src)
{
    static constexpr std::string_view kSymbols[] = {"==>", "..", "!=", "<=", ">=", ":", ",", "[", "]", "(", ")",
                                                    "{",   "}",  "&",  "|",  "!",  "'", "=", "<", ">", "+", "-", ";"};
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n')
                ++line, col = 1;
            else
                ++col;
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        const auto l = line, cl = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Token::Kind::ident, std::string(src.substr(i, j - i)), l, cl});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            out.push_back({Token::Kind::number, std::string(src.substr(i, j - i)), l, cl});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (auto sym : kSymbols) {
            if (src.substr(i, sym.size()) == sym) {
                out.push_back({Token::Kind::symbol, std::string(sym), l, cl});
                advance(sym.size());
                matched = true;
                break;
            }
        }
        if (!matched)
            throw ParseError(l, cl, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Token::Kind::end, "<end of input>", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src)
        : toks_(tokenize(src))
    {}

    LibraryModule parse_library()
    {
        LibraryModule lib;
        expect_word("module");
        lib.name = expect_ident("module name");
        expect(":");
        lib.globals.push_back({kErrorVar, 0, 1, Scope::global, {}});
        while (peek_word("var"))
            parse_decl(lib.globals, Scope::global, {});
        expect_word("init");
        expect(":");
        lib.init = parse_pred();
        if (peek_word("error")) {
            next();
            expect(":");
            lib.error = parse_pred();
            lib.explicit_error = true;
        } else {
            lib.error = Predicate::atom(CmpOp::eq, Term::var(kErrorVar), Term::constant(1));
        }
        while (peek_word("function"))
            lib.functions.push_back(parse_function());
        expect_word("endmodule");
        if (peek().kind != Token::Kind::end)
            fail("end of input");
        return lib;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& expected) const
    {
        const auto& t = peek();
        throw ParseError(t.line, t.column, "expected " + expected + " but found '" + t.text + "'");
    }

    bool peek_symbol(std::string_view s, std::size_t ahead = 0) const
    {
        return peek(ahead).kind == Token::Kind::symbol && peek(ahead).text == s;
    }
    bool peek_word(std::string_view w) const { return peek().kind == Token::Kind::ident && peek().text == w; }

    void expect(std::string_view s)
    {
        if (!peek_symbol(s))
            fail("'" + std::string(s) + "'");
        next();
    }
    void expect_word(std::string_view w)
    {
        if (!peek_word(w))
            fail("'" + std::string(w) + "'");
        next();
    }
    std::string expect_ident(const std::string& what)
    {
        if (peek().kind != Token::Kind::ident)
            fail(what);
        return next().text;
    }
    Value expect_int()
    {
        if (peek().kind != Token::Kind::number)
            fail("integer");
        const auto& t = next();
        try {
            return std::stoll(t.text);
        } catch (const std::out_of_range&) {
            throw ParseError(t.line, t.column, "integer literal out of range");
        }
    }

    std::pair<Value, Value> parse_range()
    {
        if (peek_word("bool")) {
            next();
            return {0, 1};
        }
        expect("[");
        const auto& at = peek();
        const auto lo = expect_int();
        expect("..");
        const auto hi = expect_int();
        expect("]");
        if (hi < lo)
            throw ParseError(at.line, at.column, "empty range [" + std::to_string(lo) + ".." + std::to_string(hi) + "]");
        return {lo, hi};
    }

    void parse_decl(std::vector<VarDecl>& into, Scope scope, const std::string& owner)
    {
        expect_word("var");
        std::vector<std::string> names{expect_ident("variable name")};
        while (peek_symbol(",")) {
            next();
            names.push_back(expect_ident("variable name"));
        }
        expect(":");
        const auto [lo, hi] = parse_range();
        for (auto& n : names)
            into.push_back({n, lo, hi, scope, owner});
    }

    FunctionModel parse_function()
    {
        expect_word("function");
        FunctionModel f;
        f.name = expect_ident("function name");
        expect("(");
        if (!peek_symbol(")")) {
            for (;;) {
                auto n = expect_ident("parameter name");
                expect(":");
                const auto [lo, hi] = parse_range();
                f.inputs.push_back({n, lo, hi, Scope::input, f.name});
                if (!peek_symbol(","))
                    break;
                next();
            }
        }
        expect(")");
        expect("{");
        while (peek_word("local")) {
            next();
            if (!peek_word("var"))
                fail("'var'");
            parse_decl(f.locals, Scope::local, f.name);
        }
        do {
            f.rules.push_back(parse_rule());
        } while (!peek_symbol("}"));
        expect("}");
        return f;
    }

    GuardedRule parse_rule()
    {
        GuardedRule r;
        r.guard = parse_pred();
        expect("==>");
        for (;;) {
            Update u;
            u.target = expect_ident("update target");
            expect("'");
            expect("=");
            u.value = parse_term();
            r.updates.push_back(std::move(u));
            if (!peek_symbol("&"))
                break;
            next();
        }
        expect(";");
        return r;
    }

    static std::optional<CmpOp> cmp_of(const Token& t)
    {
        if (t.kind != Token::Kind::symbol)
            return std::nullopt;
        if (t.text == "=") return CmpOp::eq;
        if (t.text == "!=") return CmpOp::ne;
        if (t.text == "<") return CmpOp::lt;
        if (t.text == "<=") return CmpOp::le;
        if (t.text == ">") return CmpOp::gt;
        if (t.text == ">=") return CmpOp::ge;
        return std::nullopt;
    }

    Predicate parse_pred()
    {
        std::vector<Predicate> ors{parse_conj()};
        while (peek_symbol("|")) {
            next();
            ors.push_back(parse_conj());
        }
        if (ors.size() == 1)
            return std::move(ors[0]);
        return {Predicate::Or{std::move(ors)}};
    }

    Predicate parse_conj()
    {
        std::vector<Predicate> ands{parse_unary()};
        while (peek_symbol("&")) {
            next();
            ands.push_back(parse_unary());
        }
        if (ands.size() == 1)
            return std::move(ands[0]);
        return {Predicate::And{std::move(ands)}};
    }

    Predicate parse_unary()
    {
        if (peek_symbol("!")) {
            next();
            return Predicate::negation(parse_unary());
        }
        if (peek_symbol("(")) {
            const auto save = pos_;
            try {
                next();
                auto inner = parse_pred();
                expect(")");
                if (!cmp_of(peek()) && !peek_symbol("+") && !peek_symbol("-"))
                    return inner;
            } catch (const ParseError&) {
            }
            pos_ = save;
        }
        return parse_atom();
    }

    Predicate parse_atom()
    {
        auto lhs = parse_term();
        if (auto op = cmp_of(peek())) {
            next();
            return Predicate::atom(*op, std::move(lhs), parse_term());
        }
        if (std::holds_alternative<Term::Var>(lhs.node))
            return Predicate::atom(CmpOp::eq, std::move(lhs), Term::constant(1));
        fail("comparison operator");
    }

    Term parse_term()
    {
        auto t = parse_primary();
        while (peek_symbol("+") || peek_symbol("-")) {
            const char op = next().text[0];
            t = Term::binary(op, std::move(t), parse_primary());
        }
        return t;
    }

    Term parse_primary()
    {
        if (peek().kind == Token::Kind::number)
            return Term::constant(expect_int());
        if (peek().kind == Token::Kind::ident)
            return Term::var(next().text);
        if (peek_symbol("(")) {
            next();
            auto t = parse_term();
            expect(")");
            return t;
        }
        fail("term");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// Largest literal compared with, or assigned to, the location counter.
inline Value max_location_literal(const FunctionModel& f)
{
    Value best = 0;
    auto is_s = [](const Term& t) {
        auto* v = std::get_if<Term::Var>(&t.node);
        return v && v->name == kLocationVar;
    };
    auto as_const = [](const Term& t) -> std::optional<Value> {
        if (auto* c = std::get_if<Term::Const>(&t.node))
            return c->value;
        return std::nullopt;
    };
    std::function<void(const Predicate&)> walk = [&](const Predicate& p) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Predicate::Atom>) {
                    if (is_s(x.lhs))
                        if (auto c = as_const(x.rhs))
                            best = std::max(best, *c);
                    if (is_s(x.rhs))
                        if (auto c = as_const(x.lhs))
                            best = std::max(best, *c);
                } else if constexpr (std::is_same_v<T, Predicate::Not>) {
                    walk(*x.operand);
                } else if constexpr (std::is_same_v<T, Predicate::And> || std::is_same_v<T, Predicate::Or>) {
                    for (const auto& o : x.operands)
                        walk(o);
                }
            },
            p.node);
    };
    for (const auto& r : f.rules) {
        walk(r.guard);
        for (const auto& u : r.updates)
            if (u.target == kLocationVar)
                if (auto c = as_const(u.value))
                    best = std::max(best, *c);
    }
    return best;
}

// Scope and naming checks; adds the implicit location counter.
inline void resolve_scopes(LibraryModule& lib)
{
    std::set<std::string> globals;
    for (const auto& g : lib.globals)
        if (!globals.insert(g.name).second)
            throw SemanticError("duplicate global variable '" + g.name + "'");

    auto check_refs = [](const Predicate& p, const std::set<std::string>& scope, const std::string& where) {
        std::vector<std::string> names;
        collect_vars(p, names);
        for (const auto& n : names)
            if (!scope.count(n))
                throw SemanticError("undeclared variable '" + n + "' in " + where);
    };
    check_refs(lib.init, globals, "init predicate");
    check_refs(lib.error, globals, "error predicate");

    std::set<std::string> fnames;
    for (auto& f : lib.functions) {
        if (!fnames.insert(f.name).second)
            throw SemanticError("duplicate function '" + f.name + "'");
        std::set<std::string> scope = globals;
        for (const auto* list : {&f.inputs, &f.locals})
            for (const auto& v : *list) {
                if (v.name == kLocationVar)
                    throw SemanticError("'s' is the implicit location counter of " + f.name);
                if (!scope.insert(v.name).second)
                    throw SemanticError("variable '" + v.name + "' of " + f.name + " is already declared");
            }
        f.locals.push_back({kLocationVar, 0, max_location_literal(f), Scope::local, f.name});
        scope.insert(kLocationVar);

        for (std::size_t i = 0; i < f.rules.size(); ++i) {
            const auto where = f.name + " rule " + std::to_string(i + 1);
            const auto& r = f.rules[i];
            check_refs(r.guard, scope, where);
            std::set<std::string> targets;
            for (const auto& u : r.updates) {
                if (!scope.count(u.target))
                    throw SemanticError("update of undeclared variable '" + u.target + "' in " + where);
                if (!targets.insert(u.target).second)
                    throw SemanticError("variable '" + u.target + "' updated twice in " + where);
                std::vector<std::string> names;
                collect_vars(u.value, names);
                for (const auto& n : names)
                    if (!scope.count(n))
                        throw SemanticError("undeclared variable '" + n + "' in " + where);
            }
        }
    }
}

} // namespace detail

// Syntax and scope checks only.
inline LibraryModule parse_library_unchecked(std::string_view text)
{
    auto lib = detail::Parser(text).parse_library();
    detail::resolve_scopes(lib);
    return lib;
}

// Checks that need set reasoning: init satisfiable and disjoint from the error
// set, and the error set closed under every rule.
inline void validate(const SymbolicLibrary& sym)
{
    if (sym.init_set().is_empty())
        throw SemanticError("init predicate is unsatisfiable");
    if (sym.init_set().intersects(sym.error_set()))
        throw SemanticError("init predicate overlaps the error set");
    for (const auto& f : sym.functions())
        for (const auto& r : f.rules)
            if (sym.leaves_error(r.relation, f) != mdd::kFalse)
                throw SemanticError("rule " + std::to_string(r.index + 1) + " of " + f.name
                                    + " can leave the error set");
}

inline LibraryModule parse_library(std::string_view text)
{
    auto lib = parse_library_unchecked(text);
    SymbolicLibrary sym(lib);
    validate(sym);
    return lib;
}

// Parses, compiles and validates in one pass.
inline std::shared_ptr<const SymbolicLibrary> load_library(std::string_view text)
{
    auto sym = std::make_shared<const SymbolicLibrary>(parse_library_unchecked(text));
    validate(*sym);
    return sym;
}

} // namespace ifsynth
