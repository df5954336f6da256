#pragma once

// Library models: bounded-integer variables, guarded-update rules, functions
// and the library module that ties them together.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ifsynth {

using Value = std::int64_t;

enum class Scope { global, local, input };

struct VarDecl {
    std::string name;
    Value lo = 0;
    Value hi = 0;
    Scope scope = Scope::global;
    std::string owner; // owning function for locals and inputs

    std::string qualified_name() const { return owner.empty() ? name : owner + "." + name; }
    Value domain_size() const { return hi - lo + 1; }
    bool operator==(const VarDecl&) const = default;
};

struct Term {
    struct Const {
        Value value;
    };
    struct Var {
        std::string name;
    };
    struct Binary {
        char op; // '+' or '-'
        std::shared_ptr<const Term> lhs, rhs;
    };

    std::variant<Const, Var, Binary> node;

    static Term constant(Value v) { return {Const{v}}; }
    static Term var(std::string n) { return {Var{std::move(n)}}; }
    static Term binary(char op, Term l, Term r)
    {
        return {Binary{op, std::make_shared<const Term>(std::move(l)),
                       std::make_shared<const Term>(std::move(r))}};
    }
};

bool operator==(const Term& a, const Term& b);

enum class CmpOp { eq, ne, lt, le, gt, ge };

struct Predicate {
    struct True {};
    struct Atom {
        CmpOp op;
        Term lhs, rhs;
    };
    struct Not {
        std::shared_ptr<const Predicate> operand;
    };
    struct And {
        std::vector<Predicate> operands;
    };
    struct Or {
        std::vector<Predicate> operands;
    };

    std::variant<True, Atom, Not, And, Or> node;

    static Predicate truth() { return {True{}}; }
    static Predicate atom(CmpOp op, Term l, Term r) { return {Atom{op, std::move(l), std::move(r)}}; }
    static Predicate negation(Predicate p) { return {Not{std::make_shared<const Predicate>(std::move(p))}}; }
};

bool operator==(const Predicate& a, const Predicate& b);

struct Update {
    std::string target;
    Term value;
    bool operator==(const Update&) const = default;
};

struct GuardedRule {
    Predicate guard;
    std::vector<Update> updates;
    bool operator==(const GuardedRule&) const = default;
};

struct FunctionModel {
    std::string name;
    std::vector<VarDecl> inputs;
    std::vector<VarDecl> locals; // declared locals followed by the location counter `s`
    std::vector<GuardedRule> rules;
    bool operator==(const FunctionModel&) const = default;
};

struct LibraryModule {
    std::string name;
    std::vector<VarDecl> globals; // `err` first
    std::vector<FunctionModel> functions;
    Predicate init;
    Predicate error;
    bool explicit_error = false;

    const FunctionModel* find_function(const std::string& fn) const
    {
        for (const auto& f : functions)
            if (f.name == fn)
                return &f;
        return nullptr;
    }
    bool operator==(const LibraryModule&) const = default;
};

inline constexpr const char* kErrorVar = "err";
inline constexpr const char* kLocationVar = "s";

// Globals, then the function's inputs, then its locals, in declaration order.
inline std::vector<VarDecl> scoped_vars(const FunctionModel& f, const LibraryModule& lib)
{
    std::vector<VarDecl> out = lib.globals;
    out.insert(out.end(), f.inputs.begin(), f.inputs.end());
    out.insert(out.end(), f.locals.begin(), f.locals.end());
    return out;
}

// -- structural equality -----------------------------------------------------

inline bool operator==(const Term& a, const Term& b)
{
    if (a.node.index() != b.node.index())
        return false;
    if (auto* c = std::get_if<Term::Const>(&a.node))
        return c->value == std::get<Term::Const>(b.node).value;
    if (auto* v = std::get_if<Term::Var>(&a.node))
        return v->name == std::get<Term::Var>(b.node).name;
    const auto& x = std::get<Term::Binary>(a.node);
    const auto& y = std::get<Term::Binary>(b.node);
    return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
}

inline bool operator==(const Predicate& a, const Predicate& b)
{
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Predicate::True>)
                return true;
            else if constexpr (std::is_same_v<T, Predicate::Atom>)
                return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
            else if constexpr (std::is_same_v<T, Predicate::Not>)
                return *x.operand == *y.operand;
            else
                return x.operands == y.operands;
        },
        a.node);
}

// -- evaluation on concrete valuations --------------------------------------

// `Lookup` maps a variable name as written in the source to its value.
template <typename Lookup>
Value evaluate(const Term& t, const Lookup& lookup)
{
    if (auto* c = std::get_if<Term::Const>(&t.node))
        return c->value;
    if (auto* v = std::get_if<Term::Var>(&t.node))
        return lookup(v->name);
    const auto& b = std::get<Term::Binary>(t.node);
    const auto l = evaluate(*b.lhs, lookup);
    const auto r = evaluate(*b.rhs, lookup);
    return b.op == '+' ? l + r : l - r;
}

inline bool compare(CmpOp op, Value l, Value r)
{
    switch (op) {
    case CmpOp::eq: return l == r;
    case CmpOp::ne: return l != r;
    case CmpOp::lt: return l < r;
    case CmpOp::le: return l <= r;
    case CmpOp::gt: return l > r;
    case CmpOp::ge: return l >= r;
    }
    return false;
}

template <typename Lookup>
bool evaluate(const Predicate& p, const Lookup& lookup)
{
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Predicate::True>)
                return true;
            else if constexpr (std::is_same_v<T, Predicate::Atom>)
                return compare(x.op, evaluate(x.lhs, lookup), evaluate(x.rhs, lookup));
            else if constexpr (std::is_same_v<T, Predicate::Not>)
                return !evaluate(*x.operand, lookup);
            else if constexpr (std::is_same_v<T, Predicate::And>) {
                for (const auto& o : x.operands)
                    if (!evaluate(o, lookup))
                        return false;
                return true;
            } else {
                for (const auto& o : x.operands)
                    if (evaluate(o, lookup))
                        return true;
                return false;
            }
        },
        p.node);
}

// Names referenced by a term / predicate, in first-occurrence order.
inline void collect_vars(const Term& t, std::vector<std::string>& out)
{
    if (auto* v = std::get_if<Term::Var>(&t.node)) {
        for (const auto& o : out)
            if (o == v->name)
                return;
        out.push_back(v->name);
    } else if (auto* b = std::get_if<Term::Binary>(&t.node)) {
        collect_vars(*b->lhs, out);
        collect_vars(*b->rhs, out);
    }
}

inline void collect_vars(const Predicate& p, std::vector<std::string>& out)
{
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Predicate::Atom>) {
                collect_vars(x.lhs, out);
                collect_vars(x.rhs, out);
            } else if constexpr (std::is_same_v<T, Predicate::Not>) {
                collect_vars(*x.operand, out);
            } else if constexpr (std::is_same_v<T, Predicate::And> || std::is_same_v<T, Predicate::Or>) {
                for (const auto& o : x.operands)
                    collect_vars(o, out);
            }
        },
        p.node);
}

// -- printing ------------------------------------------------------------------

inline const char* to_string(CmpOp op)
{
    switch (op) {
    case CmpOp::eq: return "=";
    case CmpOp::ne: return "!=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    }
    return "?";
}

inline std::string to_string(const Term& t)
{
    if (auto* c = std::get_if<Term::Const>(&t.node))
        return std::to_string(c->value);
    if (auto* v = std::get_if<Term::Var>(&t.node))
        return v->name;
    const auto& b = std::get<Term::Binary>(t.node);
    std::string rhs = to_string(*b.rhs);
    // terms are left-associative; a binary right operand needs parentheses
    if (std::holds_alternative<Term::Binary>(b.rhs->node))
        rhs = "(" + rhs + ")";
    return to_string(*b.lhs) + std::string(1, b.op) + rhs;
}

inline std::string to_string(const Predicate& p)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Predicate::True>)
                return "0=0";
            else if constexpr (std::is_same_v<T, Predicate::Atom>)
                return to_string(x.lhs) + to_string(x.op) + to_string(x.rhs);
            else if constexpr (std::is_same_v<T, Predicate::Not>)
                return "!(" + to_string(*x.operand) + ")";
            else {
                const char* sep = std::is_same_v<T, Predicate::And> ? " & " : " | ";
                std::string out;
                for (std::size_t i = 0; i < x.operands.size(); ++i) {
                    if (i)
                        out += sep;
                    const auto& o = x.operands[i];
                    const bool wrap = std::holds_alternative<Predicate::And>(o.node)
                        || std::holds_alternative<Predicate::Or>(o.node);
                    out += wrap ? "(" + to_string(o) + ")" : to_string(o);
                }
                return out;
            }
        },
        p.node);
}

inline std::string to_string(const GuardedRule& r)
{
    std::string out = to_string(r.guard) + " ==> ";
    for (std::size_t i = 0; i < r.updates.size(); ++i) {
        if (i)
            out += " & ";
        out += r.updates[i].target + "'=" + to_string(r.updates[i].value);
    }
    return out + ";";
}

// DSL source that parses back to a structurally equal module.
inline std::string pretty_print(const LibraryModule& lib)
{
    auto range = [](const VarDecl& v) {
        return "[" + std::to_string(v.lo) + ".." + std::to_string(v.hi) + "]";
    };
    std::string out = "module " + lib.name + ":\n";
    for (const auto& g : lib.globals)
        if (g.name != kErrorVar)
            out += "  var " + g.name + " : " + range(g) + "\n";
    out += "init: " + to_string(lib.init) + "\n";
    if (lib.explicit_error)
        out += "error: " + to_string(lib.error) + "\n";
    for (const auto& f : lib.functions) {
        out += "function " + f.name + "(";
        for (std::size_t i = 0; i < f.inputs.size(); ++i) {
            if (i)
                out += ", ";
            out += f.inputs[i].name + " : " + range(f.inputs[i]);
        }
        out += ") {\n";
        for (const auto& l : f.locals)
            if (l.name != kLocationVar)
                out += "  local var " + l.name + " : " + range(l) + "\n";
        for (const auto& r : f.rules)
            out += "  " + to_string(r) + "\n";
        out += "}\n";
    }
    out += "endmodule\n";
    return out;
}

} // namespace ifsynth
