#pragma once

#include "ifsynth/bundled.hpp"
#include "ifsynth/engine.hpp"
#include "ifsynth/oracle.hpp"
#include "ifsynth/parser.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing {

using namespace ifsynth;

inline std::shared_ptr<const SymbolicLibrary> bundled_library(const std::string& file)
{
    return load_library(bundled::all().at(file));
}

// Explicit members of a symbolic set, listed in the space's variable order.
inline std::set<oracle::State> members(const ValuationSet& x)
{
    std::set<oracle::State> out;
    const auto& vars = x.space()->vars();
    oracle::State cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == vars.size()) {
            if (x.contains(cur))
                out.insert(cur);
            return;
        }
        const auto& info = x.space()->var(vars[i]);
        for (Value v = info.lo; v <= info.hi; ++v) {
            cur.push_back(v);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

// Symbolic set holding exactly the given states of a space.
inline ValuationSet from_members(const SymbolicLibrary& lib, const SpacePtr& space, const std::set<oracle::State>& xs)
{
    auto& m = lib.manager();
    auto out = ValuationSet::empty(space);
    for (const auto& s : xs) {
        NodeId n = mdd::kTrue;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const int var = space->vars()[i];
            const auto& info = space->var(var);
            std::vector<bool> one(info.size(), false);
            one[static_cast<std::size_t>(s[i] - info.lo)] = true;
            n = m.conj(n, m.literal(2 * var, one));
        }
        out = out | ValuationSet(space, n);
    }
    return out;
}

// A predicate over the variables visible in `f` (the globals when null),
// written with unqualified names.
inline ValuationSet predicate(const SymbolicLibrary& lib, const SymbolicFunction* f, const std::string& text)
{
    std::string decls;
    const auto& mod = lib.module();
    std::vector<VarDecl> vars = mod.globals;
    if (f)
        vars = scoped_vars(*mod.find_function(f->name), mod);
    for (const auto& v : vars)
        if (v.name != kErrorVar)
            decls += " var " + v.name + " : [" + std::to_string(v.lo) + ".." + std::to_string(v.hi) + "]\n";
    const auto m = parse_library_unchecked("module P:\n" + decls + "init: " + text + "\nendmodule\n");
    return f ? lib.function_predicate(*f, m.init) : lib.global_predicate(m.init);
}

// -- random libraries ------------------------------------------------------------

// A one-function library over err, one or two globals and at most one extra
// local or input (at most four variables besides the location counter),
// domains of size at most four and at most six rules.
class RandomModels {
public:
    explicit RandomModels(unsigned seed)
        : rng_(seed)
    {}

    std::string source()
    {
        struct V {
            std::string name;
            int hi;
        };
        std::vector<V> globals, scoped;
        const int nglobals = pick(1, 2);
        for (int i = 0; i < nglobals; ++i)
            globals.push_back({"g" + std::to_string(i), pick(1, 3)});
        std::string text = "module Rand:\n";
        for (const auto& g : globals)
            text += "  var " + g.name + " : [0.." + std::to_string(g.hi) + "]\n";
        text += "init: err=0";
        if (coin())
            text += " & " + globals[0].name + "=0";
        text += "\nfunction f(";
        std::string local;
        scoped = globals;
        scoped.push_back({"err", 1});
        if (nglobals == 1 && coin()) {
            const V extra{"x", pick(1, 3)};
            scoped.push_back(extra);
            if (coin())
                text += "x : [0.." + std::to_string(extra.hi) + "]";
            else
                local = "  local var x : [0.." + std::to_string(extra.hi) + "]\n";
        }
        text += ") {\n" + local;
        const int nrules = pick(1, 6);
        for (int r = 0; r < nrules; ++r) {
            std::string guard = "s=" + std::to_string(pick(0, 2));
            for (int a = pick(0, 2); a > 0; --a) {
                const auto& v = scoped[static_cast<std::size_t>(pick(0, static_cast<int>(scoped.size()) - 1))];
                static const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
                guard += " & " + v.name + ops[pick(0, 5)] + std::to_string(pick(0, v.hi));
            }
            std::vector<std::string> updates{"s'=" + std::to_string(pick(0, 2))};
            std::set<std::string> used{"s"};
            for (int u = pick(0, 2); u > 0; --u) {
                const auto& v = scoped[static_cast<std::size_t>(pick(0, static_cast<int>(scoped.size()) - 1))];
                if (!used.insert(v.name).second)
                    continue;
                if (v.name == "err") {
                    updates.push_back("err'=1");
                    continue;
                }
                const auto& w = scoped[static_cast<std::size_t>(pick(0, static_cast<int>(scoped.size()) - 1))];
                switch (pick(0, 3)) {
                case 0: updates.push_back(v.name + "'=" + std::to_string(pick(0, v.hi))); break;
                case 1: updates.push_back(v.name + "'=" + w.name); break;
                case 2: updates.push_back(v.name + "'=" + w.name + "+1"); break;
                default: updates.push_back(v.name + "'=" + w.name + "-1"); break;
                }
            }
            text += "  " + guard + " ==> ";
            for (std::size_t i = 0; i < updates.size(); ++i)
                text += (i ? " & " : "") + updates[i];
            text += ";\n";
        }
        text += "}\nendmodule\n";
        return text;
    }

    // A random library that passes validation.
    std::shared_ptr<const SymbolicLibrary> library()
    {
        for (;;) {
            try {
                return load_library(source());
            } catch (const SemanticError&) {
            }
        }
    }

    // The lifted initial abstraction of `f`, refined by a few random splits.
    Abstraction abstraction(const SymbolicLibrary& lib, const SymbolicFunction& f)
    {
        auto a = initial_abstraction(lib).lifted(f.space);
        for (int k = pick(0, 3); k > 0; --k) {
            if (coin()) {
                const auto& vars = f.space->vars();
                a = split_by_variable(a, vars[static_cast<std::size_t>(pick(0, static_cast<int>(vars.size()) - 1))]);
            } else {
                a = split_by_set(a, random_set(f.space));
            }
        }
        return a;
    }

    RegionSet subset(const RegionSet& all)
    {
        RegionSet out;
        for (auto id : all)
            if (coin())
                out.push_back(id);
        return out;
    }

    // A random union of random cubes.
    ValuationSet random_set(const SpacePtr& space)
    {
        auto& m = space->manager();
        auto out = ValuationSet::empty(space);
        for (int c = pick(1, 3); c > 0; --c) {
            NodeId n = mdd::kTrue;
            for (auto v : space->vars()) {
                if (coin())
                    continue;
                std::vector<bool> allowed(space->var(v).size());
                for (std::size_t i = 0; i < allowed.size(); ++i)
                    allowed[i] = coin();
                n = m.conj(n, m.literal(2 * v, allowed));
            }
            out = out | ValuationSet(space, n);
        }
        return out;
    }

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return pick(0, 1) == 1; }

private:
    std::mt19937 rng_;
};

} // namespace testing
