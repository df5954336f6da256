#pragma once

// Explicit-state semantics of a library, independent of the decision-diagram
// machinery, used to certify interface graphs.

#include "ifsynth/errors.hpp"
#include "ifsynth/igraph.hpp"
#include "ifsynth/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace ifsynth::oracle {

// Values listed in the order of scoped_vars (or of the globals alone).
using State = std::vector<Value>;

inline constexpr std::uint64_t kDefaultStateCap = 1ull << 22;

class ExplicitLibrary {
public:
    explicit ExplicitLibrary(LibraryModule lib, std::uint64_t state_cap = kDefaultStateCap)
        : lib_(std::move(lib))
        , cap_(state_cap)
    {
        for (std::size_t i = 0; i < lib_.globals.size(); ++i)
            global_index_[lib_.globals[i].name] = i;
        for (const auto& f : lib_.functions) {
            Scoped s;
            s.vars = scoped_vars(f, lib_);
            for (std::size_t i = 0; i < s.vars.size(); ++i)
                s.index[s.vars[i].name] = i;
            s.model = &f;
            scoped_.emplace(f.name, std::move(s));
        }
    }

    const LibraryModule& module() const { return lib_; }
    std::uint64_t state_cap() const { return cap_; }

    bool is_error(const State& g) const { return holds(lib_.error, global_index_, g); }
    bool is_init(const State& g) const { return holds(lib_.init, global_index_, g); }

    std::vector<State> global_states() const { return enumerate(lib_.globals); }

    std::vector<State> initial_states() const
    {
        std::vector<State> out;
        for (auto& g : global_states())
            if (is_init(g))
                out.push_back(std::move(g));
        return out;
    }

    // Every valuation of the function's variables.
    std::vector<State> function_states(const std::string& fn) const { return enumerate(scope(fn).vars); }

    // Entry states of `fn` extending global state `g`.
    std::vector<State> entry_states(const std::string& fn, const State& g) const
    {
        const auto& s = scope(fn);
        std::vector<VarDecl> inputs(s.model->inputs);
        std::vector<State> out;
        for (auto in : enumerate(inputs)) {
            State x = g;
            x.insert(x.end(), in.begin(), in.end());
            for (const auto& l : s.model->locals)
                x.push_back(std::max<Value>(0, l.lo));
            out.push_back(std::move(x));
        }
        return out;
    }

    std::vector<State> successors(const std::string& fn, const State& x) const
    {
        const auto& s = scope(fn);
        std::vector<State> out;
        auto lookup = [&](const std::string& n) { return x[s.index.at(n)]; };
        for (const auto& r : s.model->rules) {
            if (!evaluate(r.guard, lookup))
                continue;
            State y = x;
            bool in_range = true;
            for (const auto& u : r.updates) {
                const auto pos = s.index.at(u.target);
                const auto v = evaluate(u.value, lookup);
                if (v < s.vars[pos].lo || v > s.vars[pos].hi) {
                    in_range = false;
                    break;
                }
                y[pos] = v;
            }
            if (in_range && std::find(out.begin(), out.end(), y) == out.end())
                out.push_back(std::move(y));
        }
        return out;
    }

    // Global states in which a call of `fn` from `g` can return.
    const std::set<State>& concrete_call(const std::string& fn, const State& g) const
    {
        auto& memo = memo_[fn];
        if (auto it = memo.find(g); it != memo.end())
            return it->second;
        std::set<State> returns;
        for (const auto& x : run_from(fn, entry_states(fn, g)))
            returns.insert(State(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(lib_.globals.size())));
        return memo.emplace(g, std::move(returns)).first->second;
    }

    // Final states of every run of `fn` starting in `start`. Throws
    // NonTermination if some run can cycle.
    std::set<State> run_from(const std::string& fn, const std::vector<State>& start) const
    {
        enum class Mark { open, done };
        std::map<State, Mark> marks;
        std::set<State> finals;
        struct Frame {
            State state;
            std::vector<State> next;
            std::size_t pos = 0;
        };
        for (const auto& s0 : start) {
            if (marks.count(s0))
                continue;
            std::vector<Frame> stack;
            auto open = [&](const State& s) {
                marks[s] = Mark::open;
                if (marks.size() > cap_)
                    throw StateCapExceeded("explicit exploration of '" + fn + "' exceeds the state cap of "
                                           + std::to_string(cap_));
                auto next = successors(fn, s);
                if (next.empty())
                    finals.insert(s);
                stack.push_back({s, std::move(next), 0});
            };
            open(s0);
            while (!stack.empty()) {
                auto& top = stack.back();
                if (top.pos == top.next.size()) {
                    marks[top.state] = Mark::done;
                    stack.pop_back();
                    continue;
                }
                const State child = top.next[top.pos++];
                auto it = marks.find(child);
                if (it == marks.end())
                    open(child);
                else if (it->second == Mark::open)
                    throw NonTermination("function '" + fn + "' can loop forever");
            }
        }
        return finals;
    }

    // States of `fn` from which some run reaches `target`.
    std::set<State> pre_star(const std::string& fn, const std::set<State>& target) const
    {
        const auto all = function_states(fn);
        std::map<State, std::vector<State>> preds;
        for (const auto& x : all)
            for (auto& y : successors(fn, x))
                preds[std::move(y)].push_back(x);
        std::set<State> out = target;
        std::vector<State> work(target.begin(), target.end());
        while (!work.empty()) {
            auto y = std::move(work.back());
            work.pop_back();
            for (const auto& x : preds[y])
                if (out.insert(x).second)
                    work.push_back(x);
        }
        return out;
    }

private:
    struct Scoped {
        std::vector<VarDecl> vars;
        std::unordered_map<std::string, std::size_t> index;
        const FunctionModel* model = nullptr;
    };

    const Scoped& scope(const std::string& fn) const
    {
        auto it = scoped_.find(fn);
        if (it == scoped_.end())
            throw SemanticError("unknown function '" + fn + "'");
        return it->second;
    }

    static bool holds(const Predicate& p, const std::unordered_map<std::string, std::size_t>& index, const State& s)
    {
        return evaluate(p, [&](const std::string& n) { return s[index.at(n)]; });
    }

    std::vector<State> enumerate(const std::vector<VarDecl>& vars) const
    {
        std::uint64_t total = 1;
        for (const auto& v : vars) {
            total *= static_cast<std::uint64_t>(v.domain_size());
            if (total > cap_)
                throw StateCapExceeded("explicit state space exceeds the state cap of " + std::to_string(cap_));
        }
        std::vector<State> out;
        out.reserve(total);
        State cur;
        for (const auto& v : vars)
            cur.push_back(v.lo);
        for (std::uint64_t n = 0; n < total; ++n) {
            out.push_back(cur);
            for (std::size_t i = vars.size(); i-- > 0;) {
                if (cur[i] < vars[i].hi) {
                    ++cur[i];
                    break;
                }
                cur[i] = vars[i].lo;
            }
        }
        return out;
    }

    LibraryModule lib_;
    std::uint64_t cap_;
    std::unordered_map<std::string, std::size_t> global_index_;
    std::unordered_map<std::string, Scoped> scoped_;
    mutable std::unordered_map<std::string, std::map<State, std::set<State>>> memo_;
};

// -- interface certification -------------------------------------------------

struct Violation {
    std::vector<std::string> sequence;
    std::string expected;
    std::string got;
};

struct InterfaceReport {
    std::size_t sequences_checked = 0;
    std::vector<Violation> safe_violations;
    std::vector<Violation> permissive_violations;

    bool ok() const { return safe_violations.empty() && permissive_violations.empty(); }
};

inline std::string verdict_text(const ClientVerdict& v)
{
    return v.legal ? "LEGAL" : "ILLEGAL at step " + std::to_string(v.step);
}

// Compares every call sequence of length 1..depth over the graph's functions
// against the explicit semantics.
inline InterfaceReport check_interface(const ExplicitLibrary& lib, const InterfaceGraph& g, std::size_t depth)
{
    InterfaceReport report;
    std::vector<std::string> seq;

    auto step_all = [&](const std::set<State>& from, const std::string& fn) {
        std::set<State> out;
        for (const auto& s : from) {
            const auto& r = lib.concrete_call(fn, s);
            out.insert(r.begin(), r.end());
        }
        return out;
    };

    std::function<void(const std::set<State>&, std::optional<std::size_t>)> visit =
        [&](const std::set<State>& states, std::optional<std::size_t> first_error) {
            if (seq.size() == depth)
                return;
            for (const auto& fn : g.functions) {
                seq.push_back(fn);
                auto next = step_all(states, fn);
                auto err = first_error;
                if (!err && std::any_of(next.begin(), next.end(), [&](const State& s) { return lib.is_error(s); }))
                    err = seq.size();
                const ClientVerdict expected = err ? ClientVerdict{false, *err} : ClientVerdict{};
                const auto got = simulate_client(g, seq);
                ++report.sequences_checked;
                if (!(got == expected)) {
                    Violation v{seq, verdict_text(expected), verdict_text(got)};
                    const bool missed = !expected.legal && (got.legal || got.step > expected.step);
                    (missed ? report.safe_violations : report.permissive_violations).push_back(std::move(v));
                }
                visit(next, err);
                seq.pop_back();
            }
        };

    const auto init = lib.initial_states();
    visit({init.begin(), init.end()}, std::nullopt);
    return report;
}

inline nlohmann::ordered_json to_json_value(const InterfaceReport& r)
{
    auto list = [](const std::vector<Violation>& vs) {
        auto out = nlohmann::ordered_json::array();
        for (const auto& v : vs)
            out.push_back({{"sequence", v.sequence}, {"expected", v.expected}, {"got", v.got}});
        return out;
    };
    nlohmann::ordered_json j;
    j["sequences_checked"] = r.sequences_checked;
    j["safe_violations"] = list(r.safe_violations);
    j["permissive_violations"] = list(r.permissive_violations);
    return j;
}

} // namespace ifsynth::oracle
