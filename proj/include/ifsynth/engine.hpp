#pragma once

// Abstraction refinement: the initial abstraction, per-rule may/must
// predecessor operators, the per-function refinement loop and the
// exploration driver.

#include "ifsynth/abstraction.hpp"
#include "ifsynth/errors.hpp"
#include "ifsynth/igraph.hpp"
#include "ifsynth/symstate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ifsynth {

inline Abstraction initial_abstraction(const SymbolicLibrary& lib)
{
    const auto& e = lib.error_set();
    const auto i = lib.init_set() - e;
    const auto rest = ~(e | i);
    std::vector<Region> regions;
    RegionId next = 0;
    for (const auto& x : {e, i, rest})
        if (!x.is_empty())
            regions.push_back({next++, std::nullopt, x});
    return {lib.global_space(), std::move(regions), next};
}

// -- rule blocks ---------------------------------------------------------------

struct RuleBlock {
    std::vector<std::size_t> rules;
    NodeId relation = mdd::kFalse;
    ValuationSet enabled;
};

struct RulePartition {
    std::vector<RuleBlock> blocks;

    std::vector<std::vector<std::size_t>> groups() const
    {
        std::vector<std::vector<std::size_t>> out;
        for (const auto& b : blocks)
            out.push_back(b.rules);
        return out;
    }
};

inline RulePartition make_partition(const SymbolicLibrary& lib, const SymbolicFunction& f,
                                    const std::vector<std::vector<std::size_t>>& groups)
{
    RulePartition p;
    auto& m = lib.manager();
    for (const auto& g : groups) {
        RuleBlock b{g, mdd::kFalse, ValuationSet::empty(f.space)};
        for (auto i : g) {
            b.relation = m.disj(b.relation, f.rules.at(i).relation);
            b.enabled = b.enabled | f.rules.at(i).enabled;
        }
        p.blocks.push_back(std::move(b));
    }
    return p;
}

inline RulePartition singleton_blocks(const SymbolicLibrary& lib, const SymbolicFunction& f)
{
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < f.rules.size(); ++i)
        groups.push_back({i});
    return make_partition(lib, f, groups);
}

// Rules whose enabled sets meet the same regions share a block; blocks are
// ordered by their least rule index.
inline RulePartition partition_rules(const SymbolicLibrary& lib, const SymbolicFunction& f, const Abstraction& a)
{
    std::map<RegionSet, std::size_t> by_key;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < f.rules.size(); ++i) {
        auto key = abs_over(a, f.rules[i].enabled);
        auto [it, fresh] = by_key.emplace(std::move(key), groups.size());
        if (fresh)
            groups.emplace_back();
        groups[it->second].push_back(i);
    }
    return make_partition(lib, f, groups);
}

// -- abstract transition relations -------------------------------------------

using AbstractRelation = std::vector<std::pair<RegionId, RegionId>>;

namespace detail {

template <typename Sources>
AbstractRelation abstract_relation(const SymbolicLibrary& lib, const Abstraction& a, const RulePartition& p,
                                   Sources&& sources)
{
    std::set<std::pair<RegionId, RegionId>> pairs;
    for (const auto& b : p.blocks)
        for (auto r1 : sources(b)) {
            const auto img = lib.image(b.relation, a.region(r1).extent);
            for (auto r2 : abs_over(a, img))
                pairs.emplace(r1, r2);
        }
    return {pairs.begin(), pairs.end()};
}

} // namespace detail

// Pairs (r1, r2) such that some block is enabled somewhere in r1 and its
// image of r1 meets r2.
inline AbstractRelation trans_may_approx(const SymbolicLibrary& lib, const Abstraction& a, const RulePartition& p)
{
    return detail::abstract_relation(lib, a, p, [&](const RuleBlock& b) { return abs_over(a, b.enabled); });
}

// Pairs (r1, r2) such that some block is enabled everywhere in r1 and its
// image of r1 meets r2.
inline AbstractRelation trans_must_approx(const SymbolicLibrary& lib, const Abstraction& a, const RulePartition& p)
{
    return detail::abstract_relation(lib, a, p, [&](const RuleBlock& b) { return abs_under(a, b.enabled); });
}

// Regions some state of which has a successor in X.
inline RegionSet pre_one_may_approx(const SymbolicLibrary& lib, const Abstraction& a, const RulePartition& p,
                                    const RegionSet& x)
{
    const auto target = concretize(a, x);
    RegionSet out;
    for (const auto& b : p.blocks)
        out = set_union(out, abs_over(a, lib.preimage(b.relation, target)));
    return out;
}

// Regions in which, for some block, every state has a block successor in X.
inline RegionSet pre_one_must_approx(const SymbolicLibrary& lib, const Abstraction& a, const RulePartition& p,
                                     const RegionSet& x)
{
    const auto target = concretize(a, x);
    RegionSet out;
    for (const auto& b : p.blocks)
        out = set_union(out, abs_under(a, lib.preimage(b.relation, target)));
    return out;
}

namespace detail {

template <typename Step>
RegionSet region_fixpoint(const RegionSet& x, Step&& step)
{
    RegionSet cur = x;
    for (;;) {
        auto next = set_union(cur, step(cur));
        if (next == cur)
            return cur;
        cur = std::move(next);
    }
}

} // namespace detail

inline RegionSet pre_must_approx(const SymbolicLibrary& lib, const Abstraction& a, const RulePartition& p,
                                 const RegionSet& x)
{
    return detail::region_fixpoint(x, [&](const RegionSet& y) { return pre_one_must_approx(lib, a, p, y); });
}

inline RegionSet pre_may_approx(const SymbolicLibrary& lib, const Abstraction& a, const RulePartition& p,
                                const RegionSet& x)
{
    return detail::region_fixpoint(x, [&](const RegionSet& y) { return pre_one_may_approx(lib, a, p, y); });
}

// -- refinement ------------------------------------------------------------------

struct RefinementEvent {
    enum class Kind { variable_split, local_set_split, global_split };
    Kind kind = Kind::variable_split;
    std::string function;
    std::string detail;
    std::size_t regions = 0; // size of the refined abstraction afterwards

    bool operator==(const RefinementEvent&) const = default;
};

inline const char* to_string(RefinementEvent::Kind k)
{
    switch (k) {
    case RefinementEvent::Kind::variable_split: return "variable-split";
    case RefinementEvent::Kind::local_set_split: return "local-set-split";
    case RefinementEvent::Kind::global_split: return "global-split";
    }
    return "?";
}

struct RefinementOptions {
    bool use_rule_partition = true;
};

// Refines the global abstraction `r` so that it is precise for the global
// entry states from which one call of `f` can reach the error set.
inline Abstraction absref(const SymbolicLibrary& lib, const Abstraction& r, const SymbolicFunction& f,
                          const RefinementOptions& options = {}, std::vector<RefinementEvent>* trace = nullptr)
{
    auto log = [&](RefinementEvent::Kind kind, std::string detail, std::size_t regions) {
        if (trace)
            trace->push_back({kind, f.name, std::move(detail), regions});
    };

    auto rf = r.lifted(f.space);
    std::set<int> v_abs;
    for (const auto& reg : rf.regions())
        for (auto v : reg.extent.support())
            v_abs.insert(v);
    const auto error = lib.error_in(f);

    for (;;) {
        const auto blocks = options.use_rule_partition ? partition_rules(lib, f, rf) : singleton_blocks(lib, f);
        const auto s_m = pre_must_approx(lib, rf, blocks, abs_under(rf, error));
        const auto reached = concretize(rf, s_m);
        const auto s1 = pre_one(lib, f, reached);
        const auto s_new = s1 - reached;

        if (s_new.is_empty()) {
            const auto c = lib.project_to_globals(reached & f.entry);
            auto out = split_by_set(r, c);
            log(RefinementEvent::Kind::global_split, describe(c), out.size());
            return out;
        }

        std::optional<int> choice;
        const auto sup = s_new.support();
        for (auto v : f.space->vars()) {
            if (v_abs.count(v) || !std::binary_search(sup.begin(), sup.end(), v))
                continue;
            if (!choice || f.space->var(v).size() < f.space->var(*choice).size())
                choice = v;
        }
        if (choice) {
            v_abs.insert(*choice);
            rf = split_by_variable(rf, *choice);
            log(RefinementEvent::Kind::variable_split, f.space->var(*choice).name, rf.size());
            continue;
        }

        // Every variable the new states depend on is already significant:
        // split by the one-step predecessor set, then by each block's share
        // of it.
        auto refined = split_by_set(rf, s1);
        std::string what = describe(s1);
        for (std::size_t i = 0; i < blocks.blocks.size() && refined.size() == rf.size(); ++i) {
            refined = split_by_set(rf, lib.preimage(blocks.blocks[i].relation, reached));
            what = "predecessors via rule block " + std::to_string(i + 1);
        }
        if (refined.size() == rf.size())
            throw RefinementStuck("refinement of '" + f.name + "' cannot separate new predecessor states "
                                  + describe(s_new));
        rf = std::move(refined);
        log(RefinementEvent::Kind::local_set_split, what, rf.size());
    }
}

// -- exploration -----------------------------------------------------------------

struct ExploreResult {
    Abstraction abstraction;
    InterfaceGraph graph;
    std::vector<std::string> functions;
    std::vector<RefinementEvent> trace;
};

inline std::vector<std::string> all_functions(const SymbolicLibrary& lib)
{
    std::vector<std::string> out;
    for (const auto& f : lib.functions())
        out.push_back(f.name);
    return out;
}

inline void check_function_list(const SymbolicLibrary& lib, const std::vector<std::string>& fns)
{
    std::set<std::string> seen;
    for (const auto& n : fns) {
        lib.function(n);
        if (!seen.insert(n).second)
            throw SemanticError("function '" + n + "' listed twice");
    }
}

inline ExploreResult explore(const SymbolicLibrary& lib, const std::vector<std::string>& functions,
                             std::optional<Abstraction> r0 = std::nullopt, const RefinementOptions& options = {})
{
    check_function_list(lib, functions);
    ExploreResult out;
    out.abstraction = r0 ? std::move(*r0) : initial_abstraction(lib);
    out.functions = functions;
    for (const auto& name : functions)
        out.abstraction = absref(lib, out.abstraction, lib.function(name), options, &out.trace);
    out.graph = build_interface(lib, out.abstraction, out.functions);
    return out;
}

// Adds `added` to an earlier result: only the new functions are refined, the
// graph is rebuilt over the combined function list.
inline ExploreResult explore_incremental(const SymbolicLibrary& lib, const ExploreResult& prev,
                                         const std::vector<std::string>& added, const RefinementOptions& options = {})
{
    for (const auto& n : added)
        if (std::find(prev.functions.begin(), prev.functions.end(), n) != prev.functions.end())
            throw SemanticError("function '" + n + "' is already part of the interface");
    auto combined = prev.functions;
    combined.insert(combined.end(), added.begin(), added.end());
    check_function_list(lib, combined);

    ExploreResult out;
    out.abstraction = prev.abstraction;
    out.functions = combined;
    out.trace = prev.trace;
    for (const auto& name : added)
        out.abstraction = absref(lib, out.abstraction, lib.function(name), options, &out.trace);
    out.graph = build_interface(lib, out.abstraction, out.functions);
    return out;
}

} // namespace ifsynth
