#pragma once

// Symbolic sets of valuations and the compiled transition relations of a
// library. All sets of one library share a single decision-diagram manager;
// a state space is the subset of the library's variables a set ranges over
// (the globals, or the globals plus one function's inputs and locals).

#include "ifsynth/errors.hpp"
#include "ifsynth/mdd.hpp"
#include "ifsynth/model.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ifsynth {

using BigCount = boost::multiprecision::cpp_int;
using mdd::NodeId;

struct VarInfo {
    std::string name; // qualified
    Value lo = 0;
    Value hi = 0;
    std::uint32_t size() const { return static_cast<std::uint32_t>(hi - lo + 1); }
};

class StateSpace {
public:
    StateSpace(std::shared_ptr<mdd::Manager> manager, std::shared_ptr<const std::vector<VarInfo>> table,
               std::vector<int> vars, std::string name)
        : manager_(std::move(manager))
        , table_(std::move(table))
        , vars_(std::move(vars))
        , name_(std::move(name))
    {
        for (auto v : vars_)
            member_.insert(v);
    }

    mdd::Manager& manager() const { return *manager_; }
    const std::vector<int>& vars() const { return vars_; }
    const VarInfo& var(int index) const { return (*table_)[index]; }
    const std::vector<VarInfo>& table() const { return *table_; }
    const std::string& name() const { return name_; }
    bool has_var(int index) const { return member_.count(index) != 0; }

    // Position of a variable index within this space's ordered list.
    std::size_t position(int index) const
    {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == index)
                return i;
        throw std::out_of_range("variable not in state space: " + var(index).name);
    }

    int find(std::string_view qualified) const
    {
        for (auto v : vars_)
            if (var(v).name == qualified)
                return v;
        return -1;
    }

    BigCount total_size() const
    {
        BigCount n = 1;
        for (auto v : vars_)
            n *= var(v).size();
        return n;
    }

    bool shares_manager(const StateSpace& o) const { return manager_ == o.manager_; }

private:
    std::shared_ptr<mdd::Manager> manager_;
    std::shared_ptr<const std::vector<VarInfo>> table_;
    std::vector<int> vars_;
    std::string name_;
    std::set<int> member_;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

// An immutable set of total valuations over one state space.
class ValuationSet {
public:
    ValuationSet() = default;
    ValuationSet(SpacePtr space, NodeId node)
        : space_(std::move(space))
        , node_(node)
    {}

    static ValuationSet empty(SpacePtr space) { return {std::move(space), mdd::kFalse}; }
    static ValuationSet full(SpacePtr space) { return {std::move(space), mdd::kTrue}; }

    const SpacePtr& space() const { return space_; }
    NodeId node() const { return node_; }

    bool is_empty() const { return node_ == mdd::kFalse; }
    bool is_full() const { return node_ == mdd::kTrue; }

    ValuationSet operator|(const ValuationSet& o) const { check(o); return {space_, mgr().disj(node_, o.node_)}; }
    ValuationSet operator&(const ValuationSet& o) const { check(o); return {space_, mgr().conj(node_, o.node_)}; }
    ValuationSet operator-(const ValuationSet& o) const { check(o); return {space_, mgr().diff(node_, o.node_)}; }
    ValuationSet operator~() const { return {space_, mgr().negate(node_)}; }

    bool intersects(const ValuationSet& o) const { return !(*this & o).is_empty(); }
    bool subset_of(const ValuationSet& o) const { return (*this - o).is_empty(); }

    bool operator==(const ValuationSet& o) const { check(o); return node_ == o.node_; }

    // `values` are listed in the space's variable order.
    bool contains(const std::vector<Value>& values) const
    {
        const auto& m = mgr();
        NodeId n = node_;
        while (!m.is_terminal(n)) {
            const int var = m.level(n) / 2;
            const auto pos = space_->position(var);
            const auto& info = space_->var(var);
            const auto v = values.at(pos);
            if (v < info.lo || v > info.hi)
                return false;
            n = m.children(n)[static_cast<std::size_t>(v - info.lo)];
        }
        return n == mdd::kTrue;
    }

    BigCount cardinality() const
    {
        const auto& vars = space_->vars();
        const auto& m = mgr();
        std::unordered_map<NodeId, BigCount> memo;
        // product of domain sizes of space vars in [from_var, to_var)
        auto gap = [&](int from_var, int to_var) {
            BigCount p = 1;
            for (auto v : vars)
                if (v >= from_var && v < to_var)
                    p *= space_->var(v).size();
            return p;
        };
        const int terminal_var = m.num_levels() / 2;
        auto var_of = [&](NodeId n) { return m.is_terminal(n) ? terminal_var : m.level(n) / 2; };
        std::function<BigCount(NodeId)> rec = [&](NodeId n) -> BigCount {
            if (n == mdd::kFalse)
                return 0;
            if (n == mdd::kTrue)
                return 1;
            if (auto it = memo.find(n); it != memo.end())
                return it->second;
            const int v = var_of(n);
            BigCount total = 0;
            for (auto c : m.children(n))
                total += rec(c) * gap(v + 1, var_of(c));
            memo.emplace(n, total);
            return total;
        };
        return rec(node_) * gap(0, var_of(node_));
    }

    // Variables (library indices) the set depends on, ascending.
    std::vector<int> support() const
    {
        const auto& m = mgr();
        std::set<int> vars;
        std::unordered_set<NodeId> seen;
        std::vector<NodeId> stack{node_};
        while (!stack.empty()) {
            auto n = stack.back();
            stack.pop_back();
            if (m.is_terminal(n) || !seen.insert(n).second)
                continue;
            vars.insert(m.level(n) / 2);
            for (auto c : m.children(n))
                stack.push_back(c);
        }
        return {vars.begin(), vars.end()};
    }

    // Same set viewed over a larger (or equal) space of the same library.
    ValuationSet reinterpret(SpacePtr space) const { return {std::move(space), node_}; }

    // Disjunction of cubes, each cube a list of (var, allowed values).
    using Cube = std::vector<std::pair<int, std::vector<Value>>>;
    std::vector<Cube> cubes(std::size_t limit) const
    {
        std::vector<Cube> out;
        Cube current;
        const auto& m = mgr();
        std::function<void(NodeId)> rec = [&](NodeId n) {
            if (out.size() >= limit || n == mdd::kFalse)
                return;
            if (n == mdd::kTrue) {
                out.push_back(current);
                return;
            }
            const int var = m.level(n) / 2;
            const auto kids = m.children(n);
            // group values that lead to the same child
            std::vector<std::pair<NodeId, std::vector<Value>>> groups;
            for (std::uint32_t i = 0; i < kids.size(); ++i) {
                if (kids[i] == mdd::kFalse)
                    continue;
                auto it = std::find_if(groups.begin(), groups.end(), [&](auto& g) { return g.first == kids[i]; });
                if (it == groups.end())
                    groups.push_back({kids[i], {}}), it = groups.end() - 1;
                it->second.push_back(space_->var(var).lo + static_cast<Value>(i));
            }
            for (auto& [child, values] : groups) {
                current.emplace_back(var, values);
                rec(child);
                current.pop_back();
            }
        };
        rec(node_);
        return out;
    }

private:
    mdd::Manager& mgr() const { return space_->manager(); }
    void check(const ValuationSet& o) const
    {
        if (!space_ || !o.space_ || !space_->shares_manager(*o.space_))
            throw std::logic_error("valuation sets over unrelated state spaces");
    }

    SpacePtr space_;
    NodeId node_ = mdd::kFalse;
};

// Human-readable predicate for a set, e.g. "err=0 & top in 1..2".
inline std::string describe(const ValuationSet& x, std::size_t max_cubes = 8)
{
    if (x.is_empty())
        return "false";
    if (x.is_full())
        return "true";
    auto cubes = x.cubes(max_cubes + 1);
    std::string out;
    for (std::size_t i = 0; i < cubes.size() && i < max_cubes; ++i) {
        if (i)
            out += " | ";
        std::string cube;
        for (const auto& [var, values] : cubes[i]) {
            if (!cube.empty())
                cube += " & ";
            const auto& name = x.space()->var(var).name;
            const bool contiguous = values.back() - values.front() + 1 == static_cast<Value>(values.size());
            if (values.size() == 1)
                cube += name + "=" + std::to_string(values[0]);
            else if (contiguous)
                cube += name + " in " + std::to_string(values.front()) + ".." + std::to_string(values.back());
            else {
                cube += name + " in {";
                for (std::size_t k = 0; k < values.size(); ++k)
                    cube += (k ? "," : "") + std::to_string(values[k]);
                cube += "}";
            }
        }
        out += cubes.size() > 1 ? "(" + cube + ")" : cube;
    }
    if (cubes.size() > max_cubes)
        out += " | ...";
    return out;
}

struct SymbolicRule {
    std::size_t index = 0;
    NodeId relation = mdd::kFalse;
    ValuationSet guard;
    ValuationSet enabled; // guard restricted to states whose updates stay in range
};

struct SymbolicFunction {
    std::string name;
    std::size_t index = 0;
    SpacePtr space;
    std::vector<SymbolicRule> rules;
    NodeId relation = mdd::kFalse;
    ValuationSet entry;   // initial local states, globals unconstrained
    ValuationSet enabled; // states with at least one successor
    std::map<std::string, int, std::less<>> scope; // source name -> variable index
};

// A library module compiled to decision diagrams.
class SymbolicLibrary {
public:
    explicit SymbolicLibrary(LibraryModule lib)
        : module_(std::move(lib))
    {
        // Diagram order: each function's location counter, inputs and locals,
        // then the globals. Branching on the location first keeps the union
        // of a function's rules small.
        auto table = std::make_shared<std::vector<VarInfo>>();
        std::vector<std::vector<int>> fn_vars; // in scoped order: inputs, then locals
        for (const auto& f : module_.functions) {
            std::vector<const VarDecl*> order;
            for (const auto& l : f.locals)
                if (l.name == kLocationVar)
                    order.push_back(&l);
            for (const auto* list : {&f.inputs, &f.locals})
                for (const auto& v : *list)
                    if (v.name != kLocationVar)
                        order.push_back(&v);
            std::map<const VarDecl*, int> at;
            for (const auto* v : order) {
                at[v] = static_cast<int>(table->size());
                table->push_back({v->qualified_name(), v->lo, v->hi});
            }
            std::vector<int> own;
            for (const auto* list : {&f.inputs, &f.locals})
                for (const auto& v : *list)
                    own.push_back(at.at(&v));
            fn_vars.push_back(std::move(own));
        }
        const int first_global = static_cast<int>(table->size());
        for (const auto& g : module_.globals)
            table->push_back({g.qualified_name(), g.lo, g.hi});
        table_ = table;
        std::vector<std::uint32_t> levels;
        for (const auto& v : *table_) {
            levels.push_back(v.size());
            levels.push_back(v.size());
        }
        manager_ = std::make_shared<mdd::Manager>(std::move(levels));

        std::vector<int> globals;
        std::map<std::string, int, std::less<>> global_scope;
        for (std::size_t i = 0; i < module_.globals.size(); ++i) {
            globals.push_back(first_global + static_cast<int>(i));
            global_scope[module_.globals[i].name] = first_global + static_cast<int>(i);
        }
        global_space_ = std::make_shared<StateSpace>(manager_, table_, globals, "globals");
        global_scope_ = global_scope;

        error_ = compile(module_.error, global_scope_, global_space_);
        init_ = compile(module_.init, global_scope_, global_space_);

        for (std::size_t fi = 0; fi < module_.functions.size(); ++fi) {
            const auto& f = module_.functions[fi];
            SymbolicFunction sf;
            sf.name = f.name;
            sf.index = fi;
            std::vector<int> vars = globals;
            vars.insert(vars.end(), fn_vars[fi].begin(), fn_vars[fi].end());
            sf.space = std::make_shared<StateSpace>(manager_, table_, vars, f.name);
            sf.scope = global_scope;
            std::size_t k = 0;
            for (const auto* list : {&f.inputs, &f.locals})
                for (const auto& v : *list)
                    sf.scope[v.name] = fn_vars[fi][k++];

            NodeId entry = mdd::kTrue;
            for (const auto& l : f.locals) {
                // non-input locals start at 0, or at the bottom of their range
                const int idx = sf.scope.at(l.name);
                const auto init = std::max<Value>(0, l.lo);
                entry = manager_->conj(entry, value_node(idx, init, false));
            }
            sf.entry = ValuationSet(sf.space, entry);

            NodeId all = mdd::kFalse;
            for (std::size_t ri = 0; ri < f.rules.size(); ++ri) {
                SymbolicRule r;
                r.index = ri;
                r.guard = compile(f.rules[ri].guard, sf.scope, sf.space);
                r.relation = compile_rule(f.rules[ri], sf, r.guard.node());
                r.enabled = ValuationSet(sf.space, manager_->preimage(mdd::kTrue, r.relation));
                all = manager_->disj(all, r.relation);
                sf.rules.push_back(std::move(r));
            }
            sf.relation = all;
            sf.enabled = ValuationSet(sf.space, manager_->preimage(mdd::kTrue, all));
            functions_.push_back(std::move(sf));
        }

        std::vector<bool> locals_mask(static_cast<std::size_t>(manager_->num_levels()), false);
        for (int v = 0; v < first_global; ++v)
            locals_mask[2 * v] = locals_mask[2 * v + 1] = true;
        locals_mask_ = std::move(locals_mask);
    }

    SymbolicLibrary(const SymbolicLibrary&) = delete;
    SymbolicLibrary& operator=(const SymbolicLibrary&) = delete;

    const LibraryModule& module() const { return module_; }
    const SpacePtr& global_space() const { return global_space_; }
    const ValuationSet& error_set() const { return error_; }
    const ValuationSet& init_set() const { return init_; }
    const std::vector<SymbolicFunction>& functions() const { return functions_; }
    mdd::Manager& manager() const { return *manager_; }

    const SymbolicFunction& function(std::string_view name) const
    {
        for (const auto& f : functions_)
            if (f.name == name)
                return f;
        throw SemanticError("unknown function '" + std::string(name) + "'");
    }

    const GuardedRule& rule_source(const SymbolicFunction& f, const SymbolicRule& r) const
    {
        return module_.functions[f.index].rules[r.index];
    }

    // A predicate over the globals.
    ValuationSet global_predicate(const Predicate& p) const { return compile(p, global_scope_, global_space_); }

    // A predicate over a function's variables.
    ValuationSet function_predicate(const SymbolicFunction& f, const Predicate& p) const
    {
        return compile(p, f.scope, f.space);
    }

    // Extension of a set of global states with unconstrained inputs/locals.
    ValuationSet lift(const ValuationSet& global, const SymbolicFunction& f) const
    {
        return global.reinterpret(f.space);
    }

    // Global valuations that some extension with inputs/locals places in `x`.
    ValuationSet project_to_globals(const ValuationSet& x) const
    {
        return {global_space_, manager_->exists(x.node(), locals_mask_)};
    }

    // Error set viewed over a function's state space.
    ValuationSet error_in(const SymbolicFunction& f) const { return lift(error_, f); }

    ValuationSet image(NodeId relation, const ValuationSet& x) const
    {
        return {x.space(), manager_->image(x.node(), relation)};
    }

    ValuationSet preimage(NodeId relation, const ValuationSet& y) const
    {
        return {y.space(), manager_->preimage(y.node(), relation)};
    }

    // Relation of E-states that leave E, for the sink check.
    NodeId leaves_error(NodeId relation, const SymbolicFunction& f) const
    {
        const auto e = error_in(f).node();
        const auto stays = manager_->prime(e);
        return manager_->conj(manager_->conj(relation, e), manager_->negate(stays));
    }

private:
    NodeId value_node(int var, Value value, bool next) const
    {
        const auto& info = (*table_)[var];
        std::vector<bool> allowed(info.size(), false);
        if (value >= info.lo && value <= info.hi)
            allowed[static_cast<std::size_t>(value - info.lo)] = true;
        return manager_->literal(2 * var + (next ? 1 : 0), allowed);
    }

    int resolve(const std::map<std::string, int, std::less<>>& scope, const std::string& name) const
    {
        auto it = scope.find(name);
        if (it == scope.end())
            throw SemanticError("undeclared variable '" + name + "'");
        return it->second;
    }

    static constexpr std::uint64_t kEnumerationCap = 1ull << 24;

    // Diagram over `levels` (ascending) whose leaves are decided by `leaf`,
    // which sees the assigned values by variable index.
    template <typename Leaf>
    NodeId enumerate(const std::vector<int>& levels, Leaf&& leaf) const
    {
        std::uint64_t product = 1;
        for (auto l : levels) {
            product *= manager_->level_size(l);
            if (product > kEnumerationCap)
                throw SemanticError("expression ranges over too many valuations to compile");
        }
        std::map<int, Value> assignment;
        std::function<NodeId(std::size_t)> rec = [&](std::size_t pos) -> NodeId {
            if (pos == levels.size())
                return leaf(assignment);
            const int lvl = levels[pos];
            const auto& info = (*table_)[lvl / 2];
            std::vector<NodeId> kids(info.size());
            for (std::uint32_t i = 0; i < info.size(); ++i) {
                assignment[lvl] = info.lo + static_cast<Value>(i);
                kids[i] = rec(pos + 1);
            }
            assignment.erase(lvl);
            return manager_->make(lvl, kids);
        };
        return rec(0);
    }

    ValuationSet compile(const Predicate& p, const std::map<std::string, int, std::less<>>& scope,
                         const SpacePtr& space) const
    {
        return {space, compile_node(p, scope)};
    }

    NodeId compile_node(const Predicate& p, const std::map<std::string, int, std::less<>>& scope) const
    {
        return std::visit(
            [&](const auto& x) -> NodeId {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Predicate::True>)
                    return mdd::kTrue;
                else if constexpr (std::is_same_v<T, Predicate::Not>)
                    return manager_->negate(compile_node(*x.operand, scope));
                else if constexpr (std::is_same_v<T, Predicate::And>) {
                    NodeId acc = mdd::kTrue;
                    for (const auto& o : x.operands)
                        acc = manager_->conj(acc, compile_node(o, scope));
                    return acc;
                } else if constexpr (std::is_same_v<T, Predicate::Or>) {
                    NodeId acc = mdd::kFalse;
                    for (const auto& o : x.operands)
                        acc = manager_->disj(acc, compile_node(o, scope));
                    return acc;
                } else {
                    std::vector<std::string> names;
                    collect_vars(x.lhs, names);
                    collect_vars(x.rhs, names);
                    std::set<int> levels;
                    for (const auto& n : names)
                        levels.insert(2 * resolve(scope, n));
                    const std::vector<int> lv(levels.begin(), levels.end());
                    return enumerate(lv, [&](const std::map<int, Value>& a) {
                        auto lookup = [&](const std::string& n) { return a.at(2 * scope.find(n)->second); };
                        return compare(x.op, evaluate(x.lhs, lookup), evaluate(x.rhs, lookup)) ? mdd::kTrue
                                                                                               : mdd::kFalse;
                    });
                }
            },
            p.node);
    }

    // Relation { (x, x') | x' = x[target := term(x)], result in range }.
    NodeId compile_update(int target, const Term& term, const std::map<std::string, int, std::less<>>& scope) const
    {
        std::vector<std::string> names;
        collect_vars(term, names);
        std::set<int> vars;
        for (const auto& n : names)
            vars.insert(resolve(scope, n));
        const auto& tinfo = (*table_)[target];
        auto lookup_from = [&](const std::map<int, Value>& a) {
            return [&a, &scope](const std::string& n) { return a.at(2 * scope.find(n)->second); };
        };

        if (vars.empty() || *vars.rbegin() <= target) {
            std::vector<int> lv;
            for (auto v : vars)
                lv.push_back(2 * v);
            return enumerate(lv, [&](const std::map<int, Value>& a) {
                return value_node(target, evaluate(term, lookup_from(a)), true);
            });
        }
        std::set<int> levels;
        for (auto v : vars)
            levels.insert(2 * v);
        levels.insert(2 * target + 1);
        const std::vector<int> lv(levels.begin(), levels.end());
        return enumerate(lv, [&](const std::map<int, Value>& a) {
            const auto val = evaluate(term, lookup_from(a));
            if (val < tinfo.lo || val > tinfo.hi)
                return mdd::kFalse;
            return a.at(2 * target + 1) == val ? mdd::kTrue : mdd::kFalse;
        });
    }

    NodeId frame(int var) const
    {
        const auto& info = (*table_)[var];
        std::vector<NodeId> kids(info.size());
        for (std::uint32_t i = 0; i < info.size(); ++i) {
            std::vector<bool> one(info.size(), false);
            one[i] = true;
            kids[i] = manager_->literal(2 * var + 1, one);
        }
        return manager_->make(2 * var, kids);
    }

    NodeId compile_rule(const GuardedRule& rule, const SymbolicFunction& f, NodeId guard) const
    {
        std::set<int> updated;
        NodeId rel = guard;
        for (const auto& u : rule.updates) {
            const int target = resolve(f.scope, u.target);
            updated.insert(target);
            rel = manager_->conj(rel, compile_update(target, u.value, f.scope));
        }
        // product of the frames first: their supports are disjoint, so it
        // stays linear in the number of variables
        NodeId frames = mdd::kTrue;
        std::vector<int> vars(f.space->vars().begin(), f.space->vars().end());
        std::sort(vars.rbegin(), vars.rend());
        for (auto v : vars)
            if (!updated.count(v))
                frames = manager_->conj(frame(v), frames);
        rel = manager_->conj(rel, frames);
        return rel;
    }

    LibraryModule module_;
    std::shared_ptr<const std::vector<VarInfo>> table_;
    std::shared_ptr<mdd::Manager> manager_;
    SpacePtr global_space_;
    std::map<std::string, int, std::less<>> global_scope_;
    ValuationSet error_;
    ValuationSet init_;
    std::vector<SymbolicFunction> functions_;
    std::vector<bool> locals_mask_;
};

// -- set operators over one function -----------------------------------------

// States reached by one application of `rule` from `x`.
inline ValuationSet rule_image(const SymbolicLibrary& lib, const SymbolicRule& rule, const ValuationSet& x)
{
    return lib.image(rule.relation, x);
}

// { x | some successor of x lies in y }.
inline ValuationSet pre_one(const SymbolicLibrary& lib, const SymbolicFunction& f, const ValuationSet& y)
{
    return lib.preimage(f.relation, y);
}

// Least fixpoint of Y ∪ pre_one(X).
inline ValuationSet pre_star(const SymbolicLibrary& lib, const SymbolicFunction& f, const ValuationSet& y)
{
    const auto cap = f.space->total_size();
    ValuationSet x = y;
    for (BigCount i = 0;; ++i) {
        auto next = x | pre_one(lib, f, x);
        if (next == x)
            return x;
        if (i > cap)
            throw std::logic_error("pre_star did not stabilise within |S_f| iterations");
        x = next;
    }
}

// k-fold image of `x` under the function's transition relation.
inline ValuationSet post_k(const SymbolicLibrary& lib, const SymbolicFunction& f, const ValuationSet& x,
                           unsigned k)
{
    if (k == 0)
        throw std::invalid_argument("post_k requires k >= 1");
    ValuationSet cur = x;
    for (unsigned i = 0; i < k && !cur.is_empty(); ++i)
        cur = lib.image(f.relation, cur);
    return cur;
}

inline std::vector<int> support(const ValuationSet& x) { return x.support(); }

inline std::vector<std::string> support_names(const ValuationSet& x)
{
    std::vector<std::string> out;
    for (auto v : x.support())
        out.push_back(x.space()->var(v).name);
    return out;
}

inline ValuationSet project_to_globals(const SymbolicLibrary& lib, const ValuationSet& x)
{
    return lib.project_to_globals(x);
}

} // namespace ifsynth
