#pragma once

// Interface graphs: abstract function summaries, worklist construction,
// client simulation, offline test generation and DOT/JSON export.

#include "ifsynth/abstraction.hpp"
#include "ifsynth/errors.hpp"
#include "ifsynth/symstate.hpp"

#include <json.hpp>

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace ifsynth {

// Global states in which a call of `f` may return when entered from `entry`
// (global states). Throws NonTermination if some run never returns.
inline ValuationSet concrete_returns(const SymbolicLibrary& lib, const SymbolicFunction& f,
                                     const ValuationSet& entry)
{
    auto frontier = lib.lift(entry, f) & f.entry;
    auto returns = frontier - f.enabled;
    // The frontier sequence is a function of its previous value, so a repeat
    // means it cycles forever.
    std::unordered_set<NodeId> seen{frontier.node()};
    while (!frontier.is_empty()) {
        frontier = lib.image(f.relation, frontier);
        returns = returns | (frontier - f.enabled);
        if (!frontier.is_empty() && !seen.insert(frontier.node()).second)
            throw NonTermination("function '" + f.name + "' may not return from some entry state");
    }
    return lib.project_to_globals(returns);
}

// Regions reachable on return from `f` entered in any region of `x`.
inline RegionSet post_abstract(const SymbolicLibrary& lib, const SymbolicFunction& f, const Abstraction& a,
                               const RegionSet& x)
{
    if (x.empty())
        return {};
    return abs_over(a, concrete_returns(lib, f, concretize(a, x)));
}

struct GraphNode {
    std::size_t id = 0;
    RegionSet regions;
    bool initial = false;
    bool error = false;
};

struct GraphEdge {
    std::size_t from = 0;
    std::string fn;
    std::size_t to = 0;
    bool error = false;
    bool operator==(const GraphEdge&) const = default;
};

struct InterfaceGraph {
    static constexpr std::size_t kErrorNode = 0;

    std::vector<GraphNode> nodes; // nodes[0] is the error node, the rest are numbered 1..n
    std::vector<GraphEdge> edges;
    std::vector<std::string> functions;
    std::map<RegionId, std::string> region_labels;

    std::size_t non_error_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }

    std::vector<std::size_t> initial_nodes() const
    {
        std::vector<std::size_t> out;
        for (const auto& n : nodes)
            if (n.initial)
                out.push_back(n.id);
        return out;
    }

    const GraphEdge* find_edge(std::size_t from, std::string_view fn, bool error) const
    {
        for (const auto& e : edges)
            if (e.from == from && e.fn == fn && e.error == error)
                return &e;
        return nullptr;
    }

    bool has_function(std::string_view fn) const
    {
        return std::find(functions.begin(), functions.end(), fn) != functions.end();
    }
};

// Tags a diagnostic raised while summarising `fn` from node `node`.
template <typename E>
[[noreturn]] inline void rethrow_at(const E& e, std::size_t node, const std::string& fn)
{
    throw E(std::string(e.what()) + " (while calling " + fn + " from interface node " + std::to_string(node) + ")");
}

inline InterfaceGraph build_interface(const SymbolicLibrary& lib, const Abstraction& a,
                                      const std::vector<std::string>& functions)
{
    InterfaceGraph g;
    g.functions = functions;
    for (const auto& r : a.regions())
        g.region_labels[r.id] = describe(r.extent);

    const auto error_regions = abs_under(a, lib.error_set());
    g.nodes.push_back({InterfaceGraph::kErrorNode, error_regions, false, true});

    std::map<RegionSet, std::size_t> index;
    std::deque<std::size_t> queue;
    auto node_for = [&](const RegionSet& regions) {
        auto [it, fresh] = index.emplace(regions, g.nodes.size());
        if (fresh) {
            g.nodes.push_back({g.nodes.size(), regions, false, false});
            queue.push_back(it->second);
        }
        return it->second;
    };

    for (auto id : abs_over(a, lib.init_set()))
        g.nodes[node_for({id})].initial = true;

    std::vector<const SymbolicFunction*> fns;
    for (const auto& name : functions)
        fns.push_back(&lib.function(name));

    while (!queue.empty()) {
        const auto cur = queue.front();
        queue.pop_front();
        for (const auto* f : fns) {
            RegionSet next;
            try {
                next = post_abstract(lib, *f, a, g.nodes[cur].regions);
            } catch (const NonTermination& e) {
                rethrow_at(e, cur, f->name);
            } catch (const StateCapExceeded& e) {
                rethrow_at(e, cur, f->name);
            }
            const auto bad = set_intersection(next, error_regions);
            const auto good = set_difference(next, error_regions);
            if (!bad.empty())
                g.edges.push_back({cur, f->name, InterfaceGraph::kErrorNode, true});
            if (!good.empty()) {
                const auto to = node_for(good);
                g.edges.push_back({cur, f->name, to, false});
            }
        }
    }
    return g;
}

// -- clients -------------------------------------------------------------------

struct ClientVerdict {
    bool legal = true;
    std::size_t step = 0; // 1-based index of the first erroneous call when illegal

    bool operator==(const ClientVerdict&) const = default;
};

inline void check_names(const InterfaceGraph& g, const std::vector<std::string>& seq)
{
    for (const auto& fn : seq)
        if (!g.has_function(fn))
            throw SemanticError("unknown function '" + fn + "' in call sequence");
}

inline ClientVerdict simulate_client(const InterfaceGraph& g, const std::vector<std::string>& seq)
{
    check_names(g, seq);
    std::set<std::size_t> current;
    for (auto n : g.initial_nodes())
        current.insert(n);
    for (std::size_t i = 0; i < seq.size() && !current.empty(); ++i) {
        std::set<std::size_t> next;
        for (auto n : current) {
            if (g.find_edge(n, seq[i], true))
                return {false, i + 1};
            if (const auto* e = g.find_edge(n, seq[i], false))
                next.insert(e->to);
        }
        current = std::move(next);
    }
    return {};
}

struct TestCase {
    std::vector<std::string> calls;
    bool legal = true;

    bool operator==(const TestCase&) const = default;
};

// Every legal call sequence of length 1..depth and every illegal sequence
// whose proper prefixes are all legal, ordered by length and then by
// function order.
inline std::vector<TestCase> gen_tests(const InterfaceGraph& g, std::size_t depth)
{
    if (depth == 0)
        throw std::invalid_argument("test depth must be at least 1");
    std::vector<TestCase> out;
    struct Item {
        std::vector<std::string> calls;
        std::set<std::size_t> nodes;
    };
    std::vector<Item> layer;
    {
        auto init = g.initial_nodes();
        layer.push_back({{}, {init.begin(), init.end()}});
    }
    for (std::size_t len = 1; len <= depth; ++len) {
        std::vector<Item> next_layer;
        for (const auto& item : layer)
            for (const auto& fn : g.functions) {
                auto calls = item.calls;
                calls.push_back(fn);
                bool bad = false;
                std::set<std::size_t> next;
                for (auto n : item.nodes) {
                    bad = bad || g.find_edge(n, fn, true) != nullptr;
                    if (const auto* e = g.find_edge(n, fn, false))
                        next.insert(e->to);
                }
                out.push_back({calls, !bad});
                if (!bad)
                    next_layer.push_back({std::move(calls), std::move(next)});
            }
        layer = std::move(next_layer);
    }
    return out;
}

inline std::string format_tests(const std::vector<TestCase>& tests)
{
    std::string out;
    for (const auto& t : tests) {
        out += t.legal ? "LEGAL:" : "ILLEGAL:";
        for (const auto& c : t.calls)
            out += " " + c;
        out += "\n";
    }
    return out;
}

// -- export / import -----------------------------------------------------------

inline std::string node_label(const InterfaceGraph& g, const GraphNode& n)
{
    std::string label = n.error ? "ERROR" : std::to_string(n.id);
    for (auto r : n.regions) {
        auto it = g.region_labels.find(r);
        label += "\\n" + (it == g.region_labels.end() ? "r" + std::to_string(r) : it->second);
    }
    return label;
}

inline std::string dot_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"')
            out += '\\';
        out += c;
    }
    return out;
}

inline std::string to_dot(const InterfaceGraph& g)
{
    auto name = [](std::size_t id) { return id == InterfaceGraph::kErrorNode ? std::string("ERROR") : "n" + std::to_string(id); };
    std::ostringstream os;
    os << "digraph interface {\n";
    os << "  rankdir=LR;\n";
    for (const auto& n : g.nodes) {
        os << "  " << name(n.id) << " [label=\"" << dot_escape(node_label(g, n)) << "\"";
        if (n.error)
            os << ", shape=box";
        else if (n.initial)
            os << ", peripheries=2";
        os << "];\n";
    }
    for (const auto& e : g.edges) {
        os << "  " << name(e.from) << " -> " << name(e.to) << " [label=\"" << dot_escape(e.fn) << "\"";
        if (e.error)
            os << ", style=dashed";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

inline nlohmann::ordered_json to_json_value(const InterfaceGraph& g)
{
    nlohmann::ordered_json j;
    j["functions"] = g.functions;
    auto& regions = j["regions"] = nlohmann::ordered_json::array();
    for (const auto& [id, label] : g.region_labels)
        regions.push_back({{"id", id}, {"predicate", label}});
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : g.nodes)
        nodes.push_back({{"id", n.id}, {"regions", n.regions}, {"initial", n.initial}, {"error", n.error}});
    auto& edges = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges)
        edges.push_back({{"from", e.from}, {"fn", e.fn}, {"to", e.to}, {"kind", e.error ? "error" : "good"}});
    return j;
}

inline std::string to_json(const InterfaceGraph& g) { return to_json_value(g).dump(2) + "\n"; }

inline InterfaceGraph graph_from_json(const nlohmann::json& j)
{
    InterfaceGraph g;
    try {
        g.functions = j.at("functions").get<std::vector<std::string>>();
        if (j.contains("regions"))
            for (const auto& r : j.at("regions"))
                g.region_labels[r.at("id").get<RegionId>()] = r.at("predicate").get<std::string>();
        for (const auto& n : j.at("nodes"))
            g.nodes.push_back({n.at("id").get<std::size_t>(), n.at("regions").get<RegionSet>(),
                               n.at("initial").get<bool>(), n.at("error").get<bool>()});
        for (const auto& e : j.at("edges")) {
            const auto kind = e.at("kind").get<std::string>();
            if (kind != "good" && kind != "error")
                throw SemanticError("edge kind must be 'good' or 'error'");
            g.edges.push_back({e.at("from").get<std::size_t>(), e.at("fn").get<std::string>(),
                               e.at("to").get<std::size_t>(), kind == "error"});
        }
    } catch (const nlohmann::json::exception& e) {
        throw SemanticError(std::string("malformed interface graph: ") + e.what());
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i].id != i)
            throw SemanticError("interface graph nodes must be numbered 0..n in order");
    if (g.nodes.empty() || !g.nodes[0].error)
        throw SemanticError("interface graph node 0 must be the error node");
    for (const auto& e : g.edges) {
        if (e.from >= g.nodes.size() || e.to >= g.nodes.size())
            throw SemanticError("edge refers to an unknown node");
        if (!g.has_function(e.fn))
            throw SemanticError("edge labelled with unknown function '" + e.fn + "'");
        if (e.error != (e.to == InterfaceGraph::kErrorNode))
            throw SemanticError("error edges must lead to the error node and only there");
    }
    return g;
}

} // namespace ifsynth
