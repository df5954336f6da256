#pragma once

// Command implementations behind the `ifsynth` executable. Each command
// writes its artifacts and returns the process exit status.

#include "ifsynth/engine.hpp"
#include "ifsynth/errors.hpp"
#include "ifsynth/igraph.hpp"
#include "ifsynth/oracle.hpp"
#include "ifsynth/parser.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ifsynth::cli {

inline constexpr int kExitViolations = 7;
inline constexpr int kExitIllegal = 8;

struct RunConfig {
    std::string model_path;
    std::optional<std::vector<std::string>> functions; // all functions when unset
    std::string out_path;                              // stdout when empty
    std::string format = "dot";
    std::size_t depth = 6;
    bool use_rule_partition = true;
    std::string incremental_path;
    std::uint64_t state_cap = oracle::kDefaultStateCap;
    std::string sequence_path; // check-client
    std::string graph_path;    // verify: certify a stored graph instead of building one
    std::string function;      // simulate
    std::vector<std::string> assignments; // simulate: name=value
};

inline std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    return out;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << text;
}

// -- persisted abstractions ----------------------------------------------------

inline nlohmann::ordered_json set_to_json(const ValuationSet& x)
{
    auto cubes = nlohmann::ordered_json::array();
    for (const auto& cube : x.cubes(std::numeric_limits<std::size_t>::max())) {
        nlohmann::ordered_json c = nlohmann::ordered_json::object();
        for (const auto& [var, values] : cube)
            c[x.space()->var(var).name] = values;
        cubes.push_back(std::move(c));
    }
    return cubes;
}

inline ValuationSet set_from_json(const SymbolicLibrary& lib, const SpacePtr& space, const nlohmann::json& cubes)
{
    auto& m = lib.manager();
    auto out = ValuationSet::empty(space);
    for (const auto& cube : cubes) {
        NodeId node = mdd::kTrue;
        for (const auto& [name, values] : cube.items()) {
            const int var = space->find(name);
            if (var < 0)
                throw SemanticError("state file refers to unknown variable '" + name + "'");
            const auto& info = space->var(var);
            std::vector<bool> allowed(info.size(), false);
            for (auto v : values.get<std::vector<Value>>()) {
                if (v < info.lo || v > info.hi)
                    throw SemanticError("state file value out of range for '" + name + "'");
                allowed[static_cast<std::size_t>(v - info.lo)] = true;
            }
            node = m.conj(node, m.literal(2 * var, allowed));
        }
        out = out | ValuationSet(space, node);
    }
    return out;
}

inline std::string state_to_json(const SymbolicLibrary& lib, const ExploreResult& r)
{
    nlohmann::ordered_json j;
    j["model"] = lib.module().name;
    j["functions"] = r.functions;
    j["next_id"] = r.abstraction.next_id();
    auto& regions = j["regions"] = nlohmann::ordered_json::array();
    for (const auto& reg : r.abstraction.regions()) {
        nlohmann::ordered_json e;
        e["id"] = reg.id;
        e["parent"] = reg.parent ? nlohmann::ordered_json(*reg.parent) : nlohmann::ordered_json(nullptr);
        e["cubes"] = set_to_json(reg.extent);
        regions.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

// Abstraction and function list of an earlier run; the graph is rebuilt by
// the caller.
inline ExploreResult state_from_json(const SymbolicLibrary& lib, const std::string& text)
{
    ExploreResult r;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("model").get<std::string>() != lib.module().name)
            throw SemanticError("state file belongs to module '" + j.at("model").get<std::string>() + "'");
        r.functions = j.at("functions").get<std::vector<std::string>>();
        std::vector<Region> regions;
        auto covered = ValuationSet::empty(lib.global_space());
        for (const auto& e : j.at("regions")) {
            Region reg;
            reg.id = e.at("id").get<RegionId>();
            if (!e.at("parent").is_null())
                reg.parent = e.at("parent").get<RegionId>();
            reg.extent = set_from_json(lib, lib.global_space(), e.at("cubes"));
            if (reg.extent.is_empty() || reg.extent.intersects(covered))
                throw SemanticError("state file regions do not form a partition");
            covered = covered | reg.extent;
            regions.push_back(std::move(reg));
        }
        if (!covered.is_full())
            throw SemanticError("state file regions do not cover the global state space");
        r.abstraction = Abstraction(lib.global_space(), std::move(regions), j.at("next_id").get<RegionId>());
    } catch (const nlohmann::json::exception& e) {
        throw SemanticError(std::string("malformed state file: ") + e.what());
    }
    check_function_list(lib, r.functions);
    return r;
}

// -- commands ------------------------------------------------------------------

struct Loaded {
    std::shared_ptr<const SymbolicLibrary> lib;
    std::vector<std::string> functions;
};

inline Loaded load(const RunConfig& c)
{
    Loaded l;
    l.lib = load_library(read_file(c.model_path));
    l.functions = c.functions ? *c.functions : all_functions(*l.lib);
    check_function_list(*l.lib, l.functions);
    return l;
}

// One-phase exploration, or a continuation of the run stored in the
// incremental state file (which is then updated).
inline ExploreResult explore_configured(const SymbolicLibrary& lib, const std::vector<std::string>& functions,
                                        const RunConfig& c)
{
    const RefinementOptions options{c.use_rule_partition};
    if (c.incremental_path.empty())
        return explore(lib, functions, std::nullopt, options);

    ExploreResult r;
    if (std::filesystem::exists(c.incremental_path)) {
        const auto prev = state_from_json(lib, read_file(c.incremental_path));
        std::vector<std::string> added;
        for (const auto& f : functions)
            if (std::find(prev.functions.begin(), prev.functions.end(), f) == prev.functions.end())
                added.push_back(f);
        r = explore_incremental(lib, prev, added, options);
    } else {
        r = explore(lib, functions, std::nullopt, options);
    }
    write_file(c.incremental_path, state_to_json(lib, r));
    return r;
}

inline std::string render(const InterfaceGraph& g, const std::string& format)
{
    if (format == "dot")
        return to_dot(g);
    if (format == "json")
        return to_json(g);
    throw Error("unknown format '" + format + "' (expected dot or json)");
}

template <typename Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    }
}

inline int cmd_build(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const auto t0 = std::chrono::steady_clock::now();
        auto l = load(c);
        auto r = explore_configured(*l.lib, l.functions, c);
        const auto text = render(r.graph, c.format);
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

        std::ostringstream summary;
        summary << "regions=" << r.abstraction.size() << " non_error_nodes=" << r.graph.non_error_count()
                << " nodes=" << r.graph.nodes.size() << " edges=" << r.graph.edges.size() << " time_ms="
                << std::fixed << std::setprecision(1) << ms << "\n";
        if (c.out_path.empty()) {
            out << text;
            err << summary.str();
        } else {
            write_file(c.out_path, text);
            out << summary.str();
        }
        return 0;
    });
}

inline std::vector<std::string> read_sequence(const std::string& path)
{
    std::vector<std::string> seq;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        const auto e = line.find_last_not_of(" \t\r");
        seq.push_back(line.substr(b, e - b + 1));
    }
    return seq;
}

inline int cmd_check_client(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        auto l = load(c);
        const auto seq = read_sequence(c.sequence_path);
        auto r = explore_configured(*l.lib, l.functions, c);
        const auto v = simulate_client(r.graph, seq);
        out << oracle::verdict_text(v) << "\n";
        return v.legal ? 0 : kExitIllegal;
    });
}

inline int cmd_gen_tests(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        if (c.depth == 0)
            throw Error("--depth must be at least 1");
        auto l = load(c);
        auto r = explore_configured(*l.lib, l.functions, c);
        const auto text = format_tests(gen_tests(r.graph, c.depth));
        if (c.out_path.empty())
            out << text;
        else
            write_file(c.out_path, text);
        return 0;
    });
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        if (c.depth == 0)
            throw Error("--depth must be at least 1");
        auto l = load(c);
        InterfaceGraph g;
        if (!c.graph_path.empty()) {
            try {
                g = graph_from_json(nlohmann::json::parse(read_file(c.graph_path)));
            } catch (const nlohmann::json::exception& e) {
                throw SemanticError(std::string("malformed interface graph: ") + e.what());
            }
            for (const auto& f : g.functions)
                l.lib->function(f);
        } else {
            g = explore_configured(*l.lib, l.functions, c).graph;
        }
        oracle::ExplicitLibrary ex(l.lib->module(), c.state_cap);
        const auto report = oracle::check_interface(ex, g, c.depth);
        const auto text = oracle::to_json_value(report).dump(2) + "\n";
        if (c.out_path.empty())
            out << text;
        else
            write_file(c.out_path, text);
        err << (report.ok() ? "interface is safe and permissive" : "interface violates the concrete semantics")
            << " up to depth " << c.depth << " (" << report.sequences_checked << " sequences)\n";
        return report.ok() ? 0 : kExitViolations;
    });
}

// Runs one function explicitly from a single entry state. Unassigned
// variables take the lowest value of their range (locals their entry value).
inline int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        auto l = load(c);
        const auto* f = l.lib->module().find_function(c.function);
        if (!f)
            throw SemanticError("unknown function '" + c.function + "'");
        const auto vars = scoped_vars(*f, l.lib->module());
        oracle::State x;
        for (const auto& v : vars)
            x.push_back(v.scope == Scope::local ? std::max<Value>(0, v.lo) : v.lo);
        for (const auto& a : c.assignments) {
            const auto eq = a.find('=');
            if (eq == std::string::npos)
                throw Error("expected name=value, got '" + a + "'");
            const auto name = a.substr(0, eq);
            Value value = 0;
            try {
                value = std::stoll(a.substr(eq + 1));
            } catch (const std::exception&) {
                throw Error("expected an integer value in '" + a + "'");
            }
            auto it = std::find_if(vars.begin(), vars.end(), [&](const VarDecl& v) { return v.name == name; });
            if (it == vars.end() || it->scope == Scope::local)
                throw SemanticError("'" + name + "' is not a global or input of " + c.function);
            if (value < it->lo || value > it->hi)
                throw SemanticError("value of '" + name + "' out of range");
            x[static_cast<std::size_t>(it - vars.begin())] = value;
        }
        oracle::ExplicitLibrary ex(l.lib->module(), c.state_cap);
        const oracle::State globals(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(l.lib->module().globals.size()));
        if (!ex.is_init(globals))
            err << "warning: entry globals do not satisfy the init predicate\n";
        for (const auto& s : ex.run_from(c.function, {x})) {
            for (std::size_t i = 0; i < vars.size(); ++i)
                out << (i ? " " : "") << vars[i].name << "=" << s[i];
            out << "\n";
        }
        return 0;
    });
}

} // namespace ifsynth::cli
