#include "helpers.hpp"

#include <catch_amalgamated.hpp>

using namespace ifsynth;

namespace {

using Calls = std::vector<std::string>;

const std::shared_ptr<const SymbolicLibrary>& library(const std::string& file)
{
    static std::map<std::string, std::shared_ptr<const SymbolicLibrary>> cache;
    auto& lib = cache[file];
    if (!lib)
        lib = testing::bundled_library(file);
    return lib;
}

const ExploreResult& intstack()
{
    static const auto result = explore(*library("intstack.gu"), {"push", "pop"});
    return result;
}

const ExploreResult& bitarray()
{
    static const auto result = explore(*library("bitarray_k4.gu"), all_functions(*library("bitarray_k4.gu")));
    return result;
}

// Node whose single region has the given extent.
std::size_t node_of(const InterfaceGraph& g, const Abstraction& a, const ValuationSet& extent)
{
    for (const auto& n : g.nodes)
        if (n.regions.size() == 1 && a.region(n.regions[0]).extent == extent)
            return n.id;
    FAIL("no node for " << describe(extent));
    return 0;
}

} // namespace

TEST_CASE("abstract post of push and pop")
{
    const auto& lib = library("intstack.gu");
    const auto& a = intstack().abstraction;
    auto g = [&](const char* p) { return testing::predicate(*lib, nullptr, p); };
    const auto empty = abs_under(a, g("err=0 & top=0"));
    const auto one = abs_under(a, g("err=0 & top=1"));
    const auto full = abs_under(a, g("err=0 & top=2"));
    const auto err = abs_under(a, g("err=1"));
    const auto& push = lib->function("push");
    const auto& pop = lib->function("pop");

    CHECK(post_abstract(*lib, push, a, empty) == one);
    CHECK(post_abstract(*lib, pop, a, empty) == err);
    CHECK(post_abstract(*lib, push, a, full) == err);
    CHECK(post_abstract(*lib, pop, a, one) == empty);
    CHECK(post_abstract(*lib, pop, a, set_union(one, full)) == set_union(empty, one));
    CHECK(post_abstract(*lib, push, a, {}).empty());
    // the error set is closed
    CHECK(post_abstract(*lib, pop, a, err) == err);

    CHECK(concrete_returns(*lib, push, g("err=0 & top=1")) == g("err=0 & top=2"));
}

TEST_CASE("a looping function is reported with its interface node")
{
    const auto lib = load_library("module Loop:\n var x : [0..1]\ninit: err=0\n"
                                  "function spin() {\n  s=0 ==> s'=1;\n  s=1 ==> s'=0;\n}\nendmodule\n");
    try {
        explore(*lib, {"spin"});
        FAIL("expected non-termination");
    } catch (const NonTermination& e) {
        CHECK(e.exit_code() == 4);
        CHECK(std::string(e.what()).find("spin") != std::string::npos);
        CHECK(std::string(e.what()).find("interface node 1") != std::string::npos);
    }
}

TEST_CASE("capacity-two stack graph")
{
    const auto& lib = library("intstack.gu");
    const auto& [a, g, fns, trace] = intstack();
    auto p = [&](const char* text) { return testing::predicate(*lib, nullptr, text); };
    REQUIRE(g.nodes.size() == 4);
    CHECK(g.nodes[0].error);
    CHECK(g.non_error_count() == 3);
    const auto n0 = node_of(g, a, p("err=0 & top=0"));
    const auto n1 = node_of(g, a, p("err=0 & top=1"));
    const auto n2 = node_of(g, a, p("err=0 & top=2"));
    CHECK(g.initial_nodes() == std::vector<std::size_t>{n0});

    std::set<std::tuple<std::size_t, std::string, std::size_t, bool>> got, want{
        {n0, "push", n1, false}, {n0, "pop", 0, true},   {n1, "push", n2, false},
        {n1, "pop", n0, false},  {n2, "push", 0, true},  {n2, "pop", n1, false},
    };
    for (const auto& e : g.edges)
        got.insert({e.from, e.fn, e.to, e.error});
    CHECK(got == want);
    CHECK(g.edges.size() == 6);
}

TEST_CASE("bit array graph")
{
    const auto& lib = library("bitarray_k4.gu");
    const auto& [a, g, fns, trace] = bitarray();
    auto p = [&](const char* text) { return testing::predicate(*lib, nullptr, text); };
    CHECK(g.non_error_count() == 2);
    const auto invalid = node_of(g, a, p("err=0 & valid=0"));
    const auto valid = node_of(g, a, p("err=0 & valid=1"));
    CHECK(g.initial_nodes() == std::vector<std::size_t>{invalid});
    CHECK(g.find_edge(invalid, "modify", true));
    CHECK_FALSE(g.find_edge(invalid, "modify", false));
    CHECK(g.find_edge(valid, "modify", false)->to == invalid);
    CHECK(g.find_edge(invalid, "next", false)->to == valid);
    CHECK(g.find_edge(valid, "access", false)->to == invalid);
}

TEST_CASE("client verdicts")
{
    const auto& g = intstack().graph;
    CHECK(simulate_client(g, {}) == ClientVerdict{true, 0});
    CHECK(simulate_client(g, {"push", "pop"}) == ClientVerdict{true, 0});
    CHECK(simulate_client(g, {"pop"}) == ClientVerdict{false, 1});
    CHECK(simulate_client(g, {"push", "pop", "pop"}) == ClientVerdict{false, 3});
    CHECK(simulate_client(g, {"push", "push", "push", "pop"}) == ClientVerdict{false, 3});
    CHECK(simulate_client(g, {"push", "push", "pop", "push", "pop", "pop"}) == ClientVerdict{true, 0});
    CHECK_THROWS_AS(simulate_client(g, {"peek"}), SemanticError);
}

TEST_CASE("generated test suites")
{
    const auto tests = gen_tests(bitarray().graph, 2);
    REQUIRE(tests.size() == 16);
    CHECK(tests[0] == TestCase{{"next"}, true});
    CHECK(tests[3] == TestCase{{"modify"}, false});
    CHECK(tests[7] == TestCase{{"next", "modify"}, true});
    CHECK(tests.back() == TestCase{{"access", "modify"}, false});
    CHECK(format_tests({tests[3], tests[7]}) == "ILLEGAL: modify\nLEGAL: next modify\n");
    CHECK_THROWS_AS(gen_tests(bitarray().graph, 0), std::invalid_argument);

    for (const auto* r : {&intstack(), &bitarray()}) {
        const auto suite = gen_tests(r->graph, 4);
        std::set<Calls> seen;
        std::size_t last_len = 0;
        for (const auto& t : suite) {
            CHECK(seen.insert(t.calls).second);
            CHECK(t.calls.size() >= last_len);
            last_len = t.calls.size();
            const auto v = simulate_client(r->graph, t.calls);
            CHECK(v.legal == t.legal);
            // illegal tests are minimal: the error happens at the last call
            if (!t.legal)
                CHECK(v.step == t.calls.size());
        }
    }
}

TEST_CASE("graph export")
{
    const auto& g = intstack().graph;
    const auto dot = to_dot(g);
    CHECK(dot.rfind("digraph interface {", 0) == 0);
    CHECK(dot.find("ERROR") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
    CHECK(dot.find("peripheries=2") != std::string::npos);
    CHECK(dot == to_dot(explore(*testing::bundled_library("intstack.gu"), {"push", "pop"}).graph));

    const auto json = to_json(g);
    const auto back = graph_from_json(nlohmann::json::parse(json));
    CHECK(back.edges == g.edges);
    CHECK(back.functions == g.functions);
    CHECK(back.initial_nodes() == g.initial_nodes());
    CHECK(to_json(back) == json);
    CHECK(to_dot(back) == dot);

    auto broken = nlohmann::json::parse(json);
    broken["edges"][0]["to"] = 17;
    CHECK_THROWS_AS(graph_from_json(broken), SemanticError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse("[1, 2]")), SemanticError);
}

TEST_CASE("library without functions")
{
    const auto lib = testing::bundled_library("empty.gu");
    const auto r = explore(*lib, {});
    CHECK(r.abstraction.size() == 2);
    CHECK(r.graph.non_error_count() == 1);
    CHECK(r.graph.edges.empty());
    CHECK(simulate_client(r.graph, {}).legal);
    CHECK(gen_tests(r.graph, 3).empty());
    CHECK(to_json(graph_from_json(nlohmann::json::parse(to_json(r.graph)))) == to_json(r.graph));
}
