// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "helpers.hpp"
#include "ifsynth/cli.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace ifsynth;

namespace {

// Time limits, in seconds.
constexpr double kIntStackLimit = 1.0;
constexpr double kRegionCountLimit = 5.0;
constexpr double kVerifyLimit = 60.0;
constexpr double kPropertyLimit = 60.0;
constexpr double kFibonacciLimit = 30.0;

constexpr std::size_t kVerifyDepth = 6;
constexpr int kRandomModels = 100;
constexpr int kPairsPerModel = 20;
constexpr unsigned kSuiteSeed = 2024;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string seconds(double s)
{
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << s << "s";
    return os.str();
}

int failures = 0;

void report(int n, bool ok, const std::string& detail)
{
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << detail << std::endl;
    if (!ok)
        ++failures;
}

// Runs a criterion, turning an unexpected diagnostic into a FAIL line.
void criterion(int n, const std::function<void()>& body)
{
    try {
        body();
    } catch (const std::exception& e) {
        report(n, false, std::string("unexpected error: ") + e.what());
    }
}

std::size_t non_error_regions(const SymbolicLibrary& lib, const Abstraction& a)
{
    return a.size() - abs_under(a, lib.error_set()).size();
}

void intstack()
{
    const auto t0 = Clock::now();
    const auto lib = testing::bundled_library("intstack.gu");
    const auto r = explore(*lib, all_functions(*lib));
    const double t = since(t0);

    auto node = [&](const char* pred) -> std::optional<std::size_t> {
        const auto x = testing::predicate(*lib, nullptr, pred);
        for (const auto& n : r.graph.nodes)
            if (!n.error && n.regions.size() == 1 && r.abstraction.region(n.regions[0]).extent == x)
                return n.id;
        return std::nullopt;
    };
    const auto n0 = node("err=0 & top=0"), n1 = node("err=0 & top=1"), n2 = node("err=0 & top=2");
    bool ok = r.graph.non_error_count() == 3 && n0 && n1 && n2;
    if (ok) {
        std::set<std::tuple<std::size_t, std::string, std::size_t, bool>> got, want{
            {*n0, "push", *n1, false}, {*n0, "pop", 0, true},  {*n1, "push", *n2, false},
            {*n1, "pop", *n0, false},  {*n2, "push", 0, true}, {*n2, "pop", *n1, false},
        };
        for (const auto& e : r.graph.edges)
            got.insert({e.from, e.fn, e.to, e.error});
        ok = got == want && r.graph.edges.size() == 6 && r.graph.initial_nodes() == std::vector<std::size_t>{*n0};
    }
    report(1, ok && t < kIntStackLimit,
           "capacity-2 stack: " + std::to_string(r.graph.non_error_count()) + " non-error nodes, "
               + std::to_string(r.graph.edges.size()) + " edges, " + (ok ? "isomorphic" : "NOT isomorphic")
               + " to the expected graph, " + seconds(t) + " (limit " + seconds(kIntStackLimit) + ")");
}

void region_counts(int n, const std::vector<std::string>& files)
{
    bool ok = true;
    std::string detail;
    for (const auto& file : files) {
        const auto t0 = Clock::now();
        const auto lib = testing::bundled_library(file);
        const auto r = explore(*lib, all_functions(*lib));
        const double t = since(t0);
        const auto regions = non_error_regions(*lib, r.abstraction);
        ok = ok && regions == 2 && r.graph.non_error_count() == 2 && t < kRegionCountLimit;
        detail += (detail.empty() ? "" : ", ") + file + " regions=" + std::to_string(regions)
                  + " nodes=" + std::to_string(r.graph.non_error_count()) + " " + seconds(t);
    }
    report(n, ok, detail + " (expected 2 each, limit " + seconds(kRegionCountLimit) + ")");
}

void oracle_equivalence()
{
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (const char* file : {"intstack.gu", "datastream_h2_d4.gu", "bitarray_k4.gu"}) {
        const auto lib = testing::bundled_library(file);
        const oracle::ExplicitLibrary ex(lib->module());
        const auto rep = oracle::check_interface(ex, explore(*lib, all_functions(*lib)).graph, kVerifyDepth);
        ok = ok && rep.ok();
        detail += std::string(detail.empty() ? "" : ", ") + file + " safe="
                  + std::to_string(rep.safe_violations.size()) + " permissive="
                  + std::to_string(rep.permissive_violations.size()) + " over "
                  + std::to_string(rep.sequences_checked) + " sequences";
    }
    const double t = since(t0);
    report(4, ok && t < kVerifyLimit,
           "verify L=" + std::to_string(kVerifyDepth) + ": " + detail + ", " + seconds(t) + " (limit "
               + seconds(kVerifyLimit) + ")");
}

// Criteria 5 and 6 share one random suite.
void random_suite()
{
    const auto t0 = Clock::now();
    testing::RandomModels gen(kSuiteSeed);
    int containment_failures = 0, precision_failures = 0, one_step_failures = 0, pairs = 0;
    for (int m = 0; m < kRandomModels; ++m) {
        const auto lib = gen.library();
        const auto& f = lib->functions()[0];
        const auto single = singleton_blocks(*lib, f);
        for (int k = 0; k < kPairsPerModel; ++k, ++pairs) {
            const auto a = gen.abstraction(*lib, f);
            const auto x = gen.subset(a.all_ids());
            const auto exact = pre_star(*lib, f, concretize(a, x));
            const auto grouped = partition_rules(*lib, f, a);
            for (const auto* p : {&grouped, &single})
                if (!concretize(a, pre_must_approx(*lib, a, *p, x)).subset_of(exact)
                    || !exact.subset_of(concretize(a, pre_may_approx(*lib, a, *p, x))))
                    ++containment_failures;
            if (pre_may_approx(*lib, a, single, x) != abs_over(a, exact))
                ++precision_failures;
            // the one-step operator, reported alongside the fixpoint
            if (pre_one_may_approx(*lib, a, single, x) != abs_over(a, pre_one(*lib, f, concretize(a, x))))
                ++one_step_failures;
        }
    }
    const double t = since(t0);
    const std::string suite = std::to_string(kRandomModels) + " models x " + std::to_string(kPairsPerModel)
                              + " pairs (seed " + std::to_string(kSuiteSeed) + ")";
    report(5, containment_failures == 0 && t < kPropertyLimit,
           "must/exact/may containment on " + suite + ": " + std::to_string(containment_failures)
               + " violations, " + seconds(t) + " (limit " + seconds(kPropertyLimit) + ")");
    report(6, precision_failures == 0,
           "singleton-block may predecessors equal abs_over(pre_star) on " + suite + ": "
               + std::to_string(pairs - precision_failures) + "/" + std::to_string(pairs)
               + " pairs equal (one-step operator: " + std::to_string(pairs - one_step_failures) + "/"
               + std::to_string(pairs) + ")");
}

void rule_partition()
{
    const auto lib = load_library("module HdData:\n  var hd : bool\n  var indata : [0..3]\ninit: err=0\n"
                                  "function read() {\n  hd ==> indata'=0 & hd'=0;\n  !hd ==> indata'=0;\n}\n"
                                  "endmodule\n");
    const auto& f = lib->function("read");
    const auto a = split_by_variable(initial_abstraction(*lib).lifted(f.space), f.scope.at("indata"));
    const auto x = abs_under(a, testing::predicate(*lib, &f, "indata=0"));
    const auto single = pre_one_must_approx(*lib, a, singleton_blocks(*lib, f), x);
    const auto merged = pre_one_must_approx(*lib, a, make_partition(*lib, f, {{0, 1}}), x);
    const auto grouped = partition_rules(*lib, f, a).blocks.size();
    report(7, single.empty() && merged == a.all_ids() && grouped == 1,
           "hd/indata must-pre of indata=0: singleton blocks " + std::to_string(single.size()) + " of "
               + std::to_string(a.size()) + " regions, merged block " + std::to_string(merged.size()) + " of "
               + std::to_string(a.size()) + " (grouping criterion builds " + std::to_string(grouped) + " block)");
}

void fibonacci()
{
    const auto t0 = Clock::now();
    const auto module = parse_library(bundled::all().at("fibonacci.gu"));
    const oracle::ExplicitLibrary ex(module);
    const auto vars = scoped_vars(*module.find_function("fib"), module);
    auto at = [&](const std::string& name) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i].name == name)
                return i;
        throw std::logic_error("no variable " + name);
    };
    oracle::State start(vars.size(), 0);
    start[at("n")] = 7;
    const auto ends = ex.run_from("fib", {start});
    const Value res = ends.size() == 1 ? (*ends.begin())[at("res")] : -1;

    // fib(7) from the recursive definition
    std::function<Value(Value)> fib = [&](Value n) { return n <= 2 ? 1 : fib(n - 1) + fib(n - 2); };

    const auto lib = std::make_shared<const SymbolicLibrary>(module);
    validate(*lib);
    std::string outcome;
    bool built = false;
    try {
        const auto r = explore(*lib, {"fib"});
        built = true;
        outcome = std::to_string(r.graph.non_error_count()) + " non-error nodes";
    } catch (const NonTermination& e) {
        outcome = std::string("non-termination: ") + e.what();
    }
    const double t = since(t0);
    report(8, res == fib(7) && built && t < kFibonacciLimit,
           "fibonacci parses, fib(7) simulates to res=" + std::to_string(res) + " (expected "
               + std::to_string(fib(7)) + "), interface over {fib}: " + outcome + ", " + seconds(t) + " (limit "
               + seconds(kFibonacciLimit) + ")");
}

std::string cli_build(const std::string& model_path)
{
    const auto out = std::filesystem::temp_directory_path() / ("ifsynth_acceptance_" + std::to_string(::getpid()));
    const auto cmd = std::string(IFSYNTH_CLI_PATH) + " build --format json " + model_path + " >" + out.string()
                     + " 2>/dev/null";
    if (std::system(cmd.c_str()) != 0)
        throw std::runtime_error("cli build failed on " + model_path);
    auto text = cli::read_file(out.string());
    std::filesystem::remove(out);
    return text;
}

void determinism()
{
    std::vector<std::string> mismatches;
    std::size_t models = 0;
    for (const auto& [file, text] : bundled::all()) {
        ++models;
        const auto fns = all_functions(*load_library(text));
        const auto one = explore(*load_library(text), fns);
        const auto again = explore(*load_library(text), fns);
        if (to_dot(one.graph) != to_dot(again.graph) || to_json(one.graph) != to_json(again.graph))
            mismatches.push_back(file + " (repeat)");

        const auto half = fns.size() / 2;
        const auto lib = load_library(text);
        const auto first = explore(*lib, {fns.begin(), fns.begin() + static_cast<std::ptrdiff_t>(half)});
        const auto two = explore_incremental(*lib, first, {fns.begin() + static_cast<std::ptrdiff_t>(half), fns.end()});
        if (to_dot(two.graph) != to_dot(one.graph) || to_json(two.graph) != to_json(one.graph)
            || cli::state_to_json(*lib, two) != cli::state_to_json(*lib, explore(*lib, fns)))
            mismatches.push_back(file + " (incremental)");

        // byte-identical process output
        const auto path = std::string(IFSYNTH_MODELS_DIR) + "/" + file;
        if (cli_build(path) != cli_build(path))
            mismatches.push_back(file + " (cli repeat)");
    }
    std::string detail;
    for (const auto& m : mismatches)
        detail += " " + m;
    report(9, mismatches.empty(),
           "repeat and incremental builds on " + std::to_string(models) + " bundled models: "
               + (mismatches.empty() ? std::string("all identical") : "mismatches:" + detail));
}

} // namespace

int main()
{
    criterion(1, intstack);
    criterion(2, [] { region_counts(2, {"datastream_h2_d4.gu", "datastream_h2_d6.gu", "datastream_h3_d6.gu"}); });
    criterion(3, [] { region_counts(3, {"bitarray_k4.gu", "bitarray_k6.gu"}); });
    criterion(4, oracle_equivalence);
    criterion(5, random_suite);
    criterion(7, rule_partition);
    criterion(8, fibonacci);
    criterion(9, determinism);
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
