// ifsynth: interface synthesis for guarded-update libraries.

#include "ifsynth/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace ifsynth::cli;

    CLI::App app{"Synthesise safe and permissive interface graphs for guarded-update libraries"};
    app.require_subcommand(1);

    RunConfig config;
    std::string functions;
    bool no_partition = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("model", config.model_path, "Library source (.gu)")->required();
        sub->add_option("--functions", functions, "Comma-separated functions to include, in order (default: all)");
        sub->add_flag("--no-rule-partition", no_partition, "Use one rule block per rule");
        sub->add_option("--incremental", config.incremental_path,
                        "Continue from and update an abstraction state file");
    };

    auto* build = app.add_subcommand("build", "Build the interface graph");
    common(build);
    build->add_option("--out", config.out_path, "Graph output file (default: stdout)");
    build->add_option("--format", config.format, "Graph format")->check(CLI::IsMember({"dot", "json"}));

    auto* client = app.add_subcommand("check-client", "Check a call sequence (one function per line)");
    common(client);
    client->add_option("sequence", config.sequence_path, "Call sequence file")->required();

    auto* tests = app.add_subcommand("gen-tests", "Generate legal and illegal call sequences");
    common(tests);
    tests->add_option("--depth", config.depth, "Maximum sequence length")->check(CLI::PositiveNumber);
    tests->add_option("--out", config.out_path, "Output file (default: stdout)");

    auto* verify = app.add_subcommand("verify", "Check the interface against the explicit semantics");
    common(verify);
    verify->add_option("--depth", config.depth, "Maximum sequence length")->check(CLI::PositiveNumber);
    verify->add_option("--state-cap", config.state_cap, "Largest explicit state space to enumerate");
    verify->add_option("--graph", config.graph_path, "Certify this JSON graph instead of building one");
    verify->add_option("--out", config.out_path, "Report output file (default: stdout)");

    auto* simulate = app.add_subcommand("simulate", "Run one function on a concrete entry state");
    simulate->add_option("model", config.model_path, "Library source (.gu)")->required();
    simulate->add_option("function", config.function, "Function to run")->required();
    simulate->add_option("--set", config.assignments, "Entry value of a global or input, name=value");
    simulate->add_option("--state-cap", config.state_cap, "Largest number of states to explore");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (auto* sub : {build, client, tests, verify})
        if (sub->parsed() && sub->count("--functions"))
            config.functions = split_list(functions);
    config.use_rule_partition = !no_partition;

    if (build->parsed())
        return cmd_build(config, std::cout, std::cerr);
    if (client->parsed())
        return cmd_check_client(config, std::cout, std::cerr);
    if (tests->parsed())
        return cmd_gen_tests(config, std::cout, std::cerr);
    if (verify->parsed())
        return cmd_verify(config, std::cout, std::cerr);
    return cmd_simulate(config, std::cout, std::cerr);
}
