#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "knowmesh/errors.hpp"
#include "knowmesh/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

// lexicon resolution: KNOWMESH_LEXICON wins, then the scenario's [lexicon]
// file relative to the scenario location
knowmesh::Lexicon resolve_lexicon(const knowmesh::Scenario& scenario,
                                  const std::string& scenario_path) {
    std::string path;
    if (const char* env = std::getenv("KNOWMESH_LEXICON"); env && *env) {
        path = env;
    } else if (!scenario.lexicon_file.empty()) {
        std::filesystem::path p(scenario.lexicon_file);
        if (p.is_relative()) p = std::filesystem::path(scenario_path).parent_path() / p;
        path = p.string();
    }
    if (path.empty()) return {};
    return knowmesh::load_lexicon(read_file(path));
}

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowmesh: deterministic simulator for machine-to-machine knowledge exchange"};
    app.require_subcommand(1);

    std::string scenario_path, store_path, trace_path, dump_dir;
    std::uint64_t seed = 0;
    std::int64_t until = 0;
    bool seed_given = false, until_given = false;

    CLI::App* run = app.add_subcommand("run", "run a scenario and print its trace");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--until", until, "stop at this tick instead of the scenario duration")
        ->each([&](const std::string&) { until_given = true; });
    run->add_option("--trace", trace_path, "write the trace to this file instead of stdout");
    run->add_option("--dump-dir", dump_dir, "write each node's final store into this directory");

    CLI::App* dump = app.add_subcommand("dump", "re-serialize a store file canonically");
    dump->add_option("store", store_path, "store file")->required();

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", scenario_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            knowmesh::Scenario scenario;
            knowmesh::Lexicon lexicon;
            try {
                scenario = knowmesh::load_scenario(read_file(scenario_path));
                lexicon = resolve_lexicon(scenario, scenario_path);
            } catch (const std::runtime_error& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitInvalid;
            }
            knowmesh::RunOptions options;
            if (seed_given) options.seed = seed;
            if (until_given) options.until = until;
            knowmesh::RunResult result = knowmesh::run_scenario(scenario, lexicon, options);
            if (trace_path.empty())
                std::cout << result.trace_text;
            else
                write_file(trace_path, result.trace_text);
            if (!dump_dir.empty()) {
                std::filesystem::create_directories(dump_dir);
                for (const auto& [node, store] : result.stores)
                    write_file((std::filesystem::path(dump_dir) / (node + ".store")).string(),
                               knowmesh::dump_store(store));
            }
            return kExitOk;
        }
        if (dump->parsed()) {
            try {
                knowmesh::KnowledgeStore store =
                    knowmesh::deserialize_store(read_file(store_path));
                std::cout << knowmesh::serialize_store(store);
            } catch (const std::runtime_error& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitInvalid;
            }
            return kExitOk;
        }
        if (validate->parsed()) {
            try {
                knowmesh::Scenario scenario = knowmesh::load_scenario(read_file(scenario_path));
                knowmesh::Lexicon lexicon = resolve_lexicon(scenario, scenario_path);
                for (const std::string& warning :
                     knowmesh::vocabulary_warnings(scenario, lexicon))
                    std::cerr << "warning: " << warning << "\n";
                std::cout << "ok\n";
            } catch (const std::runtime_error& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitInvalid;
            }
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
