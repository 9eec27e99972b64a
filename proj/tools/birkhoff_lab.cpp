// birkhoff-lab: scenario runner and report generator.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "bl/scenario.hpp"
#include "bl/surgery.hpp"

#include <json.hpp>

namespace {

int run_scenario(const std::string& target, int threads, std::string out_dir) {
    using namespace bl;
    if (out_dir.empty()) {
        if (const char* env = std::getenv("BIRKHOFF_LAB_OUT")) out_dir = env;
    }
    try {
        config::Config cfg;
        if (const scenario::Bundled* b = scenario::find_bundled(target)) {
            cfg = config::parse(b->text);
        } else {
            cfg = config::parse_file(target);
        }
        scenario::RunOptions opt;
        opt.threads = threads;
        opt.out_dir = out_dir;
        const scenario::RunResult res = scenario::run(cfg, opt);
        for (const auto& a : res.assertions)
            std::cout << (a.pass ? "pass" : "FAIL") << "  " << a.name << "  value=" << a.value
                      << " bound=" << a.bound << "\n";
        std::cout << (res.pass ? "scenario passed" : "scenario FAILED") << ": " << res.name
                  << "\n";
        return res.pass ? 0 : 1;
    } catch (const bl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    }
}

int run_surgery(const std::string& cfg_path) {
    try {
        std::ifstream f(cfg_path);
        if (!f) {
            std::cerr << "config error: cannot open " << cfg_path << "\n";
            return 2;
        }
        nlohmann::json j;
        f >> j;
        bl::surgery::CurveConfiguration cfg;
        cfg.genus = j.value("genus", 1);
        cfg.intersections = j.at("intersection_matrix").get<std::vector<std::vector<int>>>();
        cfg.n = int(cfg.intersections.size());
        cfg.tag = j.value("pattern", std::string("general")) == "chain"
                      ? bl::surgery::PatternTag::Chain2G
                      : bl::surgery::PatternTag::General;
        const bl::surgery::SectionTopology topo = bl::surgery::fried_surgery_topology(cfg);
        std::cout << topo.to_json() << "\n";
        return 0;
    } catch (const bl::InvalidPattern& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"birkhoff-lab: geodesic-flow surfaces of section at desk scale"};
    app.require_subcommand(1);

    std::string scenario_name;
    int threads = 1;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "run a bundled scenario or a config file");
    run->add_option("scenario", scenario_name, "bundled name or path")->required();
    run->add_option("--threads", threads, "worker count (must not change results)");
    run->add_option("--out", out_dir, "output directory for reports");

    auto* list = app.add_subcommand("list", "list bundled scenarios");

    std::string describe_name;
    auto* describe = app.add_subcommand("describe", "describe a bundled scenario");
    describe->add_option("name", describe_name, "bundled scenario name")->required();

    std::string surgery_cfg;
    auto* surgery = app.add_subcommand("surgery", "surface-of-section topology from JSON");
    surgery->add_option("--config", surgery_cfg, "JSON file {genus, intersection_matrix}")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_scenario(scenario_name, threads, out_dir);
    if (list->parsed()) {
        for (const auto& b : bl::scenario::bundled_scenarios())
            std::cout << b.name << "  --  " << b.anchor << "\n";
        return 0;
    }
    if (describe->parsed()) {
        const bl::scenario::Bundled* b = bl::scenario::find_bundled(describe_name);
        if (!b) {
            std::cerr << "config error: no bundled scenario named '" << describe_name << "'\n";
            return 2;
        }
        std::cout << b->name << "\nexercises: " << b->anchor << "\n\n" << b->text;
        return 0;
    }
    if (surgery->parsed()) return run_surgery(surgery_cfg);
    return 2;
}
