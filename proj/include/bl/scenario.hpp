// Scenario runner: executes a named experiment pipeline from a config and
// emits machine-readable reports.

#ifndef BL_SCENARIO_HPP
#define BL_SCENARIO_HPP

#include <string>
#include <vector>

#include "bl/config.hpp"

namespace bl::scenario {

struct RunOptions {
    int threads = 1;
    std::string out_dir; // empty: current directory
};

struct Assertion {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
};

struct RunResult {
    std::string name;
    bool pass = true;
    std::vector<Assertion> assertions;
    std::string report_json;       // deterministic; timings are kept apart
    std::vector<std::string> files_written;
};

// exit code semantics: 0 pass, 1 assertion failed, 2 config error, 3 runtime
RunResult run(const config::Config& cfg, const RunOptions& opt);

struct Bundled {
    std::string name;
    std::string anchor; // which statement the scenario exercises
    std::string text;   // the config source
};

const std::vector<Bundled>& bundled_scenarios();
const Bundled* find_bundled(const std::string& name);

} // namespace bl::scenario

#endif
