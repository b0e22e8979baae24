#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "mfgfb/problem.hpp"
#include "mfgfb/solver.hpp"

namespace mfgfb {

// Raw key = value sections of a problem config file.
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

ConfigSections parse_ini(const std::filesystem::path& path);

struct GridConfig {
    int ny = 65;
    int nt = 65;
    Grading grading = Grading::SqrtGraded;
};

struct ValidationParams {
    double C0 = 2.0;
    double K0 = 10.0;
    double delta = 0.25;
};

struct RunSetup {
    ProblemSpec problem;
    GridConfig grid;
    SolverConfig solver;
    ValidationParams validation;
};

// Builds a problem from the [coupling]/[initial]/[terminal]/[grid] sections.
// Profile references are either built-in names with params or CSV sample
// tables resolved relative to the config file.
RunSetup load_run_setup(const std::filesystem::path& config_path);

}  // namespace mfgfb
