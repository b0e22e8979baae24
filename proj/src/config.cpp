#include "mfgfb/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mfgfb/io.hpp"

namespace mfgfb {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const std::map<std::string, std::string>* section(const ConfigSections& c,
                                                  const std::string& name) {
    const auto it = c.find(name);
    return it == c.end() ? nullptr : &it->second;
}

std::optional<std::string> get(const std::map<std::string, std::string>* sec,
                               const std::string& key) {
    if (!sec) return std::nullopt;
    const auto it = sec->find(key);
    if (it == sec->end()) return std::nullopt;
    return it->second;
}

double get_num(const std::map<std::string, std::string>* sec, const std::string& key,
               double fallback) {
    const auto v = get(sec, key);
    return v ? std::stod(*v) : fallback;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(trim(item)));
    return out;
}

PressureProfile load_profile(const std::map<std::string, std::string>& sec,
                             const fs::path& base_dir, const std::string& where) {
    const auto name = get(&sec, "profile");
    if (!name) throw std::runtime_error(where + ": missing profile key");
    PressureProfile prof;
    if (*name == "samples") {
        const auto file = get(&sec, "file");
        if (!file) throw std::runtime_error(where + ": samples profile needs file=");
        auto [y, p] = io::read_samples_csv(base_dir / *file);
        prof = PressureProfile::from_samples(std::move(y), std::move(p));
    } else {
        std::vector<double> params;
        if (const auto ps = get(&sec, "params")) params = parse_list(*ps);
        prof = make_builtin_profile(*name, params);
    }
    if (const auto sh = get(&sec, "shift")) prof = prof.shifted(std::stod(*sh));
    return prof;
}

bool truthy(const std::string& v) { return v == "true" || v == "1" || v == "yes"; }

}  // namespace

ConfigSections parse_ini(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    ConfigSections out;
    std::string line, current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = trim(t.substr(1, t.size() - 2));
            out[current];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos || current.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected key = value inside a section");
        out[current][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

RunSetup load_run_setup(const fs::path& config_path) {
    const auto sections = parse_ini(config_path);
    const fs::path base_dir = config_path.parent_path();

    const auto coupling = section(sections, "coupling");
    const auto initial_sec = section(sections, "initial");
    const auto terminal_sec = section(sections, "terminal");
    if (!coupling || !initial_sec || !terminal_sec)
        throw std::runtime_error(config_path.string() +
                                 ": needs [coupling], [initial], [terminal]");

    const double theta = get_num(coupling, "theta", 1.0);

    InitialPressure initial{load_profile(*initial_sec, base_dir, "[initial]")};
    if (const auto rn = get(initial_sec, "renormalize"); rn && truthy(*rn))
        initial = initial.renormalized(theta);

    TerminalSpec terminal;
    const auto kind = get(terminal_sec, "kind").value_or("cost");
    if (kind == "planning") {
        TerminalProfile target{load_profile(*terminal_sec, base_dir, "[terminal]")};
        if (const auto rn = get(terminal_sec, "renormalize"); rn && truthy(*rn))
            target = target.renormalized(theta);
        terminal = TerminalSpec::planning(std::move(target));
    } else if (kind == "cost") {
        terminal = TerminalSpec::cost(get_num(terminal_sec, "c1", 0.0));
    } else {
        throw std::runtime_error("[terminal]: kind must be planning or cost");
    }

    const double horizon = get_num(coupling, "horizon", 1.0);
    std::optional<Interval> window;
    if (get(coupling, "window_lo") || get(coupling, "window_hi"))
        window = Interval{get_num(coupling, "window_lo", 0.25 * horizon),
                          get_num(coupling, "window_hi", 0.75 * horizon)};

    RunSetup setup{
        ProblemSpec::make(theta, std::move(initial), std::move(terminal), horizon,
                          window),
        GridConfig{}, SolverConfig{}, ValidationParams{}};

    if (const auto grid = section(sections, "grid")) {
        setup.grid.ny = static_cast<int>(get_num(grid, "ny", setup.grid.ny));
        setup.grid.nt = static_cast<int>(get_num(grid, "nt", setup.grid.nt));
        const auto g = get(grid, "grading").value_or("sqrt");
        if (g == "uniform") setup.grid.grading = Grading::Uniform;
        else if (g == "sqrt") setup.grid.grading = Grading::SqrtGraded;
        else throw std::runtime_error("[grid]: grading must be uniform or sqrt");
    }
    if (const auto sol = section(sections, "solver")) {
        setup.solver.newton_tol = get_num(sol, "newton_tol", setup.solver.newton_tol);
        setup.solver.max_iters =
            static_cast<int>(get_num(sol, "max_iters", setup.solver.max_iters));
        setup.solver.barrier_floor =
            get_num(sol, "barrier_floor", setup.solver.barrier_floor);
        setup.solver.continuation_levels = static_cast<int>(
            get_num(sol, "continuation_levels", setup.solver.continuation_levels));
    }
    if (const auto val = section(sections, "validate")) {
        setup.validation.C0 = get_num(val, "C0", setup.validation.C0);
        setup.validation.K0 = get_num(val, "K0", setup.validation.K0);
        setup.validation.delta = get_num(val, "delta", setup.validation.delta);
    }
    return setup;
}

}  // namespace mfgfb
