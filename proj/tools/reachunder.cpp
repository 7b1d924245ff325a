// reachunder: batch front-end for constant-input reach set under-approximation.
//
//   reachunder run      --builtin academic --steps 5 --out results/
//   reachunder certify  --builtin dcdc --steps 10 --tol 1e-6
//   reachunder converge --builtin academic --steps-list 1,2,5,10,20,40 --ref-steps 200
//   reachunder plot     --builtin dcdc --steps-list 5,10,20,50 --mode tube

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reachunder/dynamics.hpp"
#include "reachunder/io.hpp"
#include "reachunder/parallel.hpp"
#include "reachunder/reach.hpp"
#include "reachunder/svg.hpp"
#include "reachunder/validate.hpp"

namespace fs = std::filesystem;
using namespace reachunder;

namespace {

enum ExitCode { ok = 0, check_failed = 1, bad_input = 2, runtime_failure = 3 };

struct RunConfig {
    std::string spec_path;
    std::string builtin;
    std::string oracle;  // empty: best available
    int steps = 10;
    std::string steps_list;
    int ref_steps = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;    // 0: system-dependent default
    int trials = 500;
    std::string out = ".";
    int directions = 0;  // 0: command default
    std::string mode = "final_set";
    std::string title;
};

void add_common(CLI::App* cmd, RunConfig& cfg)
{
    auto* spec = cmd->add_option("--spec", cfg.spec_path, "system description (JSON)");
    auto* builtin = cmd->add_option("--builtin", cfg.builtin, "built-in system")
                        ->check(CLI::IsMember({"academic", "dcdc"}));
    spec->excludes(builtin);
    cmd->add_option("--oracle", cfg.oracle, "transition oracle mode")
        ->check(CLI::IsMember({"closed_form", "expm_piecewise", "ode_numeric"}));
    cmd->add_option("--out", cfg.out, "output directory")->capture_default_str();
    cmd->add_option("--directions", cfg.directions, "direction / outline sample count")
        ->check(CLI::PositiveNumber);
}

std::vector<int> parse_steps_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size() || v < 1) {
            throw std::invalid_argument("--steps-list entries must be positive integers");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw std::invalid_argument("--steps-list is empty");
    }
    return out;
}

std::shared_ptr<const SystemSpec> load_system(const RunConfig& cfg)
{
    if (!cfg.spec_path.empty()) {
        return std::make_shared<const SystemSpec>(load_system_file(cfg.spec_path));
    }
    if (!cfg.builtin.empty()) {
        return std::make_shared<const SystemSpec>(builtin_system(cfg.builtin));
    }
    throw std::invalid_argument("one of --spec or --builtin is required");
}

TransitionOracle make_oracle(const RunConfig& cfg, std::shared_ptr<const SystemSpec> sys)
{
    if (cfg.oracle.empty()) {
        return TransitionOracle::best_for(std::move(sys));
    }
    return {std::move(sys), transition_mode_from_string(cfg.oracle)};
}

fs::path output_dir(const RunConfig& cfg)
{
    fs::path dir(cfg.out);
    fs::create_directories(dir);
    return dir;
}

int cmd_run(const RunConfig& cfg)
{
    const auto sys = load_system(cfg);
    const TransitionOracle orc = make_oracle(cfg, sys);
    const ReachResult result = reach_sets(*sys, orc, cfg.steps);
    const fs::path dir = output_dir(cfg);
    write_text_file((dir / "reach.json").string(), reach_result_to_json(result).dump(2) + "\n");
    if (sys->n == 2) {
        std::ostringstream csv;
        write_outline_csv(csv, result, cfg.directions > 0 ? cfg.directions : 360);
        write_text_file((dir / "outlines.csv").string(), csv.str());
    }
    std::cout << "computed " << result.lambdas.size() << " sets (" << sys->name << ", N = "
              << cfg.steps << ", oracle " << to_string(orc.mode()) << ", "
              << result.accuracy.str() << ") -> " << (dir / "reach.json").string() << "\n";
    return ok;
}

int cmd_certify(const RunConfig& cfg)
{
    const auto sys = load_system(cfg);
    const TransitionOracle orc = make_oracle(cfg, sys);
    const ReachResult result = reach_sets(*sys, orc, cfg.steps);
    CertifyOptions opts;
    opts.trials = cfg.trials;
    opts.seed = cfg.seed;
    opts.tol = cfg.tol > 0.0 ? cfg.tol : (sys->A.singular_points().empty() ? 1e-6 : 1e-5);
    const CertificationReport report = certify_under_approximation(*sys, orc, result, opts);
    const fs::path dir = output_dir(cfg);
    nlohmann::json j = certification_to_json(report);
    j["steps"] = cfg.steps;
    j["system"] = sys->name;
    j["accuracy_class"] = result.accuracy.str();
    write_text_file((dir / "certify.json").string(), j.dump(2) + "\n");
    std::cout << (report.passed ? "PASS" : "FAIL") << ": " << report.witnesses
              << " witnesses, max error " << report.max_error << " (tol " << opts.tol << ")\n";
    return report.passed ? ok : check_failed;
}

int cmd_converge(const RunConfig& cfg)
{
    const auto sys = load_system(cfg);
    const TransitionOracle orc = make_oracle(cfg, sys);
    const std::vector<int> steps =
        parse_steps_list(cfg.steps_list.empty() ? "1,2,5" : cfg.steps_list);
    int ref = cfg.ref_steps;
    if (ref <= 0) {
        // smallest common multiple of the step counts that is >= 4 max(steps)
        int common = 1;
        for (int n : steps) {
            common = std::lcm(common, n);
        }
        ref = common * ((4 * steps.back() + common - 1) / common);
    }
    const ConvergenceMode mode = convergence_mode_from_string(cfg.mode);
    if (mode == ConvergenceMode::tube && sys->n != 2) {
        throw std::invalid_argument("tube convergence needs a 2-D state space");
    }
    const ConvergenceReport report =
        convergence_study(*sys, orc, steps, ref, mode, cfg.directions);
    const fs::path dir = output_dir(cfg);
    nlohmann::json j = convergence_to_json(report);
    j["system"] = sys->name;
    write_text_file((dir / "converge.json").string(), j.dump(2) + "\n");
    for (std::size_t k = 0; k < report.steps.size(); ++k) {
        std::cout << "N = " << report.steps[k] << "  d = " << format_number(report.distances[k])
                  << "\n";
    }
    return ok;
}

int cmd_plot(const RunConfig& cfg)
{
    const auto sys = load_system(cfg);
    if (sys->n != 2) {
        throw std::invalid_argument(
            "plot needs a 2-D state space; projecting onto coordinates is out of scope");
    }
    const TransitionOracle orc = make_oracle(cfg, sys);
    const std::vector<int> steps =
        parse_steps_list(cfg.steps_list.empty() ? "1,2,5" : cfg.steps_list);
    const ConvergenceMode mode = convergence_mode_from_string(cfg.mode);

    std::vector<PlotSeries> series;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const ReachResult result = reach_sets(*sys, orc, steps[k]);
        PlotSeries s;
        s.color = series_color(k);
        if (mode == ConvergenceMode::final_set) {
            s.label = "N = " + std::to_string(steps[k]) + " (final set)";
            s.sets = {result.lambdas.back()};
        } else {
            s.label = "N = " + std::to_string(steps[k]) + " (tube)";
            s.sets = tube(result);
        }
        series.push_back(std::move(s));
    }
    PlotOptions opts;
    opts.directions = cfg.directions > 0 ? cfg.directions : 360;
    opts.title = cfg.title.empty() ? sys->name + (mode == ConvergenceMode::final_set
                                                      ? ": final-time under-approximations"
                                                      : ": tube under-approximations")
                                   : cfg.title;
    const fs::path dir = output_dir(cfg);
    write_text_file((dir / "plot.svg").string(), render_svg(series, opts));
    std::cout << "wrote " << (dir / "plot.svg").string() << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    configure_threads_from_env();

    CLI::App app{"Convergent under-approximations of reachable sets for linear time-varying "
                 "systems"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* run = app.add_subcommand("run", "compute the reach sets and export them");
    add_common(run, cfg);
    run->add_option("--steps", cfg.steps, "number of grid steps N")->check(CLI::PositiveNumber);

    auto* certify = app.add_subcommand("certify", "check reach sets by witness simulation");
    add_common(certify, cfg);
    certify->add_option("--steps", cfg.steps, "number of grid steps N")
        ->check(CLI::PositiveNumber);
    certify->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    certify->add_option("--tol", cfg.tol, "witness tolerance")->check(CLI::PositiveNumber);
    certify->add_option("--trials", cfg.trials, "random witnesses per set")
        ->check(CLI::PositiveNumber);

    auto* converge = app.add_subcommand("converge", "self-convergence study");
    add_common(converge, cfg);
    converge->add_option("--steps-list", cfg.steps_list, "comma-separated N values");
    converge->add_option("--ref-steps", cfg.ref_steps, "reference N")
        ->check(CLI::PositiveNumber);
    converge->add_option("--mode", cfg.mode, "final_set or tube")
        ->check(CLI::IsMember({"final_set", "tube"}));
    converge->add_option("--seed", cfg.seed, "unused; accepted for uniform scripting");

    auto* plot = app.add_subcommand("plot", "SVG overlay of reach sets for several N");
    add_common(plot, cfg);
    plot->add_option("--steps-list", cfg.steps_list, "comma-separated N values");
    plot->add_option("--mode", cfg.mode, "final_set or tube")
        ->check(CLI::IsMember({"final_set", "tube"}));
    plot->add_option("--title", cfg.title, "figure title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : bad_input;
    }

    try {
        if (run->parsed()) {
            return cmd_run(cfg);
        }
        if (certify->parsed()) {
            return cmd_certify(cfg);
        }
        if (converge->parsed()) {
            return cmd_converge(cfg);
        }
        if (plot->parsed()) {
            return cmd_plot(cfg);
        }
    } catch (const SpecError& e) {
        std::cerr << "error: " << (cfg.spec_path.empty() ? "" : cfg.spec_path + ": ") << e.what()
                  << "\n";
        return bad_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return runtime_failure;
    }
    return ok;
}
