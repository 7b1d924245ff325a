// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance [--cli path/to/reachunder] [--work scratch-dir]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "reachunder/io.hpp"
#include "reachunder/reach.hpp"
#include "reachunder/svg.hpp"
#include "reachunder/validate.hpp"
#include "support/generators.hpp"

namespace fs = std::filesystem;
using namespace reachunder;

namespace {

// Self-convergence distances, computed once with this implementation and frozen.
const std::vector<int> academic_steps{1, 2, 5, 10, 20, 40};
const std::vector<double> academic_final_distances{
    0.65880257710411749,   0.16834839156849313,    0.026533042190594713,
    0.0067341621430840881, 0.0016955076266040869,  0.00040707069852885525};
const std::vector<int> dcdc_steps{5, 10, 20, 50};
const std::vector<double> dcdc_tube_distances{0.33268432914198071, 0.22435345108622573,
                                              0.13269891866405775, 0.054954338474405971};
constexpr double frozen_tol = 1e-9;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Bound {
    std::shared_ptr<const SystemSpec> sys;
    TransitionOracle orc;
};

Bound bind(SystemSpec s)
{
    auto p = std::make_shared<const SystemSpec>(std::move(s));
    return {p, TransitionOracle::best_for(p)};
}

SystemSpec drift_free()
{
    SystemSpec s;
    s.name = "drift-free";
    s.n = 2;
    s.m = 2;
    s.A = MatrixProvider::constant(Matrix::Zero(2, 2));
    s.B = MatrixProvider::constant(Matrix::Identity(2, 2));
    s.X0 = Zonotope(Vector::Zero(2));
    s.U = Zonotope(Vector::Zero(2), Matrix::Identity(2, 2));
    return s;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void fail(Outcome& o, const std::string& why)
{
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + why;
}

void note(Outcome& o, const std::string& what)
{
    o.detail += (o.detail.empty() ? "" : "; ") + what;
}

Outcome certification()
{
    Outcome o;
    struct Case {
        const char* name;
        int steps;
        double tol;
    };
    for (const Case c : {Case{"academic", 5, 1e-5}, Case{"dcdc", 10, 1e-6}}) {
        const Bound b = bind(builtin_system(c.name));
        CertifyOptions opts;
        opts.trials = 500;
        opts.tol = c.tol;
        const CertificationReport r =
            certify_under_approximation(*b.sys, b.orc, reach_sets(*b.sys, b.orc, c.steps), opts);
        note(o, std::string(c.name) + " N=" + std::to_string(c.steps) + ": " +
                    std::to_string(r.witnesses) + " witnesses, max error " + num(r.max_error) +
                    " (tol " + num(c.tol) + ")");
        if (!r.passed || r.max_error > c.tol) {
            fail(o, std::string(c.name) + " certification failed");
        }
    }
    return o;
}

Outcome drift_free_exactness()
{
    Outcome o;
    const Bound b = bind(drift_free());
    double worst = 0.0;
    for (int n : {1, 2, 7}) {
        const ReachResult r = reach_sets(*b.sys, b.orc, n);
        for (const Vector& d : unit_directions_2d(360)) {
            worst = std::max(worst, std::abs(support(r.lambdas.back(), d) -
                                             (std::abs(d[0]) + std::abs(d[1]))));
        }
    }
    note(o, "max support deviation " + num(worst) + " over N in {1,2,7}");
    if (!(worst <= 1e-10)) {
        fail(o, "exceeds 1e-10");
    }
    return o;
}

bool same_generators(const Matrix& a, const Matrix& b, double tol)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    std::vector<bool> used(static_cast<std::size_t>(b.cols()), false);
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        bool found = false;
        for (Eigen::Index j = 0; j < b.cols() && !found; ++j) {
            if (!used[j] && (a.col(i) - b.col(j)).cwiseAbs().maxCoeff() <= tol) {
                used[j] = found = true;
            }
        }
        if (!found) {
            return false;
        }
    }
    return true;
}

Outcome semigroup()
{
    Outcome o;
    double worst_center = 0.0;
    for (const char* name : {"academic", "dcdc"}) {
        const Bound b = bind(builtin_system(name));
        for (auto [n, k] : {std::pair{4, 2}, std::pair{6, 3}}) {
            const ReachResult whole = reach_sets(*b.sys, b.orc, n);
            auto head_sys = std::make_shared<const SystemSpec>(
                b.sys->restricted(b.sys->t_lo, whole.grid[k], b.sys->X0));
            const ReachResult head = reach_sets(*head_sys, b.orc.rebind(head_sys), k);
            auto tail_sys = std::make_shared<const SystemSpec>(
                b.sys->restricted(whole.grid[k], b.sys->t_hi, head.lambdas.back()));
            const ReachResult tail = reach_sets(*tail_sys, b.orc.rebind(tail_sys), n - k);
            const double dc = (whole.lambdas.back().center() - tail.lambdas.back().center())
                                  .cwiseAbs()
                                  .maxCoeff();
            worst_center = std::max(worst_center, dc);
            if (dc > 1e-10 || !same_generators(whole.lambdas.back().generators(),
                                               tail.lambdas.back().generators(), 1e-10)) {
                fail(o, std::string(name) + " (N,k)=(" + std::to_string(n) + "," +
                            std::to_string(k) + ") mismatch");
            }
        }
    }
    note(o, "max center difference " + num(worst_center));
    return o;
}

std::string list(const std::vector<double>& v)
{
    std::string s;
    for (double x : v) {
        s += (s.empty() ? "" : ", ") + num(x);
    }
    return s;
}

void check_frozen(Outcome& o, const std::vector<double>& got, const std::vector<double>& frozen)
{
    for (std::size_t k = 0; k < got.size(); ++k) {
        if (!(std::abs(got[k] - frozen[k]) <= frozen_tol)) {
            fail(o, "distance " + std::to_string(k) + " drifted from its frozen value");
        }
    }
}

void check_decreasing(Outcome& o, const std::vector<double>& d)
{
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        if (!(d[k] > d[k + 1])) {
            fail(o, "distances not strictly decreasing");
            return;
        }
    }
}

Outcome final_set_convergence()
{
    Outcome o;
    const Bound b = bind(academic_system());
    const ConvergenceReport r =
        convergence_study(*b.sys, b.orc, academic_steps, 200, ConvergenceMode::final_set);
    note(o, "d = [" + list(r.distances) + "]");
    check_decreasing(o, r.distances);
    check_frozen(o, r.distances, academic_final_distances);
    const double ratio = r.distances[4] / r.distances[5];
    note(o, "d(20)/d(40) = " + num(ratio));
    if (!(ratio >= 1.4 && ratio <= 3.0)) {
        fail(o, "ratio d(20)/d(40) outside [1.4, 3.0]");
    }
    return o;
}

Outcome tube_convergence()
{
    Outcome o;
    const Bound b = bind(dcdc_system());
    const ConvergenceReport r =
        convergence_study(*b.sys, b.orc, dcdc_steps, 500, ConvergenceMode::tube);
    note(o, "d = [" + list(r.distances) + "]");
    check_decreasing(o, r.distances);
    check_frozen(o, r.distances, dcdc_tube_distances);
    return o;
}

Outcome oracle_cross_validation()
{
    Outcome o;
    testgen::Gen gen(6);
    double worst_dc = 0.0;
    {
        const Bound b = bind(dcdc_system());
        const TransitionOracle expm(b.sys, TransitionMode::expm_piecewise);
        const TransitionOracle ode(b.sys, TransitionMode::ode_numeric);
        for (int k = 0; k < 20; ++k) {
            double s = gen.uniform(0.0, 5.0);
            double t = gen.uniform(0.0, 5.0);
            if (s > t) {
                std::swap(s, t);
            }
            worst_dc = std::max(worst_dc, (expm.transition(t, s) - ode.transition(t, s))
                                              .cwiseAbs()
                                              .maxCoeff());
        }
    }
    double worst_ac = 0.0;
    {
        const Bound b = bind(academic_system());
        const TransitionOracle closed(b.sys, TransitionMode::closed_form);
        const TransitionOracle ode(b.sys, TransitionMode::ode_numeric);
        for (int k = 0; k < 20; ++k) {
            double s = gen.uniform(0.01, 1.0);
            double t = gen.uniform(0.01, 1.0);
            if (s > t) {
                std::swap(s, t);
            }
            worst_ac = std::max(worst_ac, (closed.transition(t, s) - ode.transition(t, s))
                                              .cwiseAbs()
                                              .maxCoeff());
        }
    }
    note(o, "dcdc expm vs ode " + num(worst_dc) + ", academic closed vs ode " + num(worst_ac));
    if (!(worst_dc <= 1e-8)) {
        fail(o, "dcdc disagreement above 1e-8");
    }
    if (!(worst_ac <= 1e-6)) {
        fail(o, "academic disagreement above 1e-6");
    }
    return o;
}

Outcome growth()
{
    Outcome o;
    for (const char* name : {"academic", "dcdc"}) {
        const Bound b = bind(builtin_system(name));
        const double K = growth_bound(*b.sys);
        double worst = 0.0;
        for (int n : {1, 5, 10, 50}) {
            worst = std::max(worst, max_abs_support(reach_sets(*b.sys, b.orc, n), 360));
        }
        note(o, std::string(name) + ": max |h| " + num(worst) + " <= K " + num(K));
        if (!(worst <= K * (1.0 + 1e-6))) {
            fail(o, std::string(name) + " violates the growth bound");
        }
    }
    return o;
}

Outcome zonotope_properties()
{
    Outcome o;
    testgen::Gen gen(8);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = gen.integer(1, 4);
        const Zonotope a = gen.zonotope(dim);
        const Zonotope b = gen.zonotope(dim);
        const Vector d = gen.vector(dim);
        bad += !(std::abs(support(minkowski_sum(a, b), d) - support(a, d) - support(b, d)) <= 1e-12);

        const Matrix m = gen.matrix(gen.integer(1, 4), dim);
        const Vector e = gen.vector(static_cast<int>(m.rows()));
        const Vector mt_e = m.transpose() * e;
        bad += !(std::abs(support(linear_map(m, a), e) - support(a, mt_e)) <= 1e-12);

        const Vector p = point_from_coefficients(a, gen.coefficients(a.num_generators()));
        for (int k = 0; k < 100; ++k) {
            const Vector u = gen.unit(dim);
            bad += !(u.dot(p) <= support(a, u) + 1e-12);
        }

        const Vector d2 = gen.vector(dim);
        bad += !(support(a, d + d2) <= support(a, d) + support(a, d2) + 1e-12);
    }
    note(o, "1000 instances each of additivity, duality, membership, convexity; " +
                std::to_string(bad) + " violations");
    if (bad != 0) {
        fail(o, "property violations");
    }
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

/// In-process rendering of what `run` and `plot` write.
std::vector<std::string> library_outputs()
{
    const Bound b = bind(dcdc_system());
    const ReachResult r = reach_sets(*b.sys, b.orc, 20);
    std::ostringstream csv;
    write_outline_csv(csv, r, 360);
    std::vector<PlotSeries> series;
    for (int n : {5, 10, 20, 50}) {
        series.push_back({"N = " + std::to_string(n), "", tube(reach_sets(*b.sys, b.orc, n))});
    }
    return {reach_result_to_json(r).dump(2), csv.str(), render_svg(series, PlotOptions{})};
}

Outcome determinism(const std::string& cli, const fs::path& work)
{
    Outcome o;
    if (library_outputs() != library_outputs()) {
        fail(o, "in-process outputs differ between runs");
    }
    if (cli.empty()) {
        note(o, "in-process outputs identical (no --cli given)");
        return o;
    }
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"run --builtin academic --steps 10", {"reach.json", "outlines.csv"}},
        {"run --builtin dcdc --steps 50", {"reach.json", "outlines.csv"}},
        {"plot --builtin academic --steps-list 1,2,5", {"plot.svg"}},
        {"plot --builtin dcdc --steps-list 5,10,20,50 --mode tube", {"plot.svg"}},
    };
    int compared = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<std::string> contents[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = work / ("det" + std::to_string(c) + "_" + std::to_string(rep));
            fs::remove_all(dir);
            // the second run also caps the worker pool, so thread count must not matter
            const std::string env = rep ? "REACHUNDER_THREADS=1 " : "";
            const std::string cmd = env + "\"" + cli + "\" " + commands[c].first + " --out \"" +
                                    dir.string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                fail(o, "command failed: " + commands[c].first);
                continue;
            }
            for (const std::string& f : commands[c].second) {
                contents[rep].push_back(slurp(dir / f));
            }
        }
        if (contents[0] != contents[1] || contents[0].empty()) {
            fail(o, "outputs differ: " + commands[c].first);
        }
        compared += static_cast<int>(contents[0].size());
    }
    note(o, std::to_string(compared) + " CLI output files byte-identical across two runs");
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    std::string cli;
    fs::path work = fs::temp_directory_path() / "reachunder_acceptance";
    for (int k = 1; k + 1 < argc; k += 2) {
        const std::string key = argv[k];
        if (key == "--cli") {
            cli = argv[k + 1];
        } else if (key == "--work") {
            work = argv[k + 1];
        }
    }
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"under-approximation certification", certification},
        {"drift-free exactness", drift_free_exactness},
        {"semigroup identity", semigroup},
        {"final-set convergence (academic)", final_set_convergence},
        {"tube convergence (dcdc)", tube_convergence},
        {"transition-oracle cross-validation", oracle_cross_validation},
        {"growth bound", growth},
        {"zonotope algebra properties", zonotope_properties},
        {"determinism", [&] { return determinism(cli, work); }},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", k + 1,
                    criteria[k].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
