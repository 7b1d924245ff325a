#include "reachunder/reach.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "reachunder/quadrature.hpp"

namespace reachunder {

namespace {

/// Closed-form integral over [a, b] of phi(t_i, s) B ds on a piece where A
/// and B are constant: phi(t_i, b) A^{-1} (e^{A (b - a)} - I) B.
/// Returns false when A is singular or too badly conditioned.
bool constant_piece_integral(const Matrix& a_mat, const Matrix& b_mat, double len,
                             const Matrix& phi_end, double max_condition, Matrix& out)
{
    Eigen::JacobiSVD<Matrix> svd(a_mat);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin >= max_condition) {
        return false;
    }
    const Eigen::Index n = a_mat.rows();
    const Matrix e = matrix_exponential(a_mat * len) - Matrix::Identity(n, n);
    out = phi_end * a_mat.partialPivLu().solve(e) * b_mat;
    return true;
}

struct StepMaps {
    std::vector<Matrix> transitions;
    std::vector<Matrix> input_maps;
};

void compute_step(const SystemSpec& sys, const TransitionOracle& orc, const TimeGrid& grid,
                  int i, const StepOptions& opts, StepMaps& maps)
{
    maps.transitions[static_cast<std::size_t>(i)] = orc.transition(grid[i], grid[i - 1]);
    maps.input_maps[static_cast<std::size_t>(i)] = step_input_map(sys, orc, grid, i, opts).L;
}

ReachResult assemble(const SystemSpec& sys, const TransitionOracle& orc, TimeGrid grid,
                     StepMaps maps)
{
    ReachResult result;
    result.grid = std::move(grid);
    result.fingerprint = sys.fingerprint;
    result.accuracy = orc.accuracy();
    const int steps = result.grid.steps();
    result.lambdas.reserve(static_cast<std::size_t>(steps) + 1);
    result.lambdas.push_back(sys.X0);
    for (int i = 1; i <= steps; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const Zonotope w = linear_map(maps.input_maps[k], sys.U);
        result.lambdas.push_back(
            minkowski_sum(linear_map(maps.transitions[k], result.lambdas.back()), w));
    }
    result.transitions = std::move(maps.transitions);
    result.input_maps = std::move(maps.input_maps);
    return result;
}

StepMaps empty_maps(const SystemSpec& sys, int steps)
{
    StepMaps maps;
    maps.transitions.assign(static_cast<std::size_t>(steps) + 1, Matrix::Identity(sys.n, sys.n));
    maps.input_maps.assign(static_cast<std::size_t>(steps) + 1, Matrix::Zero(sys.n, sys.m));
    return maps;
}

void check_steps(int steps)
{
    if (steps < 1) {
        throw std::invalid_argument("reach_sets: number of steps must be at least 1");
    }
}

}  // namespace

TimeGrid::TimeGrid(double t_lo, double t_hi, int steps)
{
    if (steps < 1) {
        throw std::invalid_argument("TimeGrid: steps must be positive");
    }
    if (!(t_lo < t_hi)) {
        throw std::invalid_argument("TimeGrid: t_lo must be below t_hi");
    }
    tau_ = (t_hi - t_lo) / steps;
    points_.resize(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        points_[static_cast<std::size_t>(i)] = t_lo + i * (t_hi - t_lo) / steps;
    }
    points_.back() = t_hi;
}

StepInputMap step_input_map(const SystemSpec& sys, const TransitionOracle& orc,
                            const TimeGrid& grid, int index, const StepOptions& opts)
{
    if (index < 1 || index > grid.steps()) {
        throw std::invalid_argument("step_input_map: index out of range");
    }
    const double lo = grid[index - 1];
    const double hi = grid[index];
    const std::vector<double> cuts = sys.integration_cuts(lo, hi);
    const std::vector<double> edges = split_interval(lo, hi, cuts);
    const bool piecewise = orc.mode() != TransitionMode::ode_numeric &&
                           sys.A.is_piecewise_constant() && sys.B.is_piecewise_constant();

    Matrix total = Matrix::Zero(sys.n, sys.m);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p];
        const double b = edges[p + 1];
        if (piecewise) {
            const double mid = 0.5 * (a + b);
            Matrix piece;
            if (constant_piece_integral(sys.A.at(mid), sys.B.at(mid), b - a,
                                        orc.transition(hi, b), opts.max_condition, piece)) {
                total += piece;
                continue;
            }
        }
        const double panel[2] = {a, b};
        total += integrate_composite(
            [&](double s) -> Matrix { return orc.transition(hi, s) * sys.B.at(s); },
            std::span<const double>(panel), opts.substeps, opts.nodes);
    }
    return {index, std::move(total)};
}

ReachResult reach_sets(const SystemSpec& sys, const TransitionOracle& orc, int steps,
                       const StepOptions& opts)
{
    check_steps(steps);
    sys.validate();
    TimeGrid grid(sys.t_lo, sys.t_hi, steps);
    StepMaps maps = empty_maps(sys, steps);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 1; i <= steps; ++i) {
        try {
            compute_step(sys, orc, grid, i, opts, maps);
        } catch (...) {
#pragma omp critical(reach_sets_error)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return assemble(sys, orc, std::move(grid), std::move(maps));
}

ReachResult reach_sets_serial(const SystemSpec& sys, const TransitionOracle& orc, int steps,
                              const StepOptions& opts)
{
    check_steps(steps);
    sys.validate();
    TimeGrid grid(sys.t_lo, sys.t_hi, steps);
    StepMaps maps = empty_maps(sys, steps);
    for (int i = 1; i <= steps; ++i) {
        compute_step(sys, orc, grid, i, opts, maps);
    }
    return assemble(sys, orc, std::move(grid), std::move(maps));
}

std::vector<Zonotope> tube(const ReachResult& result)
{
    return result.lambdas;
}

double growth_bound(const SystemSpec& sys)
{
    const double m = norm_integral(sys, sys.A, sys.t_lo, sys.t_hi);
    const double beta = norm_integral(sys, sys.B, sys.t_lo, sys.t_hi);
    return std::exp(m) * (norm_upper_bound(sys.X0) + norm_upper_bound(sys.U) * beta);
}

double max_abs_support(const ReachResult& result, int directions)
{
    const int n = result.lambdas.front().dim();
    const std::vector<Vector> dirs = direction_grid(n, directions);
    const int count = static_cast<int>(result.lambdas.size());
    double best = 0.0;
#pragma omp parallel for reduction(max : best)
    for (int i = 0; i < count; ++i) {
        for (const Vector& d : dirs) {
            best = std::max(best, std::abs(support(result.lambdas[static_cast<std::size_t>(i)], d)));
        }
    }
    return best;
}

}  // namespace reachunder
