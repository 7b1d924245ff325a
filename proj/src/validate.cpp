#include "reachunder/validate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>

#include "reachunder/ode.hpp"
#include "reachunder/quadrature.hpp"

namespace reachunder {

namespace {

// ---------------------------------------------------------------------------
// nearest-neighbour bucket grid

class BucketGrid {
public:
    explicit BucketGrid(const PointCloud& pts) : pts_(pts)
    {
        lo_ = pts.front();
        Eigen::Vector2d hi = pts.front();
        for (const auto& p : pts) {
            lo_ = lo_.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const Eigen::Vector2d ext = hi - lo_;
        const double area = std::max(ext.x(), 1e-300) * std::max(ext.y(), 1e-300);
        cell_ = std::sqrt(area / static_cast<double>(pts.size())) * 2.0;
        cell_ = std::max(cell_, 1e-12 * std::max(1.0, ext.maxCoeff()));
        if (ext.maxCoeff() > 0.0) {
            cell_ = std::max(cell_, ext.maxCoeff() / 1024.0);
        }
        nx_ = static_cast<int>(ext.x() / cell_) + 1;
        ny_ = static_cast<int>(ext.y() / cell_) + 1;
        start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
        std::vector<int> cell_of(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            cell_of[k] = flat(clamp_x(pts[k].x()), clamp_y(pts[k].y()));
            ++start_[static_cast<std::size_t>(cell_of[k]) + 1];
        }
        for (std::size_t c = 1; c < start_.size(); ++c) {
            start_[c] += start_[c - 1];
        }
        order_.resize(pts.size());
        std::vector<int> fill(start_.begin(), start_.end() - 1);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            order_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[k])]++)] =
                static_cast<int>(k);
        }
    }

    /// Squared distance from q to its nearest stored point.
    double nearest_sq(const Eigen::Vector2d& q) const
    {
        const int cx = clamp_x(q.x());
        const int cy = clamp_y(q.y());
        double best = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(nx_, ny_);
        for (int r = 0; r <= max_ring; ++r) {
            for (int ix = cx - r; ix <= cx + r; ++ix) {
                if (ix < 0 || ix >= nx_) {
                    continue;
                }
                const bool edge_x = ix == cx - r || ix == cx + r;
                for (int iy = cy - r; iy <= cy + r; ++iy) {
                    if (iy < 0 || iy >= ny_) {
                        continue;
                    }
                    if (!edge_x && iy != cy - r && iy != cy + r) {
                        continue;
                    }
                    const int c = flat(ix, iy);
                    for (int k = start_[static_cast<std::size_t>(c)];
                         k < start_[static_cast<std::size_t>(c) + 1]; ++k) {
                        const auto& p = pts_[static_cast<std::size_t>(order_[static_cast<std::size_t>(k)])];
                        best = std::min(best, (p - q).squaredNorm());
                    }
                }
            }
            // Cells beyond ring r are at least r cell widths away.
            const double reach = r * cell_;
            if (best <= reach * reach) {
                break;
            }
        }
        return best;
    }

private:
    int clamp_x(double x) const
    {
        return std::clamp(static_cast<int>(std::floor((x - lo_.x()) / cell_)), 0, nx_ - 1);
    }
    int clamp_y(double y) const
    {
        return std::clamp(static_cast<int>(std::floor((y - lo_.y()) / cell_)), 0, ny_ - 1);
    }
    int flat(int ix, int iy) const { return iy * nx_ + ix; }

    const PointCloud& pts_;
    Eigen::Vector2d lo_;
    double cell_ = 1.0;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<int> start_;
    std::vector<int> order_;
};

double directed_hausdorff(const PointCloud& from, const PointCloud& to)
{
    const BucketGrid grid(to);
    const auto count = static_cast<long>(from.size());
    double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
    for (long k = 0; k < count; ++k) {
        worst = std::max(worst, grid.nearest_sq(from[static_cast<std::size_t>(k)]));
    }
    return std::sqrt(worst);
}

void require_same_dim(const Zonotope& a, const Zonotope& b)
{
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("hausdorff_convex: dimension mismatch");
    }
}

// ---------------------------------------------------------------------------
// witnesses

struct Draw {
    int index;
    std::vector<double> coefficients;  // full length; prefix used per index
};

std::vector<std::vector<double>> draw_coefficients(int length, const CertifyOptions& opts,
                                                   int& extreme_count)
{
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<std::vector<double>> draws;
    for (int t = 0; t < opts.trials; ++t) {
        std::vector<double> xi(static_cast<std::size_t>(length));
        for (double& x : xi) {
            x = uniform(rng);
        }
        draws.push_back(std::move(xi));
    }
    extreme_count = 0;
    if (opts.max_extreme <= 0) {
        return draws;
    }
    if (length < 31 && (1L << length) <= opts.max_extreme) {
        for (long mask = 0; mask < (1L << length); ++mask) {
            std::vector<double> xi(static_cast<std::size_t>(length));
            for (int j = 0; j < length; ++j) {
                xi[static_cast<std::size_t>(j)] = (mask >> j) & 1 ? 1.0 : -1.0;
            }
            draws.push_back(std::move(xi));
            ++extreme_count;
        }
        return draws;
    }
    draws.emplace_back(static_cast<std::size_t>(length), 1.0);
    ++extreme_count;
    if (opts.max_extreme > 1) {
        draws.emplace_back(static_cast<std::size_t>(length), -1.0);
        ++extreme_count;
    }
    std::bernoulli_distribution coin;
    while (extreme_count < opts.max_extreme) {
        std::vector<double> xi(static_cast<std::size_t>(length));
        for (double& x : xi) {
            x = coin(rng) ? 1.0 : -1.0;
        }
        draws.push_back(std::move(xi));
        ++extreme_count;
    }
    return draws;
}

Witness witness_from_flat(const SystemSpec& sys, const TransitionOracle& orc,
                          const ReachResult& result, std::span<const double> xi, int index,
                          int steps_per_cell)
{
    const auto g0 = static_cast<std::size_t>(sys.X0.num_generators());
    const auto gu = static_cast<std::size_t>(sys.U.num_generators());
    std::vector<std::vector<double>> xi_u;
    for (int i = 0; i < index; ++i) {
        const auto off = g0 + static_cast<std::size_t>(i) * gu;
        xi_u.emplace_back(xi.begin() + static_cast<long>(off),
                          xi.begin() + static_cast<long>(off + gu));
    }
    return extract_witness(sys, orc, result, xi.first(g0), xi_u, index, steps_per_cell);
}

CertificationReport certify_impl(const SystemSpec& sys, const TransitionOracle& orc,
                                 const ReachResult& result, const CertifyOptions& opts,
                                 bool parallel)
{
    if (opts.trials < 1) {
        throw std::invalid_argument("certify: trials must be at least 1");
    }
    const int steps = result.steps();
    const int length = sys.X0.num_generators() + steps * sys.U.num_generators();

    CertificationReport report;
    report.tol = opts.tol;
    report.trials = opts.trials;
    report.seed = opts.seed;
    report.checked_indices = certified_indices(steps);
    const std::vector<std::vector<double>> draws =
        draw_coefficients(length, opts, report.extreme);

    std::vector<Draw> jobs;
    for (int index : report.checked_indices) {
        for (const auto& xi : draws) {
            jobs.push_back({index, xi});
        }
    }
    report.witnesses = static_cast<int>(jobs.size());

    std::vector<double> errors(jobs.size(), 0.0);
    std::vector<double> gaps(jobs.size(), 0.0);
    std::exception_ptr error;
    const auto count = static_cast<long>(jobs.size());
    auto run = [&](long k) {
        const Draw& job = jobs[static_cast<std::size_t>(k)];
        const Witness w = witness_from_flat(sys, orc, result, job.coefficients, job.index,
                                            opts.steps_per_cell);
        errors[static_cast<std::size_t>(k)] = w.error;
        gaps[static_cast<std::size_t>(k)] = (w.target - w.set_point).norm();
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long k = 0; k < count; ++k) {
            try {
                run(k);
            } catch (...) {
#pragma omp critical(certify_error)
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
        if (error) {
            std::rethrow_exception(error);
        }
    } else {
        for (long k = 0; k < count; ++k) {
            run(k);
        }
    }

    report.passed = true;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        report.max_error = std::max(report.max_error, errors[k]);
        report.max_set_gap = std::max(report.max_set_gap, gaps[k]);
        if (!(errors[k] <= opts.tol)) {
            report.passed = false;
            if (report.failures.size() < 32) {
                const auto used = static_cast<std::size_t>(
                    sys.X0.num_generators() + jobs[k].index * sys.U.num_generators());
                report.failures.push_back(
                    {jobs[k].index,
                     std::vector<double>(jobs[k].coefficients.begin(),
                                         jobs[k].coefficients.begin() + static_cast<long>(used)),
                     errors[k]});
            }
        }
    }
    return report;
}

void check_study_args(const std::vector<int>& steps, int reference_steps)
{
    if (steps.empty()) {
        throw std::invalid_argument("convergence_study: empty step list");
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k] < 1) {
            throw std::invalid_argument("convergence_study: step counts must be positive");
        }
        if (k > 0 && steps[k] <= steps[k - 1]) {
            throw std::invalid_argument("convergence_study: step counts must be increasing");
        }
        if (reference_steps % steps[k] != 0) {
            throw std::invalid_argument("convergence_study: " + std::to_string(steps[k]) +
                                        " does not divide the reference step count " +
                                        std::to_string(reference_steps));
        }
    }
    if (reference_steps < 4 * steps.back()) {
        throw std::invalid_argument(
            "convergence_study: reference step count must be at least 4 max(steps)");
    }
}

}  // namespace

Vector simulate_step_input(const SystemSpec& sys, const TimeGrid& grid, const Vector& x0,
                           std::span<const Vector> inputs, int steps_per_cell)
{
    if (x0.size() != sys.n) {
        throw std::invalid_argument("simulate_step_input: x0 has wrong dimension");
    }
    if (static_cast<int>(inputs.size()) > grid.steps()) {
        throw std::invalid_argument("simulate_step_input: more inputs than grid cells");
    }
    const double h = grid.tau() / steps_per_cell;
    Vector x = x0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const Vector& u = inputs[i];
        if (u.size() != sys.m) {
            throw std::invalid_argument("simulate_step_input: input has wrong dimension");
        }
        const double a = grid[static_cast<int>(i)];
        const double b = grid[static_cast<int>(i) + 1];
        const std::vector<double> edges = split_interval(a, b, sys.integration_cuts(a, b));
        x = rk4_panels(std::move(x), edges, h, min_panel_steps, [&](double t, Side side, const Vector& y) -> Vector {
            return sys.A.at(t, side) * y + sys.B.at(t, side) * u;
        });
    }
    return x;
}

Witness extract_witness(const SystemSpec& sys, const TransitionOracle& orc,
                        const ReachResult& result, std::span<const double> xi_x0,
                        const std::vector<std::vector<double>>& xi_u, int index,
                        int steps_per_cell)
{
    (void)orc;
    if (index < 0) {
        index = result.steps();
    }
    if (index > result.steps()) {
        throw std::invalid_argument("extract_witness: index beyond the horizon");
    }
    if (static_cast<int>(xi_u.size()) != index) {
        throw std::invalid_argument("extract_witness: need one input coefficient array per step");
    }
    Witness w;
    w.index = index;
    w.x0 = point_from_coefficients(sys.X0, xi_x0);
    std::vector<double> flat(xi_x0.begin(), xi_x0.end());
    Vector p = w.x0;
    for (int i = 1; i <= index; ++i) {
        const auto& xi = xi_u[static_cast<std::size_t>(i - 1)];
        w.inputs.push_back(point_from_coefficients(sys.U, xi));
        flat.insert(flat.end(), xi.begin(), xi.end());
        p = result.transitions[static_cast<std::size_t>(i)] * p +
            result.input_maps[static_cast<std::size_t>(i)] * w.inputs.back();
    }
    w.target = std::move(p);
    w.set_point = point_from_coefficients(result.lambdas[static_cast<std::size_t>(index)], flat);
    w.simulated_endpoint = simulate_step_input(sys, result.grid, w.x0, w.inputs, steps_per_cell);
    w.error = (w.target - w.simulated_endpoint).norm();
    return w;
}

double hausdorff_convex(const Zonotope& a, const Zonotope& b, int directions)
{
    require_same_dim(a, b);
    const std::vector<Vector> dirs = direction_grid(a.dim(), directions);
    const int count = static_cast<int>(dirs.size());
    double worst = 0.0;
#pragma omp parallel for reduction(max : worst)
    for (int k = 0; k < count; ++k) {
        const Vector& d = dirs[static_cast<std::size_t>(k)];
        worst = std::max(worst, std::abs(support(a, d) - support(b, d)));
    }
    return worst;
}

double hausdorff_convex_serial(const Zonotope& a, const Zonotope& b, int directions)
{
    require_same_dim(a, b);
    double worst = 0.0;
    for (const Vector& d : direction_grid(a.dim(), directions)) {
        worst = std::max(worst, std::abs(support(a, d) - support(b, d)));
    }
    return worst;
}

double hausdorff_points(const PointCloud& a, const PointCloud& b)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff_points: empty point cloud");
    }
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double hausdorff_points_bruteforce(const PointCloud& a, const PointCloud& b)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff_points: empty point cloud");
    }
    auto directed = [](const PointCloud& from, const PointCloud& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                best = std::min(best, (p - q).squaredNorm());
            }
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

PointCloud tube_cloud(std::span<const Zonotope> tube, int samples_per_set)
{
    PointCloud cloud;
    cloud.reserve(tube.size() * static_cast<std::size_t>(samples_per_set));
    for (const Zonotope& z : tube) {
        for (const Vector& p : outline_2d(z, samples_per_set)) {
            cloud.emplace_back(p);
        }
    }
    return cloud;
}

double hausdorff_tube(std::span<const Zonotope> a, std::span<const Zonotope> b,
                      int samples_per_set)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff_tube: empty tube");
    }
    return hausdorff_points(tube_cloud(a, samples_per_set), tube_cloud(b, samples_per_set));
}

std::vector<int> certified_indices(int steps)
{
    std::vector<int> out;
    for (int q = 1; q <= 3; ++q) {
        const int i = (q * steps + 3) / 4;
        if (i >= 1 && i < steps && std::find(out.begin(), out.end(), i) == out.end()) {
            out.push_back(i);
        }
    }
    out.push_back(steps);
    return out;
}

CertificationReport certify_under_approximation(const SystemSpec& sys,
                                                const TransitionOracle& orc,
                                                const ReachResult& result,
                                                const CertifyOptions& opts)
{
    return certify_impl(sys, orc, result, opts, true);
}

CertificationReport certify_under_approximation_serial(const SystemSpec& sys,
                                                       const TransitionOracle& orc,
                                                       const ReachResult& result,
                                                       const CertifyOptions& opts)
{
    return certify_impl(sys, orc, result, opts, false);
}

std::string to_string(ConvergenceMode mode)
{
    return mode == ConvergenceMode::final_set ? "final_set" : "tube";
}

ConvergenceMode convergence_mode_from_string(const std::string& name)
{
    if (name == "final_set" || name == "final") {
        return ConvergenceMode::final_set;
    }
    if (name == "tube") {
        return ConvergenceMode::tube;
    }
    throw std::invalid_argument("unknown convergence mode '" + name + "'");
}

ConvergenceReport convergence_study(const SystemSpec& sys, const TransitionOracle& orc,
                                    const std::vector<int>& steps, int reference_steps,
                                    ConvergenceMode mode, int resolution)
{
    check_study_args(steps, reference_steps);
    ConvergenceReport report;
    report.mode = mode;
    report.steps = steps;
    report.reference_steps = reference_steps;
    report.resolution =
        resolution > 0 ? resolution : (mode == ConvergenceMode::final_set ? 720 : 256);

    const ReachResult reference = reach_sets(sys, orc, reference_steps);
    PointCloud reference_cloud;
    if (mode == ConvergenceMode::tube) {
        reference_cloud = tube_cloud(reference.lambdas, report.resolution);
    }
    for (int n : steps) {
        const ReachResult run = reach_sets(sys, orc, n);
        double d = 0.0;
        if (mode == ConvergenceMode::final_set) {
            d = hausdorff_convex(run.lambdas.back(), reference.lambdas.back(), report.resolution);
        } else {
            d = hausdorff_points(tube_cloud(run.lambdas, report.resolution), reference_cloud);
        }
        report.distances.push_back(d);
    }
    for (std::size_t k = 0; k + 1 < report.distances.size(); ++k) {
        report.ratios.push_back(report.distances[k] / report.distances[k + 1]);
    }
    return report;
}

}  // namespace reachunder
