#ifndef REACHUNDER_VALIDATE_HPP
#define REACHUNDER_VALIDATE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reachunder/dynamics.hpp"
#include "reachunder/reach.hpp"
#include "reachunder/zonotope.hpp"

namespace reachunder {

/// Constructive membership certificate for a point of Lambda_index.
struct Witness {
    int index = 0;
    Vector target;              // pushed through the recursion from x0 and inputs
    Vector set_point;           // the same coefficients read off Lambda_index
    Vector x0;
    std::vector<Vector> inputs;  // constant on [t_{i-1}, t_i)
    Vector simulated_endpoint;
    double error = 0.0;          // ||target - simulated_endpoint||
};

/// Forward-integrates xdot = A x + B u from x0 at t_0 to t_k, k = inputs.size(),
/// with u = inputs[i-1] on cell i. RK4 with step tau / steps_per_cell; panels
/// split at grid points, breakpoints and geometric cuts near singularities.
Vector simulate_step_input(const SystemSpec& sys, const TimeGrid& grid, const Vector& x0,
                           std::span<const Vector> inputs, int steps_per_cell = 64);

/// `xi_u` holds one coefficient array per step up to `index` (default N).
Witness extract_witness(const SystemSpec& sys, const TransitionOracle& orc,
                        const ReachResult& result, std::span<const double> xi_x0,
                        const std::vector<std::vector<double>>& xi_u, int index = -1,
                        int steps_per_cell = 64);

/// max over `directions` grid directions of |h_Z1(d) - h_Z2(d)|; a lower
/// bound on the Hausdorff distance that tightens as directions grow.
double hausdorff_convex(const Zonotope& a, const Zonotope& b, int directions);
double hausdorff_convex_serial(const Zonotope& a, const Zonotope& b, int directions);

using PointCloud = std::vector<Eigen::Vector2d>;

/// Symmetric Hausdorff distance between finite 2-D point sets, using a
/// uniform bucket grid for exact nearest-neighbour queries.
double hausdorff_points(const PointCloud& a, const PointCloud& b);
double hausdorff_points_bruteforce(const PointCloud& a, const PointCloud& b);

/// outline_2d samples of every member set, concatenated.
PointCloud tube_cloud(std::span<const Zonotope> tube, int samples_per_set);

/// Hausdorff distance between the outline clouds of two tubes; an estimate
/// of the distance between the (non-convex) unions.
double hausdorff_tube(std::span<const Zonotope> a, std::span<const Zonotope> b,
                      int samples_per_set);

struct CertifyOptions {
    int trials = 500;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    int max_extreme = 64;      // all-(+-1) coefficient vectors, capped
    int steps_per_cell = 64;
};

struct WitnessFailure {
    int index = 0;
    std::vector<double> coefficients;
    double error = 0.0;
};

struct CertificationReport {
    bool passed = false;
    double max_error = 0.0;
    double max_set_gap = 0.0;  // max ||target - set_point||
    double tol = 0.0;
    int trials = 0;
    int extreme = 0;
    std::uint64_t seed = 0;
    std::vector<int> checked_indices;
    int witnesses = 0;
    std::vector<WitnessFailure> failures;
};

/// Indices certified for a run with `steps` steps: N plus up to three
/// intermediate indices ceil(N/4), ceil(N/2), ceil(3N/4).
std::vector<int> certified_indices(int steps);

/// Draws random and extreme coefficient vectors and checks every witness for
/// the final set and three intermediate sets against `tol`.
CertificationReport certify_under_approximation(const SystemSpec& sys,
                                                const TransitionOracle& orc,
                                                const ReachResult& result,
                                                const CertifyOptions& opts);
CertificationReport certify_under_approximation_serial(const SystemSpec& sys,
                                                       const TransitionOracle& orc,
                                                       const ReachResult& result,
                                                       const CertifyOptions& opts);

enum class ConvergenceMode { final_set, tube };

std::string to_string(ConvergenceMode mode);
ConvergenceMode convergence_mode_from_string(const std::string& name);

struct ConvergenceReport {
    ConvergenceMode mode = ConvergenceMode::final_set;
    std::vector<int> steps;
    std::vector<double> distances;
    std::vector<double> ratios;  // distances[k] / distances[k+1]
    int reference_steps = 0;
    int resolution = 0;          // directions (final_set) or samples per set (tube)
};

/// Self-convergence against the run with `reference_steps` steps.
/// Requires increasing `steps`, each dividing reference_steps, and
/// reference_steps >= 4 max(steps).
ConvergenceReport convergence_study(const SystemSpec& sys, const TransitionOracle& orc,
                                    const std::vector<int>& steps, int reference_steps,
                                    ConvergenceMode mode, int resolution = 0);

}  // namespace reachunder

#endif
