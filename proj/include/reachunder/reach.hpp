#ifndef REACHUNDER_REACH_HPP
#define REACHUNDER_REACH_HPP

#include <span>
#include <string>
#include <vector>

#include "reachunder/dynamics.hpp"
#include "reachunder/zonotope.hpp"

namespace reachunder {

/// Uniform grid t_i = t_lo + i (t_hi - t_lo) / N, i = 0..N, with t_N = t_hi exactly.
class TimeGrid {
public:
    TimeGrid(double t_lo, double t_hi, int steps);

    int steps() const { return static_cast<int>(points_.size()) - 1; }
    double tau() const { return tau_; }
    double operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }
    std::span<const double> points() const { return points_; }

private:
    std::vector<double> points_;
    double tau_;
};

/// L_i = integral over [t_{i-1}, t_i] of phi(t_i, s) B(s) ds; W_i = L_i U.
struct StepInputMap {
    int index = 0;
    Matrix L;
};

struct StepOptions {
    int substeps = 4;          // equal pieces per breakpoint-free sub-panel
    int nodes = 5;             // Gauss-Legendre points per piece
    double max_condition = 1e8;  // closed-form segment integral only below this
};

/// Output of the constant-input recursion on N steps.
struct ReachResult {
    TimeGrid grid{0.0, 1.0, 1};
    std::vector<Zonotope> lambdas;        // Lambda_0 .. Lambda_N
    std::vector<Matrix> transitions;      // phi(t_i, t_{i-1}), entry 0 unused
    std::vector<Matrix> input_maps;       // L_i, entry 0 unused
    std::string fingerprint;
    AccuracyClass accuracy;

    int steps() const { return grid.steps(); }
};

StepInputMap step_input_map(const SystemSpec& sys, const TransitionOracle& orc,
                            const TimeGrid& grid, int index, const StepOptions& opts = {});

/// Lambda_0 = X0, Lambda_i = phi(t_i, t_{i-1}) Lambda_{i-1} + L_i U.
/// The per-step maps are independent and computed in parallel.
ReachResult reach_sets(const SystemSpec& sys, const TransitionOracle& orc, int steps,
                       const StepOptions& opts = {});

/// Single-threaded reference for reach_sets; results are bit-identical.
ReachResult reach_sets_serial(const SystemSpec& sys, const TransitionOracle& orc, int steps,
                              const StepOptions& opts = {});

/// The tube as the list Lambda_0 .. Lambda_N of convex pieces.
std::vector<Zonotope> tube(const ReachResult& result);

/// K = e^M (||X0|| + ||U|| int ||B||) with M = int ||A|| over the horizon.
/// Set norms use norm_upper_bound, so K bounds the true reachable sets.
double growth_bound(const SystemSpec& sys);

/// max over sets and `directions` unit directions of |h_Lambda_i(d)|.
double max_abs_support(const ReachResult& result, int directions = 360);

}  // namespace reachunder

#endif
