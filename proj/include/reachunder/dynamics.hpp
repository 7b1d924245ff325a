#ifndef REACHUNDER_DYNAMICS_HPP
#define REACHUNDER_DYNAMICS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reachunder/zonotope.hpp"

namespace reachunder {

/// Raised when problem data violates one of the standing assumptions on the
/// system (numbered (i)..(v): interval, A integrable, B p-integrable,
/// uncertainty sets, non-empty convex compact sets).
class AssumptionError : public std::invalid_argument {
public:
    AssumptionError(std::string assumption, const std::string& message)
        : std::invalid_argument("assumption (" + assumption + ") violated: " + message),
          assumption_(std::move(assumption))
    {
    }
    const std::string& assumption() const { return assumption_; }

private:
    std::string assumption_;
};

/// Which one-sided value to return at a discontinuity.
enum class Side { left, right };

/// Piece of a piecewise-constant provider, valid up to and including `until`.
struct Segment {
    double until;
    Matrix value;
};

/// Time-dependent matrix A(t) or B(t).
///
/// Piecewise-constant segment k covers (until_{k-1}, until_k]; the first
/// segment extends to the left without bound. One-sided evaluation at a
/// breakpoint picks the neighbouring segment.
class MatrixProvider {
public:
    enum class Kind { constant, piecewise_constant, academic_A, academic_B, callback };
    using Sampler = std::function<Matrix(double)>;

    MatrixProvider() = default;

    static MatrixProvider constant(Matrix value);
    static MatrixProvider piecewise_constant(std::vector<Segment> segments);
    /// alpha(t) I with alpha(t) = 1/(2 sqrt t), alpha(0) = 0 (2x2).
    static MatrixProvider academic_A();
    /// e^{sqrt t} R(t) with R(t) the rotation by angle t (2x2).
    static MatrixProvider academic_B();
    /// Black-box sampler. `singular_points` mark times where the matrix is
    /// unbounded but integrable; integrators refine geometrically there.
    static MatrixProvider callback(int rows, int cols, Sampler sampler,
                                   std::vector<double> breakpoints,
                                   std::vector<double> singular_points = {});

    Kind kind() const { return kind_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_piecewise_constant() const
    {
        return kind_ == Kind::constant || kind_ == Kind::piecewise_constant;
    }

    Matrix at(double t, Side side = Side::right) const;

    /// Constant pieces in time order; a constant provider has one piece with
    /// until = +inf. Empty for non-piecewise kinds.
    const std::vector<Segment>& segments() const { return segments_; }
    /// Interior discontinuities, sorted.
    std::vector<double> breakpoints() const;
    const std::vector<double>& singular_points() const { return singular_; }

private:
    Kind kind_ = Kind::constant;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Segment> segments_;
    Sampler sampler_;
    std::vector<double> callback_breaks_;
    std::vector<double> singular_;
};

/// Problem data: xdot = A(t) x + B(t) u, x(t_lo) in X0, u(t) in U.
struct SystemSpec {
    std::string name;
    int n = 0;
    int m = 0;
    double t_lo = 0.0;
    double t_hi = 1.0;
    MatrixProvider A;
    MatrixProvider B;
    Zonotope X0{Vector::Zero(1)};
    Zonotope U{Vector::Zero(1)};
    /// Extra user-declared discontinuity times; merged with the providers'.
    std::vector<double> extra_breakpoints;
    /// User assertion of the exponent p in the integrability condition on B;
    /// recorded, not verified.
    std::optional<double> b_exponent;
    /// Identifies the problem data in result metadata.
    std::string fingerprint;

    /// Throws AssumptionError / std::invalid_argument on inconsistent data.
    void validate() const;

    /// Sorted interior discontinuity times of A and B within (t_lo, t_hi).
    std::vector<double> breakpoints() const;
    /// Cut points for integrators on [a, b]: breakpoints plus geometric
    /// refinement t_s +- (t_hi - t_lo) 4^{-k} around singular points.
    std::vector<double> integration_cuts(double a, double b) const;

    /// Same dynamics on [a, b] with initial set `x0`.
    SystemSpec restricted(double a, double b, Zonotope x0) const;
};

SystemSpec academic_system();
SystemSpec dcdc_system();

/// Looks up "academic" or "dcdc"; throws std::invalid_argument otherwise.
SystemSpec builtin_system(const std::string& name);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// e^M via scaling and squaring with a Pade kernel.
Matrix matrix_exponential(const Matrix& m);

/// Integral of ||P(z)|| over [s, t]: exact for piecewise-constant providers,
/// composite Gauss-Legendre (4 substeps x 5 nodes per panel) otherwise.
double norm_integral(const SystemSpec& sys, const MatrixProvider& p, double s, double t);

enum class TransitionMode { closed_form, expm_piecewise, ode_numeric };

std::string to_string(TransitionMode mode);
TransitionMode transition_mode_from_string(const std::string& name);

struct AccuracyClass {
    bool exact = true;
    double tol = 0.0;
    std::string str() const;
};

/// Produces the state transition matrix phi(t, s) of the system.
class TransitionOracle {
public:
    /// h_max <= 0 selects 1e-3 (t_hi - t_lo).
    TransitionOracle(std::shared_ptr<const SystemSpec> sys, TransitionMode mode,
                     double h_max = 0.0);

    /// Closed form when the A provider has one, else ode_numeric.
    static TransitionOracle best_for(std::shared_ptr<const SystemSpec> sys);

    const SystemSpec& system() const { return *sys_; }
    std::shared_ptr<const SystemSpec> system_ptr() const { return sys_; }
    TransitionMode mode() const { return mode_; }
    double h_max() const { return h_max_; }
    AccuracyClass accuracy() const;

    /// Same mode and step on another system.
    TransitionOracle rebind(std::shared_ptr<const SystemSpec> sys) const;

    Matrix transition(double t, double s) const;
    double norm_bound(double t, double s) const;

private:
    Matrix closed_form(double t, double s) const;
    Matrix expm_piecewise(double t, double s) const;
    Matrix ode_numeric(double t, double s) const;

    std::shared_ptr<const SystemSpec> sys_;
    TransitionMode mode_;
    double h_max_;
};

inline Matrix transition(const TransitionOracle& orc, double t, double s)
{
    return orc.transition(t, s);
}

/// e^{integral_s^t ||A(z)|| dz}.
inline double transition_norm_bound(const TransitionOracle& orc, double t, double s)
{
    return orc.norm_bound(t, s);
}

}  // namespace reachunder

#endif
