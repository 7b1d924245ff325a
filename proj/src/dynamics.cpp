#include "reachunder/dynamics.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "reachunder/ode.hpp"
#include "reachunder/quadrature.hpp"

namespace reachunder {

namespace {

constexpr int kSingularLevels = 40;
constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix rotation(double angle)
{
    Matrix r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

double time_slack(const SystemSpec& sys)
{
    return 1e-12 * std::max(1.0, std::abs(sys.t_hi) + std::abs(sys.t_lo));
}

}  // namespace

// ---------------------------------------------------------------------------
// MatrixProvider

MatrixProvider MatrixProvider::constant(Matrix value)
{
    if (value.size() == 0 || !value.allFinite()) {
        throw std::invalid_argument("constant provider: empty or non-finite matrix");
    }
    MatrixProvider p;
    p.kind_ = Kind::constant;
    p.rows_ = static_cast<int>(value.rows());
    p.cols_ = static_cast<int>(value.cols());
    p.segments_.push_back({kInf, std::move(value)});
    return p;
}

MatrixProvider MatrixProvider::piecewise_constant(std::vector<Segment> segments)
{
    if (segments.empty()) {
        throw std::invalid_argument("piecewise_constant provider: no segments");
    }
    MatrixProvider p;
    p.kind_ = Kind::piecewise_constant;
    p.rows_ = static_cast<int>(segments.front().value.rows());
    p.cols_ = static_cast<int>(segments.front().value.cols());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const Segment& seg = segments[k];
        if (seg.value.rows() != p.rows_ || seg.value.cols() != p.cols_ || p.rows_ == 0 ||
            p.cols_ == 0) {
            throw std::invalid_argument("piecewise_constant provider: segment " +
                                        std::to_string(k) + " has inconsistent dimensions");
        }
        if (!seg.value.allFinite() || std::isnan(seg.until)) {
            throw std::invalid_argument("piecewise_constant provider: segment " +
                                        std::to_string(k) + " is not finite");
        }
        if (k > 0 && !(seg.until > segments[k - 1].until)) {
            throw std::invalid_argument(
                "piecewise_constant provider: segment end times must be strictly increasing");
        }
    }
    p.segments_ = std::move(segments);
    return p;
}

MatrixProvider MatrixProvider::academic_A()
{
    MatrixProvider p;
    p.kind_ = Kind::academic_A;
    p.rows_ = 2;
    p.cols_ = 2;
    p.singular_ = {0.0};
    return p;
}

MatrixProvider MatrixProvider::academic_B()
{
    MatrixProvider p;
    p.kind_ = Kind::academic_B;
    p.rows_ = 2;
    p.cols_ = 2;
    // sqrt(t) has an unbounded derivative at 0; refine there as well.
    p.singular_ = {0.0};
    return p;
}

MatrixProvider MatrixProvider::callback(int rows, int cols, Sampler sampler,
                                        std::vector<double> breakpoints,
                                        std::vector<double> singular_points)
{
    if (rows <= 0 || cols <= 0 || !sampler) {
        throw std::invalid_argument("callback provider: bad dimensions or empty sampler");
    }
    MatrixProvider p;
    p.kind_ = Kind::callback;
    p.rows_ = rows;
    p.cols_ = cols;
    p.sampler_ = std::move(sampler);
    std::sort(breakpoints.begin(), breakpoints.end());
    p.callback_breaks_ = std::move(breakpoints);
    p.singular_ = std::move(singular_points);
    return p;
}

Matrix MatrixProvider::at(double t, Side side) const
{
    switch (kind_) {
    case Kind::constant:
        return segments_.front().value;
    case Kind::piecewise_constant: {
        for (const Segment& seg : segments_) {
            if (side == Side::left ? t <= seg.until : t < seg.until) {
                return seg.value;
            }
        }
        return segments_.back().value;
    }
    case Kind::academic_A: {
        const double alpha = t > 0.0 ? 0.5 / std::sqrt(t) : 0.0;
        return alpha * Matrix::Identity(2, 2);
    }
    case Kind::academic_B:
        return std::exp(std::sqrt(std::max(t, 0.0))) * rotation(t);
    case Kind::callback: {
        double ts = t;
        if (std::binary_search(callback_breaks_.begin(), callback_breaks_.end(), t)) {
            const double eps = 64.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::abs(t));
            ts = side == Side::left ? t - eps : t + eps;
        }
        Matrix v = sampler_(ts);
        if (v.rows() != rows_ || v.cols() != cols_) {
            throw std::runtime_error("callback provider returned a matrix of the wrong shape");
        }
        return v;
    }
    }
    throw std::logic_error("unreachable provider kind");
}

std::vector<double> MatrixProvider::breakpoints() const
{
    if (kind_ == Kind::piecewise_constant) {
        std::vector<double> out;
        for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
            out.push_back(segments_[k].until);
        }
        return out;
    }
    if (kind_ == Kind::callback) {
        return callback_breaks_;
    }
    return {};
}

// ---------------------------------------------------------------------------
// SystemSpec

void SystemSpec::validate() const
{
    if (!std::isfinite(t_lo) || !std::isfinite(t_hi) || !(t_lo < t_hi)) {
        throw AssumptionError("i", "time interval must be compact with t_lo < t_hi (got [" +
                                       std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                                       "])");
    }
    if (n <= 0 || m <= 0) {
        throw std::invalid_argument("state and input dimensions must be positive");
    }
    if (A.rows() != n || A.cols() != n) {
        throw std::invalid_argument("A must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (B.rows() != n || B.cols() != m) {
        throw std::invalid_argument("B must be " + std::to_string(n) + "x" + std::to_string(m));
    }
    if (X0.dim() != n) {
        throw AssumptionError("v", "X0 must be a non-empty set in dimension " +
                                       std::to_string(n));
    }
    if (U.dim() != m) {
        throw AssumptionError("v", "U must be a non-empty set in dimension " +
                                       std::to_string(m));
    }
    if (A.is_piecewise_constant() && A.segments().back().until < t_hi - time_slack(*this)) {
        throw AssumptionError("ii", "A is not defined up to t_hi");
    }
    if (B.is_piecewise_constant() && B.segments().back().until < t_hi - time_slack(*this)) {
        throw AssumptionError("iii", "B is not defined up to t_hi");
    }
    if (b_exponent && !(*b_exponent > 1.0)) {
        throw AssumptionError("iii", "the integrability exponent p of B must lie in (1, inf]");
    }
    // Providers without analytic structure are probed on a coarse grid.
    for (int k = 0; k <= 16; ++k) {
        const double t = t_lo + (t_hi - t_lo) * k / 16.0;
        if (!A.at(t).allFinite() && A.kind() == MatrixProvider::Kind::callback) {
            bool singular = std::find(A.singular_points().begin(), A.singular_points().end(),
                                      t) != A.singular_points().end();
            if (!singular) {
                throw AssumptionError("ii", "A(t) is not finite at t = " + std::to_string(t));
            }
        }
        if (!B.at(t).allFinite() && B.kind() == MatrixProvider::Kind::callback) {
            throw AssumptionError("iii", "B(t) is not finite at t = " + std::to_string(t));
        }
    }
}

std::vector<double> SystemSpec::breakpoints() const
{
    std::vector<double> all = A.breakpoints();
    const std::vector<double> b = B.breakpoints();
    all.insert(all.end(), b.begin(), b.end());
    all.insert(all.end(), extra_breakpoints.begin(), extra_breakpoints.end());
    std::vector<double> inner;
    for (double t : all) {
        if (t > t_lo && t < t_hi) {
            inner.push_back(t);
        }
    }
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
    return inner;
}

std::vector<double> SystemSpec::integration_cuts(double a, double b) const
{
    std::vector<double> cuts;
    for (double t : breakpoints()) {
        if (t > a && t < b) {
            cuts.push_back(t);
        }
    }
    std::vector<double> singular = A.singular_points();
    singular.insert(singular.end(), B.singular_points().begin(), B.singular_points().end());
    const double scale = t_hi - t_lo;
    for (double p : singular) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
        double offset = scale;
        for (int k = 1; k <= kSingularLevels; ++k) {
            offset *= 0.25;
            for (double c : {p + offset, p - offset}) {
                if (c > a && c < b) {
                    cuts.push_back(c);
                }
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

SystemSpec SystemSpec::restricted(double a, double b, Zonotope x0) const
{
    if (!(t_lo <= a && a < b && b <= t_hi)) {
        throw std::invalid_argument("restricted: [a, b] must be a non-trivial sub-interval");
    }
    SystemSpec sub = *this;
    sub.t_lo = a;
    sub.t_hi = b;
    sub.X0 = std::move(x0);
    sub.fingerprint = fingerprint + "@[" + std::to_string(a) + "," + std::to_string(b) + "]";
    return sub;
}

SystemSpec academic_system()
{
    SystemSpec sys;
    sys.name = "academic";
    sys.n = 2;
    sys.m = 2;
    sys.t_lo = 0.0;
    sys.t_hi = 1.0;
    sys.A = MatrixProvider::academic_A();
    sys.B = MatrixProvider::academic_B();
    sys.X0 = Zonotope(Vector::Zero(2));
    sys.U = Zonotope::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
    sys.b_exponent = std::numeric_limits<double>::infinity();
    sys.fingerprint = "builtin:academic";
    return sys;
}

SystemSpec dcdc_system()
{
    Matrix a1(2, 2);
    a1 << -1.0 / 3.0, 0.0, 0.0, -1.0 / 6.0;
    Matrix a2(2, 2);
    a2 << -1.0 / 2.0, -1.0 / 6.0, 1.0 / 6.0, -1.0 / 6.0;

    SystemSpec sys;
    sys.name = "dcdc";
    sys.n = 2;
    sys.m = 2;
    sys.t_lo = 0.0;
    sys.t_hi = 5.0;
    sys.A = MatrixProvider::piecewise_constant({{1.0, a1}, {2.0, a2}, {3.0, a1}, {5.0, a2}});
    sys.B = MatrixProvider::constant(Matrix::Identity(2, 2));
    sys.X0 = Zonotope::box(Vector{{0.9, 4.9}}, Vector{{1.1, 5.1}});
    // [2/15, 8/15] x {0}
    sys.U = Zonotope(Vector{{1.0 / 3.0, 0.0}}, Matrix{{0.2}, {0.0}});
    sys.b_exponent = std::numeric_limits<double>::infinity();
    sys.fingerprint = "builtin:dcdc";
    return sys;
}

SystemSpec builtin_system(const std::string& name)
{
    if (name == "academic") {
        return academic_system();
    }
    if (name == "dcdc") {
        return dcdc_system();
    }
    throw std::invalid_argument("unknown builtin system '" + name +
                                "' (expected academic or dcdc)");
}

// ---------------------------------------------------------------------------
// numerics

double spectral_norm(const Matrix& m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

Matrix matrix_exponential(const Matrix& m)
{
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("matrix_exponential: matrix must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument("matrix_exponential: non-finite entry");
    }
    return m.exp();
}

double norm_integral(const SystemSpec& sys, const MatrixProvider& p, double s, double t)
{
    if (s > t) {
        throw std::invalid_argument("norm_integral: s > t");
    }
    if (s == t) {
        return 0.0;
    }
    if (p.is_piecewise_constant()) {
        double total = 0.0;
        double lo = -kInf;
        for (const Segment& seg : p.segments()) {
            const double a = std::max(s, lo);
            const double b = std::min(t, seg.until);
            if (b > a) {
                total += spectral_norm(seg.value) * (b - a);
            }
            lo = seg.until;
        }
        return total;
    }
    const std::vector<double> cuts = sys.integration_cuts(s, t);
    const std::vector<double> edges = split_interval(s, t, cuts);
    return integrate_composite([&](double z) { return spectral_norm(p.at(z)); }, edges, 4, 5);
}

std::string to_string(TransitionMode mode)
{
    switch (mode) {
    case TransitionMode::closed_form:
        return "closed_form";
    case TransitionMode::expm_piecewise:
        return "expm_piecewise";
    case TransitionMode::ode_numeric:
        return "ode_numeric";
    }
    return "unknown";
}

TransitionMode transition_mode_from_string(const std::string& name)
{
    if (name == "closed_form") {
        return TransitionMode::closed_form;
    }
    if (name == "expm_piecewise") {
        return TransitionMode::expm_piecewise;
    }
    if (name == "ode_numeric") {
        return TransitionMode::ode_numeric;
    }
    throw std::invalid_argument("unknown transition mode '" + name + "'");
}

std::string AccuracyClass::str() const
{
    if (exact) {
        return "exact";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "tol(%.3g)", tol);
    return buf;
}

// ---------------------------------------------------------------------------
// TransitionOracle

TransitionOracle::TransitionOracle(std::shared_ptr<const SystemSpec> sys, TransitionMode mode,
                                   double h_max)
    : sys_(std::move(sys)), mode_(mode), h_max_(h_max)
{
    if (!sys_) {
        throw std::invalid_argument("TransitionOracle: null system");
    }
    if (h_max_ <= 0.0) {
        h_max_ = 1e-3 * (sys_->t_hi - sys_->t_lo);
    }
    const auto kind = sys_->A.kind();
    if (mode_ == TransitionMode::expm_piecewise && !sys_->A.is_piecewise_constant()) {
        throw std::invalid_argument("expm_piecewise requires a piecewise-constant A");
    }
    if (mode_ == TransitionMode::closed_form && kind == MatrixProvider::Kind::callback) {
        throw std::invalid_argument("closed_form is not available for callback providers");
    }
}

TransitionOracle TransitionOracle::best_for(std::shared_ptr<const SystemSpec> sys)
{
    const auto kind = sys->A.kind();
    if (kind == MatrixProvider::Kind::callback) {
        return {std::move(sys), TransitionMode::ode_numeric};
    }
    if (sys->A.is_piecewise_constant()) {
        return {std::move(sys), TransitionMode::expm_piecewise};
    }
    return {std::move(sys), TransitionMode::closed_form};
}

TransitionOracle TransitionOracle::rebind(std::shared_ptr<const SystemSpec> sys) const
{
    return {std::move(sys), mode_, h_max_};
}

AccuracyClass TransitionOracle::accuracy() const
{
    if (mode_ != TransitionMode::ode_numeric) {
        return {true, 0.0};
    }
    // nominal global error of RK4 at the default step, scaled as h^4
    const double h_ref = 1e-3 * (sys_->t_hi - sys_->t_lo);
    return {false, 1e-8 * std::pow(h_max_ / h_ref, 4.0)};
}

Matrix TransitionOracle::transition(double t, double s) const
{
    const double slack = time_slack(*sys_);
    if (s > t) {
        throw std::invalid_argument("transition: backward transitions (s > t) are not supported");
    }
    if (s < sys_->t_lo - slack || t > sys_->t_hi + slack) {
        throw std::invalid_argument("transition: times outside [t_lo, t_hi]");
    }
    if (s == t) {
        return Matrix::Identity(sys_->n, sys_->n);
    }
    switch (mode_) {
    case TransitionMode::closed_form:
        return closed_form(t, s);
    case TransitionMode::expm_piecewise:
        return expm_piecewise(t, s);
    case TransitionMode::ode_numeric:
        return ode_numeric(t, s);
    }
    throw std::logic_error("unreachable transition mode");
}

Matrix TransitionOracle::closed_form(double t, double s) const
{
    if (sys_->A.kind() == MatrixProvider::Kind::academic_A) {
        // A = alpha I commutes with itself, so phi = exp(int alpha) I.
        const double g = std::exp(std::sqrt(std::max(t, 0.0)) - std::sqrt(std::max(s, 0.0)));
        return g * Matrix::Identity(sys_->n, sys_->n);
    }
    return expm_piecewise(t, s);
}

Matrix TransitionOracle::expm_piecewise(double t, double s) const
{
    Matrix phi = Matrix::Identity(sys_->n, sys_->n);
    double lo = -kInf;
    for (const Segment& seg : sys_->A.segments()) {
        const double a = std::max(s, lo);
        const double b = std::min(t, seg.until);
        if (b > a) {
            phi = matrix_exponential(seg.value * (b - a)) * phi;
        }
        lo = seg.until;
        if (lo >= t) {
            break;
        }
    }
    return phi;
}

Matrix TransitionOracle::ode_numeric(double t, double s) const
{
    const std::vector<double> cuts = sys_->integration_cuts(s, t);
    const std::vector<double> edges = split_interval(s, t, cuts);
    const MatrixProvider& a = sys_->A;
    return rk4_panels(Matrix(Matrix::Identity(sys_->n, sys_->n)), edges, h_max_, min_panel_steps,
                      [&a](double z, Side side, const Matrix& phi) -> Matrix {
                          return a.at(z, side) * phi;
                      });
}

double TransitionOracle::norm_bound(double t, double s) const
{
    if (s > t) {
        throw std::invalid_argument("transition_norm_bound: s > t");
    }
    return std::exp(norm_integral(*sys_, sys_->A, s, t));
}

}  // namespace reachunder
