#ifndef REACHUNDER_ZONOTOPE_HPP
#define REACHUNDER_ZONOTOPE_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace reachunder {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Convex compact set {c + G xi : xi in [-1,1]^k}.
///
/// Generators are stored as the columns of G. Zero-length generators are
/// kept so that coefficient indices stay stable through the reach recursion.
/// Instances are immutable once constructed.
class Zonotope {
public:
    /// Singleton {center}.
    explicit Zonotope(Vector center);
    Zonotope(Vector center, Matrix generators);

    /// Axis-aligned box [lo, hi]; degenerate axes yield zero-length generators.
    static Zonotope box(const Vector& lo, const Vector& hi);

    int dim() const { return static_cast<int>(center_.size()); }
    int num_generators() const { return static_cast<int>(generators_.cols()); }
    const Vector& center() const { return center_; }
    const Matrix& generators() const { return generators_; }
    Vector generator(int j) const { return generators_.col(j); }

private:
    Vector center_;
    Matrix generators_;  // dim x num_generators
};

Zonotope linear_map(const Matrix& m, const Zonotope& z);
Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope translate(const Zonotope& z, const Vector& v);

/// h_Z(d) = d.c + sum_j |d.g_j|. The direction need not be normalized.
double support(const Zonotope& z, const Vector& d);

/// A point of Z attaining h_Z(d); ties d.g_j == 0 resolve to +g_j.
Vector support_point(const Zonotope& z, const Vector& d);

/// c + G xi. Throws if any |xi_j| > 1 or the length is wrong.
Vector point_from_coefficients(const Zonotope& z, std::span<const double> xi);

/// Unit vectors at angles 2*pi*k/count, k = 0..count-1.
std::vector<Vector> unit_directions_2d(int count);

/// Support points on `directions` uniformly spaced unit directions, in
/// angular order starting at angle 0. Requires a 2-D zonotope.
std::vector<Vector> outline_2d(const Zonotope& z, int directions);

/// Exact vertex list of a 2-D zonotope in counter-clockwise order.
/// Duplicates are removed; a singleton yields its center.
std::vector<Vector> vertices_2d(const Zonotope& z);

/// Norm estimate max_d h_Z(d) over a direction grid (2-D: uniform angles,
/// otherwise a fixed pseudo-random sphere sample plus the coordinate axes),
/// plus the direction of the center.
/// This is a lower bound on max_{x in Z} ||x||.
double norm_estimate(const Zonotope& z, int directions = 360);

/// Upper bound on max_{x in Z} ||x||: exact in 2-D via the vertex list,
/// ||c|| + sum ||g_j|| otherwise.
double norm_upper_bound(const Zonotope& z);

/// Unit direction set used by estimators in any dimension. In 2-D this is
/// unit_directions_2d(count); otherwise the +-axes followed by deterministic
/// pseudo-random unit vectors up to `count` entries.
std::vector<Vector> direction_grid(int dim, int count);

}  // namespace reachunder

#endif
