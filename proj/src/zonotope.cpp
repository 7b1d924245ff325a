#include "reachunder/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace reachunder {

namespace {

void require_finite(const Matrix& m, const char* what)
{
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
}

void require_dim(int expected, Eigen::Index actual, const char* what)
{
    if (actual != expected) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                    std::to_string(expected) + ", got " +
                                    std::to_string(actual) + ")");
    }
}

}  // namespace

Zonotope::Zonotope(Vector center)
    : center_(std::move(center)), generators_(center_.size(), 0)
{
    if (center_.size() == 0) {
        throw std::invalid_argument("Zonotope: empty center");
    }
    require_finite(center_, "Zonotope center");
}

Zonotope::Zonotope(Vector center, Matrix generators)
    : center_(std::move(center)), generators_(std::move(generators))
{
    if (center_.size() == 0) {
        throw std::invalid_argument("Zonotope: empty center");
    }
    if (generators_.cols() > 0) {
        require_dim(dim(), generators_.rows(), "Zonotope generators");
    } else {
        generators_.resize(center_.size(), 0);
    }
    require_finite(center_, "Zonotope center");
    require_finite(generators_, "Zonotope generators");
}

Zonotope Zonotope::box(const Vector& lo, const Vector& hi)
{
    require_dim(static_cast<int>(lo.size()), hi.size(), "Zonotope::box");
    if ((hi.array() < lo.array()).any()) {
        throw std::invalid_argument("Zonotope::box: lo > hi");
    }
    Vector c = 0.5 * (lo + hi);
    Matrix g = Matrix::Zero(lo.size(), lo.size());
    g.diagonal() = 0.5 * (hi - lo);
    return {std::move(c), std::move(g)};
}

Zonotope linear_map(const Matrix& m, const Zonotope& z)
{
    require_dim(z.dim(), m.cols(), "linear_map");
    return {m * z.center(), m * z.generators()};
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b)
{
    require_dim(a.dim(), b.dim(), "minkowski_sum");
    Matrix g(a.dim(), a.num_generators() + b.num_generators());
    g << a.generators(), b.generators();
    return {a.center() + b.center(), std::move(g)};
}

Zonotope translate(const Zonotope& z, const Vector& v)
{
    require_dim(z.dim(), v.size(), "translate");
    return {z.center() + v, z.generators()};
}

double support(const Zonotope& z, const Vector& d)
{
    require_dim(z.dim(), d.size(), "support");
    return d.dot(z.center()) + (z.generators().transpose() * d).cwiseAbs().sum();
}

Vector support_point(const Zonotope& z, const Vector& d)
{
    require_dim(z.dim(), d.size(), "support_point");
    const Vector proj = z.generators().transpose() * d;
    Vector p = z.center();
    for (Eigen::Index j = 0; j < proj.size(); ++j) {
        if (proj[j] >= 0.0) {
            p += z.generators().col(j);
        } else {
            p -= z.generators().col(j);
        }
    }
    return p;
}

Vector point_from_coefficients(const Zonotope& z, std::span<const double> xi)
{
    require_dim(z.num_generators(), static_cast<Eigen::Index>(xi.size()),
                "point_from_coefficients");
    for (double x : xi) {
        if (!(std::abs(x) <= 1.0)) {
            throw std::invalid_argument("point_from_coefficients: coefficient outside [-1,1]");
        }
    }
    const Eigen::Map<const Vector> coeff(xi.data(), static_cast<Eigen::Index>(xi.size()));
    return z.center() + z.generators() * coeff;
}

std::vector<Vector> unit_directions_2d(int count)
{
    if (count < 1) {
        throw std::invalid_argument("unit_directions_2d: count must be positive");
    }
    std::vector<Vector> dirs;
    dirs.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / count;
        dirs.push_back(Vector{{std::cos(angle), std::sin(angle)}});
    }
    return dirs;
}

std::vector<Vector> direction_grid(int dim, int count)
{
    if (dim == 2) {
        return unit_directions_2d(count);
    }
    if (count < 1) {
        throw std::invalid_argument("direction_grid: count must be positive");
    }
    std::vector<Vector> dirs;
    for (int i = 0; i < dim && static_cast<int>(dirs.size()) < count; ++i) {
        dirs.push_back(Vector::Unit(dim, i));
        if (static_cast<int>(dirs.size()) < count) {
            dirs.push_back(-Vector::Unit(dim, i));
        }
    }
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    while (static_cast<int>(dirs.size()) < count) {
        Vector d(dim);
        for (int i = 0; i < dim; ++i) {
            d[i] = normal(rng);
        }
        const double len = d.norm();
        if (len > 0.0) {
            dirs.push_back(d / len);
        }
    }
    return dirs;
}

std::vector<Vector> outline_2d(const Zonotope& z, int directions)
{
    if (z.dim() != 2) {
        throw std::invalid_argument("outline_2d: zonotope must be 2-D");
    }
    if (directions < 3) {
        throw std::invalid_argument("outline_2d: need at least 3 directions");
    }
    std::vector<Vector> pts;
    pts.reserve(static_cast<std::size_t>(directions));
    for (const Vector& d : unit_directions_2d(directions)) {
        pts.push_back(support_point(z, d));
    }
    return pts;
}

std::vector<Vector> vertices_2d(const Zonotope& z)
{
    if (z.dim() != 2) {
        throw std::invalid_argument("vertices_2d: zonotope must be 2-D");
    }
    // Orient every generator into the upper half plane, sort by angle, and
    // merge parallel ones; the boundary is then walked by adding 2g in order.
    std::vector<Eigen::Vector2d> gens;
    for (int j = 0; j < z.num_generators(); ++j) {
        Eigen::Vector2d g = z.generators().col(j);
        if (g.isZero(0.0)) {
            continue;
        }
        if (g.y() < 0.0 || (g.y() == 0.0 && g.x() < 0.0)) {
            g = -g;
        }
        gens.push_back(g);
    }
    std::sort(gens.begin(), gens.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
    });
    std::vector<Eigen::Vector2d> merged;
    for (const auto& g : gens) {
        if (!merged.empty()) {
            const auto& last = merged.back();
            const double cross = last.x() * g.y() - last.y() * g.x();
            if (std::abs(cross) <= 1e-15 * last.norm() * g.norm()) {
                merged.back() += g;
                continue;
            }
        }
        merged.push_back(g);
    }

    std::vector<Vector> verts;
    Eigen::Vector2d p = z.center();
    for (const auto& g : merged) {
        p -= g;
    }
    if (merged.empty()) {
        verts.emplace_back(p);
        return verts;
    }
    for (const auto& g : merged) {
        verts.emplace_back(p);
        p += 2.0 * g;
    }
    for (const auto& g : merged) {
        verts.emplace_back(p);
        p -= 2.0 * g;
    }
    return verts;
}

double norm_estimate(const Zonotope& z, int directions)
{
    double best = -std::numeric_limits<double>::infinity();
    for (const Vector& d : direction_grid(z.dim(), directions)) {
        best = std::max(best, support(z, d));
    }
    const double cn = z.center().norm();
    if (cn > 0.0) {
        best = std::max(best, support(z, z.center() / cn));
    }
    return best;
}

double norm_upper_bound(const Zonotope& z)
{
    if (z.dim() == 2) {
        double best = 0.0;
        for (const Vector& v : vertices_2d(z)) {
            best = std::max(best, v.norm());
        }
        return best;
    }
    return z.center().norm() + z.generators().colwise().norm().sum();
}

}  // namespace reachunder
