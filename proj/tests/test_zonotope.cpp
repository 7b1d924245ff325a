#include <doctest.h>

#include <cmath>
#include <set>

#include "reachunder/zonotope.hpp"
#include "support/generators.hpp"

using namespace reachunder;

namespace {

Zonotope unit_square() { return Zonotope(Vector::Zero(2), Matrix::Identity(2, 2)); }

Zonotope skew_example()
{
    Matrix g(2, 2);
    g << 1, 1, 0, 1;
    return Zonotope(Vector{{1.0, 1.0}}, g);
}

double shoelace(const std::vector<Vector>& poly)
{
    double a = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Vector& p = poly[k];
        const Vector& q = poly[(k + 1) % poly.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * std::abs(a);
}

}  // namespace

TEST_CASE("construction validates data")
{
    CHECK_THROWS_AS(Zonotope{Vector{}}, std::invalid_argument);
    CHECK_THROWS_AS(Zonotope(Vector::Zero(2), Matrix::Zero(3, 1)), std::invalid_argument);
    CHECK_THROWS_AS(Zonotope(Vector{{NAN, 0.0}}), std::invalid_argument);
    Matrix bad = Matrix::Zero(2, 1);
    bad(1, 0) = INFINITY;
    CHECK_THROWS_AS(Zonotope(Vector::Zero(2), bad), std::invalid_argument);
    CHECK(Zonotope(Vector::Zero(3)).num_generators() == 0);

    const Zonotope b = Zonotope::box(Vector{{0.9, 4.9}}, Vector{{1.1, 5.1}});
    CHECK(b.center().isApprox(Vector{{1.0, 5.0}}));
    CHECK(support(b, Vector{{1.0, 0.0}}) == doctest::Approx(1.1));
    CHECK(support(b, Vector{{0.0, -1.0}}) == doctest::Approx(-4.9));
}

TEST_CASE("linear_map examples")
{
    const Zonotope sq = unit_square();
    const Zonotope same = linear_map(Matrix::Identity(2, 2), sq);
    CHECK(same.center() == sq.center());
    CHECK(same.generators() == sq.generators());

    const Zonotope zero = linear_map(Matrix::Zero(2, 2), sq);
    CHECK(zero.center().isZero());
    CHECK(support(zero, Vector{{1.0, 0.0}}) == 0.0);

    Matrix m(2, 2);
    m << std::sin(1.0), -(1.0 - std::cos(1.0)), 1.0 - std::cos(1.0), std::sin(1.0);
    const Zonotope r = linear_map(m, sq);
    CHECK(r.center().isZero());
    CHECK(r.generator(0)[0] == doctest::Approx(0.841471).epsilon(1e-6));
    CHECK(r.generator(0)[1] == doctest::Approx(0.459698).epsilon(1e-6));
    CHECK(r.generator(1)[0] == doctest::Approx(-0.459698).epsilon(1e-6));
    CHECK(r.generator(1)[1] == doctest::Approx(0.841471).epsilon(1e-6));

    // sampled points of the square map into the image via the same coefficients
    testgen::Gen gen(11);
    for (int k = 0; k < 1000; ++k) {
        const auto xi = gen.coefficients(2);
        const Vector p = m * point_from_coefficients(sq, xi);
        CHECK((p - point_from_coefficients(r, xi)).norm() < 1e-14);
    }

    CHECK_THROWS_AS(linear_map(Matrix::Identity(3, 3), sq), std::invalid_argument);
}

TEST_CASE("minkowski_sum examples")
{
    const Zonotope sq = unit_square();
    const Zonotope p(Vector{{3.0, -1.0}});
    const Zonotope moved = minkowski_sum(p, sq);
    CHECK(moved.center().isApprox(Vector{{3.0, -1.0}}));
    CHECK(moved.generators() == sq.generators());

    const Zonotope unit1(Vector::Zero(1), Matrix::Ones(1, 1));
    CHECK(support(minkowski_sum(unit1, unit1), Vector::Ones(1)) == 2.0);

    const Zonotope twice = minkowski_sum(sq, sq);
    CHECK(support(twice, Vector{{1.0, 0.0}}) == 2.0);
    CHECK(vertices_2d(twice).size() == 4);

    // brute-force hull of the 4 x 4 vertex sums
    std::set<std::pair<double, double>> sums;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const Vector u{{a & 1 ? 1.0 : -1.0, a & 2 ? 1.0 : -1.0}};
            const Vector v{{b & 1 ? 1.0 : -1.0, b & 2 ? 1.0 : -1.0}};
            sums.insert({u[0] + v[0], u[1] + v[1]});
        }
    }
    int corners = 0;
    for (const auto& [x, y] : sums) {
        corners += std::abs(x) == 2.0 && std::abs(y) == 2.0;
    }
    CHECK(corners == 4);

    CHECK_THROWS_AS(minkowski_sum(sq, unit1), std::invalid_argument);
}

TEST_CASE("support examples")
{
    CHECK(support(unit_square(), Vector{{1.0, 0.0}}) == 1.0);
    CHECK(support(Zonotope(Vector{{3.0, -2.0}}), Vector{{0.0, 1.0}}) == -2.0);
    CHECK(support(skew_example(), Vector{{1.0, 2.0}}) == 7.0);
    CHECK(testgen::support_by_vertices(skew_example(), Vector{{1.0, 2.0}}) == 7.0);
    CHECK_THROWS_AS(support(unit_square(), Vector::Ones(3)), std::invalid_argument);
}

TEST_CASE("support_point examples")
{
    CHECK(support_point(unit_square(), Vector{{1.0, 1.0}}).isApprox(Vector{{1.0, 1.0}}));
    CHECK(support_point(unit_square(), Vector{{1.0, 0.0}}).isApprox(Vector{{1.0, 1.0}}));
    const Vector p = support_point(skew_example(), Vector{{1.0, 2.0}});
    CHECK(p.isApprox(Vector{{3.0, 2.0}}));
    CHECK(Vector{{1.0, 2.0}}.dot(p) == 7.0);
}

TEST_CASE("point_from_coefficients examples")
{
    const Zonotope z = skew_example();
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(point_from_coefficients(z, zeros) == z.center());
    const std::vector<double> pm{1.0, -1.0};
    CHECK(point_from_coefficients(unit_square(), pm).isApprox(Vector{{1.0, -1.0}}));
    const std::vector<double> half{0.5, -0.5};
    CHECK(point_from_coefficients(z, half).isApprox(Vector{{1.0, 0.5}}));

    const std::vector<double> too_big{1.5, 0.0};
    CHECK_THROWS_AS(point_from_coefficients(z, too_big), std::invalid_argument);
    const std::vector<double> short_xi{0.0};
    CHECK_THROWS_AS(point_from_coefficients(z, short_xi), std::invalid_argument);
}

TEST_CASE("outline_2d examples")
{
    const auto four = outline_2d(unit_square(), 4);
    REQUIRE(four.size() == 4);
    const auto dirs = unit_directions_2d(4);
    for (int k = 0; k < 4; ++k) {
        CHECK(dirs[k].dot(four[k]) == doctest::Approx(support(unit_square(), dirs[k])));
    }
    CHECK(four[0].isApprox(Vector{{1.0, 1.0}}));
    CHECK(four[1].isApprox(Vector{{1.0, 1.0}}));
    CHECK(four[2].isApprox(Vector{{-1.0, 1.0}}));

    const Zonotope single(Vector{{0.5, -0.25}});
    for (const Vector& p : outline_2d(single, 7)) {
        CHECK(p == single.center());
    }

    const auto fine = outline_2d(unit_square(), 360);
    std::vector<Vector> dedup;
    for (const Vector& p : fine) {
        if (dedup.empty() || !p.isApprox(dedup.back())) {
            dedup.push_back(p);
        }
    }
    CHECK(std::abs(shoelace(dedup) - 4.0) < 0.04);

    CHECK_THROWS_AS(outline_2d(unit_square(), 2), std::invalid_argument);
    CHECK_THROWS_AS(outline_2d(Zonotope(Vector::Zero(3)), 8), std::invalid_argument);
}

TEST_CASE("vertices_2d and norms")
{
    const auto v = vertices_2d(unit_square());
    CHECK(v.size() == 4);
    CHECK(shoelace(v) == doctest::Approx(4.0));
    CHECK(norm_upper_bound(unit_square()) == doctest::Approx(std::sqrt(2.0)));
    CHECK(norm_estimate(unit_square()) == doctest::Approx(std::sqrt(2.0)));

    // parallel generators merge
    Matrix g(2, 3);
    g << 1, 2, 0, 0, 0, 1;
    const auto merged = vertices_2d(Zonotope(Vector::Zero(2), g));
    CHECK(merged.size() == 4);
    CHECK(shoelace(merged) == doctest::Approx(12.0));

    CHECK(vertices_2d(Zonotope(Vector{{1.0, 2.0}})).size() == 1);
}

TEST_CASE("property: support additivity")
{
    testgen::Gen gen(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = gen.integer(1, 4);
        const Zonotope a = gen.zonotope(dim);
        const Zonotope b = gen.zonotope(dim);
        const Vector d = gen.vector(dim);
        CHECK(std::abs(support(minkowski_sum(a, b), d) - support(a, d) - support(b, d)) <= 1e-12);
    }
}

TEST_CASE("property: support matches vertex enumeration")
{
    testgen::Gen gen(102);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = gen.integer(1, 4);
        const Zonotope z = gen.zonotope(dim);
        const Vector d = gen.vector(dim);
        CHECK(std::abs(support(z, d) - testgen::support_by_vertices(z, d)) <= 1e-12);
        CHECK(std::abs(d.dot(support_point(z, d)) - support(z, d)) <= 1e-12);
    }
}

TEST_CASE("property: linear-map duality")
{
    testgen::Gen gen(103);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = gen.integer(1, 4);
        const int out = gen.integer(1, 4);
        const Zonotope z = gen.zonotope(dim);
        const Matrix m = gen.matrix(out, dim);
        const Vector d = gen.vector(out);
        const Vector mt_d = m.transpose() * d;
        CHECK(std::abs(support(linear_map(m, z), d) - support(z, mt_d)) <= 1e-12);
    }
}

TEST_CASE("property: membership")
{
    testgen::Gen gen(104);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = gen.integer(1, 4);
        const Zonotope z = gen.zonotope(dim);
        const Vector p = point_from_coefficients(z, gen.coefficients(z.num_generators()));
        for (int k = 0; k < 100; ++k) {
            const Vector d = gen.unit(dim);
            CHECK(d.dot(p) <= support(z, d) + 1e-12);
        }
    }
}

TEST_CASE("property: convexity of the support function")
{
    testgen::Gen gen(105);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = gen.integer(1, 4);
        const Zonotope z = gen.zonotope(dim);
        const Vector d1 = gen.vector(dim);
        const Vector d2 = gen.vector(dim);
        CHECK(support(z, d1 + d2) <= support(z, d1) + support(z, d2) + 1e-12);
    }
}

TEST_CASE("property: norm estimate brackets")
{
    testgen::Gen gen(106);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = gen.integer(2, 3);
        const Zonotope z = gen.zonotope(dim);
        const double est = norm_estimate(z, 360);
        CHECK(est >= z.center().norm() - 1e-12);
        CHECK(est <= norm_upper_bound(z) + 1e-12);
        if (dim == 2) {
            // 2-D: the vertex maximum is exact, the grid estimate within inscription error
            CHECK(est >= norm_upper_bound(z) * std::cos(M_PI / 360.0) - 1e-12);
        }
    }
}
