#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "reachunder/quadrature.hpp"

using namespace reachunder;

TEST_CASE("gauss_legendre: weights and symmetry")
{
    for (int k = 1; k <= 20; ++k) {
        const GaussRule& rule = gauss_legendre(k);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(k));
        double sum = 0.0;
        for (int q = 0; q < k; ++q) {
            sum += rule.weights[q];
            CHECK(rule.nodes[q] == doctest::Approx(-rule.nodes[k - 1 - q]).epsilon(1e-14));
            if (q > 0) {
                CHECK(rule.nodes[q] > rule.nodes[q - 1]);
            }
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(65), std::invalid_argument);
}

TEST_CASE("gauss_legendre: known 2- and 3-point rules")
{
    const GaussRule& two = gauss_legendre(2);
    CHECK(two.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    const GaussRule& three = gauss_legendre(3);
    CHECK(three.nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
    CHECK(three.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("gauss_legendre: exact on polynomials of degree 2K-1")
{
    for (int k = 1; k <= 12; ++k) {
        const GaussRule& rule = gauss_legendre(k);
        for (int deg = 0; deg <= 2 * k - 1; ++deg) {
            double q = 0.0;
            for (int j = 0; j < k; ++j) {
                q += rule.weights[j] * std::pow(rule.nodes[j], deg);
            }
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(std::abs(q - exact) < 1e-13);
        }
    }
}

TEST_CASE("split_interval")
{
    const std::vector<double> cuts{0.7, -1.0, 0.25, 3.0, 0.25, 0.0};
    const auto edges = split_interval(0.0, 1.0, cuts);
    CHECK(edges == std::vector<double>{0.0, 0.25, 0.7, 1.0});
    CHECK(split_interval(2.0, 3.0, {}) == std::vector<double>{2.0, 3.0});
}

TEST_CASE("integrate_composite: polynomial and smooth integrands")
{
    const std::vector<double> edges{0.0, 0.3, 1.0};
    const double cubic = integrate_composite([](double t) { return t * t * t - 2.0 * t; }, edges,
                                             4, 2);
    CHECK(cubic == doctest::Approx(0.25 - 1.0).epsilon(1e-14));

    const double e = integrate_composite([](double t) { return std::exp(t); },
                                         std::vector<double>{0.0, 1.0}, 4, 5);
    CHECK(std::abs(e - (std::exp(1.0) - 1.0)) < 1e-14);

    // piecewise integrand integrated exactly when split at its kink
    const double kink = integrate_composite([](double t) { return std::abs(t - 0.4); },
                                            split_interval(0.0, 1.0, std::vector<double>{0.4}),
                                            1, 1);
    CHECK(kink == doctest::Approx(0.08 + 0.18).epsilon(1e-14));
}
