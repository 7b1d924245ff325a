#include "reachunder/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace reachunder {

namespace {

GaussRule compute_rule(int k)
{
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(k));
    rule.weights.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < (k + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // three-term recurrence for P_k(x) and its derivative
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= k; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double pk = k == 0 ? 1.0 : (k == 1 ? x : p1);
            const double pkm1 = k == 1 ? 1.0 : p0;
            dp = k * (x * pk - pkm1) / (x * x - 1.0);
            const double dx = pk / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(k - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(k - 1 - i)] = w;
    }
    if (k % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(k / 2)] = 0.0;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int points)
{
    if (points < 1 || points > 64) {
        throw std::invalid_argument("gauss_legendre: points must be in [1, 64]");
    }
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(points);
    if (it == cache.end()) {
        it = cache.emplace(points, compute_rule(points)).first;
    }
    return it->second;
}

std::vector<double> split_interval(double a, double b, std::span<const double> cuts)
{
    std::vector<double> edges{a};
    std::vector<double> inner;
    for (double c : cuts) {
        if (c > a && c < b) {
            inner.push_back(c);
        }
    }
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
    edges.insert(edges.end(), inner.begin(), inner.end());
    edges.push_back(b);
    return edges;
}

}  // namespace reachunder
