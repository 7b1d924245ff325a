#ifndef REACHUNDER_QUADRATURE_HPP
#define REACHUNDER_QUADRATURE_HPP

#include <span>
#include <vector>

namespace reachunder {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;
};

/// K-point Gauss-Legendre rule, computed by Newton iteration on P_K.
/// Rules are cached per K; the returned reference stays valid for the
/// lifetime of the program.
const GaussRule& gauss_legendre(int points);

/// Splits [a, b] at every cut strictly inside it. Cuts need not be sorted.
/// The result starts at a and ends at b.
std::vector<double> split_interval(double a, double b, std::span<const double> cuts);

/// Composite Gauss-Legendre over the panel edges: each panel is cut into
/// `substeps` equal pieces and integrated with a `points`-node rule.
/// `f` maps a time to a value supporting `+=` and scalar `*`.
template <class F>
auto integrate_composite(F&& f, std::span<const double> edges, int substeps, int points)
{
    const GaussRule& rule = gauss_legendre(points);
    using Value = decltype(f(0.0));
    Value total{};
    bool first = true;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double len = (edges[p + 1] - edges[p]) / substeps;
        if (len <= 0.0) {
            continue;
        }
        for (int s = 0; s < substeps; ++s) {
            const double lo = edges[p] + s * len;
            const double half = 0.5 * len;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double t = lo + half * (1.0 + rule.nodes[q]);
                Value term = (half * rule.weights[q]) * f(t);
                if (first) {
                    total = std::move(term);
                    first = false;
                } else {
                    total += term;
                }
            }
        }
    }
    return total;
}

}  // namespace reachunder

#endif
