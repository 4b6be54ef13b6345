#include "helpers.hpp"

#include <functional>

namespace lqg::testutil {

double brute_force_distance(const WeightGrid& w, VertexId a, VertexId b, double upper_bound) {
    const GridSpec& spec = w.spec;
    std::vector<std::uint8_t> on_path(spec.vertex_count(), 0);
    double best = upper_bound;
    std::function<void(VertexId, double)> dfs = [&](VertexId u, double len) {
        if (len >= best) return;
        if (u == b) {
            best = len;
            return;
        }
        on_path[u] = 1;
        for_each_neighbor(spec, u, [&](VertexId v) {
            if (!on_path[v]) dfs(v, len + w.edge_cost(u, v));
        });
        on_path[u] = 0;
    };
    dfs(a, 0.0);
    return best;
}

double anderson_darling(std::vector<double> xs) {
    std::size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(n);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= double(n - 1);
    double sd = std::sqrt(var);
    std::sort(xs.begin(), xs.end());
    auto phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
    double a2 = -double(n);
    for (std::size_t i = 0; i < n; i++) {
        double zi = phi((xs[i] - mean) / sd);
        double zr = phi((xs[n - 1 - i] - mean) / sd);
        zi = std::clamp(zi, 1e-15, 1.0 - 1e-15);
        zr = std::clamp(zr, 1e-15, 1.0 - 1e-15);
        a2 -= (2.0 * double(i) + 1.0) / double(n) * (std::log(zi) + std::log(1.0 - zr));
    }
    // small-sample correction for estimated parameters
    return a2 * (1.0 + 0.75 / double(n) + 2.25 / double(n * n));
}

}  // namespace lqg::testutil
