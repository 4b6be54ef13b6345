#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lqg/field.hpp"
#include "lqg/geodesics.hpp"
#include "lqg/metric.hpp"

namespace lqg::testutil {

/// Field of constant value c tagged as mollified so build_weights accepts it.
inline FieldGrid constant_field(const GridSpec& spec, double c) {
    FieldGrid f;
    f.spec = spec;
    f.values.assign(spec.vertex_count(), c);
    f.provenance = Provenance::mollified;
    f.mollification_eps = spec.mesh;
    return f;
}

/// Weight grid with every vertex weight w (bypasses the field formula).
inline WeightGrid uniform_weights(const GridSpec& spec, double w) {
    WeightGrid g;
    g.spec = spec;
    g.vertex_weights.assign(spec.vertex_count(), w);
    return g;
}

/// LatticePath from explicit (row, col) steps; length filled from weights
/// when given.
inline LatticePath make_path(const GridSpec& spec,
                             const std::vector<std::pair<int, int>>& rc,
                             const WeightGrid* weights = nullptr) {
    LatticePath p;
    for (auto [i, j] : rc) p.vertices.push_back(spec.index(i, j));
    if (weights) p.length = path_length(*weights, p.vertices);
    return p;
}

/// Octile distance oracle for uniform weight w on spacing-mesh grids.
inline double octile(const GridSpec& spec, double w, VertexId a, VertexId b) {
    int di = std::abs(spec.row(a) - spec.row(b));
    int dj = std::abs(spec.col(a) - spec.col(b));
    int hi = std::max(di, dj), lo = std::min(di, dj);
    return w * (double(hi - lo) + std::numbers::sqrt2 * double(lo));
}

/// All simple-path shortest distance by pruned DFS (for tiny instances).
/// Returns the exact minimum cost over simple 8-neighbor paths a -> b.
double brute_force_distance(const WeightGrid& w, VertexId a, VertexId b, double upper_bound);

/// Anderson-Darling statistic against N(mean, sd) fitted from the sample.
double anderson_darling(std::vector<double> xs);

}  // namespace lqg::testutil
