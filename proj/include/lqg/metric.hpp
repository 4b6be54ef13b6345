#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "lqg/field.hpp"
#include "lqg/grid.hpp"

namespace lqg {

inline constexpr double kInfDist = std::numeric_limits<double>::infinity();

/// gamma in (0,2), d_gamma > 2; xi = gamma/d_gamma and Q = 2/gamma + gamma/2
/// are derived. norm_constant is the empirical overall metric scale.
struct MetricParams {
    double gamma = 0.0;
    double d_gamma = 0.0;
    double norm_constant = 1.0;

    double xi() const { return gamma / d_gamma; }
    double Q() const { return 2.0 / gamma + 0.5 * gamma; }

    void validate() const {
        if (!(gamma > 0.0 && gamma < 2.0))
            throw std::invalid_argument("MetricParams: gamma must lie in (0,2)");
        if (!(d_gamma > 2.0))
            throw std::invalid_argument("MetricParams: d_gamma must exceed 2");
        if (!(norm_constant > 0.0))
            throw std::invalid_argument("MetricParams: norm_constant must be positive");
    }

    /// Default dimension table: only gamma = sqrt(8/3) has a rigorous value
    /// (d = 4). Everything else must be user-supplied.
    static MetricParams for_gamma(double gamma) {
        const double g83 = std::sqrt(8.0 / 3.0);
        if (std::fabs(gamma - g83) < 1e-9) return with(gamma, 4.0);
        throw std::invalid_argument(
            "MetricParams::for_gamma: no default d_gamma for this gamma; supply one");
    }
    static MetricParams with(double gamma, double d_gamma, double norm_constant = 1.0) {
        MetricParams p{gamma, d_gamma, norm_constant};
        p.validate();
        return p;
    }
};

/// Positive vertex weights mesh * exp(xi * h_eps(v)) / norm_constant.
/// Edge traversal cost is the mean of the endpoint weights, scaled by sqrt(2)
/// on diagonals (8-neighbor stencil).
struct WeightGrid {
    GridSpec spec;
    std::vector<double> vertex_weights;

    double edge_cost(VertexId u, VertexId v) const {
        bool diag = spec.row(u) != spec.row(v) && spec.col(u) != spec.col(v);
        double c = 0.5 * (vertex_weights[u] + vertex_weights[v]);
        return diag ? c * std::numbers::sqrt2 : c;
    }
};

/// Single-source distances plus predecessor tree from one Dijkstra run.
struct MetricField {
    GridSpec spec;
    VertexId source = kNoVertex;
    std::vector<double> distances;
    std::vector<VertexId> predecessors;

    bool reached(VertexId v) const { return distances[v] < kInfDist; }
};

WeightGrid build_weights(const FieldGrid& mollified_field, const MetricParams& params);

/// Exact nonnegative-weight shortest paths; ties broken toward the smaller
/// vertex id so extraction is reproducible.
MetricField sssp(const WeightGrid& weights, VertexId source);

/// Same distances as sssp, but each predecessor is re-selected among the
/// exactly-optimal candidates as the one most counterclockwise about the
/// source (lattice surrogate for the leftmost-geodesic rule).
MetricField sssp_leftmost(const WeightGrid& weights, VertexId source);

/// Single-pair distance via early-exit search; equals sssp(z).distances[w].
double distance(const WeightGrid& weights, VertexId z, VertexId w);

/// Shortest path constrained to the region mask (1 = usable vertex).
/// Returns +infinity when z and w are disconnected within the region.
double internal_distance(const WeightGrid& weights, std::span<const std::uint8_t> region,
                         VertexId z, VertexId w);

/// Multiplies every vertex weight by e^{xi f(v)}.
WeightGrid apply_weyl(const WeightGrid& weights, const std::function<double(Vec2)>& f,
                      const MetricParams& params);

/// |d(u)-d(v)| <= cost(u,v) + 1e-12 over every edge with both ends reached.
bool verify_edge_relaxation(const WeightGrid& weights, const MetricField& mf,
                            double* max_violation = nullptr);

struct ResidualStats {
    std::size_t count = 0;
    std::size_t skipped = 0;
    double min = 0.0, median = 0.0, mean = 0.0, max = 0.0;
    std::vector<double> values;
};

/// Compares D_h(a z, a w) with D_{h(a.)+Q log a}(z, w) on the subsampled
/// grid; a statistical residual at lattice scale, not an identity.
ResidualStats coordinate_change_residual(const FieldGrid& raw_field, const MetricParams& params,
                                         int a, const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                         double eps);

/// Median of distance(left-mid, right-mid of the central half) over the
/// calibration seeds, computed at norm_constant = 1. Dividing weights by the
/// returned value makes central crossings unit order.
double calibrate_norm_constant(const GridSpec& spec, const MetricParams& params, double eps,
                               std::span<const std::uint64_t> seeds);

/// Visits the (up to 8) lattice neighbors of v.
template <typename F>
inline void for_each_neighbor(const GridSpec& spec, VertexId v, F&& fn) {
    int i = spec.row(v), j = spec.col(v);
    for (int di = -1; di <= 1; di++)
        for (int dj = -1; dj <= 1; dj++) {
            if (di == 0 && dj == 0) continue;
            int ni = i + di, nj = j + dj;
            if (ni < 0 || nj < 0 || ni >= spec.side_count || nj >= spec.side_count) continue;
            fn(spec.index(ni, nj));
        }
}

}  // namespace lqg
