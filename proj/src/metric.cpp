#include "lqg/metric.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace lqg {

namespace {

using HeapItem = std::pair<double, VertexId>;  // (distance, vertex), min-heap
using Heap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

// Core Dijkstra. stop_at: finalize and bail once this vertex pops (kNoVertex
// = run to completion). region: optional usability mask.
MetricField dijkstra(const WeightGrid& w, VertexId source, VertexId stop_at,
                     const std::uint8_t* region) {
    const GridSpec& spec = w.spec;
    std::size_t total = spec.vertex_count();
    if (source >= total) throw std::invalid_argument("sssp: source out of range");

    MetricField mf;
    mf.spec = spec;
    mf.source = source;
    mf.distances.assign(total, kInfDist);
    mf.predecessors.assign(total, kNoVertex);
    std::vector<std::uint8_t> done(total, 0);

    Heap heap;
    mf.distances[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == stop_at) break;
        for_each_neighbor(spec, u, [&](VertexId v) {
            if (done[v] || (region && !region[v])) return;
            double nd = du + w.edge_cost(u, v);
            if (nd < mf.distances[v]) {
                mf.distances[v] = nd;
                mf.predecessors[v] = u;
                heap.push({nd, v});
            } else if (nd == mf.distances[v] && u < mf.predecessors[v]) {
                mf.predecessors[v] = u;  // smallest-id tie break
            }
        });
    }
    return mf;
}

}  // namespace

WeightGrid build_weights(const FieldGrid& field, const MetricParams& params) {
    params.validate();
    bool mollified = field.provenance == Provenance::mollified ||
                     (field.provenance == Provenance::surgered && field.mollification_eps > 0.0);
    if (!mollified)
        throw std::invalid_argument("build_weights: field must be mollified first");

    WeightGrid w;
    w.spec = field.spec;
    w.vertex_weights.resize(field.spec.vertex_count());
    double xi = params.xi();
    double base = field.spec.mesh / params.norm_constant;
    std::vector<VertexId> bad;
    for (VertexId v = 0; v < w.vertex_weights.size(); v++) {
        double wt = base * std::exp(xi * field.values[v]);
        if (!std::isfinite(wt) || !(wt > 0.0)) {
            if (bad.size() < 8) bad.push_back(v);
        }
        w.vertex_weights[v] = wt;
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "build_weights: non-finite weight at vertices";
        for (VertexId v : bad) msg << ' ' << v;
        throw std::runtime_error(msg.str());
    }
    return w;
}

MetricField sssp(const WeightGrid& weights, VertexId source) {
    return dijkstra(weights, source, kNoVertex, nullptr);
}

MetricField sssp_leftmost(const WeightGrid& weights, VertexId source) {
    MetricField mf = dijkstra(weights, source, kNoVertex, nullptr);
    const GridSpec& spec = weights.spec;
    Vec2 c0 = spec.coord(source);
    for (VertexId v = 0; v < spec.vertex_count(); v++) {
        if (v == source || !mf.reached(v)) continue;
        Vec2 pv = spec.coord(v) - c0;
        double theta_v = std::atan2(pv.y, pv.x);
        VertexId best = mf.predecessors[v];
        double best_score = -10.0;
        for_each_neighbor(spec, v, [&](VertexId u) {
            if (!mf.reached(u)) return;
            if (mf.distances[u] + weights.edge_cost(u, v) != mf.distances[v]) return;
            Vec2 pu = spec.coord(u) - c0;
            double delta = std::atan2(pu.y, pu.x) - theta_v;
            while (delta <= -std::numbers::pi) delta += 2.0 * std::numbers::pi;
            while (delta > std::numbers::pi) delta -= 2.0 * std::numbers::pi;
            if (delta > best_score || (delta == best_score && u < best)) {
                best_score = delta;
                best = u;
            }
        });
        mf.predecessors[v] = best;
    }
    return mf;
}

double distance(const WeightGrid& weights, VertexId z, VertexId w) {
    if (z == w) return 0.0;
    MetricField mf = dijkstra(weights, z, w, nullptr);
    return mf.distances[w];
}

double internal_distance(const WeightGrid& weights, std::span<const std::uint8_t> region,
                         VertexId z, VertexId w) {
    if (region.size() != weights.spec.vertex_count())
        throw std::invalid_argument("internal_distance: region mask size mismatch");
    if (!region[z] || !region[w])
        throw std::invalid_argument("internal_distance: endpoints must lie in the region");
    MetricField mf = dijkstra(weights, z, w, region.data());
    return mf.distances[w];
}

WeightGrid apply_weyl(const WeightGrid& weights, const std::function<double(Vec2)>& f,
                      const MetricParams& params) {
    WeightGrid out = weights;
    double xi = params.xi();
    for (VertexId v = 0; v < out.vertex_weights.size(); v++) {
        double fv = f(out.spec.coord(v));
        if (fv != 0.0) out.vertex_weights[v] *= std::exp(xi * fv);
    }
    return out;
}

bool verify_edge_relaxation(const WeightGrid& weights, const MetricField& mf,
                            double* max_violation) {
    double worst = 0.0;
    const GridSpec& spec = weights.spec;
    for (VertexId u = 0; u < spec.vertex_count(); u++) {
        if (!mf.reached(u)) continue;
        for_each_neighbor(spec, u, [&](VertexId v) {
            if (v < u || !mf.reached(v)) return;
            double gap = std::fabs(mf.distances[u] - mf.distances[v]) - weights.edge_cost(u, v);
            worst = std::max(worst, gap);
        });
    }
    if (max_violation) *max_violation = worst;
    return worst <= 1e-12;
}

ResidualStats coordinate_change_residual(const FieldGrid& raw_field, const MetricParams& params,
                                         int a, const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                         double eps) {
    if (a < 1 || (a & (a - 1)) != 0)
        throw std::invalid_argument("coordinate_change_residual: a must be a dyadic scale >= 1");
    const GridSpec& spec = raw_field.spec;
    if (spec.side_count / a < 16)
        throw std::invalid_argument("coordinate_change_residual: scaled grid too small");

    WeightGrid w_full = build_weights(mollify(raw_field, eps), params);

    // h'(z) = h(a z) + Q log a on the subsampled grid
    GridSpec sub;
    sub.side_count = spec.side_count / a;
    sub.mesh = spec.mesh;
    sub.origin_offset = {spec.origin_offset.x / a, spec.origin_offset.y / a};
    FieldGrid scaled;
    scaled.spec = sub;
    scaled.seed = raw_field.seed;
    scaled.provenance = raw_field.provenance;
    scaled.values.resize(sub.vertex_count());
    double shift = params.Q() * std::log(double(a));
    for (int i = 0; i < sub.side_count; i++)
        for (int j = 0; j < sub.side_count; j++)
            scaled.values[sub.index(i, j)] = raw_field.value(a * i, a * j) + shift;
    WeightGrid w_sub = build_weights(mollify(scaled, eps), params);

    ResidualStats stats;
    for (auto& [z, w] : pairs) {
        Vec2 az{z.x * a, z.y * a}, aw{w.x * a, w.y * a};
        auto inside = [](const GridSpec& s, Vec2 p) {
            double lox = s.origin_offset.x, loy = s.origin_offset.y;
            double hi = (s.side_count - 1) * s.mesh;
            return p.x >= lox && p.x <= lox + hi && p.y >= loy && p.y <= loy + hi;
        };
        if (!inside(spec, az) || !inside(spec, aw) || !inside(sub, z) || !inside(sub, w)) {
            stats.skipped++;
            continue;
        }
        double d1 = distance(w_full, spec.nearest_vertex(az), spec.nearest_vertex(aw));
        double d2 = distance(w_sub, sub.nearest_vertex(z), sub.nearest_vertex(w));
        if (!(d1 > 0.0)) {
            stats.skipped++;
            continue;
        }
        stats.values.push_back(std::fabs(d1 - d2) / d1);
    }
    stats.count = stats.values.size();
    if (stats.count) {
        std::vector<double> sorted = stats.values;
        std::sort(sorted.begin(), sorted.end());
        stats.min = sorted.front();
        stats.max = sorted.back();
        stats.median = sorted[sorted.size() / 2];
        double sum = 0.0;
        for (double v : sorted) sum += v;
        stats.mean = sum / double(stats.count);
    }
    return stats;
}

double calibrate_norm_constant(const GridSpec& spec, const MetricParams& params, double eps,
                               std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw std::invalid_argument("calibrate_norm_constant: need seeds");
    MetricParams unit = params;
    unit.norm_constant = 1.0;
    int n = spec.side_count;
    VertexId left = spec.index(n / 2, n / 4);
    VertexId right = spec.index(n / 2, 3 * n / 4);
    std::vector<double> xs;
    for (std::uint64_t s : seeds) {
        WeightGrid w = build_weights(mollify(sample_gff(spec, s), eps), unit);
        xs.push_back(distance(w, left, right));
    }
    std::sort(xs.begin(), xs.end());
    return xs[xs.size() / 2];
}

}  // namespace lqg
