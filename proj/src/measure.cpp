#include "lqg/measure.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace lqg {

AreaMeasure area_measure(const FieldGrid& field, const MetricParams& params, double scale_s) {
    params.validate();
    if (!(scale_s >= field.spec.mesh))
        throw std::invalid_argument("area_measure: scale below mesh is under-resolved");
    const FieldGrid* h = &field;
    FieldGrid smoothed;
    if (field.provenance == Provenance::raw_gff) {
        smoothed = mollify(field, scale_s);
        h = &smoothed;
    }
    AreaMeasure out;
    out.spec = field.spec;
    out.cell_mass.resize(field.spec.vertex_count());
    double gamma = params.gamma;
    double prefactor =
        field.spec.mesh * field.spec.mesh * std::pow(scale_s, gamma * gamma / 2.0);
    for (VertexId v = 0; v < out.cell_mass.size(); v++) {
        double m = prefactor * std::exp(gamma * h->values[v]);
        if (!std::isfinite(m) || !(m > 0.0))
            throw std::runtime_error("area_measure: non-finite cell mass");
        out.cell_mass[v] = m;
    }
    return out;
}

void loglog_fit(const std::vector<double>& x, const std::vector<double>& y, int lo, int hi,
                double* slope, double* stderr_out) {
    int n = hi - lo + 1;
    if (n < 2) {
        *slope = 0.0;
        *stderr_out = 0.0;
        return;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = lo; k <= hi; k++) {
        double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        *slope = 0.0;
        *stderr_out = 0.0;
        return;
    }
    double b = (n * sxy - sx * sy) / denom;
    double a = (sy - b * sx) / n;
    double ss = 0.0;
    for (int k = lo; k <= hi; k++) {
        double r = std::log(y[k]) - (a + b * std::log(x[k]));
        ss += r * r;
    }
    *slope = b;
    *stderr_out = n > 2 ? std::sqrt(ss / (n - 2) / (sxx - sx * sx / n)) : 0.0;
}

namespace {

DimensionEstimate fit_with_window(std::vector<double> scales, std::vector<double> values) {
    DimensionEstimate est;
    est.scales = std::move(scales);
    est.counts_or_masses = std::move(values);
    int n = int(est.scales.size());
    // boundary/mesh contamination: drop the two smallest and two largest scales
    est.window_lo = std::min(2, std::max(0, n - 2));
    est.window_hi = std::max(est.window_lo, n - 3);
    if (n < 6) {
        est.window_lo = 0;
        est.window_hi = n - 1;
    }
    loglog_fit(est.scales, est.counts_or_masses, est.window_lo, est.window_hi, &est.slope,
               &est.stderr_);
    return est;
}

}  // namespace

DimensionEstimate ball_volume_curve(const MetricField& mf, const AreaMeasure& measure,
                                    const std::vector<double>& radii) {
    if (measure.cell_mass.size() != mf.distances.size())
        throw std::invalid_argument("ball_volume_curve: measure/metric size mismatch");
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    // one sweep over vertices ordered by distance
    std::vector<VertexId> order(mf.distances.size());
    for (VertexId v = 0; v < order.size(); v++) order[v] = v;
    std::sort(order.begin(), order.end(),
              [&](VertexId a, VertexId b) { return mf.distances[a] < mf.distances[b]; });
    std::vector<double> masses;
    double acc = 0.0;
    std::size_t next = 0;
    for (double r : sorted) {
        while (next < order.size() && mf.distances[order[next]] <= r)
            acc += measure.cell_mass[order[next++]];
        masses.push_back(acc);
    }
    return fit_with_window(std::move(sorted), std::move(masses));
}

DimensionEstimate ball_volume_curve(const WeightGrid& weights, const AreaMeasure& measure,
                                    VertexId center, const std::vector<double>& radii) {
    return ball_volume_curve(sssp(weights, center), measure, radii);
}

namespace {

// distances from src to every vertex within eps (early-exit Dijkstra)
void ball_distances(const WeightGrid& w, VertexId src, double eps,
                    std::vector<double>& dist, std::vector<VertexId>& touched) {
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    touched.push_back(src);
    heap.push({0.0, src});
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du > dist[u]) continue;
        if (du > eps) break;
        for_each_neighbor(w.spec, u, [&](VertexId v) {
            double nd = du + w.edge_cost(u, v);
            if (nd <= eps && nd < dist[v]) {
                if (dist[v] == kInfDist) touched.push_back(v);
                dist[v] = nd;
                heap.push({nd, v});
            }
        });
    }
}

}  // namespace

int greedy_cover_count(const std::vector<VertexId>& marked, const WeightGrid& weights,
                       double eps) {
    if (marked.empty()) return 0;
    std::vector<VertexId> order = marked;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());

    std::vector<std::uint8_t> covered(order.size(), 0);
    std::vector<double> dist(weights.spec.vertex_count(), kInfDist);
    std::vector<VertexId> touched;
    int count = 0;
    for (std::size_t k = 0; k < order.size(); k++) {
        if (covered[k]) continue;
        count++;
        touched.clear();
        ball_distances(weights, order[k], eps, dist, touched);
        for (std::size_t j = k; j < order.size(); j++)
            if (!covered[j] && dist[order[j]] <= eps) covered[j] = 1;
        for (VertexId v : touched) dist[v] = kInfDist;
    }
    return count;
}

DimensionEstimate covering_dimension(const std::vector<VertexId>& marked,
                                     const WeightGrid& weights,
                                     const std::vector<double>& radii) {
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> inv_eps, counts;
    for (double eps : sorted) {
        inv_eps.push_back(1.0 / eps);
        counts.push_back(double(greedy_cover_count(marked, weights, eps)));
    }
    // N is nonincreasing in eps, so order by 1/eps ascending for the fit
    std::reverse(inv_eps.begin(), inv_eps.end());
    std::reverse(counts.begin(), counts.end());
    DimensionEstimate est = fit_with_window(std::move(inv_eps), std::move(counts));
    return est;
}

}  // namespace lqg
