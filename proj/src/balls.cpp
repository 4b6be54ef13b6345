#include "lqg/balls.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace lqg {

namespace {

// counterclockwise neighbor order: E, NE, N, NW, W, SW, S, SE
constexpr int kDi[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDj[8] = {1, 1, 0, -1, -1, -1, 0, 1};

// Moore-neighbor boundary trace of the mask, normalized to counterclockwise
// orientation and rotated to start at the lowest-index contour vertex.
std::vector<VertexId> moore_trace(const GridSpec& spec, const std::vector<std::uint8_t>& mask) {
    int n = spec.side_count;
    auto at = [&](int i, int j) -> bool {
        if (i < 0 || j < 0 || i >= n || j >= n) return false;
        return mask[std::size_t(i) * n + j] != 0;
    };

    int si = -1, sj = -1;
    for (int i = 0; i < n && si < 0; i++)
        for (int j = 0; j < n; j++)
            if (at(i, j)) {
                si = i;
                sj = j;
                break;
            }
    if (si < 0) return {};

    // entered the start pixel from the west (scan order)
    int pi = si, pj = sj;
    int bdir = 4;  // direction from p toward the backtrack pixel
    std::vector<VertexId> cycle;
    cycle.push_back(spec.index(pi, pj));

    const int start_bdir = bdir;
    std::size_t guard = 8 * spec.vertex_count() + 16;
    bool closed = false;
    while (guard--) {
        int found = -1;
        for (int k = 1; k <= 8; k++) {
            int dir = (bdir + k) % 8;
            if (at(pi + kDi[dir], pj + kDj[dir])) {
                found = dir;
                break;
            }
        }
        if (found < 0) break;  // isolated vertex
        int prev = (found + 7) % 8;  // last empty position checked before found
        pi += kDi[found];
        pj += kDj[found];
        // direction from the new pixel back to that empty neighbor
        bdir = -1;
        int ei = pi - kDi[found] + kDi[prev], ej = pj - kDj[found] + kDj[prev];
        for (int d = 0; d < 8; d++)
            if (pi + kDi[d] == ei && pj + kDj[d] == ej) bdir = d;
        if (bdir < 0) bdir = (found + 4) % 8;
        if (pi == si && pj == sj && bdir == start_bdir) {
            closed = true;
            break;
        }
        cycle.push_back(spec.index(pi, pj));
    }
    (void)closed;

    if (cycle.size() >= 3) {
        // normalize to counterclockwise via the shoelace sign
        double area2 = 0.0;
        for (std::size_t k = 0; k < cycle.size(); k++) {
            Vec2 a = spec.coord(cycle[k]);
            Vec2 b = spec.coord(cycle[(k + 1) % cycle.size()]);
            area2 += a.x * b.y - b.x * a.y;
        }
        if (area2 < 0.0) std::reverse(cycle.begin() + 1, cycle.end());
    }
    auto lowest = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), lowest, cycle.end());
    return cycle;
}

}  // namespace

std::vector<VertexId> metric_ball(const MetricField& mf, double s) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < mf.distances.size(); v++)
        if (mf.distances[v] <= s) out.push_back(v);
    return out;
}

FilledBallRegion filled_ball(const MetricField& mf, double s, std::optional<VertexId> target) {
    const GridSpec& spec = mf.spec;
    std::size_t total = spec.vertex_count();
    FilledBallRegion region;
    region.center = mf.source;
    region.radius = s;
    region.target = target;
    region.member.assign(total, 0);

    if (target && mf.distances[*target] <= s) {
        // target already swallowed: the filled ball is the whole plane
        region.member.assign(total, 1);
        region.whole_grid = true;
        region.boundary_cycle = moore_trace(spec, region.member);
        return region;
    }

    std::vector<std::uint8_t> in_ball(total, 0);
    for (VertexId v = 0; v < total; v++) in_ball[v] = mf.distances[v] <= s ? 1 : 0;

    // flood the target's complement component, 4-connected
    std::vector<std::uint8_t> outside(total, 0);
    std::vector<VertexId> stack;
    int n = spec.side_count;
    auto push = [&](VertexId v) {
        if (!in_ball[v] && !outside[v]) {
            outside[v] = 1;
            stack.push_back(v);
        }
    };
    if (target) {
        push(*target);
    } else {
        for (int k = 0; k < n; k++) {
            push(spec.index(0, k));
            push(spec.index(n - 1, k));
            push(spec.index(k, 0));
            push(spec.index(k, n - 1));
        }
    }
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        int i = spec.row(u), j = spec.col(u);
        if (i > 0) push(spec.index(i - 1, j));
        if (i < n - 1) push(spec.index(i + 1, j));
        if (j > 0) push(spec.index(i, j - 1));
        if (j < n - 1) push(spec.index(i, j + 1));
    }
    for (VertexId v = 0; v < total; v++) region.member[v] = outside[v] ? 0 : 1;
    region.boundary_cycle = moore_trace(spec, region.member);
    return region;
}

ConfluenceReport confluence_census(const WeightGrid& weights, VertexId center, VertexId w_target,
                                   double t, double s) {
    if (!(0.0 < t && t < s)) throw std::invalid_argument("confluence_census: need 0 < t < s");
    MetricField mf = sssp_leftmost(weights, center);
    if (!(s < mf.distances[w_target]))
        throw std::invalid_argument("confluence_census: need s < d(center, target)");

    FilledBallRegion inner = filled_ball(mf, t, w_target);
    FilledBallRegion outer = filled_ball(mf, s, w_target);

    std::unordered_map<VertexId, int> inner_pos;  // vertex -> first index on inner cycle
    for (std::size_t k = 0; k < inner.boundary_cycle.size(); k++)
        inner_pos.emplace(inner.boundary_cycle[k], int(k));

    ConfluenceReport report;
    report.t = t;
    report.s = s;
    report.outer_boundary_length = int(outer.boundary_cycle.size());

    // last inner-boundary crossing of the leftmost geodesic to each outer vertex
    std::vector<VertexId> crossing(outer.boundary_cycle.size(), kNoVertex);
    for (std::size_t k = 0; k < outer.boundary_cycle.size(); k++) {
        VertexId y = outer.boundary_cycle[k];
        VertexId x = kNoVertex;
        int exits = 0;
        bool was_member = true;
        VertexId v = y;
        // walk target -> source; flip to source -> target bookkeeping
        std::vector<VertexId> path;
        while (v != kNoVertex) {
            path.push_back(v);
            if (v == center) break;
            v = mf.predecessors[v];
        }
        std::reverse(path.begin(), path.end());
        for (VertexId p : path) {
            if (inner_pos.count(p)) x = p;
            bool member_now = inner.member[p] != 0;
            if (was_member && !member_now) exits++;
            was_member = member_now;
        }
        if (x == kNoVertex) report.violations.no_crossing++;
        if (exits > 1) report.violations.reentry++;
        crossing[k] = x;
    }

    if (crossing.empty()) return report;

    // maximal cyclic runs of equal crossing vertex
    std::vector<BoundaryArc> runs;
    for (std::size_t k = 0; k < crossing.size(); k++) {
        if (!runs.empty() && runs.back().x == crossing[k] &&
            runs.back().end == int(k) - 1) {
            runs.back().end = int(k);
        } else {
            runs.push_back({crossing[k], int(k), int(k)});
        }
    }
    if (runs.size() >= 2 && runs.front().x == runs.back().x &&
        runs.back().end == int(crossing.size()) - 1 && runs.front().start == 0) {
        runs.front().start = runs.back().start;  // wrapped arc
        runs.pop_back();
    }
    report.arcs = runs;

    std::unordered_map<VertexId, int> seen;  // crossing vertex -> run count
    for (const auto& arc : runs)
        if (arc.x != kNoVertex) {
            auto [it, fresh] = seen.emplace(arc.x, 0);
            it->second++;
            if (fresh) report.confluence_points.push_back(arc.x);
            else report.violations.non_contiguous++;
        }

    // cyclic order of arcs vs cyclic order of their points on the inner cycle
    std::vector<int> q;
    for (VertexId x : report.confluence_points) {
        auto it = inner_pos.find(x);
        if (it != inner_pos.end()) q.push_back(it->second);
    }
    if (q.size() >= 2) {
        int descents = 0;
        for (std::size_t k = 0; k < q.size(); k++)
            if (q[(k + 1) % q.size()] < q[k]) descents++;
        report.violations.cyclic_mismatch = std::max(0, descents - 1);
    }
    return report;
}

double near_point_confluence(const WeightGrid& weights, VertexId z, double r_in, double r_out,
                             int sample_count, std::uint64_t seed) {
    if (!(r_out > r_in) || sample_count < 1)
        throw std::invalid_argument("near_point_confluence: need r_out > r_in, samples >= 1");
    MetricField base = sssp(weights, z);  // annulus membership is measured from z

    std::vector<VertexId> sources;
    if (r_in <= 0.0) {
        sources.push_back(z);
    } else {
        std::vector<VertexId> ball = metric_ball(base, r_in);
        std::size_t stride = std::max<std::size_t>(1, ball.size() / 8);
        for (std::size_t k = 0; k < ball.size(); k += stride) sources.push_back(ball[k]);
    }

    std::vector<VertexId> eligible;
    for (VertexId v = 0; v < base.distances.size(); v++)
        if (base.reached(v) && base.distances[v] >= 3.0 * r_out) eligible.push_back(v);
    if (eligible.empty()) throw std::runtime_error("near_point_confluence: no far targets");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    std::vector<VertexId> targets;
    for (int k = 0; k < sample_count; k++) targets.push_back(eligible[pick(rng)]);

    std::unordered_map<VertexId, int> hits;  // annulus vertex -> geodesic count
    int n_geodesics = 0;
    for (VertexId src : sources) {
        MetricField mf = src == z ? base : sssp(weights, src);
        for (VertexId tgt : targets) {
            if (!mf.reached(tgt)) continue;
            LatticePath p = extract_geodesic(mf, tgt);
            n_geodesics++;
            for (VertexId v : p.vertices)
                if (base.distances[v] > r_in && base.distances[v] <= r_out) hits[v]++;
        }
    }
    if (n_geodesics == 0) return 0.0;
    int best = 0;
    for (auto& [v, c] : hits) best = std::max(best, c);
    return double(best) / double(n_geodesics);
}

}  // namespace lqg
