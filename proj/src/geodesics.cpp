#include "lqg/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace lqg {

namespace {

// 8-connected components of a masked vertex set; returns component id per
// vertex (-1 outside), components ordered by their smallest vertex id.
int masked_components(const GridSpec& spec, const std::vector<std::uint8_t>& mask,
                      std::vector<int>& comp) {
    comp.assign(mask.size(), -1);
    int ncomp = 0;
    std::vector<VertexId> stack;
    for (VertexId s = 0; s < mask.size(); s++) {
        if (!mask[s] || comp[s] >= 0) continue;
        comp[s] = ncomp;
        stack.push_back(s);
        while (!stack.empty()) {
            VertexId u = stack.back();
            stack.pop_back();
            for_each_neighbor(spec, u, [&](VertexId v) {
                if (mask[v] && comp[v] < 0) {
                    comp[v] = ncomp;
                    stack.push_back(v);
                }
            });
        }
        ncomp++;
    }
    return ncomp;
}

std::vector<VertexId> loop_erase(const std::vector<VertexId>& seq) {
    std::vector<VertexId> out;
    std::unordered_map<VertexId, std::size_t> pos;
    for (VertexId v : seq) {
        auto it = pos.find(v);
        if (it != pos.end()) {
            for (std::size_t k = it->second + 1; k < out.size(); k++) pos.erase(out[k]);
            out.resize(it->second + 1);
        } else {
            pos[v] = out.size();
            out.push_back(v);
        }
    }
    return out;
}

// z -> v (tree of mfz), then v -> w (reversed tree walk of mfw), loop-erased.
LatticePath through_vertex_path(const WeightGrid& weights, const MetricField& mfz,
                                const MetricField& mfw, VertexId v) {
    LatticePath a = extract_geodesic(mfz, v);
    LatticePath b = extract_geodesic(mfw, v);  // w ... v
    std::vector<VertexId> seq = a.vertices;
    for (std::size_t k = b.vertices.size() - 1; k-- > 0;) seq.push_back(b.vertices[k]);
    LatticePath out;
    out.vertices = loop_erase(seq);
    out.length = path_length(weights, out.vertices);
    return out;
}

bool connected_within(const GridSpec& spec, const std::vector<std::uint8_t>& mask, VertexId from,
                      VertexId to) {
    if (!mask[from] || !mask[to]) return false;
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<VertexId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        if (u == to) return true;
        for_each_neighbor(spec, u, [&](VertexId v) {
            if (mask[v] && !seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        });
    }
    return false;
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of empty set");
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    return xs[xs.size() / 2];
}

}  // namespace

double path_length(const WeightGrid& weights, const std::vector<VertexId>& vertices) {
    double len = 0.0;
    for (std::size_t k = 1; k < vertices.size(); k++)
        len += weights.edge_cost(vertices[k - 1], vertices[k]);
    return len;
}

LatticePath extract_geodesic(const MetricField& mf, VertexId target) {
    if (target >= mf.distances.size() || !mf.reached(target))
        throw std::invalid_argument("extract_geodesic: target not reached");
    LatticePath p;
    VertexId v = target;
    while (v != kNoVertex) {
        p.vertices.push_back(v);
        if (v == mf.source) break;
        v = mf.predecessors[v];
    }
    std::reverse(p.vertices.begin(), p.vertices.end());
    p.length = mf.distances[target];
    return p;
}

Corridor corridor(const MetricField& mfz, const MetricField& mfw, VertexId z, VertexId w,
                  double delta) {
    if (delta < 0.0) throw std::invalid_argument("corridor: delta must be nonnegative");
    Corridor c;
    c.z = z;
    c.w = w;
    c.delta = delta;
    c.dzw = mfz.distances[w];
    double cutoff = c.dzw + delta;
    cutoff += 1e-12 * (cutoff + 1.0);  // roundoff guard: keep exact geodesics inside
    std::size_t total = mfz.distances.size();
    c.mask.assign(total, 0);
    for (VertexId v = 0; v < total; v++) {
        if (mfz.distances[v] + mfw.distances[v] <= cutoff) {
            c.mask[v] = 1;
            c.vertices.push_back(v);
        }
    }
    return c;
}

Corridor corridor(const WeightGrid& weights, VertexId z, VertexId w, double delta) {
    MetricField mfz = sssp(weights, z);
    MetricField mfw = sssp(weights, w);
    return corridor(mfz, mfw, z, w, delta);
}

double default_slack(const WeightGrid& weights) {
    const GridSpec& spec = weights.spec;
    std::vector<double> costs;
    costs.reserve(spec.vertex_count() * 4);
    for (VertexId u = 0; u < spec.vertex_count(); u++)
        for_each_neighbor(spec, u, [&](VertexId v) {
            if (v > u) costs.push_back(weights.edge_cost(u, v));
        });
    return 2.0 * median_of(std::move(costs));
}

double default_excision(const WeightGrid& weights) {
    return 5.0 * median_of(weights.vertex_weights);
}

MultiplicityResult multiplicity(const WeightGrid& weights, const MetricField& mfz,
                                const MetricField& mfw, VertexId z, VertexId w, double delta,
                                double rho) {
    if (rho < 0.0) throw std::invalid_argument("multiplicity: rho must be nonnegative");
    double d = mfz.distances[w];
    if (!(d > 4.0 * rho))
        throw std::invalid_argument("multiplicity: need d(z,w) > 4 rho");
    Corridor c = corridor(mfz, mfw, z, w, delta);

    std::vector<std::uint8_t> excised = c.mask;
    for (VertexId v : c.vertices)
        if (mfz.distances[v] < rho || mfw.distances[v] < rho) excised[v] = 0;

    std::vector<int> comp;
    int ncomp = masked_components(weights.spec, excised, comp);

    // only components crossing the mid-annulus count as channels; slivers
    // hugging an excision ball (spurs whose return path re-enters it) do not
    std::vector<std::uint8_t> crosses_mid(ncomp, 0);
    std::vector<VertexId> best(ncomp, kNoVertex);
    std::vector<double> best_sum(ncomp, kInfDist);
    for (VertexId v : c.vertices) {
        int cid = comp[v];
        if (cid < 0) continue;
        if (mfz.distances[v] >= 0.25 * d && mfw.distances[v] >= 0.25 * d) crosses_mid[cid] = 1;
        double s = mfz.distances[v] + mfw.distances[v];
        if (s < best_sum[cid] || (s == best_sum[cid] && v < best[cid])) {
            best_sum[cid] = s;
            best[cid] = v;
        }
    }
    MultiplicityResult out;
    for (int cid = 0; cid < ncomp; cid++) {
        if (!crosses_mid[cid] || best[cid] == kNoVertex) continue;
        out.k++;
        out.representatives.push_back(through_vertex_path(weights, mfz, mfw, best[cid]));
    }
    return out;
}

MultiplicityResult multiplicity(const WeightGrid& weights, VertexId z, VertexId w, double delta,
                                double rho) {
    MetricField mfz = sssp(weights, z);
    MetricField mfw = sssp(weights, w);
    return multiplicity(weights, mfz, mfw, z, w, delta, rho);
}

namespace {

int branch_count(const GridSpec& spec, const Corridor& c, const std::vector<double>& dist,
                 double r, double thickness) {
    std::vector<std::uint8_t> shell(c.mask.size(), 0);
    bool any = false;
    for (VertexId v : c.vertices)
        if (dist[v] >= r && dist[v] <= r + thickness) {
            shell[v] = 1;
            any = true;
        }
    if (!any) return 0;
    std::vector<int> comp;
    return masked_components(spec, shell, comp);
}

}  // namespace

NetworkClass classify_network(const WeightGrid& weights, const MetricField& mfz,
                              const MetricField& mfw, VertexId z, VertexId w, double delta,
                              double r) {
    const GridSpec& spec = weights.spec;
    double d = mfz.distances[w];
    if (!(d > 4.0 * r)) throw std::invalid_argument("classify_network: need d(z,w) > 4 r");
    Corridor c = corridor(mfz, mfw, z, w, delta);
    double thickness = 2.0 * spec.mesh;

    NetworkClass out;
    out.n = branch_count(spec, c, mfz.distances, r, thickness);
    out.m = branch_count(spec, c, mfw.distances, r, thickness);

    // splitter: a corridor vertex whose 3x3 block separates z from w within
    // the corridor; candidates live on the exact geodesic
    LatticePath geo = extract_geodesic(mfz, w);
    double best_score = kInfDist;
    std::optional<VertexId> splitter;
    std::vector<std::uint8_t> work = c.mask;
    for (VertexId u : geo.vertices) {
        if (u == z || u == w) continue;
        if (mfz.distances[u] <= r || mfw.distances[u] <= r) continue;
        std::vector<VertexId> block{u};
        for_each_neighbor(spec, u, [&](VertexId v) { block.push_back(v); });
        bool touches_endpoint = false;
        for (VertexId b : block)
            if (b == z || b == w) touches_endpoint = true;
        if (touches_endpoint) continue;
        for (VertexId b : block) work[b] = 0;
        bool split = !connected_within(spec, work, z, w);
        for (VertexId b : block) work[b] = c.mask[b];
        if (split) {
            double score = std::fabs(mfz.distances[u] - 0.5 * d);
            if (score < best_score) {
                best_score = score;
                splitter = u;
            }
        }
    }
    out.splitter = splitter;

    // stability of the branch counts under +-25% radius perturbation
    bool stable = splitter.has_value();
    for (double f : {0.75, 1.25}) {
        if (branch_count(spec, c, mfz.distances, f * r, thickness) != out.n) stable = false;
        if (branch_count(spec, c, mfw.distances, f * r, thickness) != out.m) stable = false;
    }
    out.normal = stable;

    // witnesses: near-geodesics realizing each branch on both sides, routed
    // through the splitter junction when one exists
    auto branch_seeds = [&](const std::vector<double>& dist) {
        std::vector<std::uint8_t> shell(c.mask.size(), 0);
        for (VertexId v : c.vertices)
            if (dist[v] >= r && dist[v] <= r + thickness) shell[v] = 1;
        std::vector<int> comp;
        int ncomp = masked_components(spec, shell, comp);
        std::vector<VertexId> seed(ncomp, kNoVertex);
        std::vector<double> seed_sum(ncomp, kInfDist);
        for (VertexId v = 0; v < shell.size(); v++) {
            if (!shell[v]) continue;
            double s = mfz.distances[v] + mfw.distances[v];
            int cid = comp[v];
            if (s < seed_sum[cid] || (s == seed_sum[cid] && v < seed[cid])) {
                seed_sum[cid] = s;
                seed[cid] = v;
            }
        }
        return seed;
    };
    auto push_witness = [&](LatticePath&& wit) {
        if (splitter && std::find(wit.vertices.begin(), wit.vertices.end(), *splitter) ==
                            wit.vertices.end())
            return;  // junction erased by a loop; keep only u-certified witnesses
        for (const auto& have : out.witnesses)
            if (have.vertices == wit.vertices) return;
        out.witnesses.push_back(std::move(wit));
    };
    if (splitter) {
        MetricField mfu = sssp(weights, *splitter);
        auto reversed = [](LatticePath p) {
            std::reverse(p.vertices.begin(), p.vertices.end());
            return p;
        };
        LatticePath u_to_w = reversed(extract_geodesic(mfw, *splitter));
        LatticePath z_to_u = extract_geodesic(mfz, *splitter);
        auto join = [&](const std::vector<VertexId>& a, const std::vector<VertexId>& b,
                        const std::vector<VertexId>& cpart) {
            std::vector<VertexId> seq = a;
            seq.insert(seq.end(), b.begin() + 1, b.end());
            seq.insert(seq.end(), cpart.begin() + 1, cpart.end());
            LatticePath wit;
            wit.vertices = loop_erase(seq);
            wit.length = path_length(weights, wit.vertices);
            return wit;
        };
        for (VertexId a : branch_seeds(mfz.distances)) {
            if (a == kNoVertex) continue;
            LatticePath za = extract_geodesic(mfz, a);
            LatticePath au = reversed(extract_geodesic(mfu, a));
            push_witness(join(za.vertices, au.vertices, u_to_w.vertices));
        }
        for (VertexId b : branch_seeds(mfw.distances)) {
            if (b == kNoVertex) continue;
            LatticePath ub = extract_geodesic(mfu, b);
            LatticePath bw = reversed(extract_geodesic(mfw, b));
            push_witness(join(z_to_u.vertices, ub.vertices, bw.vertices));
        }
    } else {
        for (VertexId a : branch_seeds(mfz.distances)) {
            if (a == kNoVertex) continue;
            push_witness(through_vertex_path(weights, mfz, mfw, a));
        }
    }
    return out;
}

NetworkClass classify_network(const WeightGrid& weights, VertexId z, VertexId w, double delta,
                              double r) {
    MetricField mfz = sssp(weights, z);
    MetricField mfw = sssp(weights, w);
    return classify_network(weights, mfz, mfw, z, w, delta, r);
}

std::optional<SnEvidence> detect_sn(const std::vector<LatticePath>& paths, double slack) {
    if (paths.size() < 2) return std::nullopt;
    VertexId a = paths[0].front(), b = paths[0].back();
    for (const auto& p : paths)
        if (p.front() != a || p.back() != b)
            throw std::invalid_argument("detect_sn: paths must share endpoints");

    double lo = kInfDist, hi = -kInfDist;
    for (const auto& p : paths) {
        lo = std::min(lo, p.length);
        hi = std::max(hi, p.length);
    }
    if (hi - lo > slack) return std::nullopt;

    std::vector<std::unordered_set<VertexId>> vsets(paths.size());
    for (std::size_t i = 0; i < paths.size(); i++)
        vsets[i].insert(paths[i].vertices.begin(), paths[i].vertices.end());

    // first vertex of each path hit by no other path
    std::vector<VertexId> private_mark(paths.size(), kNoVertex);
    for (std::size_t i = 0; i < paths.size(); i++) {
        for (VertexId v : paths[i].vertices) {
            bool priv = true;
            for (std::size_t j = 0; j < paths.size() && priv; j++)
                if (j != i && vsets[j].count(v)) priv = false;
            if (priv) {
                private_mark[i] = v;
                break;
            }
        }
    }

    std::size_t unmarked = paths.size();  // sentinel: all paths own a mark
    for (std::size_t i = 0; i < paths.size(); i++) {
        if (private_mark[i] != kNoVertex) continue;
        if (unmarked != paths.size()) return std::nullopt;  // two markless paths
        unmarked = i;
    }
    if (unmarked == paths.size()) unmarked = 0;

    SnEvidence ev;
    ev.paths.push_back(paths[unmarked]);
    for (std::size_t i = 0; i < paths.size(); i++) {
        if (i == unmarked) continue;
        ev.paths.push_back(paths[i]);
        ev.marks.push_back(private_mark[i]);
    }
    return ev;
}

int overlap_components(const LatticePath& p, const LatticePath& p2) {
    std::unordered_set<VertexId> other(p2.vertices.begin(), p2.vertices.end());
    std::vector<char> shared(p.vertices.size());
    for (std::size_t t = 0; t < p.vertices.size(); t++)
        shared[t] = other.count(p.vertices[t]) ? 1 : 0;

    int runs = 0;
    bool seen_shared_before = false;
    std::size_t t = 0;
    while (t < p.vertices.size()) {
        if (shared[t]) {
            seen_shared_before = true;
            t++;
            continue;
        }
        std::size_t end = t;
        while (end < p.vertices.size() && !shared[end]) end++;
        bool shared_after = end < p.vertices.size();
        if (seen_shared_before && shared_after) runs++;
        t = end;
    }
    return runs;
}

PerturbationReport perturbation_experiment(const WeightGrid& weights, VertexId z, VertexId w,
                                           const BumpFunction& bump, const MetricParams& params,
                                           double delta, double rho) {
    bump.validate();
    const GridSpec& spec = weights.spec;
    double margin = spec.mesh;
    if (dist(bump.center, spec.coord(z)) <= bump.outer_radius + margin ||
        dist(bump.center, spec.coord(w)) <= bump.outer_radius + margin)
        throw std::invalid_argument(
            "perturbation_experiment: bump must stay clear of the endpoint mesh-balls");

    if (delta < 0.0) delta = default_slack(weights);
    if (rho < 0.0) rho = default_excision(weights);

    MetricField mfz = sssp(weights, z);
    MetricField mfw = sssp(weights, w);
    MultiplicityResult mult = multiplicity(weights, mfz, mfw, z, w, delta, rho);

    WeightGrid bumped =
        apply_weyl(weights, [&](Vec2 p) { return bump(p); }, params);
    double xi = params.xi();
    double factor = bump.height >= 0.0 ? 1.0 - std::exp(-xi * bump.height) : 0.0;

    PerturbationReport report;
    for (auto& path : mult.representatives) {
        PerturbedPath pp;
        pp.path = path;
        bool hits_inner = false, meets_outer = false;
        for (VertexId v : path.vertices) {
            double r = dist(spec.coord(v), bump.center);
            if (r <= bump.inner_radius) hits_inner = true;
            if (r < bump.outer_radius) meets_outer = true;
        }
        pp.kind = hits_inner ? PerturbedPath::Kind::hitter
                  : !meets_outer ? PerturbedPath::Kind::avoider
                                 : PerturbedPath::Kind::partial;
        pp.old_length = path_length(weights, path.vertices);
        pp.new_length = path_length(bumped, path.vertices);
        for (std::size_t k = 1; k < path.vertices.size(); k++) {
            VertexId a = path.vertices[k - 1], b = path.vertices[k];
            if (dist(spec.coord(a), bump.center) <= bump.inner_radius &&
                dist(spec.coord(b), bump.center) <= bump.inner_radius)
                pp.inner_traversal += weights.edge_cost(a, b);
        }
        if (pp.kind == PerturbedPath::Kind::avoider) {
            pp.ok = std::fabs(pp.new_length - pp.old_length) <= 1e-12;
        } else if (pp.kind == PerturbedPath::Kind::hitter && bump.height >= 0.0) {
            pp.required_increase = factor * pp.inner_traversal;
            pp.ok = pp.new_length - pp.old_length >= pp.required_increase - 1e-12;
        }
        if (!pp.ok) report.violations++;
        report.paths.push_back(std::move(pp));
    }
    return report;
}

}  // namespace lqg
