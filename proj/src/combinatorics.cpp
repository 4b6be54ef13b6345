#include "lqg/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "lqg/geodesics.hpp"

namespace lqg {

bool SimpleGraph::has_edge(int a, int b) const {
    for (auto [u, v] : edges)
        if ((u == a && v == b) || (u == b && v == a)) return true;
    return false;
}

void SimpleGraph::add_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("SimpleGraph: self-loop");
    if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count)
        throw std::invalid_argument("SimpleGraph: vertex out of range");
    if (has_edge(a, b)) throw std::invalid_argument("SimpleGraph: duplicate edge");
    edges.emplace_back(std::min(a, b), std::max(a, b));
}

std::vector<int> SimpleGraph::degrees() const {
    std::vector<int> deg(vertex_count, 0);
    for (auto [u, v] : edges) {
        deg[u]++;
        deg[v]++;
    }
    return deg;
}

std::vector<std::vector<int>> SimpleGraph::adjacency() const {
    std::vector<std::vector<int>> adj(vertex_count);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

bool SimpleGraph::connected() const {
    if (vertex_count == 0) return true;
    auto adj = adjacency();
    std::vector<char> seen(vertex_count, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                count++;
                stack.push_back(v);
            }
    }
    return count == vertex_count;
}

namespace {

using u128 = unsigned __int128;

unsigned long long isqrt_u128(u128 x) {
    if (x == 0) return 0;
    unsigned long long r = (unsigned long long)std::sqrt((double)x);
    // settle to exact floor sqrt
    while ((u128)r * r > x) r--;
    while ((u128)(r + 1) * (r + 1) <= x) r++;
    return r;
}

// Largest integer q >= 0 with  d*q <= B - sqrt(R), decided by exact
// integer comparisons (R >= 0, B - sqrt(R) >= 0 assumed).
long long exact_floor_of_half_diff(long long B, u128 R, long long d) {
    unsigned long long r = isqrt_u128(R);
    long long q = (B - (long long)r) / d;  // candidate, off by at most one
    auto ok = [&](long long qq) {
        if (qq < 0) return false;
        long long rem = B - d * qq;
        if (rem < 0) return false;
        return (u128)rem * (u128)rem >= R;  // sqrt(R) <= B - d*q
    };
    while (!ok(q)) q--;
    while (ok(q + 1)) q++;
    return q;
}

}  // namespace

long long independent_set_lower_bound(long long V, long long E) {
    if (V < 1) throw std::invalid_argument("independent_set_lower_bound: V >= 1 required");
    if (E < 0) throw std::invalid_argument("independent_set_lower_bound: E >= 0 required");
    long long B = 2 * E + V + 1;
    double Bd = double(B);
    double radicand = Bd * Bd - 4.0 * double(V) * double(V);
    if (radicand < 0) {
        // exact check: B^2 - 4V^2 < 0 is impossible for E >= (V-1)/2, so a
        // genuinely negative radicand means the caller is outside the
        // formula's domain
        if ((u128)B * B < (u128)(4 * V) * V)
            throw std::domain_error("independent_set_lower_bound: negative radicand");
        radicand = 0.0;
    }
    double value = 0.5 * (Bd - std::sqrt(radicand));
    double nearest = std::round(value);
    if (std::fabs(value - nearest) < 1e-6) {
        // floor is sensitive here; settle with exact integer arithmetic
        u128 R = (u128)B * B - (u128)(4 * V) * V;
        return exact_floor_of_half_diff(B, R, 2);
    }
    return (long long)std::floor(value);
}

int independence_number(const SimpleGraph& g) {
    int n = g.vertex_count;
    if (n == 0) return 0;
    if (n > 32)
        throw std::invalid_argument("independence_number: exact solver limited to V <= 32");
    std::vector<std::uint64_t> nbr(n, 0);
    for (auto [u, v] : g.edges) {
        nbr[u] |= 1ull << v;
        nbr[v] |= 1ull << u;
    }
    int best = 0;
    // branch and bound on the candidate set
    auto rec = [&](auto&& self, std::uint64_t cand, int size) -> void {
        if (size + __builtin_popcountll(cand) <= best) return;
        if (cand == 0) {
            best = std::max(best, size);
            return;
        }
        // branch on the candidate of maximum degree within cand
        int pick = -1, pick_deg = -1;
        for (std::uint64_t m = cand; m;) {
            int v = __builtin_ctzll(m);
            m &= m - 1;
            int d = __builtin_popcountll(nbr[v] & cand);
            if (d > pick_deg) {
                pick_deg = d;
                pick = v;
            }
        }
        self(self, (cand & ~nbr[pick]) & ~(1ull << pick), size + 1);  // take
        self(self, cand & ~(1ull << pick), size);                    // skip
    };
    rec(rec, n == 64 ? ~0ull : ((1ull << n) - 1), 0);
    return best;
}

SimpleGraph overlap_graph(const std::vector<LatticePath>& paths,
                          const std::vector<VertexId>& marks) {
    if (paths.size() != marks.size())
        throw std::invalid_argument("overlap_graph: one mark per path required");
    int n = int(paths.size());
    std::vector<std::unordered_set<VertexId>> vsets(n);
    for (int i = 0; i < n; i++)
        vsets[i].insert(paths[i].vertices.begin(), paths[i].vertices.end());
    for (int i = 0; i < n; i++)
        if (!vsets[i].count(marks[i]))
            throw std::invalid_argument("overlap_graph: marks[i] must lie on paths[i]");
    SimpleGraph g(n);
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++)
            if (vsets[i].count(marks[j]) || vsets[j].count(marks[i])) g.add_edge(i, j);
    return g;
}

ReduceResult reduce_and_bound(const SimpleGraph& g0) {
    ReduceResult out;
    int V = g0.vertex_count;
    long long E0 = (long long)g0.edges.size();

    if (V < 3) {
        // below the regime the reduction assumes; answer by enumeration
        out.g = g0;
        if (V == 2 && g0.edges.empty()) {
            out.g.add_edge(0, 1);
            out.connect_edges = 1;
        }
        out.independent_count = independence_number(g0);
        return out;
    }

    SimpleGraph g = g0;
    auto deg = g.degrees();

    // pad every vertex to degree >= 2; pair deficient vertices first so the
    // padding stays within V added edges
    for (int v = 0; v < V; v++) {
        while (deg[v] < 2) {
            int target = -1;
            for (int u = 0; u < V && target < 0; u++)
                if (u != v && deg[u] < 2 && !g.has_edge(u, v)) target = u;
            for (int u = 0; u < V && target < 0; u++)
                if (u != v && !g.has_edge(u, v)) target = u;
            if (target < 0)
                throw std::logic_error("reduce_and_bound: no padding target");  // V>=3 prevents this
            g.add_edge(v, target);
            deg[v]++;
            deg[target]++;
            out.padding_edges++;
        }
    }

    // link components through their lowest-index vertices
    std::vector<int> comp(V, -1);
    auto adj = g.adjacency();
    int ncomp = 0;
    for (int s = 0; s < V; s++) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{s};
        comp[s] = ncomp;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : adj[u])
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    stack.push_back(w);
                }
        }
        ncomp++;
    }
    std::vector<int> rep(ncomp, -1);
    for (int v = V - 1; v >= 0; v--) rep[comp[v]] = v;  // lowest index per component
    for (int c = 1; c < ncomp; c++) {
        g.add_edge(rep[c - 1], rep[c]);
        out.connect_edges++;
    }

    long long E = (long long)g.edges.size();
    if (E0 <= 2 * (long long)V && 3 * E > 7 * (long long)V)
        throw std::logic_error("reduce_and_bound: edge inflation exceeded 7V/3");

    out.independent_count = independent_set_lower_bound(V, E);
    out.g = std::move(g);
    return out;
}

long long geodesic_bound_floor_exact(long long m) {
    // (a - sqrt(a^2 - 4 m^2)) / 2  with a = 17m/3 + 1; scale by 3:
    // A = 17m + 3, value = (A - sqrt(A^2 - 36 m^2)) / 6
    long long A = 17 * m + 3;
    u128 R = (u128)A * A - (u128)(36 * m) * m;
    return exact_floor_of_half_diff(A, R, 6);
}

long long geodesic_bound_floor_double(long long m) {
    double a = (17.0 * double(m)) / 3.0 + 1.0;
    double radicand = a * a - 4.0 * double(m) * double(m);
    if (radicand < 0) radicand = 0;
    return (long long)std::floor(0.5 * (a - std::sqrt(radicand)));
}

MBoundScan max_m_bound(long long threshold) {
    MBoundScan scan;
    scan.threshold = threshold;
    constexpr long long kLimit = 1000000;
    for (long long m = 1; m <= kLimit; m++) {
        long long exact = geodesic_bound_floor_exact(m);
        if (geodesic_bound_floor_double(m) != exact) scan.precision_stable = false;
        if (exact <= threshold) {
            scan.max_m = m;
        } else if (scan.first_failing == 0) {
            scan.first_failing = m;
        }
    }
    return scan;
}

long long quoted_m_bound(long long threshold) {
    if (threshold == 5) return 23;
    if (threshold == 10) return 50;
    return 0;
}

}  // namespace lqg
