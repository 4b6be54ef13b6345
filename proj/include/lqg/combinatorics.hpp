#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lqg/grid.hpp"

namespace lqg {

struct LatticePath;  // geodesics.hpp

/// Undirected simple graph, small scale. No self-loops, no duplicate edges.
struct SimpleGraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;

    explicit SimpleGraph(int v = 0) : vertex_count(v) {}

    bool has_edge(int a, int b) const;
    void add_edge(int a, int b);  // throws on self-loop / duplicate / out of range
    std::vector<int> degrees() const;
    std::vector<std::vector<int>> adjacency() const;
    bool connected() const;
};

/// Harant-Schiermeyer lower bound on the independence number of a connected
/// graph with V vertices and E edges:
///   floor( ((2E+V+1) - sqrt((2E+V+1)^2 - 4V^2)) / 2 ).
/// Double evaluation with a clamped radicand; re-evaluated in exact integer
/// arithmetic when the pre-floor value sits within 1e-6 of an integer.
long long independent_set_lower_bound(long long V, long long E);

/// Exact maximum independent set size, branch and bound. Feasible for V <= 24.
int independence_number(const SimpleGraph& g);

/// Graph on path indices: i ~ j iff paths[i] hits marks[j] or paths[j] hits
/// marks[i]. Requires marks[i] to lie on paths[i].
SimpleGraph overlap_graph(const std::vector<LatticePath>& paths,
                          const std::vector<VertexId>& marks);

struct ReduceResult {
    long long independent_count = 0;
    SimpleGraph g;
    int padding_edges = 0;
    int connect_edges = 0;
};

/// Pads every degree-<2 vertex (deterministically, pairing deficient vertices
/// first), links components through their lowest-index vertices, and evaluates
/// the independent-set bound on the resulting connected graph. Checks the
/// 3*E(G) <= 7*V inflation bound whenever E(g0) <= 2*V.
ReduceResult reduce_and_bound(const SimpleGraph& g0);

/// floor( ((17m/3 + 1) - sqrt((17m/3 + 1)^2 - 4 m^2)) / 2 ), two routes.
long long geodesic_bound_floor_exact(long long m);
long long geodesic_bound_floor_double(long long m);

struct MBoundScan {
    long long threshold = 0;
    long long max_m = 0;           // largest m <= 1e6 passing the inequality
    long long first_failing = 0;   // 0 when none fails in range
    bool precision_stable = true;  // double and exact integer scans agree
};

/// Literal scan of m = 1..1e6 against floor-evaluated inequality <= threshold.
MBoundScan max_m_bound(long long threshold);

/// Published reference values quoted for thresholds 5 and 10 (23 and 50).
/// Returns 0 when no quote exists for the threshold.
long long quoted_m_bound(long long threshold);

}  // namespace lqg
