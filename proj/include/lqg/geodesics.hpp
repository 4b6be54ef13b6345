#pragma once

#include <optional>
#include <vector>

#include "lqg/field.hpp"
#include "lqg/metric.hpp"

namespace lqg {

/// Simple lattice path; length is the ordered edge-cost sum.
struct LatticePath {
    std::vector<VertexId> vertices;
    double length = 0.0;

    VertexId front() const { return vertices.front(); }
    VertexId back() const { return vertices.back(); }
};

/// Ordered edge-cost sum along an adjacent vertex sequence.
double path_length(const WeightGrid& weights, const std::vector<VertexId>& vertices);

/// Predecessor-tree walk from source to target; length equals
/// mf.distances[target] exactly.
LatticePath extract_geodesic(const MetricField& mf, VertexId target);

/// {v : d(z,v) + d(v,w) <= d(z,w) + delta}. A hair of floating-point slack is
/// folded in so exact geodesic vertices always qualify.
struct Corridor {
    VertexId z = kNoVertex, w = kNoVertex;
    double delta = 0.0;
    double dzw = 0.0;
    std::vector<std::uint8_t> mask;  // size = vertex_count
    std::vector<VertexId> vertices;  // ascending

    bool contains(VertexId v) const { return mask[v] != 0; }
};

Corridor corridor(const WeightGrid& weights, VertexId z, VertexId w, double delta);
Corridor corridor(const MetricField& mfz, const MetricField& mfw, VertexId z, VertexId w,
                  double delta);

/// Default corridor slack: 2 x median edge cost.
double default_slack(const WeightGrid& weights);
/// Default endpoint excision: 5 x median vertex weight.
double default_excision(const WeightGrid& weights);

struct MultiplicityResult {
    int k = 0;
    std::vector<LatticePath> representatives;  // one near-geodesic per component
};

/// Number of connected components of the corridor after excising the metric
/// balls of radius rho around both endpoints. Requires d(z,w) > 4 rho.
MultiplicityResult multiplicity(const WeightGrid& weights, VertexId z, VertexId w, double delta,
                                double rho);
MultiplicityResult multiplicity(const WeightGrid& weights, const MetricField& mfz,
                                const MetricField& mfw, VertexId z, VertexId w, double delta,
                                double rho);

struct NetworkClass {
    int n = 0, m = 0;
    std::optional<VertexId> splitter;
    bool normal = false;
    std::vector<LatticePath> witnesses;
};

/// (n,m) corridor-branch classification with splitter search and +-25%
/// radius stability check. Requires d(z,w) > 4 r.
NetworkClass classify_network(const WeightGrid& weights, VertexId z, VertexId w, double delta,
                              double r);
NetworkClass classify_network(const WeightGrid& weights, const MetricField& mfz,
                              const MetricField& mfw, VertexId z, VertexId w, double delta,
                              double r);

struct SnEvidence {
    std::vector<LatticePath> paths;  // paths[0] plays the unmarked role
    std::vector<VertexId> marks;     // marks[i-1] lies on paths[i] only
};

/// Greedy search for marks certifying the non-overlapping family structure
/// with n = paths.size() - 1. The path without a private vertex (at most one
/// may lack one) is forced into the unmarked slot.
std::optional<SnEvidence> detect_sn(const std::vector<LatticePath>& paths,
                                    double slack = kInfDist);

/// Maximal runs of vertices of p absent from p2, bracketed by shared
/// vertices on both sides.
int overlap_components(const LatticePath& p, const LatticePath& p2);

struct PerturbedPath {
    LatticePath path;
    enum class Kind { hitter, avoider, partial } kind = Kind::partial;
    double old_length = 0.0;
    double new_length = 0.0;
    double inner_traversal = 0.0;   // old-weight length of edges inside the inner disk
    double required_increase = 0.0; // (1 - e^{-xi h}) * inner_traversal
    bool ok = true;
};

struct PerturbationReport {
    std::vector<PerturbedPath> paths;
    int violations = 0;
};

/// Applies the bump by Weyl scaling and re-measures the corridor-component
/// near-geodesics: paths avoiding the outer disk must keep their length
/// bit-for-bit, paths entering the inner disk must lengthen by at least
/// (1 - e^{-xi height}) times their inner-disk traversal.
PerturbationReport perturbation_experiment(const WeightGrid& weights, VertexId z, VertexId w,
                                           const BumpFunction& bump, const MetricParams& params,
                                           double delta = -1.0, double rho = -1.0);

}  // namespace lqg
