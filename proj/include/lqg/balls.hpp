#pragma once

#include <optional>
#include <vector>

#include "lqg/geodesics.hpp"
#include "lqg/metric.hpp"

namespace lqg {

/// Vertices with d(center, v) <= s, ascending.
std::vector<VertexId> metric_ball(const MetricField& mf, double s);

/// Filled metric ball: the closed metric ball plus every complement pocket
/// it disconnects from the target (target = nullopt means infinity, i.e. the
/// grid frame). boundary_cycle is a closed 8-connected Moore contour,
/// counterclockwise, starting at its lowest-index vertex.
struct FilledBallRegion {
    VertexId center = kNoVertex;
    double radius = 0.0;
    std::optional<VertexId> target;
    std::vector<std::uint8_t> member;  // mask, size = vertex_count
    std::vector<VertexId> boundary_cycle;
    bool whole_grid = false;  // precondition s >= d(center,target) tripped

    bool contains(VertexId v) const { return member[v] != 0; }
};

FilledBallRegion filled_ball(const MetricField& mf, double s, std::optional<VertexId> target);

struct BoundaryArc {
    VertexId x = kNoVertex;  // confluence vertex on the inner boundary
    int start = 0, end = 0;  // outer-boundary index interval, inclusive (may wrap)
};

struct ConfluenceViolations {
    int non_contiguous = 0;   // extra runs of an already-seen confluence vertex
    int cyclic_mismatch = 0;  // arc order vs inner-boundary order descents
    int no_crossing = 0;      // geodesic never met the inner boundary
    int reentry = 0;          // geodesic left the inner filled ball twice

    int total() const { return non_contiguous + cyclic_mismatch + no_crossing + reentry; }
};

struct ConfluenceReport {
    double t = 0.0, s = 0.0;
    std::vector<VertexId> confluence_points;  // X, in outer-arc order
    std::vector<BoundaryArc> arcs;
    ConfluenceViolations violations;
    int outer_boundary_length = 0;
};

/// For every outer-boundary vertex of the filled ball at radius s, walks the
/// leftmost geodesic from the center and records its last crossing of the
/// radius-t filled-ball boundary; arcs are the maximal runs sharing one
/// crossing point.
ConfluenceReport confluence_census(const WeightGrid& weights, VertexId center, VertexId w_target,
                                   double t, double s);

/// Fraction of sampled geodesics (sources in the metric ball of radius r_in
/// around z, far targets) through the single most-shared vertex of the
/// annulus r_in < d <= r_out.
double near_point_confluence(const WeightGrid& weights, VertexId z, double r_in, double r_out,
                             int sample_count, std::uint64_t seed);

}  // namespace lqg
