#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lqg/grid.hpp"

namespace lqg {

enum class Normalization { none, zero_circle_average };
enum class Provenance { raw_gff, mollified, surgered };

/// Scalar field on a GridSpec lattice. Immutable by convention once built.
struct FieldGrid {
    GridSpec spec;
    std::vector<double> values;  // row-major, side_count^2
    Normalization normalization = Normalization::none;
    std::uint64_t seed = 0;
    Provenance provenance = Provenance::raw_gff;
    double mollification_eps = 0.0;  // > 0 once mollified; survives surgery

    double value(int i, int j) const { return values[std::size_t(i) * spec.side_count + j]; }
    double value(VertexId v) const { return values[v]; }
};

/// Radial plateau bump: height on the closed inner disk, zero outside the
/// open outer disk, smooth monotone interpolation between.
struct BumpFunction {
    Vec2 center{};
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    double height = 0.0;

    void validate() const {
        if (!(inner_radius > 0.0 && outer_radius > inner_radius))
            throw std::invalid_argument("BumpFunction: need 0 < inner_radius < outer_radius");
    }
    double operator()(Vec2 p) const;
    bool meets_unit_circle() const {
        return std::fabs(center.norm() - 1.0) <= outer_radius;
    }
};

/// Profile -coefficient * log|. - location|, capped at the containing vertex
/// by the value at distance mesh/2.
struct LogSingularity {
    Vec2 location{};
    double coefficient = 0.0;
};

/// Torus GFF proxy for the whole-plane field: discrete Laplacian eigenbasis,
/// zero mode dropped, mode variance 2*pi / (N^2 * omega_k), then normalized
/// to zero average over the lattice band of the unit circle. Deterministic in
/// (spec, seed).
FieldGrid sample_gff(const GridSpec& spec, std::uint64_t seed);

/// Circular convolution with the lattice-sampled heat kernel of variance
/// epsilon^2/2 (unit mass on the lattice). Requires epsilon >= mesh.
FieldGrid mollify(const FieldGrid& field, double epsilon);

FieldGrid add_bump(const FieldGrid& field, const BumpFunction& bump);
FieldGrid add_log_singularity(const FieldGrid& field, const LogSingularity& sing);
FieldGrid add_constant(const FieldGrid& field, double c);

/// Mean of values over vertices within mesh of the unit circle.
double circle_average(const FieldGrid& field);
/// Subtracts circle_average and tags the field zero-circle-average.
void normalize_circle_average(FieldGrid& field);

/// c_z = (1/2pi) \int_{unit circle} log|u - z|^{-1} du, 4096-point trapezoid.
double circle_log_average(Vec2 z);

/// Two-point density |z-w|^{-gamma^2} (|z|_+ |w|_+)^{2 gamma^2}.
double two_point_density(double gamma, Vec2 z, Vec2 w);

struct Rect {
    Vec2 lo{}, hi{};
    bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
};

/// Euclidean distance between two axis-aligned rectangles.
double rect_distance(const Rect& a, const Rect& b);

struct TwoPointSample {
    FieldGrid field;  // h - gamma log|.-z| - gamma log|.-w| - gamma(c_z + c_w), renormalized
    Vec2 z{}, w{};
    std::uint64_t rejection_rounds = 0;
};

/// Rooted two-point field: (z, w) drawn by rejection sampling from the
/// two-point density on Z x W (disjoint rectangles at positive distance),
/// then the gamma-log singularities are planted at z and w.
TwoPointSample sample_two_point_rooted(const GridSpec& spec, std::uint64_t seed, double gamma,
                                       const Rect& z_rect, const Rect& w_rect);

}  // namespace lqg
