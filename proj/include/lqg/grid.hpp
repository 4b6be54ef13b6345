#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lqg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = 0xffffffffu;

/// Square lattice covering a patch of the plane. Vertex (row i, col j)
/// sits at origin_offset + (j*mesh, i*mesh).
struct GridSpec {
    int side_count = 0;
    double mesh = 0.0;
    Vec2 origin_offset{};

    static GridSpec centered(int side_count, double mesh) {
        GridSpec s;
        s.side_count = side_count;
        s.mesh = mesh;
        double half = 0.5 * side_count * mesh;
        s.origin_offset = {-half, -half};
        s.validate();
        return s;
    }

    void validate() const {
        if (side_count < 16)
            throw std::invalid_argument("GridSpec: side_count must be >= 16, got " +
                                        std::to_string(side_count));
        if ((side_count & (side_count - 1)) != 0)
            throw std::invalid_argument("GridSpec: side_count must be a power of two, got " +
                                        std::to_string(side_count));
        if (!(mesh > 0.0))
            throw std::invalid_argument("GridSpec: mesh must be positive");
    }

    std::size_t vertex_count() const { return std::size_t(side_count) * side_count; }

    VertexId index(int i, int j) const { return VertexId(i) * side_count + j; }
    int row(VertexId v) const { return int(v) / side_count; }
    int col(VertexId v) const { return int(v) % side_count; }

    Vec2 coord(VertexId v) const {
        return {origin_offset.x + col(v) * mesh, origin_offset.y + row(v) * mesh};
    }
    Vec2 coord(int i, int j) const {
        return {origin_offset.x + j * mesh, origin_offset.y + i * mesh};
    }

    /// Nearest lattice vertex to a plane point (clamped to the grid).
    VertexId nearest_vertex(Vec2 p) const {
        auto clamp = [&](double t) {
            long k = std::lround(t);
            if (k < 0) k = 0;
            if (k >= side_count) k = side_count - 1;
            return int(k);
        };
        int j = clamp((p.x - origin_offset.x) / mesh);
        int i = clamp((p.y - origin_offset.y) / mesh);
        return index(i, j);
    }

    double side_length() const { return side_count * mesh; }

    /// Central quarter of the grid (the region geometric experiments use,
    /// keeping clear of the torus wrap used when sampling fields).
    bool in_central_quarter(VertexId v) const {
        int q = side_count / 4;
        int i = row(v), j = col(v);
        return i >= q && i < 3 * q && j >= q && j < 3 * q;
    }

    bool operator==(const GridSpec& o) const {
        return side_count == o.side_count && mesh == o.mesh &&
               origin_offset.x == o.origin_offset.x && origin_offset.y == o.origin_offset.y;
    }
};

}  // namespace lqg
