#include "lqg/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fft2.hpp"

namespace lqg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over (seed, stream)
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

// band of vertices within mesh of the unit circle
std::vector<VertexId> circle_band(const GridSpec& spec) {
    std::vector<VertexId> band;
    for (VertexId v = 0; v < spec.vertex_count(); v++) {
        double r = spec.coord(v).norm();
        if (std::fabs(r - 1.0) <= spec.mesh) band.push_back(v);
    }
    if (band.empty())
        throw std::runtime_error("circle_band: grid does not resolve the unit circle");
    return band;
}

// Cached forward FFT of the unit-mass lattice heat kernel for (n, mesh, s).
using SpectrumPtr = std::shared_ptr<const std::vector<std::complex<double>>>;

SpectrumPtr heat_kernel_spectrum(const GridSpec& spec, double s) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, SpectrumPtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(spec.side_count, spec.mesh, s);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    int n = spec.side_count;
    double L = spec.side_length();
    auto grid = std::make_shared<std::vector<std::complex<double>>>(std::size_t(n) * n);
    double mass = 0.0;
    for (int i = 0; i < n; i++) {
        double dy = std::min(i, n - i) * spec.mesh;
        for (int j = 0; j < n; j++) {
            double dx = std::min(j, n - j) * spec.mesh;
            // nearest torus image dominates; add the next ring of images so
            // wide kernels stay exact
            double k = 0.0;
            for (int wy = -1; wy <= 1; wy++)
                for (int wx = -1; wx <= 1; wx++) {
                    double rx = dx + wx * L, ry = dy + wy * L;
                    k += std::exp(-(rx * rx + ry * ry) / (2.0 * s));
                }
            k /= kTwoPi * s;
            (*grid)[std::size_t(i) * n + j] = k;
            mass += k;
        }
    }
    double cell = spec.mesh * spec.mesh;
    for (auto& v : *grid) v /= mass * cell;  // unit lattice mass
    detail::fft2(grid->data(), n, false);
    SpectrumPtr out = std::const_pointer_cast<const std::vector<std::complex<double>>>(
        std::shared_ptr<std::vector<std::complex<double>>>(grid));
    cache.emplace(key, out);
    return out;
}

}  // namespace

double BumpFunction::operator()(Vec2 p) const {
    double r = dist(p, center);
    if (r >= outer_radius) return 0.0;
    if (r <= inner_radius) return height;
    double t = (outer_radius - r) / (outer_radius - inner_radius);  // in (0,1)
    auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
    return height * f(t) / (f(t) + f(1.0 - t));
}

FieldGrid sample_gff(const GridSpec& spec, std::uint64_t seed) {
    spec.validate();
    int n = spec.side_count;
    std::size_t total = spec.vertex_count();

    // white noise -> spectral filter -> inverse transform
    std::mt19937_64 rng(mix_seed(seed, 0xf1e1d));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::complex<double>> a(total);
    for (std::size_t v = 0; v < total; v++) a[v] = gauss(rng);
    detail::fft2(a.data(), n, false);

    for (int i = 0; i < n; i++) {
        double ci = std::cos(kTwoPi * i / n);
        for (int j = 0; j < n; j++) {
            std::size_t idx = std::size_t(i) * n + j;
            if (i == 0 && j == 0) {
                a[idx] = 0.0;  // zero mode dropped
                continue;
            }
            double omega = 4.0 - 2.0 * ci - 2.0 * std::cos(kTwoPi * j / n);
            // mode variance 2*pi / (N^2 * omega); forward FFT of unit white
            // noise carries variance N^2 per mode, so scale by sqrt(v)/N
            double scale = std::sqrt(kTwoPi / (double(total) * omega)) / n;
            a[idx] *= scale;
        }
    }
    detail::fft2(a.data(), n, true);

    FieldGrid out;
    out.spec = spec;
    out.seed = seed;
    out.provenance = Provenance::raw_gff;
    out.values.resize(total);
    for (std::size_t v = 0; v < total; v++) out.values[v] = a[v].real();
    normalize_circle_average(out);
    return out;
}

FieldGrid mollify(const FieldGrid& field, double epsilon) {
    if (!(epsilon >= field.spec.mesh))
        throw std::invalid_argument("mollify: epsilon below mesh is under-resolved");
    int n = field.spec.side_count;
    std::size_t total = field.spec.vertex_count();
    double s = 0.5 * epsilon * epsilon;

    SpectrumPtr kernel = heat_kernel_spectrum(field.spec, s);
    std::vector<std::complex<double>> a(total);
    for (std::size_t v = 0; v < total; v++) a[v] = field.values[v];
    detail::fft2(a.data(), n, false);
    double cell = field.spec.mesh * field.spec.mesh;
    double inv = cell / double(total);  // convolution cell measure / FFT normalization
    for (std::size_t v = 0; v < total; v++) a[v] *= (*kernel)[v] * inv;
    detail::fft2(a.data(), n, true);

    FieldGrid out;
    out.spec = field.spec;
    out.seed = field.seed;
    out.provenance = Provenance::mollified;
    out.normalization = Normalization::none;
    out.mollification_eps = std::hypot(field.mollification_eps, epsilon);
    out.values.resize(total);
    for (std::size_t v = 0; v < total; v++) out.values[v] = a[v].real();
    return out;
}

FieldGrid add_bump(const FieldGrid& field, const BumpFunction& bump) {
    bump.validate();
    FieldGrid out = field;
    for (VertexId v = 0; v < out.spec.vertex_count(); v++) {
        double b = bump(out.spec.coord(v));
        if (b != 0.0) out.values[v] += b;
    }
    out.provenance = Provenance::surgered;
    if (bump.meets_unit_circle() && bump.height != 0.0)
        out.normalization = Normalization::none;
    return out;
}

FieldGrid add_log_singularity(const FieldGrid& field, const LogSingularity& sing) {
    FieldGrid out = field;
    if (sing.coefficient == 0.0) return out;
    double cap = 0.5 * out.spec.mesh;
    for (VertexId v = 0; v < out.spec.vertex_count(); v++) {
        double r = std::max(dist(out.spec.coord(v), sing.location), cap);
        out.values[v] -= sing.coefficient * std::log(r);
    }
    out.provenance = Provenance::surgered;
    out.normalization = Normalization::none;
    return out;
}

FieldGrid add_constant(const FieldGrid& field, double c) {
    FieldGrid out = field;
    if (c == 0.0) return out;
    for (auto& v : out.values) v += c;
    out.provenance = Provenance::surgered;
    out.normalization = Normalization::none;
    return out;
}

double circle_average(const FieldGrid& field) {
    auto band = circle_band(field.spec);
    double sum = 0.0;
    for (VertexId v : band) sum += field.values[v];
    return sum / double(band.size());
}

void normalize_circle_average(FieldGrid& field) {
    double avg = circle_average(field);
    for (auto& v : field.values) v -= avg;
    field.normalization = Normalization::zero_circle_average;
}

double circle_log_average(Vec2 z) {
    constexpr int kPoints = 4096;
    double sum = 0.0;
    for (int j = 0; j < kPoints; j++) {
        double theta = kTwoPi * j / kPoints;
        Vec2 u{std::cos(theta), std::sin(theta)};
        sum += -std::log(dist(u, z));
    }
    return sum / kPoints;
}

double two_point_density(double gamma, Vec2 z, Vec2 w) {
    double g2 = gamma * gamma;
    double zp = std::max(z.norm(), 1.0);
    double wp = std::max(w.norm(), 1.0);
    return std::pow(dist(z, w), -g2) * std::pow(zp * wp, 2.0 * g2);
}

double rect_distance(const Rect& a, const Rect& b) {
    auto gap = [](double lo1, double hi1, double lo2, double hi2) {
        if (hi1 < lo2) return lo2 - hi1;
        if (hi2 < lo1) return lo1 - hi2;
        return 0.0;
    };
    return std::hypot(gap(a.lo.x, a.hi.x, b.lo.x, b.hi.x), gap(a.lo.y, a.hi.y, b.lo.y, b.hi.y));
}

TwoPointSample sample_two_point_rooted(const GridSpec& spec, std::uint64_t seed, double gamma,
                                       const Rect& z_rect, const Rect& w_rect) {
    spec.validate();
    if (!(gamma > 0.0 && gamma < 2.0))
        throw std::invalid_argument("sample_two_point_rooted: gamma in (0,2) required");
    double d_min = rect_distance(z_rect, w_rect);
    if (!(d_min > 0.0))
        throw std::invalid_argument("sample_two_point_rooted: rectangles must be disjoint at positive distance");

    double g2 = gamma * gamma;
    auto sup_plus = [](const Rect& r) {
        double m = 1.0;
        for (Vec2 c : {r.lo, r.hi, Vec2{r.lo.x, r.hi.y}, Vec2{r.hi.x, r.lo.y}})
            m = std::max(m, c.norm());
        return m;
    };
    double envelope =
        std::pow(d_min, -g2) * std::pow(sup_plus(z_rect) * sup_plus(w_rect), 2.0 * g2);

    std::mt19937_64 rng(mix_seed(seed, 0x2b0a4));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw_in = [&](const Rect& r) {
        return Vec2{r.lo.x + unit(rng) * (r.hi.x - r.lo.x), r.lo.y + unit(rng) * (r.hi.y - r.lo.y)};
    };

    constexpr std::uint64_t kMaxRounds = 10'000'000;  // acceptance floor 1e-6
    TwoPointSample out;
    bool accepted = false;
    for (std::uint64_t round = 1; round <= kMaxRounds; round++) {
        Vec2 z = draw_in(z_rect);
        Vec2 w = draw_in(w_rect);
        double u = unit(rng);
        if (u * envelope < two_point_density(gamma, z, w)) {
            out.z = z;
            out.w = w;
            out.rejection_rounds = round;
            accepted = true;
            break;
        }
    }
    if (!accepted)
        throw std::runtime_error("sample_two_point_rooted: rejection acceptance rate below 1e-6");

    FieldGrid field = sample_gff(spec, seed);
    field = add_log_singularity(field, LogSingularity{out.z, gamma});
    field = add_log_singularity(field, LogSingularity{out.w, gamma});
    double cz = circle_log_average(out.z);
    double cw = circle_log_average(out.w);
    field = add_constant(field, -gamma * (cz + cw));
    normalize_circle_average(field);
    out.field = std::move(field);
    return out;
}

}  // namespace lqg
