#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "lqg/measure.hpp"

using namespace lqg;

namespace {
const GridSpec kSpec32 = GridSpec::centered(32, 1.0);
const double kG83 = std::sqrt(8.0 / 3.0);
}

TEST_CASE("area measure cell formula") {
    MetricParams p = MetricParams::for_gamma(kG83);
    double s = 4.0 * kSpec32.mesh;

    // flat field: every cell carries the bare prefactor
    FieldGrid zero = testutil::constant_field(kSpec32, 0.0);
    AreaMeasure mu = area_measure(zero, p, s);
    double prefactor = kSpec32.mesh * kSpec32.mesh * std::pow(s, p.gamma * p.gamma / 2.0);
    for (double m : mu.cell_mass) CHECK(m == prefactor);

    // gamma -> 0 limit: masses approach the Euclidean cell area
    MetricParams tiny = MetricParams::with(1e-6, 2.5);
    FieldGrid bumpy = testutil::constant_field(kSpec32, 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (auto& v : bumpy.values) v = uni(rng);
    AreaMeasure mu0 = area_measure(bumpy, tiny, s);
    for (double m : mu0.cell_mass)
        CHECK(m == doctest::Approx(kSpec32.mesh * kSpec32.mesh).epsilon(1e-4));

    // doubling the field at one vertex multiplies that mass by e^{gamma h(v)}
    FieldGrid doubled = bumpy;
    VertexId v0 = kSpec32.index(7, 9);
    doubled.values[v0] = 2.0 * bumpy.values[v0];
    AreaMeasure mu1 = area_measure(bumpy, p, s);
    AreaMeasure mu2 = area_measure(doubled, p, s);
    CHECK(mu2.cell_mass[v0] / mu1.cell_mass[v0] ==
          doctest::Approx(std::exp(p.gamma * bumpy.values[v0])).epsilon(1e-12));

    // Weyl consistency: a constant shift scales every mass by e^{gamma c}
    AreaMeasure mu3 = area_measure(add_constant(bumpy, 0.7), p, s);
    for (VertexId v = 0; v < kSpec32.vertex_count(); v++)
        CHECK(mu3.cell_mass[v] / mu1.cell_mass[v] ==
              doctest::Approx(std::exp(p.gamma * 0.7)).epsilon(1e-12));

    CHECK_THROWS(area_measure(bumpy, p, 0.1 * kSpec32.mesh));  // under-resolved scale
}

TEST_CASE("log-log fit sanity") {
    std::vector<double> x, y;
    for (int k = 1; k <= 10; k++) {
        x.push_back(k);
        y.push_back(3.0 * k * k);
    }
    double slope = 0, se = 0;
    loglog_fit(x, y, 0, 9, &slope, &se);
    CHECK(slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(se <= 1e-12);
}

TEST_CASE("ball volume curve on the flat proxy") {
    GridSpec spec = GridSpec::centered(128, 1.0);
    WeightGrid u = testutil::uniform_weights(spec, 1.0);
    AreaMeasure flat;
    flat.spec = spec;
    flat.cell_mass.assign(spec.vertex_count(), 1.0);
    VertexId center = spec.index(64, 64);

    std::vector<double> radii;
    for (int k = 0; k < 16; k++) radii.push_back(6.0 * std::pow(50.0 / 6.0, k / 15.0));
    DimensionEstimate est = ball_volume_curve(u, flat, center, radii);
    CHECK(est.slope == doctest::Approx(2.0).epsilon(0.05));  // Euclidean area scaling
    for (std::size_t k = 1; k < est.counts_or_masses.size(); k++)
        CHECK(est.counts_or_masses[k] >= est.counts_or_masses[k - 1]);
    CHECK(est.window_lo == 2);
    CHECK(est.window_hi == 13);
}

TEST_CASE("covering dimension: point, curve, and the greedy/optimal oracle") {
    GridSpec spec = GridSpec::centered(128, 1.0);
    WeightGrid u = testutil::uniform_weights(spec, 1.0);

    std::vector<double> radii{1.5, 3.0, 6.0, 12.0, 24.0};
    DimensionEstimate point = covering_dimension({spec.index(64, 64)}, u, radii);
    CHECK(point.slope == doctest::Approx(0.0).epsilon(1e-12));

    // a geodesic is a length-space curve: covering exponent near 1
    MetricField mf = sssp(u, spec.index(14, 14));
    LatticePath geo = extract_geodesic(mf, spec.index(110, 108));
    std::vector<double> cradii;
    for (int k = 0; k < 8; k++) cradii.push_back(1.5 * std::pow(2.0, k * 0.55));
    DimensionEstimate curve = covering_dimension(geo.vertices, u, cradii);
    CHECK(std::fabs(curve.slope - 1.0) <= 0.3);
    for (std::size_t k = 1; k < curve.counts_or_masses.size(); k++)
        CHECK(curve.counts_or_masses[k] >= curve.counts_or_masses[k - 1]);  // N grows with 1/eps

    // small instances: packing(2 eps) <= optimal <= greedy, and greedy hits
    // the optimum on well-separated clusters
    GridSpec small = GridSpec::centered(32, 1.0);
    WeightGrid su = testutil::uniform_weights(small, 1.0);
    std::vector<VertexId> marked;
    for (auto [ci, cj] : {std::pair{6, 6}, {6, 24}, {24, 6}, {24, 24}})
        for (int d = 0; d < 4; d++) marked.push_back(small.index(ci + d % 2, cj + d / 2));
    double eps = 3.0;
    int greedy = greedy_cover_count(marked, su, eps);
    CHECK(greedy == 4);

    // exact optimum by subset enumeration over marked centers
    auto dist_ok = [&](VertexId a, VertexId b) {
        return testutil::octile(small, 1.0, a, b) <= eps;
    };
    int n = int(marked.size());
    int best = n;
    for (unsigned mask = 1; mask < (1u << n); mask++) {
        int size = __builtin_popcount(mask);
        if (size >= best) continue;
        bool covers = true;
        for (int i = 0; i < n && covers; i++) {
            bool c = false;
            for (int j = 0; j < n && !c; j++)
                if ((mask >> j) & 1) c = dist_ok(marked[i], marked[j]);
            covers = c;
        }
        if (covers) best = size;
    }
    CHECK(best == greedy);

    // packing duality: any 2eps-separated subset lower-bounds the optimum
    int packing = 0;
    std::vector<VertexId> packed;
    for (VertexId m : marked) {
        bool far = true;
        for (VertexId q : packed)
            if (testutil::octile(small, 1.0, m, q) <= 2.0 * eps) far = false;
        if (far) {
            packed.push_back(m);
            packing++;
        }
    }
    CHECK(packing <= best);
}
