#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "lqg/geodesics.hpp"
#include "lqg/metric.hpp"

using namespace lqg;

namespace {
const GridSpec kSpec16 = GridSpec::centered(16, 1.0);
const double kG83 = std::sqrt(8.0 / 3.0);

WeightGrid random_weights(const GridSpec& spec, std::uint64_t seed, double lo = 0.5,
                          double hi = 2.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    WeightGrid w = testutil::uniform_weights(spec, 1.0);
    for (auto& x : w.vertex_weights) x = uni(rng);
    return w;
}
}  // namespace

TEST_CASE("metric parameter identities") {
    MetricParams p = MetricParams::for_gamma(kG83);
    CHECK(p.d_gamma == 4.0);
    CHECK(std::fabs(p.xi() - kG83 / 4.0) <= 1e-12);
    CHECK(std::fabs(p.Q() - (2.0 / kG83 + kG83 / 2.0)) <= 1e-12);
    CHECK_THROWS(MetricParams::for_gamma(1.0));  // no default dimension
    CHECK_THROWS(MetricParams::with(2.5, 4.0));  // gamma out of range
    CHECK_THROWS(MetricParams::with(1.0, 1.5));  // d_gamma too small
}

TEST_CASE("build_weights formula and errors") {
    MetricParams p = MetricParams::for_gamma(kG83);
    double xi = p.xi();

    FieldGrid zero = testutil::constant_field(kSpec16, 0.0);
    WeightGrid w0 = build_weights(zero, p);
    for (double x : w0.vertex_weights) CHECK(x == kSpec16.mesh);

    FieldGrid c = testutil::constant_field(kSpec16, 1.7);
    for (double x : build_weights(c, p).vertex_weights)
        CHECK(x == doctest::Approx(kSpec16.mesh * std::exp(xi * 1.7)).epsilon(1e-14));

    FieldGrid one = testutil::constant_field(kSpec16, 0.0);
    one.values[kSpec16.index(5, 5)] = 1.0 / xi;
    WeightGrid w1 = build_weights(one, p);
    CHECK(w1.vertex_weights[kSpec16.index(5, 5)] ==
          doctest::Approx(kSpec16.mesh * std::exp(1.0)).epsilon(1e-14));

    FieldGrid raw = testutil::constant_field(kSpec16, 0.0);
    raw.provenance = Provenance::raw_gff;
    raw.mollification_eps = 0.0;
    CHECK_THROWS(build_weights(raw, p));  // unmollified

    FieldGrid hot = testutil::constant_field(kSpec16, 0.0);
    hot.values[3] = 1e9;  // exp overflow
    CHECK_THROWS(build_weights(hot, p));
}

TEST_CASE("sssp against exhaustive path enumeration") {
    WeightGrid w = random_weights(kSpec16, 5);
    MetricField mf = sssp(w, kSpec16.index(2, 2));
    CHECK(mf.distances[kSpec16.index(2, 2)] == 0.0);

    // brute-force oracle on nearby targets (pruned full enumeration)
    for (auto [ti, tj] : {std::pair{4, 3}, {3, 4}, {4, 4}, {2, 4}, {0, 0}}) {
        VertexId t = kSpec16.index(ti, tj);
        double ub = mf.distances[t] * 1.5 + 1.0;
        double exact = testutil::brute_force_distance(w, kSpec16.index(2, 2), t, ub);
        CHECK(mf.distances[t] == doctest::Approx(exact).epsilon(1e-12));
    }

    // uniform weights reproduce the octile closed form everywhere
    WeightGrid u = testutil::uniform_weights(kSpec16, 1.0);
    MetricField mu = sssp(u, kSpec16.index(7, 3));
    for (VertexId v = 0; v < kSpec16.vertex_count(); v++)
        CHECK(mu.distances[v] ==
              doctest::Approx(testutil::octile(kSpec16, 1.0, kSpec16.index(7, 3), v))
                  .epsilon(1e-12));

    double viol = 0.0;
    CHECK(verify_edge_relaxation(w, mf, &viol));
    CHECK(viol <= 1e-12);
}

TEST_CASE("single-pair distance equals the full run exactly") {
    WeightGrid w = random_weights(kSpec16, 6);
    std::mt19937_64 rng(60);
    std::uniform_int_distribution<int> pick(0, 15);
    for (int k = 0; k < 100; k++) {
        VertexId a = kSpec16.index(pick(rng), pick(rng));
        VertexId b = kSpec16.index(pick(rng), pick(rng));
        MetricField mf = sssp(w, a);
        CHECK(distance(w, a, b) == mf.distances[b]);
    }
    // symmetry and triangle inequality
    for (int k = 0; k < 50; k++) {
        VertexId a = kSpec16.index(pick(rng), pick(rng));
        VertexId b = kSpec16.index(pick(rng), pick(rng));
        VertexId c = kSpec16.index(pick(rng), pick(rng));
        double ab = distance(w, a, b);
        CHECK(std::fabs(ab - distance(w, b, a)) <= 1e-12);
        CHECK(distance(w, a, c) <= ab + distance(w, b, c) + 1e-12);
    }
}

TEST_CASE("internal distance: locality and disconnection") {
    WeightGrid w = random_weights(kSpec16, 9);
    VertexId z = kSpec16.index(3, 3), v = kSpec16.index(12, 12);

    std::vector<std::uint8_t> all(kSpec16.vertex_count(), 1);
    CHECK(internal_distance(w, all, z, v) == distance(w, z, v));

    // region excluding every separator: two horizontal strips
    std::vector<std::uint8_t> split(kSpec16.vertex_count(), 0);
    for (int i = 0; i < 16; i++)
        for (int j = 0; j < 16; j++)
            if (i <= 5 || i >= 10) split[kSpec16.index(i, j)] = 1;
    CHECK(internal_distance(w, split, z, v) == kInfDist);

    // region containing the geodesic gives the global distance exactly
    MetricField mf = sssp(w, z);
    LatticePath geo = extract_geodesic(mf, v);
    std::vector<std::uint8_t> region(kSpec16.vertex_count(), 0);
    for (VertexId p : geo.vertices) {
        int pi = kSpec16.row(p), pj = kSpec16.col(p);
        for (int di = -1; di <= 1; di++)
            for (int dj = -1; dj <= 1; dj++) {
                int ni = pi + di, nj = pj + dj;
                if (ni >= 0 && nj >= 0 && ni < 16 && nj < 16) region[kSpec16.index(ni, nj)] = 1;
            }
    }
    CHECK(internal_distance(w, region, z, v) == mf.distances[v]);

    std::vector<std::uint8_t> missing = all;
    missing[z] = 0;
    CHECK_THROWS(internal_distance(w, missing, z, v));
}

TEST_CASE("Weyl scaling is an exact vertex-wise rescale") {
    GridSpec spec = GridSpec::centered(64, 4.0 / 64);
    MetricParams p = MetricParams::for_gamma(kG83);
    FieldGrid h_eps = mollify(sample_gff(spec, 31), 4.0 * spec.mesh);
    WeightGrid w = build_weights(h_eps, p);

    // f = 0: untouched
    WeightGrid w_same = apply_weyl(w, [](Vec2) { return 0.0; }, p);
    CHECK(w_same.vertex_weights == w.vertex_weights);

    // f = c: every distance scales by exactly e^{xi c}
    double c = 0.6;
    WeightGrid w_c = apply_weyl(w, [&](Vec2) { return c; }, p);
    double scale = std::exp(p.xi() * c);
    VertexId a = spec.index(20, 20), b = spec.index(44, 41);
    CHECK(distance(w_c, a, b) == doctest::Approx(scale * distance(w, a, b)).epsilon(1e-12));

    // random bump: apply_weyl equals rebuild-from-surgered-field
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int t = 0; t < 3; t++) {
        BumpFunction bump;
        bump.center = {uni(rng) - 0.5, uni(rng) - 0.5};
        bump.inner_radius = 0.08 + 0.05 * uni(rng);
        bump.outer_radius = 2.2 * bump.inner_radius;
        bump.height = 0.5 + uni(rng);
        WeightGrid w1 = apply_weyl(w, [&](Vec2 q) { return bump(q); }, p);
        WeightGrid w2 = build_weights(add_bump(h_eps, bump), p);
        MetricField m1 = sssp(w1, a), m2 = sssp(w2, a);
        for (VertexId v = 0; v < spec.vertex_count(); v += 97) {
            if (m1.distances[v] == 0.0) continue;
            CHECK(std::fabs(m1.distances[v] - m2.distances[v]) / m1.distances[v] <= 1e-9);
        }
    }
}

TEST_CASE("raising a vertex weight never shortens any distance") {
    WeightGrid w = random_weights(kSpec16, 12);
    MetricField before = sssp(w, kSpec16.index(1, 1));
    WeightGrid w2 = w;
    w2.vertex_weights[kSpec16.index(8, 8)] *= 3.0;
    MetricField after = sssp(w2, kSpec16.index(1, 1));
    for (VertexId v = 0; v < kSpec16.vertex_count(); v++)
        CHECK(after.distances[v] >= before.distances[v] - 1e-15);
}

TEST_CASE("coordinate change residual") {
    GridSpec spec = GridSpec::centered(64, 4.0 / 64);
    MetricParams p = MetricParams::for_gamma(kG83);
    FieldGrid raw = sample_gff(spec, 55);

    std::vector<std::pair<Vec2, Vec2>> pairs{{{-0.3, -0.2}, {0.25, 0.3}},
                                             {{-0.2, 0.25}, {0.3, -0.25}}};
    ResidualStats same = coordinate_change_residual(raw, p, 1, pairs, 4.0 * spec.mesh);
    CHECK(same.count == pairs.size());
    CHECK(same.max == 0.0);  // a = 1 compares a run against itself

    ResidualStats scaled = coordinate_change_residual(raw, p, 2, pairs, 4.0 * spec.mesh);
    CHECK(scaled.count + scaled.skipped == pairs.size());
    for (double v : scaled.values) CHECK(std::isfinite(v));

    ResidualStats empty = coordinate_change_residual(raw, p, 2, {}, 4.0 * spec.mesh);
    CHECK(empty.count == 0);

    CHECK_THROWS(coordinate_change_residual(raw, p, 3, pairs, 4.0 * spec.mesh));  // not dyadic
}

TEST_CASE("coordinate change residual shrinks with the mesh") {
    MetricParams p = MetricParams::for_gamma(kG83);
    std::vector<std::pair<Vec2, Vec2>> pairs{{{-0.35, -0.25}, {0.3, 0.35}},
                                             {{-0.3, 0.3}, {0.35, -0.3}},
                                             {{-0.4, 0.05}, {0.4, -0.1}}};
    auto mean_median = [&](int n) {
        GridSpec spec = GridSpec::centered(n, 4.0 / n);
        double sum = 0.0;
        for (int s = 0; s < 10; s++) {
            FieldGrid raw = sample_gff(spec, 7000 + s);
            sum += coordinate_change_residual(raw, p, 2, pairs, 4.0 * spec.mesh).median;
        }
        return sum / 10.0;
    };
    double coarse = mean_median(128);
    double fine = mean_median(512);
    CHECK(fine < coarse);  // statistical identity sharpens as mesh -> 0
    CHECK(coarse < 0.2);
}
