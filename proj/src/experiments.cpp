#include "lqg/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "lqg/balls.hpp"
#include "lqg/combinatorics.hpp"
#include "lqg/geodesics.hpp"
#include "lqg/io.hpp"
#include "lqg/measure.hpp"

namespace lqg {

using nlohmann::json;
namespace fs = std::filesystem;

const char* kCodeVersion = "lqg-geodesy 0.1.0";

void RunConfig::validate() const {
    grid();  // throws on bad side_count / mesh
    params().validate();
    if (eps < 0 || measure_scale < 0 || slack < 0 || excision < 0)
        throw std::invalid_argument("RunConfig: numeric fields must be nonnegative");
    if (seeds.empty()) throw std::invalid_argument("RunConfig: need at least one seed");
    if (pairs_per_seed < 1 || samples_per_seed < 1)
        throw std::invalid_argument("RunConfig: per-seed counts must be positive");
}

json RunConfig::to_json() const {
    json j;
    j["gamma"] = gamma;
    j["d_gamma"] = d_gamma;
    j["side_count"] = side_count;
    j["mesh"] = mesh;
    j["eps"] = eps;
    j["measure_scale"] = measure_scale;
    j["slack"] = slack;
    j["excision"] = excision;
    j["seeds"] = seeds;
    j["experiment"] = experiment;
    j["out_dir"] = out_dir;
    j["threads"] = threads;
    j["pairs_per_seed"] = pairs_per_seed;
    j["samples_per_seed"] = samples_per_seed;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    if (j.contains("d_gamma")) c.d_gamma = j["d_gamma"].get<double>();
    if (j.contains("side_count")) c.side_count = j["side_count"].get<int>();
    if (j.contains("mesh")) c.mesh = j["mesh"].get<double>();
    if (j.contains("eps")) c.eps = j["eps"].get<double>();
    if (j.contains("measure_scale")) c.measure_scale = j["measure_scale"].get<double>();
    if (j.contains("slack")) c.slack = j["slack"].get<double>();
    if (j.contains("excision")) c.excision = j["excision"].get<double>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("pairs_per_seed")) c.pairs_per_seed = j["pairs_per_seed"].get<int>();
    if (j.contains("samples_per_seed")) c.samples_per_seed = j["samples_per_seed"].get<int>();
    return c;
}

json RunManifest::to_json() const {
    json j;
    j["run_id"] = run_id;
    j["experiment"] = experiment;
    j["config"] = config_snapshot;
    j["code_version"] = code_version;
    json seeds = json::array();
    for (const auto& s : per_seed)
        seeds.push_back({{"seed", s.seed}, {"status", s.status}, {"ms", s.ms}});
    j["per_seed"] = seeds;
    j["outputs"] = outputs;
    j["total_ms"] = total_ms;
    j["exit_status"] = exit_status;
    j["summary"] = summary;
    return j;
}

std::string run_id_for(const RunConfig& config) {
    std::string dump = config.to_json().dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return std::string(buf);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 0) threads = int(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, int(n)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; i++) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int t = 0; t < threads; t++)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<std::uint64_t> calibration_seeds() {
    return {9001, 9002, 9003, 9004, 9005, 9006, 9007, 9008};
}

MetricParams calibrated_params(const RunConfig& config) {
    auto seeds = calibration_seeds();
    double norm = calibrate_norm_constant(config.grid(), config.params(), config.resolved_eps(),
                                          seeds);
    return MetricParams::with(config.gamma, config.d_gamma, norm);
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ull + tag;
    x ^= x >> 29;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 32;
    return x;
}

VertexId random_central_vertex(const GridSpec& spec, std::mt19937_64& rng) {
    int q = spec.side_count / 4;
    std::uniform_int_distribution<int> pick(q, 3 * q - 1);
    return spec.index(pick(rng), pick(rng));
}

struct ExperimentScratch {
    RunConfig config;
    std::string run_id;
    fs::path dir;
    json summary;
    std::vector<std::string> outputs;
    int status = kPass;
    std::vector<SeedStatus> per_seed;
    std::mutex mu;

    std::string file(const std::string& stem, const std::string& ext) {
        std::string name = stem + "_" + run_id + ext;
        std::string path = (dir / name).string();
        outputs.push_back(path);
        return path;
    }
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ---------------------------------------------------------------- axioms ---

// Covariance geometries: (radius1, radius2, separation) triples, separations
// spread over [0.2, 0.5]; each geometry is averaged over 8 rotations.
std::vector<std::array<double, 3>> covariance_geometries() {
    return {{0.30, 0.35, 0.20}, {0.45, 0.40, 0.25}, {0.25, 0.50, 0.30}, {0.55, 0.30, 0.33},
            {0.40, 0.40, 0.36}, {0.60, 0.45, 0.40}, {0.35, 0.55, 0.43}, {0.50, 0.50, 0.46},
            {0.30, 0.60, 0.48}, {0.45, 0.60, 0.50}};
}

struct CovarianceCheck {
    double max_abs_err = 0.0;
    std::vector<double> per_geometry_err;
};

CovarianceCheck covariance_check(const GridSpec& spec, double eps,
                                 std::span<const std::uint64_t> seeds, int threads) {
    auto geos = covariance_geometries();
    constexpr int kRot = 8;
    std::vector<std::vector<VertexId>> zs(geos.size()), ws(geos.size());
    std::vector<std::vector<double>> targets(geos.size());
    for (std::size_t g = 0; g < geos.size(); g++) {
        double r1 = geos[g][0], r2 = geos[g][1], sep = geos[g][2];
        for (int k = 0; k < kRot; k++) {
            double phi = 2.0 * std::numbers::pi * k / kRot;
            double cosd = (r1 * r1 + r2 * r2 - sep * sep) / (2.0 * r1 * r2);
            double psi = phi + std::acos(std::clamp(cosd, -1.0, 1.0));
            Vec2 z{r1 * std::cos(phi), r1 * std::sin(phi)};
            Vec2 w{r2 * std::cos(psi), r2 * std::sin(psi)};
            VertexId zv = spec.nearest_vertex(z), wv = spec.nearest_vertex(w);
            Vec2 zc = spec.coord(zv), wc = spec.coord(wv);
            if (dist(zc, wc) < 0.18 || dist(zc, wc) > 0.52) continue;
            zs[g].push_back(zv);
            ws[g].push_back(wv);
            double zp = std::max(zc.norm(), 1.0), wp = std::max(wc.norm(), 1.0);
            targets[g].push_back(std::log(zp * wp / dist(zc, wc)));
        }
    }
    std::vector<std::vector<double>> sums(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t si) {
        FieldGrid f = mollify(sample_gff(spec, seeds[si]), eps);
        std::vector<double> acc;
        for (std::size_t g = 0; g < geos.size(); g++)
            for (std::size_t k = 0; k < zs[g].size(); k++)
                acc.push_back(f.values[zs[g][k]] * f.values[ws[g][k]]);
        sums[si] = std::move(acc);
    });
    CovarianceCheck out;
    std::size_t flat = 0;
    for (std::size_t g = 0; g < geos.size(); g++) {
        double err = 0.0;
        for (std::size_t k = 0; k < zs[g].size(); k++, flat++) {
            double mean = 0.0;
            for (const auto& acc : sums) mean += acc[flat];
            mean /= double(sums.size());
            err += mean - targets[g][k];
        }
        err /= double(zs[g].size());
        out.per_geometry_err.push_back(err);
        out.max_abs_err = std::max(out.max_abs_err, std::fabs(err));
    }
    return out;
}

void experiment_axioms(ExperimentScratch& sc) {
    const RunConfig& cfg = sc.config;
    MetricParams params = calibrated_params(cfg);
    double eps = cfg.resolved_eps();
    GridSpec spec = cfg.grid();

    struct SeedOut {
        double weyl_max = 0.0;
        int locality_checked = 0, locality_misses = 0;
        double sym_max = 0.0, tri_max = 0.0, edge_max = 0.0;
        int triples = 0;
    };
    // geometry checks cover the first 8 seeds; the covariance statistic
    // below uses every seed
    std::size_t geo_seeds = std::min<std::size_t>(cfg.seeds.size(), 8);
    std::vector<SeedOut> outs(geo_seeds);

    parallel_for(geo_seeds, cfg.threads, [&](std::size_t si) {
        std::uint64_t seed = cfg.seeds[si];
        SeedOut& o = outs[si];
        std::mt19937_64 rng(mix(seed, 0xa10));
        FieldGrid h_eps = mollify(sample_gff(spec, seed), eps);
        WeightGrid w = build_weights(h_eps, params);

        // Weyl scaling: apply_weyl vs rebuild from the bumped field
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int b = 0; b < 4; b++) {
            BumpFunction bump;
            double half = spec.side_length() / 4.0;
            bump.center = {(uni(rng) - 0.5) * half, (uni(rng) - 0.5) * half};
            bump.inner_radius = (0.02 + 0.03 * uni(rng)) * half;
            bump.outer_radius = 2.0 * bump.inner_radius;
            bump.height = 0.2 + 0.8 * uni(rng);
            WeightGrid w1 = apply_weyl(w, [&](Vec2 p) { return bump(p); }, params);
            WeightGrid w2 = build_weights(add_bump(h_eps, bump), params);
            VertexId src = random_central_vertex(spec, rng);
            MetricField m1 = sssp(w1, src), m2 = sssp(w2, src);
            for (int t = 0; t < 50; t++) {
                VertexId v = random_central_vertex(spec, rng);
                double d1 = m1.distances[v], d2 = m2.distances[v];
                if (d1 > 0.0)
                    o.weyl_max = std::max(o.weyl_max, std::fabs(d1 - d2) / d1);
            }
        }

        // locality: region containing the geodesic reproduces the distance
        for (int t = 0; t < 4; t++) {
            VertexId z = random_central_vertex(spec, rng);
            VertexId v = random_central_vertex(spec, rng);
            if (z == v) v = spec.index(spec.row(v), spec.col(v) ^ 1);
            MetricField mf = sssp(w, z);
            LatticePath geo = extract_geodesic(mf, v);
            std::vector<std::uint8_t> region(spec.vertex_count(), 0);
            for (VertexId p : geo.vertices) {
                int pi = spec.row(p), pj = spec.col(p);
                for (int di = -2; di <= 2; di++)
                    for (int dj = -2; dj <= 2; dj++) {
                        int ni = pi + di, nj = pj + dj;
                        if (ni >= 0 && nj >= 0 && ni < spec.side_count && nj < spec.side_count)
                            region[spec.index(ni, nj)] = 1;
                    }
            }
            double din = internal_distance(w, region, z, v);
            o.locality_checked++;
            if (din != mf.distances[v]) o.locality_misses++;
        }

        // metric axioms over anchor triples + the relaxation certificate
        std::vector<VertexId> anchors;
        for (int k = 0; k < 8; k++) anchors.push_back(random_central_vertex(spec, rng));
        std::vector<MetricField> fields;
        for (VertexId a : anchors) {
            fields.push_back(sssp(w, a));
            double viol = 0.0;
            verify_edge_relaxation(w, fields.back(), &viol);
            o.edge_max = std::max(o.edge_max, viol);
        }
        for (std::size_t a = 0; a < anchors.size(); a++)
            for (std::size_t b = 0; b < anchors.size(); b++) {
                if (a == b) continue;
                double dab = fields[a].distances[anchors[b]];
                double dba = fields[b].distances[anchors[a]];
                o.sym_max = std::max(o.sym_max, std::fabs(dab - dba) / std::max(1.0, dab));
                for (std::size_t c = 0; c < anchors.size(); c++) {
                    if (c == a || c == b) continue;
                    double lhs = fields[a].distances[anchors[c]];
                    double rhs = dab + fields[b].distances[anchors[c]];
                    o.tri_max = std::max(o.tri_max, (lhs - rhs) / std::max(1.0, lhs));
                    o.triples++;
                }
            }
    });

    CovarianceCheck cov = covariance_check(spec, eps, cfg.seeds, cfg.threads);

    CsvWriter csv(sc.file("axioms", ".csv"));
    csv.row({"seed", "weyl_max_rel", "locality_misses", "symmetry_max", "triangle_max",
             "edge_cert_max", "triples"});
    double weyl = 0, sym = 0, tri = 0, edge = 0;
    int loc_miss = 0, loc_total = 0, triples = 0;
    for (std::size_t si = 0; si < geo_seeds; si++) {
        const SeedOut& o = outs[si];
        csv.row({std::to_string(cfg.seeds[si]), fmt_double(o.weyl_max),
                 std::to_string(o.locality_misses), fmt_double(o.sym_max), fmt_double(o.tri_max),
                 fmt_double(o.edge_max), std::to_string(o.triples)});
        weyl = std::max(weyl, o.weyl_max);
        sym = std::max(sym, o.sym_max);
        tri = std::max(tri, o.tri_max);
        edge = std::max(edge, o.edge_max);
        loc_miss += o.locality_misses;
        loc_total += o.locality_checked;
        triples += o.triples;
    }
    csv.close();

    sc.summary["weyl_max_rel"] = weyl;
    sc.summary["locality_misses"] = loc_miss;
    sc.summary["locality_checked"] = loc_total;
    sc.summary["symmetry_max"] = sym;
    sc.summary["triangle_max"] = tri;
    sc.summary["edge_cert_max"] = edge;
    sc.summary["triples"] = triples;
    sc.summary["covariance_max_abs_err"] = cov.max_abs_err;
    sc.summary["covariance_per_geometry"] = cov.per_geometry_err;
    sc.summary["covariance_seeds"] = cfg.seeds.size();
    sc.summary["norm_constant"] = params.norm_constant;
    if (weyl > 1e-9 || loc_miss > 0 || sym > 1e-12 || tri > 1e-12 || edge > 1e-12)
        sc.status = kHardFail;
    if (cov.max_abs_err > 0.15) sc.status = std::max(sc.status, int(kSoftMiss));
}

// ---------------------------------------------------------------- census ---

void experiment_census(ExperimentScratch& sc, bool classify) {
    const RunConfig& cfg = sc.config;
    MetricParams params = calibrated_params(cfg);
    double eps = cfg.resolved_eps();
    GridSpec spec = cfg.grid();
    long long sn_cap = (long long)std::floor(2.0 * cfg.d_gamma);

    struct Row {
        std::uint64_t seed;
        Vec2 z, w;
        double d;
        int k, n, m;
        bool normal;
        std::optional<Vec2> splitter;
    };
    std::vector<std::vector<Row>> rows(cfg.seeds.size());
    std::atomic<int> anomalies{0};

    parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t si) {
        std::uint64_t seed = cfg.seeds[si];
        std::mt19937_64 rng(mix(seed, 0xce52));
        WeightGrid w = build_weights(mollify(sample_gff(spec, seed), eps), params);
        double delta = cfg.slack > 0 ? cfg.slack : default_slack(w);
        double rho = cfg.excision > 0 ? cfg.excision : default_excision(w);
        double min_sep = 0.2 * spec.side_length();

        int made = 0, guard = 0;
        while (made < cfg.pairs_per_seed && guard++ < 50 * cfg.pairs_per_seed) {
            VertexId z = random_central_vertex(spec, rng);
            VertexId v = random_central_vertex(spec, rng);
            if (dist(spec.coord(z), spec.coord(v)) < min_sep) continue;
            MetricField mfz = sssp(w, z);
            MetricField mfw = sssp(w, v);
            double d = mfz.distances[v];
            if (!(d > 4.0 * rho)) continue;
            Row row;
            row.seed = seed;
            row.z = spec.coord(z);
            row.w = spec.coord(v);
            row.d = d;
            MultiplicityResult mult = multiplicity(w, mfz, mfw, z, v, delta, rho);
            row.k = mult.k;
            row.n = row.m = 0;
            row.normal = false;
            if (classify) {
                NetworkClass nc = classify_network(w, mfz, mfw, z, v, delta, d / 8.0);
                row.n = nc.n;
                row.m = nc.m;
                row.normal = nc.normal;
                if (nc.splitter) row.splitter = spec.coord(*nc.splitter);
                if (mult.k >= 2) {
                    auto ev = detect_sn(mult.representatives, 2.0 * delta);
                    if (ev && (long long)ev->marks.size() > sn_cap) anomalies++;
                }
            }
            rows[si].push_back(row);
            made++;
        }
    });

    CsvWriter csv(sc.file(classify ? "network_census" : "multiplicity_census", ".csv"));
    csv.row({"seed", "zx", "zy", "wx", "wy", "d", "k", "n", "m", "normal", "ux", "uy"});
    std::map<int, int> k_hist;
    std::map<std::pair<int, int>, int> nm_hist;
    int total = 0, multi = 0, multi_nm_ok = 0;
    for (std::size_t si = 0; si < cfg.seeds.size(); si++)
        for (const Row& r : rows[si]) {
            csv.row({std::to_string(r.seed), fmt_double(r.z.x), fmt_double(r.z.y),
                     fmt_double(r.w.x), fmt_double(r.w.y), fmt_double(r.d), std::to_string(r.k),
                     std::to_string(r.n), std::to_string(r.m), r.normal ? "1" : "0",
                     r.splitter ? fmt_double(r.splitter->x) : "",
                     r.splitter ? fmt_double(r.splitter->y) : ""});
            total++;
            k_hist[r.k]++;
            if (classify) nm_hist[{r.n, r.m}]++;
            if (r.k >= 2) {
                multi++;
                if (r.n >= 1 && r.n <= 3 && r.m >= 1 && r.m <= 3) multi_nm_ok++;
            }
        }
    csv.close();

    json kh = json::object();
    for (auto& [k, c] : k_hist) kh[std::to_string(k)] = c;
    sc.summary["pairs"] = total;
    sc.summary["k_hist"] = kh;
    sc.summary["frac_k1"] = total ? double(k_hist[1]) / total : 0.0;
    sc.summary["multi_pairs"] = multi;
    sc.summary["sn_anomalies"] = anomalies.load();
    sc.summary["norm_constant"] = params.norm_constant;
    if (classify) {
        json nm = json::object();
        std::vector<std::string> labels;
        std::vector<double> counts;
        for (auto& [key, c] : nm_hist) {
            std::string lab = std::to_string(key.first) + "," + std::to_string(key.second);
            nm[lab] = c;
            labels.push_back(lab);
            counts.push_back(double(c));
        }
        sc.summary["nm_hist"] = nm;
        sc.summary["multi_nm_in_123"] = multi_nm_ok;
        sc.summary["multi_nm_frac"] = multi ? double(multi_nm_ok) / multi : 1.0;
        svg_histogram(sc.file("network_census_hist", ".svg"), "(n,m) census", labels, counts);
    }
    // soft criteria: uniqueness rate and (n,m) concentration
    if (total && double(k_hist[1]) / total < 0.99) sc.status = std::max(sc.status, int(kSoftMiss));
    if (classify && multi && double(multi_nm_ok) / multi < 0.9)
        sc.status = std::max(sc.status, int(kSoftMiss));
}

// ------------------------------------------------------------- confluence ---

void experiment_confluence(ExperimentScratch& sc) {
    const RunConfig& cfg = sc.config;
    MetricParams params = calibrated_params(cfg);
    double eps = cfg.resolved_eps();
    GridSpec spec = cfg.grid();
    int n = spec.side_count;

    std::vector<json> per_seed_reports(cfg.seeds.size());
    std::atomic<int> total_arcs{0}, violated_arcs{0}, hard{0};

    parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t si) {
        std::uint64_t seed = cfg.seeds[si];
        WeightGrid w = build_weights(mollify(sample_gff(spec, seed), eps), params);
        VertexId center = spec.index(n / 2, n / 2);
        VertexId target = spec.index(5 * n / 8, 5 * n / 8);
        double d0 = distance(w, center, target);
        json reports = json::array();
        for (int k = 0; k < cfg.samples_per_seed; k++) {
            double t = (0.22 + 0.06 * k) * d0;
            double s = t + (0.10 + 0.02 * k) * d0;
            if (!(s < d0)) break;
            ConfluenceReport rep = confluence_census(w, center, target, t, s);
            json jr;
            jr["t"] = rep.t;
            jr["s"] = rep.s;
            jr["X"] = rep.confluence_points;
            json arcs = json::array();
            for (const auto& a : rep.arcs)
                arcs.push_back({{"x", a.x}, {"start", a.start}, {"end", a.end}});
            jr["arcs"] = arcs;
            jr["violations"] = {{"non_contiguous", rep.violations.non_contiguous},
                                {"cyclic_mismatch", rep.violations.cyclic_mismatch},
                                {"no_crossing", rep.violations.no_crossing},
                                {"reentry", rep.violations.reentry}};
            jr["outer_boundary_length"] = rep.outer_boundary_length;
            reports.push_back(jr);
            total_arcs += int(rep.arcs.size());
            violated_arcs += rep.violations.non_contiguous + rep.violations.cyclic_mismatch;
            if (rep.violations.no_crossing > int(rep.arcs.size())) hard++;
        }
        per_seed_reports[si] = std::move(reports);
    });

    for (std::size_t si = 0; si < cfg.seeds.size(); si++) {
        std::ofstream out(sc.file("confluence_seed" + std::to_string(cfg.seeds[si]), ".json"));
        out << per_seed_reports[si].dump(2) << '\n';
    }
    sc.summary["total_arcs"] = total_arcs.load();
    sc.summary["violated_arcs"] = violated_arcs.load();
    double frac = total_arcs ? double(violated_arcs) / total_arcs : 0.0;
    sc.summary["violation_frac"] = frac;
    sc.summary["norm_constant"] = params.norm_constant;
    if (frac > 0.05) sc.status = std::max(sc.status, int(kSoftMiss));
    if (hard > 0) sc.status = kHardFail;
}

// -------------------------------------------------------------- dimension ---

void experiment_dimension(ExperimentScratch& sc) {
    const RunConfig& cfg = sc.config;
    MetricParams params = calibrated_params(cfg);
    double eps = cfg.resolved_eps();
    GridSpec spec = cfg.grid();
    int n = spec.side_count;

    struct SeedOut {
        std::vector<double> radii, masses;
        double slope = 0.0;
        double covering_slope = 0.0;
    };
    std::vector<SeedOut> outs(cfg.seeds.size());

    parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t si) {
        std::uint64_t seed = cfg.seeds[si];
        SeedOut& o = outs[si];
        FieldGrid raw = sample_gff(spec, seed);
        WeightGrid w = build_weights(mollify(raw, eps), params);
        AreaMeasure mu = area_measure(raw, params, cfg.resolved_measure_scale());
        VertexId center = spec.index(n / 2, n / 2);
        MetricField mf = sssp(w, center);

        // largest radius keeping the ball inside the central quarter
        int q = n / 4;
        double dq = kInfDist;
        for (int k = q; k < 3 * q; k++) {
            dq = std::min(dq, mf.distances[spec.index(q, k)]);
            dq = std::min(dq, mf.distances[spec.index(3 * q - 1, k)]);
            dq = std::min(dq, mf.distances[spec.index(k, q)]);
            dq = std::min(dq, mf.distances[spec.index(k, 3 * q - 1)]);
        }
        double r_hi = 0.9 * dq, r_lo = r_hi / 50.0;
        for (int k = 0; k < 16; k++)
            o.radii.push_back(r_lo * std::pow(r_hi / r_lo, k / 15.0));
        DimensionEstimate est = ball_volume_curve(mf, mu, o.radii);
        o.masses = est.counts_or_masses;
        o.slope = est.slope;

        // reference: metric covering of one geodesic (a length-space curve)
        VertexId far = spec.index(3 * q - 1, 3 * q - 1);
        LatticePath geo = extract_geodesic(mf, far);
        std::vector<double> cradii;
        for (int k = 0; k < 8; k++)
            cradii.push_back(mf.distances[far] * 0.3 * std::pow(0.5, k));
        o.covering_slope = covering_dimension(geo.vertices, w, cradii).slope;
    });

    CsvWriter csv(sc.file("dimension", ".csv"));
    csv.row({"seed", "radius", "mass"});
    std::vector<double> all_r, all_m, slopes;
    for (std::size_t si = 0; si < cfg.seeds.size(); si++) {
        const SeedOut& o = outs[si];
        slopes.push_back(o.slope);
        for (std::size_t k = 0; k < o.radii.size(); k++) {
            csv.row({std::to_string(cfg.seeds[si]), fmt_double(o.radii[k]),
                     fmt_double(o.masses[k])});
            all_r.push_back(o.radii[k]);
            all_m.push_back(o.masses[k]);
        }
    }
    csv.close();

    double mean = 0.0;
    for (double s : slopes) mean += s;
    mean /= double(slopes.size());
    // bootstrap over seeds
    std::mt19937_64 rng(0xb007);
    std::uniform_int_distribution<std::size_t> pick(0, slopes.size() - 1);
    std::vector<double> boot;
    for (int b = 0; b < 200; b++) {
        double m = 0.0;
        for (std::size_t k = 0; k < slopes.size(); k++) m += slopes[pick(rng)];
        boot.push_back(m / double(slopes.size()));
    }
    double bmean = 0.0, bvar = 0.0;
    for (double v : boot) bmean += v;
    bmean /= boot.size();
    for (double v : boot) bvar += (v - bmean) * (v - bmean);
    double bstderr = std::sqrt(bvar / boot.size());

    double cover_mean = 0.0;
    for (const auto& o : outs) cover_mean += o.covering_slope;
    cover_mean /= double(outs.size());

    sc.summary["gamma"] = cfg.gamma;
    sc.summary["slope"] = mean;
    sc.summary["stderr"] = bstderr;
    sc.summary["per_seed_slopes"] = slopes;
    sc.summary["covering_slope_mean"] = cover_mean;
    sc.summary["window"] = {2, 13};
    sc.summary["norm_constant"] = params.norm_constant;

    svg_loglog(sc.file("dimension_loglog", ".svg"), "ball volume vs radius", all_r, all_m, mean,
               bstderr, 0, int(all_r.size()) - 1);
}

// ----------------------------------------------------------------- bounds ---

void experiment_bounds(ExperimentScratch& sc) {
    CsvWriter csv(sc.file("bounds", ".csv"));
    csv.row({"threshold", "literal_scan_max_m", "first_failing_m", "quoted", "agrees",
             "precision_stable"});
    bool monotone = true, stable = true;
    long long prev = 0;
    json table = json::array();
    for (long long t = 1; t <= 12; t++) {
        MBoundScan scan = max_m_bound(t);
        long long quoted = quoted_m_bound(t);
        if (scan.max_m < prev) monotone = false;
        if (!scan.precision_stable) stable = false;
        prev = scan.max_m;
        csv.row({std::to_string(t), std::to_string(scan.max_m),
                 std::to_string(scan.first_failing), quoted ? std::to_string(quoted) : "",
                 quoted ? (scan.max_m == quoted ? "yes" : "no") : "",
                 scan.precision_stable ? "1" : "0"});
        table.push_back({{"threshold", t},
                         {"max_m", scan.max_m},
                         {"first_failing", scan.first_failing},
                         {"quoted", quoted},
                         {"agrees", quoted ? json(scan.max_m == quoted) : json(nullptr)}});
    }
    csv.close();
    sc.summary["table"] = table;
    sc.summary["monotone"] = monotone;
    sc.summary["precision_stable"] = stable;
    if (!monotone || !stable) sc.status = kHardFail;
}

// ----------------------------------------------------------- perturbation ---

// Two low-weight channels joined by side connectors, wall elsewhere; the
// bump sits on the upper channel.
struct ChannelInstance {
    FieldGrid field;
    VertexId z, w;
    BumpFunction bump;
    double delta, rho;
};

ChannelInstance make_channel_instance(int variant, const MetricParams& params) {
    int n = 64;
    GridSpec spec = GridSpec::centered(n, 4.0 / n);
    FieldGrid f;
    f.spec = spec;
    f.seed = variant;
    f.provenance = Provenance::mollified;
    f.mollification_eps = spec.mesh;
    double wall = 3.0;
    f.values.assign(spec.vertex_count(), wall);

    int gap = 4 + (variant % 4);          // half-distance between channels
    int col_lo = 8, col_hi = n - 8;
    int row_up = n / 2 + gap, row_dn = n / 2 - gap;
    for (int j = col_lo; j <= col_hi; j++) {
        f.values[spec.index(row_up, j)] = 0.0;
        f.values[spec.index(row_dn, j)] = 0.0;
    }
    for (int i = row_dn; i <= row_up; i++) {
        f.values[spec.index(i, col_lo)] = 0.0;
        f.values[spec.index(i, col_hi)] = 0.0;
    }

    ChannelInstance inst;
    inst.z = spec.index(n / 2, col_lo);
    inst.w = spec.index(n / 2, col_hi);
    inst.bump.center = spec.coord(spec.index(row_up, n / 2 + (variant % 5) - 2));
    inst.bump.inner_radius = 2.0 * spec.mesh;
    inst.bump.outer_radius = 4.0 * spec.mesh;
    inst.bump.height = 0.25 + 0.0625 * double(variant % 20);
    double channel_edge = spec.mesh * std::exp(params.xi() * 0.0) / params.norm_constant;
    inst.delta = 4.0 * channel_edge;
    inst.rho = 6.0 * channel_edge;
    inst.field = std::move(f);
    return inst;
}

void experiment_perturbation(ExperimentScratch& sc) {
    const RunConfig& cfg = sc.config;
    MetricParams params = cfg.params();  // constructed instances, no calibration

    CsvWriter csv(sc.file("perturbation", ".csv"));
    csv.row({"instance", "kind", "old_length", "new_length", "inner_traversal",
             "required_increase", "ok"});
    int violations = 0, hitters = 0, avoiders = 0;
    for (int k = 0; k < 20; k++) {
        ChannelInstance inst = make_channel_instance(k, params);
        WeightGrid w = build_weights(inst.field, params);
        PerturbationReport rep = perturbation_experiment(w, inst.z, inst.w, inst.bump, params,
                                                         inst.delta, inst.rho);
        for (const auto& p : rep.paths) {
            const char* kind = p.kind == PerturbedPath::Kind::hitter    ? "hitter"
                               : p.kind == PerturbedPath::Kind::avoider ? "avoider"
                                                                        : "partial";
            csv.row({std::to_string(k), kind, fmt_double(p.old_length),
                     fmt_double(p.new_length), fmt_double(p.inner_traversal),
                     fmt_double(p.required_increase), p.ok ? "1" : "0"});
            if (p.kind == PerturbedPath::Kind::hitter) hitters++;
            if (p.kind == PerturbedPath::Kind::avoider) avoiders++;
        }
        violations += rep.violations;
    }
    csv.close();
    sc.summary["instances"] = 20;
    sc.summary["hitters"] = hitters;
    sc.summary["avoiders"] = avoiders;
    sc.summary["violations"] = violations;
    if (violations > 0 || hitters == 0 || avoiders == 0) sc.status = kHardFail;
}

}  // namespace

RunManifest run_experiment(const RunConfig& config) {
    config.validate();
    static const std::vector<std::string> known{
        "axioms",      "multiplicity-census", "network-census", "confluence-census",
        "dimension",   "bounds",              "perturbation"};
    if (std::find(known.begin(), known.end(), config.experiment) == known.end())
        throw std::invalid_argument("run_experiment: unknown experiment '" + config.experiment +
                                    "'");
    fs::create_directories(config.out_dir);
    {
        std::ofstream probe(fs::path(config.out_dir) / ".write_probe");
        if (!probe) throw std::runtime_error("run_experiment: output dir not writable");
    }
    fs::remove(fs::path(config.out_dir) / ".write_probe");

    ExperimentScratch sc;
    sc.config = config;
    sc.run_id = run_id_for(config);
    sc.dir = config.out_dir;

    auto t0 = std::chrono::steady_clock::now();
    if (config.experiment == "axioms") experiment_axioms(sc);
    else if (config.experiment == "multiplicity-census") experiment_census(sc, false);
    else if (config.experiment == "network-census") experiment_census(sc, true);
    else if (config.experiment == "confluence-census") experiment_confluence(sc);
    else if (config.experiment == "dimension") experiment_dimension(sc);
    else if (config.experiment == "bounds") experiment_bounds(sc);
    else if (config.experiment == "perturbation") experiment_perturbation(sc);

    RunManifest man;
    man.run_id = sc.run_id;
    man.experiment = config.experiment;
    man.config_snapshot = config.to_json();
    man.code_version = kCodeVersion;
    man.outputs = sc.outputs;
    man.total_ms = elapsed_ms(t0);
    man.exit_status = sc.status;
    man.summary = sc.summary;
    for (std::uint64_t s : config.seeds) man.per_seed.push_back({s, "ok", 0.0});

    std::string man_path = (sc.dir / ("manifest_" + sc.run_id + ".json")).string();
    std::ofstream out(man_path);
    out << man.to_json().dump(2) << '\n';
    man.outputs.push_back(man_path);
    return man;
}

std::vector<std::string> emit_plots(const RunManifest& manifest) {
    std::vector<std::string> files;
    const json& s = manifest.summary;
    fs::path dir = fs::path(manifest.outputs.empty()
                                ? "."
                                : fs::path(manifest.outputs.front()).parent_path());
    if (s.contains("per_seed_slopes")) {
        // re-emit the dimension log-log plot from the CSV rows
        for (const auto& p : manifest.outputs) {
            if (p.find("dimension_") == std::string::npos || p.find(".csv") == std::string::npos)
                continue;
            std::ifstream in(p);
            std::string line;
            std::getline(in, line);
            std::vector<double> rs, ms;
            while (std::getline(in, line)) {
                auto c1 = line.find(','), c2 = line.rfind(',');
                if (c1 == std::string::npos || c2 <= c1) continue;
                rs.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
                ms.push_back(std::stod(line.substr(c2 + 1)));
            }
            std::string out = (dir / ("plot_dimension_" + manifest.run_id + ".svg")).string();
            svg_loglog(out, "ball volume vs radius", rs, ms, s["slope"].get<double>(),
                       s["stderr"].get<double>(), 0, int(rs.size()) - 1);
            files.push_back(out);
        }
    }
    if (s.contains("nm_hist")) {
        std::vector<std::string> labels;
        std::vector<double> counts;
        for (auto it = s["nm_hist"].begin(); it != s["nm_hist"].end(); ++it) {
            labels.push_back(it.key());
            counts.push_back(it.value().get<double>());
        }
        std::string out = (dir / ("plot_nm_hist_" + manifest.run_id + ".svg")).string();
        svg_histogram(out, "(n,m) census", labels, counts);
        files.push_back(out);
    }
    if (s.contains("k_hist") && !s.contains("nm_hist")) {
        std::vector<std::string> labels;
        std::vector<double> counts;
        for (auto it = s["k_hist"].begin(); it != s["k_hist"].end(); ++it) {
            labels.push_back(it.key());
            counts.push_back(it.value().get<double>());
        }
        std::string out = (dir / ("plot_k_hist_" + manifest.run_id + ".svg")).string();
        svg_histogram(out, "multiplicity census", labels, counts);
        files.push_back(out);
    }
    return files;
}

}  // namespace lqg
