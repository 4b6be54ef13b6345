#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "lqg/combinatorics.hpp"
#include "lqg/experiments.hpp"
#include "lqg/io.hpp"

using namespace lqg;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    double gamma = 0.0, d_gamma = 0.0, eps = 0.0, mesh = 0.0;
    int grid = 0, threads = -1, pairs = 0, samples = 0;
};

void attach_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file (flags override its values)");
    cmd->add_option("--seed", o.seeds, "seed(s); repeatable");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--gamma", o.gamma, "LQG parameter gamma in (0,2)");
    cmd->add_option("--dgamma", o.d_gamma, "dimension exponent d_gamma > 2");
    cmd->add_option("--eps", o.eps, "mollification scale");
    cmd->add_option("--grid", o.grid, "vertices per side (power of two)");
    cmd->add_option("--mesh", o.mesh, "lattice spacing");
    cmd->add_option("--threads", o.threads, "worker pool size (0 = hardware)");
    cmd->add_option("--pairs", o.pairs, "pairs per seed (censuses)");
    cmd->add_option("--samples", o.samples, "samples per seed (confluence)");
}

RunConfig build_config(const CommonOpts& o, const std::string& experiment) {
    RunConfig cfg;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw std::runtime_error("cannot open config file " + o.config_path);
        nlohmann::json j;
        in >> j;
        cfg = RunConfig::from_json(j);
    }
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.gamma > 0.0) cfg.gamma = o.gamma;
    if (o.d_gamma > 0.0) cfg.d_gamma = o.d_gamma;
    if (o.eps > 0.0) cfg.eps = o.eps;
    if (o.grid > 0) cfg.side_count = o.grid;
    if (o.mesh > 0.0) cfg.mesh = o.mesh;
    if (o.threads >= 0) cfg.threads = o.threads;
    if (o.pairs > 0) cfg.pairs_per_seed = o.pairs;
    if (o.samples > 0) cfg.samples_per_seed = o.samples;
    cfg.experiment = experiment;
    return cfg;
}

int run_and_report(const RunConfig& cfg) {
    RunManifest man = run_experiment(cfg);
    std::cout << cfg.experiment << ": run " << man.run_id << ", status " << man.exit_status
              << " (" << (man.exit_status == kPass       ? "pass"
                          : man.exit_status == kSoftMiss ? "soft criteria missed"
                                                         : "hard invariant violation")
              << ")\n";
    std::cout << man.summary.dump(2) << '\n';
    for (const auto& p : man.outputs) std::cout << "  wrote " << p << '\n';
    return man.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LFPP laboratory for LQG geodesic phenomena"};
    app.require_subcommand(1);

    CommonOpts sample_o, metric_o, census_o, confluence_o, dimension_o, bound_o, axioms_o,
        perturb_o;

    auto* sample_cmd = app.add_subcommand("sample", "sample a field and write .fgrid");
    double sample_mollify = 0.0;
    attach_common(sample_cmd, sample_o);
    sample_cmd->add_option("--mollify", sample_mollify,
                           "also write the mollified field at this scale");

    auto* metric_cmd =
        app.add_subcommand("metric", "distance field from one source, written as .dfield");
    int src_row = -1, src_col = -1;
    attach_common(metric_cmd, metric_o);
    metric_cmd->add_option("--source-row", src_row, "source row (default: center)");
    metric_cmd->add_option("--source-col", src_col, "source col (default: center)");

    auto* census_cmd = app.add_subcommand("census", "multiplicity + (n,m) network census");
    bool multiplicity_only = false;
    attach_common(census_cmd, census_o);
    census_cmd->add_flag("--multiplicity-only", multiplicity_only, "skip (n,m) classification");

    auto* confluence_cmd = app.add_subcommand("confluence", "filled-annulus confluence census");
    attach_common(confluence_cmd, confluence_o);

    auto* dimension_cmd = app.add_subcommand("dimension", "ball-volume scaling exponent runs");
    attach_common(dimension_cmd, dimension_o);

    auto* bound_cmd = app.add_subcommand("bound", "geodesic-count bound scans");
    long long threshold = 0;
    attach_common(bound_cmd, bound_o);
    bound_cmd->add_option("--threshold", threshold, "print the scan at one threshold");

    auto* axioms_cmd = app.add_subcommand("axioms", "Weyl / locality / metric-axiom checks");
    attach_common(axioms_cmd, axioms_o);

    auto* perturb_cmd = app.add_subcommand("perturb", "bump-perturbation experiment");
    attach_common(perturb_cmd, perturb_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample_cmd->parsed()) {
            RunConfig cfg = build_config(sample_o, "sample");
            std::filesystem::create_directories(cfg.out_dir);
            for (std::uint64_t seed : cfg.seeds) {
                FieldGrid f = sample_gff(cfg.grid(), seed);
                std::string path =
                    cfg.out_dir + "/field_seed" + std::to_string(seed) + ".fgrid";
                write_fgrid(path, f);
                std::cout << "wrote " << path << '\n';
                if (sample_mollify > 0.0) {
                    FieldGrid m = mollify(f, sample_mollify);
                    std::string mp = cfg.out_dir + "/field_seed" + std::to_string(seed) +
                                     "_mollified.fgrid";
                    write_fgrid(mp, m);
                    std::cout << "wrote " << mp << '\n';
                }
            }
            return 0;
        }
        if (metric_cmd->parsed()) {
            RunConfig cfg = build_config(metric_o, "metric");
            std::filesystem::create_directories(cfg.out_dir);
            GridSpec spec = cfg.grid();
            if (src_row < 0) src_row = spec.side_count / 2;
            if (src_col < 0) src_col = spec.side_count / 2;
            MetricParams params = calibrated_params(cfg);
            for (std::uint64_t seed : cfg.seeds) {
                WeightGrid w =
                    build_weights(mollify(sample_gff(spec, seed), cfg.resolved_eps()), params);
                MetricField mf = sssp(w, spec.index(src_row, src_col));
                std::string path =
                    cfg.out_dir + "/dist_seed" + std::to_string(seed) + ".dfield";
                write_dfield(path, mf);
                std::cout << "wrote " << path << " (norm_constant "
                          << fmt_double(params.norm_constant) << ")\n";
            }
            return 0;
        }
        if (census_cmd->parsed())
            return run_and_report(build_config(
                census_o, multiplicity_only ? "multiplicity-census" : "network-census"));
        if (confluence_cmd->parsed())
            return run_and_report(build_config(confluence_o, "confluence-census"));
        if (dimension_cmd->parsed())
            return run_and_report(build_config(dimension_o, "dimension"));
        if (bound_cmd->parsed()) {
            if (threshold > 0) {
                MBoundScan scan = max_m_bound(threshold);
                long long quoted = quoted_m_bound(threshold);
                std::cout << "threshold " << threshold << ": literal scan max m = " << scan.max_m
                          << " (first failing m = " << scan.first_failing << ", "
                          << (scan.precision_stable ? "precision-stable" : "PRECISION UNSTABLE")
                          << ")\n";
                if (quoted)
                    std::cout << "published value for this threshold: m <= " << quoted
                              << (quoted == scan.max_m ? " (agrees)" : " (differs; flagged)")
                              << '\n';
                else
                    std::cout << "no published value quoted for this threshold\n";
                return scan.precision_stable ? 0 : 3;
            }
            return run_and_report(build_config(bound_o, "bounds"));
        }
        if (axioms_cmd->parsed()) return run_and_report(build_config(axioms_o, "axioms"));
        if (perturb_cmd->parsed()) return run_and_report(build_config(perturb_o, "perturbation"));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
