#pragma once

#include <string>
#include <vector>

#include "lqg/field.hpp"
#include "lqg/metric.hpp"

namespace lqg {

/// Shortest round-trip decimal form of a double (deterministic output).
std::string fmt_double(double v);

/// .fgrid: one JSON header line {side_count, mesh, origin_offset, seed,
/// provenance, normalization}, then the little-endian f64 value array,
/// row-major.
void write_fgrid(const std::string& path, const FieldGrid& field);
FieldGrid read_fgrid(const std::string& path);

/// .dfield: one JSON header line {side_count, mesh, origin_offset, source},
/// then f64 distances, then u32 predecessors.
void write_dfield(const std::string& path, const MetricField& mf);
MetricField read_dfield(const std::string& path);

/// CSV with deterministic numeric formatting.
struct CsvWriter {
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    void row(const std::vector<std::string>& cells);
    void close();

  private:
    void* out_;
};

/// Log-log scatter with fitted-slope annotation. Byte-stable for identical
/// inputs; empty data produces empty axes.
void svg_loglog(const std::string& path, const std::string& title,
                const std::vector<double>& xs, const std::vector<double>& ys, double slope,
                double stderr_, int window_lo, int window_hi);

/// Labeled bar chart (used for the (n,m) census histogram).
void svg_histogram(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels, const std::vector<double>& counts);

}  // namespace lqg
