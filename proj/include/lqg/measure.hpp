#pragma once

#include <vector>

#include "lqg/field.hpp"
#include "lqg/metric.hpp"

namespace lqg {

/// Lattice LQG area measure: cell_mass(v) = mesh^2 * s^{gamma^2/2} * e^{gamma h_s(v)}.
struct AreaMeasure {
    GridSpec spec;
    std::vector<double> cell_mass;

    double total() const {
        double t = 0.0;
        for (double m : cell_mass) t += m;
        return t;
    }
};

/// Builds the measure at mollification scale s. A raw field is mollified
/// here; a field already carrying a mollification is used as-is.
AreaMeasure area_measure(const FieldGrid& field, const MetricParams& params, double scale_s);

struct DimensionEstimate {
    std::vector<double> scales;
    std::vector<double> counts_or_masses;
    double slope = 0.0;
    double stderr_ = 0.0;
    int window_lo = 0, window_hi = 0;  // inclusive index range used for the fit
};

/// Least squares on log(y) vs log(x) over [lo, hi].
void loglog_fit(const std::vector<double>& x, const std::vector<double>& y, int lo, int hi,
                double* slope, double* stderr_out);

/// Measure mass of the metric ball per radius; slope of log(mass) vs log(r).
/// The fit window drops the two smallest and two largest scales.
DimensionEstimate ball_volume_curve(const MetricField& mf, const AreaMeasure& measure,
                                    const std::vector<double>& radii);
DimensionEstimate ball_volume_curve(const WeightGrid& weights, const AreaMeasure& measure,
                                    VertexId center, const std::vector<double>& radii);

/// Greedy cover of the marked set by metric balls of radius eps centered at
/// marked vertices (lowest uncovered vertex first).
int greedy_cover_count(const std::vector<VertexId>& marked, const WeightGrid& weights,
                       double eps);

/// Covering counts N(eps) per radius; slope of log N vs log(1/eps), same
/// window rule as ball_volume_curve.
DimensionEstimate covering_dimension(const std::vector<VertexId>& marked,
                                     const WeightGrid& weights,
                                     const std::vector<double>& radii);

}  // namespace lqg
