#pragma once

#include <cstddef>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/core/parallel.hpp"
#include "magseq/core/stats.hpp"
#include "magseq/gauss/kalman.hpp"
#include "magseq/gauss/rts.hpp"
#include "magseq/sim/dataset.hpp"

namespace magseq {

// Per-time mean squared error of the Gaussian baseline over a dataset.
struct BaselineErrorCurves {
    std::vector<double> time;            // ms
    std::vector<double> error_smoothed;  // pT^2
    std::vector<double> error_filtered;  // pT^2
    double mid_mean_smoothed = 0.0;      // time average over t in [0.2 T, 0.8 T]
    double mid_mean_filtered = 0.0;
    double edge_ratio_start = 0.0;       // smoothed error at t=0 over mid mean
    double edge_ratio_end = 0.0;
};

// Smoothed and filtered B estimates scored against the true field.
// The dataset must have been generated under exactly these parameters.
inline BaselineErrorCurves baseline_error_curve(const PhysicsParams& params,
                                                const Dataset& dataset,
                                                unsigned threads = 1) {
    params.validate();
    if (!(dataset.params == params))
        throw param_error("dataset header does not match the supplied parameters");
    if (dataset.records.empty()) throw param_error("dataset is empty");

    const StateSpaceModel model = build_model(params);
    const std::size_t n = params.n_steps;
    const std::size_t count = dataset.records.size();

    std::vector<std::vector<double>> sq_smooth(count), sq_filt(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const Record& rec = dataset.records[i];
        const FilterResult filt = kalman_filter(model, rec.signal);
        const SmootherResult smooth = rts_smoother(model, filt);
        sq_smooth[i].resize(n);
        sq_filt[i].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double ds = rec.field[k] - smooth.smoothed[k].mean.y;
            const double df = rec.field[k] - filt.filtered[k].mean.y;
            sq_smooth[i][k] = ds * ds;
            sq_filt[i][k] = df * df;
        }
    });

    BaselineErrorCurves out;
    out.time.resize(n);
    out.error_smoothed.assign(n, 0.0);
    out.error_filtered.assign(n, 0.0);
    for (std::size_t i = 0; i < count; ++i) // fixed reduction order
        for (std::size_t k = 0; k < n; ++k) {
            out.error_smoothed[k] += sq_smooth[i][k];
            out.error_filtered[k] += sq_filt[i][k];
        }
    for (std::size_t k = 0; k < n; ++k) {
        out.time[k] = k * params.tau;
        out.error_smoothed[k] /= static_cast<double>(count);
        out.error_filtered[k] /= static_cast<double>(count);
    }

    const auto [lo, hi] = mid_interval_indices(n);
    out.mid_mean_smoothed = mean_over(out.error_smoothed, lo, hi);
    out.mid_mean_filtered = mean_over(out.error_filtered, lo, hi);
    out.edge_ratio_start = out.error_smoothed.front() / out.mid_mean_smoothed;
    out.edge_ratio_end = out.error_smoothed.back() / out.mid_mean_smoothed;
    return out;
}

} // namespace magseq
