#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/core/parallel.hpp"
#include "magseq/core/stats.hpp"
#include "magseq/gauss/kalman.hpp"
#include "magseq/gauss/rts.hpp"
#include "magseq/gauss/state_space.hpp"
#include "magseq/sim/dataset.hpp"
#include "magseq/train/evaluate.hpp"

namespace magseq {

// RNN and Gaussian-baseline estimates scored on the same records.
struct ComparisonSummary {
    std::vector<double> time;
    std::vector<double> error_rnn;
    std::vector<double> error_smoothed;
    std::vector<double> error_filtered;
    double mid_mean_rnn = 0.0;
    double mid_mean_smoothed = 0.0;
    double mid_mean_filtered = 0.0;
    double edge_ratio_start_rnn = 0.0, edge_ratio_end_rnn = 0.0;
    double edge_ratio_start_smoothed = 0.0, edge_ratio_end_smoothed = 0.0;
    // mid-interval error ratio RNN / smoother with its paired standard error
    double ratio_rnn_to_smoother = 0.0;
    double ratio_standard_error = 0.0;
    ModeGap gap;
    std::size_t n_records = 0;
};

inline ComparisonSummary compare_estimators(const Seq2SeqModel& model,
                                            const Dataset& test,
                                            const std::optional<Normalization>& norm = {},
                                            unsigned threads = 1) {
    if (test.records.empty()) throw param_error("test dataset is empty");
    const std::size_t n = test.params.n_steps;
    const std::size_t count = test.records.size();
    const StateSpaceModel ssm = build_model(test.params);
    const auto [lo, hi] = mid_interval_indices(n);

    struct PerRecord {
        std::vector<double> sq_rnn, sq_smooth, sq_filt;
        double mid_rnn = 0.0, mid_smooth = 0.0;
        double sq_teacher = 0.0, sq_auto = 0.0;
    };
    std::vector<PerRecord> per(count);

    parallel_for(count, threads, [&](std::size_t i) {
        const Record& rec = test.records[i];
        PerRecord& p = per[i];
        p.sq_rnn.resize(n);
        p.sq_smooth.resize(n);
        p.sq_filt.resize(n);

        std::vector<double> scaled;
        std::span<const double> input(rec.signal);
        if (norm) {
            scaled.resize(n);
            for (std::size_t k = 0; k < n; ++k) scaled[k] = norm->apply(rec.signal[k]);
            input = scaled;
        }
        const LstmState summary = encode(model, input);
        const std::vector<double> est = decode_autoregressive(model, summary, n);
        const std::vector<double> teacher = decode_teacher(model, summary, rec.field);

        const FilterResult filt = kalman_filter(ssm, rec.signal);
        const SmootherResult smooth = rts_smoother(ssm, filt);

        for (std::size_t k = 0; k < n; ++k) {
            const double dr = rec.field[k] - est[k];
            const double ds = rec.field[k] - smooth.smoothed[k].mean.y;
            const double df = rec.field[k] - filt.filtered[k].mean.y;
            const double dt = rec.field[k] - teacher[k];
            p.sq_rnn[k] = dr * dr;
            p.sq_smooth[k] = ds * ds;
            p.sq_filt[k] = df * df;
            p.sq_teacher += dt * dt;
            p.sq_auto += dr * dr;
        }
        p.mid_rnn = mean_over(p.sq_rnn, lo, hi);
        p.mid_smooth = mean_over(p.sq_smooth, lo, hi);
    });

    ComparisonSummary out;
    out.n_records = count;
    out.time.resize(n);
    out.error_rnn.assign(n, 0.0);
    out.error_smoothed.assign(n, 0.0);
    out.error_filtered.assign(n, 0.0);
    std::vector<double> mids_rnn(count), mids_smooth(count);
    for (std::size_t i = 0; i < count; ++i) { // fixed reduction order
        for (std::size_t k = 0; k < n; ++k) {
            out.error_rnn[k] += per[i].sq_rnn[k];
            out.error_smoothed[k] += per[i].sq_smooth[k];
            out.error_filtered[k] += per[i].sq_filt[k];
        }
        out.gap.teacher_mse += per[i].sq_teacher;
        out.gap.autoregressive_mse += per[i].sq_auto;
        mids_rnn[i] = per[i].mid_rnn;
        mids_smooth[i] = per[i].mid_smooth;
    }
    const auto fcount = static_cast<double>(count);
    for (std::size_t k = 0; k < n; ++k) {
        out.time[k] = k * test.params.tau;
        out.error_rnn[k] /= fcount;
        out.error_smoothed[k] /= fcount;
        out.error_filtered[k] /= fcount;
    }
    out.gap.teacher_mse /= fcount * static_cast<double>(n);
    out.gap.autoregressive_mse /= fcount * static_cast<double>(n);

    out.mid_mean_rnn = mean_over(out.error_rnn, lo, hi);
    out.mid_mean_smoothed = mean_over(out.error_smoothed, lo, hi);
    out.mid_mean_filtered = mean_over(out.error_filtered, lo, hi);
    out.edge_ratio_start_rnn = out.error_rnn.front() / out.mid_mean_rnn;
    out.edge_ratio_end_rnn = out.error_rnn.back() / out.mid_mean_rnn;
    out.edge_ratio_start_smoothed = out.error_smoothed.front() / out.mid_mean_smoothed;
    out.edge_ratio_end_smoothed = out.error_smoothed.back() / out.mid_mean_smoothed;

    // Delta-method standard error of the mid-interval ratio a/s over paired
    // per-record samples.
    const double abar = out.mid_mean_rnn, sbar = out.mid_mean_smoothed;
    double var_a = 0.0, var_s = 0.0, cov_as = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        var_a += (mids_rnn[i] - abar) * (mids_rnn[i] - abar);
        var_s += (mids_smooth[i] - sbar) * (mids_smooth[i] - sbar);
        cov_as += (mids_rnn[i] - abar) * (mids_smooth[i] - sbar);
    }
    if (count > 1) {
        var_a /= fcount - 1.0;
        var_s /= fcount - 1.0;
        cov_as /= fcount - 1.0;
    }
    out.ratio_rnn_to_smoother = abar / sbar;
    const double rel_var = var_a / (abar * abar) + var_s / (sbar * sbar) -
                           2.0 * cov_as / (abar * sbar);
    out.ratio_standard_error =
        out.ratio_rnn_to_smoother * std::sqrt(std::max(rel_var, 0.0) / fcount);
    return out;
}

} // namespace magseq
