#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/core/parallel.hpp"
#include "magseq/core/stats.hpp"
#include "magseq/nn/seq2seq.hpp"
#include "magseq/sim/dataset.hpp"
#include "magseq/train/trainer.hpp"

namespace magseq {

// Closed-loop field estimate for one signal record.
inline std::vector<double> predict(const Seq2SeqModel& model,
                                   std::span<const double> signal,
                                   const std::optional<Normalization>& norm = {}) {
    if (norm) {
        std::vector<double> scaled(signal.size());
        for (std::size_t k = 0; k < signal.size(); ++k) scaled[k] = norm->apply(signal[k]);
        return decode_autoregressive(model, encode(model, scaled), signal.size());
    }
    return decode_autoregressive(model, encode(model, signal), signal.size());
}

// Per-time mean squared error of the closed-loop estimate over a test set.
struct ErrorCurve {
    std::vector<double> time;             // ms
    std::vector<double> error;            // pT^2
    std::vector<double> error_normalized; // in units of the stationary field variance
    double mid_mean = 0.0;                // time average over t in [0.2 T, 0.8 T]
    double edge_start = 0.0;
    double edge_end = 0.0;
    double ratio_start = 0.0;             // edge_start / mid_mean
    double ratio_end = 0.0;
};

inline ErrorCurve evaluate_error_curve(const Seq2SeqModel& model, const Dataset& test,
                                       const std::optional<Normalization>& norm = {},
                                       unsigned threads = 1) {
    if (test.records.empty()) throw param_error("test dataset is empty");
    const std::size_t n = test.params.n_steps;
    const std::size_t count = test.records.size();

    std::vector<std::vector<double>> sq(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const Record& rec = test.records[i];
        const std::vector<double> est = predict(model, rec.signal, norm);
        sq[i].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double d = rec.field[k] - est[k];
            sq[i][k] = d * d;
        }
    });

    ErrorCurve out;
    out.time.resize(n);
    out.error.assign(n, 0.0);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t k = 0; k < n; ++k) out.error[k] += sq[i][k];

    const double stationary = test.params.stationary_variance();
    out.error_normalized.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.time[k] = k * test.params.tau;
        out.error[k] /= static_cast<double>(count);
        out.error_normalized[k] = out.error[k] / stationary;
    }

    const auto [lo, hi] = mid_interval_indices(n);
    out.mid_mean = mean_over(out.error, lo, hi);
    out.edge_start = out.error.front();
    out.edge_end = out.error.back();
    out.ratio_start = out.edge_start / out.mid_mean;
    out.ratio_end = out.edge_end / out.mid_mean;
    return out;
}

// Mean squared error of the teacher-forced and the closed-loop decode over
// the same records.
struct ModeGap {
    double teacher_mse = 0.0;
    double autoregressive_mse = 0.0;
};

inline ModeGap teacher_vs_autoregressive_gap(const Seq2SeqModel& model,
                                             const Dataset& test,
                                             const std::optional<Normalization>& norm = {},
                                             unsigned threads = 1) {
    if (test.records.empty()) throw param_error("test dataset is empty");
    const std::size_t n = test.params.n_steps;
    const std::size_t count = test.records.size();

    std::vector<double> sq_teacher(count, 0.0), sq_auto(count, 0.0);
    parallel_for(count, threads, [&](std::size_t i) {
        const Record& rec = test.records[i];
        std::vector<double> scaled;
        std::span<const double> input(rec.signal);
        if (norm) {
            scaled.resize(n);
            for (std::size_t k = 0; k < n; ++k) scaled[k] = norm->apply(rec.signal[k]);
            input = scaled;
        }
        const LstmState summary = encode(model, input);
        const std::vector<double> teacher = decode_teacher(model, summary, rec.field);
        const std::vector<double> closed = decode_autoregressive(model, summary, n);
        for (std::size_t k = 0; k < n; ++k) {
            const double dt = teacher[k] - rec.field[k];
            const double da = closed[k] - rec.field[k];
            sq_teacher[i] += dt * dt;
            sq_auto[i] += da * da;
        }
    });

    ModeGap gap;
    for (std::size_t i = 0; i < count; ++i) { // fixed reduction order
        gap.teacher_mse += sq_teacher[i];
        gap.autoregressive_mse += sq_auto[i];
    }
    const double denom = static_cast<double>(count) * static_cast<double>(n);
    gap.teacher_mse /= denom;
    gap.autoregressive_mse /= denom;
    return gap;
}

} // namespace magseq
