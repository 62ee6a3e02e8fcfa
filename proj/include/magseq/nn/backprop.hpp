#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/nn/seq2seq.hpp"

namespace magseq {

// One training pair viewed in place.
struct BatchItem {
    std::span<const double> signal;
    std::span<const double> targets;
};

// Activations of one record's teacher-forced pass.
struct SequenceCache {
    std::vector<LstmStepCache> encoder_steps;
    std::vector<LstmStepCache> decoder_steps;
    std::vector<double> outputs;
    std::vector<double> residuals; // output - target
};

// Teacher-forced forward pass of one record; fills the cache and returns the
// record's sum of squared residuals.
inline double forward_record(const Seq2SeqModel& model, const BatchItem& item,
                             SequenceCache& cache) {
    const std::size_t n = item.targets.size();
    if (item.signal.size() != n)
        throw param_error("signal and target lengths differ");

    cache.encoder_steps.assign(item.signal.size(), LstmStepCache(model.m));
    cache.decoder_steps.assign(n, LstmStepCache(model.m));
    cache.outputs.resize(n);
    cache.residuals.resize(n);

    LstmState state(model.m);
    for (std::size_t k = 0; k < item.signal.size(); ++k)
        lstm_step_cached(model.encoder, item.signal[k], state, cache.encoder_steps[k]);

    double sq_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double input = k == 0 ? 0.0 : item.targets[k - 1];
        lstm_step_cached(model.decoder, input, state, cache.decoder_steps[k]);
        cache.outputs[k] = dense_out(model, state.h);
        cache.residuals[k] = cache.outputs[k] - item.targets[k];
        sq_sum += cache.residuals[k] * cache.residuals[k];
    }
    return sq_sum;
}

// Reusable temporaries for the reverse pass.
struct BackwardScratch {
    Vec dh, dc, dh_prev, dc_prev, da_i, da_f, da_g, da_o;

    explicit BackwardScratch(std::size_t m = 0)
        : dh(m, 0.0), dc(m, 0.0), dh_prev(m, 0.0), dc_prev(m, 0.0),
          da_i(m, 0.0), da_f(m, 0.0), da_g(m, 0.0), da_o(m, 0.0) {}
};

namespace detail {

// Reverse of one cell update. dh/dc enter as the loss sensitivity to the
// step's outputs and leave (in dh_prev/dc_prev) as the sensitivity to the
// incoming state. Inputs are data or teacher values, so no sensitivity is
// propagated to them.
inline void lstm_step_backward(const LstmParams& p, const LstmStepCache& s,
                               LstmParams& grad, BackwardScratch& w) {
    const std::size_t m = p.m;
    for (std::size_t j = 0; j < m; ++j) {
        const double i_g = s.gate_i[j], f_g = s.gate_f[j];
        const double o_g = s.gate_o[j], g_g = s.gate_g[j];
        const double d_o = w.dh[j] * s.tanh_c[j];
        w.da_o[j] = d_o * o_g * (1.0 - o_g);
        const double d_cell = w.dc[j] + w.dh[j] * o_g * (1.0 - s.tanh_c[j] * s.tanh_c[j]);
        const double d_f = d_cell * s.c_prev[j];
        w.da_f[j] = d_f * f_g * (1.0 - f_g);
        const double d_i = d_cell * g_g;
        w.da_i[j] = d_i * i_g * (1.0 - i_g);
        const double d_g = d_cell * i_g;
        w.da_g[j] = d_g * (1.0 - g_g * g_g);
        w.dc_prev[j] = d_cell * f_g;
    }

    axpy(s.input, w.da_i, grad.w_ri);
    axpy(s.input, w.da_f, grad.w_rf);
    axpy(s.input, w.da_g, grad.w_rc);
    axpy(s.input, w.da_o, grad.w_ro);
    axpy(1.0, w.da_i, grad.b_i);
    axpy(1.0, w.da_f, grad.b_f);
    axpy(1.0, w.da_g, grad.b_c);
    axpy(1.0, w.da_o, grad.b_o);
    outer_acc(grad.w_hi, w.da_i, s.h_prev);
    outer_acc(grad.w_hf, w.da_f, s.h_prev);
    outer_acc(grad.w_hc, w.da_g, s.h_prev);
    outer_acc(grad.w_ho, w.da_o, s.h_prev);

    std::fill(w.dh_prev.begin(), w.dh_prev.end(), 0.0);
    gemv_transpose_acc(p.w_hi, w.da_i, w.dh_prev);
    gemv_transpose_acc(p.w_hf, w.da_f, w.dh_prev);
    gemv_transpose_acc(p.w_hc, w.da_g, w.dh_prev);
    gemv_transpose_acc(p.w_ho, w.da_o, w.dh_prev);
}

} // namespace detail

// Accumulates d(sum of squared residuals)/d(theta) for one record into acc.
// Teacher inputs and the encoder's signal inputs are constants; gradients
// flow through the decoder, across the final-state seam, then through the
// encoder.
inline void backward_record(const Seq2SeqModel& model, const SequenceCache& cache,
                            Gradients& acc, BackwardScratch& w) {
    const std::size_t m = model.m;
    std::fill(w.dh.begin(), w.dh.end(), 0.0);
    std::fill(w.dc.begin(), w.dc.end(), 0.0);

    for (std::size_t k = cache.decoder_steps.size(); k-- > 0;) {
        const LstmStepCache& s = cache.decoder_steps[k];
        const double dy = 2.0 * cache.residuals[k];
        acc.b_out += dy;
        for (std::size_t j = 0; j < m; ++j) {
            acc.w_out[j] += dy * s.h[j];
            w.dh[j] += dy * model.w_out[j];
        }
        detail::lstm_step_backward(model.decoder, s, acc.decoder, w);
        std::swap(w.dh, w.dh_prev);
        std::swap(w.dc, w.dc_prev);
    }

    // dh/dc now hold the sensitivity to the encoder's final state.
    for (std::size_t k = cache.encoder_steps.size(); k-- > 0;) {
        detail::lstm_step_backward(model.encoder, cache.encoder_steps[k], acc.encoder, w);
        std::swap(w.dh, w.dh_prev);
        std::swap(w.dc, w.dc_prev);
    }
}

// Batch cache for the two-call API below.
struct ForwardCache {
    std::vector<SequenceCache> records;
    std::size_t n_steps = 0;
    double loss = 0.0;
};

// Mini-batch loss L = sum of squared residuals / (batch * n_steps) with
// teacher forcing, plus everything backward() needs.
inline ForwardCache forward_loss(const Seq2SeqModel& model,
                                 std::span<const BatchItem> batch) {
    if (batch.empty()) throw param_error("batch must be non-empty");
    ForwardCache cache;
    cache.n_steps = batch[0].targets.size();
    cache.records.resize(batch.size());
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].targets.size() != cache.n_steps)
            throw param_error("batch records must share one length");
        sq_sum += forward_record(model, batch[i], cache.records[i]);
    }
    cache.loss = sq_sum / (static_cast<double>(batch.size()) *
                           static_cast<double>(cache.n_steps));
    return cache;
}

// Exact gradient of forward_loss's value with respect to every parameter.
inline Gradients backward(const Seq2SeqModel& model, const ForwardCache& cache) {
    Gradients total(model.m);
    BackwardScratch scratch(model.m);
    for (const SequenceCache& rec : cache.records)
        backward_record(model, rec, total, scratch);
    const double scale = 1.0 / (static_cast<double>(cache.records.size()) *
                                static_cast<double>(cache.n_steps));
    visit_param_blocks(total, [&](std::span<double> s) {
        for (double& g : s) g *= scale;
    });
    return total;
}

} // namespace magseq
