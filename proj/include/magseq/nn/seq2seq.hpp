#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/nn/lstm.hpp"

namespace magseq {

// Encoder-decoder pair with a single-neuron linear readout on the decoder
// hidden state.
struct Seq2SeqModel {
    std::size_t m = 0;
    LstmParams encoder, decoder;
    Vec w_out;          // 1 x m readout weights
    double b_out = 0.0;

    explicit Seq2SeqModel(std::size_t hidden = 0)
        : m(hidden), encoder(hidden), decoder(hidden), w_out(hidden, 0.0) {}

    bool operator==(const Seq2SeqModel&) const = default;
};

// Gradient container; shape-congruent with the model it mirrors.
struct Gradients : Seq2SeqModel {
    explicit Gradients(std::size_t hidden = 0) : Seq2SeqModel(hidden) {}
};

// Applies fn to every parameter block in the fixed serialization order:
// encoder {w_ri, w_rf, w_rc, w_ro, w_hi, w_hf, w_hc, w_ho, b_i, b_f, b_c, b_o},
// decoder likewise, then w_out and b_out. fn receives std::span<double>.
template <class Model, class Fn>
void visit_param_blocks(Model&& model, Fn&& fn) {
    auto cell = [&](auto&& lstm) {
        fn(std::span(lstm.w_ri));
        fn(std::span(lstm.w_rf));
        fn(std::span(lstm.w_rc));
        fn(std::span(lstm.w_ro));
        fn(std::span(lstm.w_hi.data));
        fn(std::span(lstm.w_hf.data));
        fn(std::span(lstm.w_hc.data));
        fn(std::span(lstm.w_ho.data));
        fn(std::span(lstm.b_i));
        fn(std::span(lstm.b_f));
        fn(std::span(lstm.b_c));
        fn(std::span(lstm.b_o));
    };
    cell(model.encoder);
    cell(model.decoder);
    fn(std::span(model.w_out));
    fn(std::span(&model.b_out, 1));
}

template <class A, class B, class Fn>
void visit_param_blocks2(A&& a, B&& b, Fn&& fn) {
    std::vector<std::span<double>> blocks_a, blocks_b;
    visit_param_blocks(a, [&](std::span<double> s) { blocks_a.push_back(s); });
    visit_param_blocks(b, [&](std::span<double> s) { blocks_b.push_back(s); });
    for (std::size_t i = 0; i < blocks_a.size(); ++i) fn(blocks_a[i], blocks_b[i]);
}

inline std::size_t parameter_count(const Seq2SeqModel& model) {
    std::size_t n = 0;
    visit_param_blocks(const_cast<Seq2SeqModel&>(model),
                       [&](std::span<double> s) { n += s.size(); });
    return n;
}

inline double dense_out(const Seq2SeqModel& model, const Vec& h) {
    double y = model.b_out;
    for (std::size_t j = 0; j < model.m; ++j) y += model.w_out[j] * h[j];
    return y;
}

// Folds the cell over the signal from a zero state; the final (h, c) is the
// summary handed to the decoder.
inline LstmState encode(const Seq2SeqModel& model, std::span<const double> signal) {
    LstmState state(model.m);
    LstmStepCache cache(model.m);
    for (double x : signal) lstm_step_cached(model.encoder, x, state, cache);
    return state;
}

// Teacher-forced decoding: the first input is 0, afterwards the true field
// value from the previous step. Emits one readout per step.
inline std::vector<double> decode_teacher(const Seq2SeqModel& model, const LstmState& init,
                                          std::span<const double> b_true) {
    if (init.h.size() != model.m)
        throw param_error("decoder initial state size does not match the model");
    LstmState state = init;
    LstmStepCache cache(model.m);
    std::vector<double> out(b_true.size());
    for (std::size_t k = 0; k < b_true.size(); ++k) {
        const double input = k == 0 ? 0.0 : b_true[k - 1];
        lstm_step_cached(model.decoder, input, state, cache);
        out[k] = dense_out(model, state.h);
    }
    return out;
}

// Closed-loop decoding: each step consumes the previous step's own estimate.
inline std::vector<double> decode_autoregressive(const Seq2SeqModel& model,
                                                 const LstmState& init, std::size_t n) {
    if (init.h.size() != model.m)
        throw param_error("decoder initial state size does not match the model");
    LstmState state = init;
    LstmStepCache cache(model.m);
    std::vector<double> out(n);
    double input = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        lstm_step_cached(model.decoder, input, state, cache);
        out[k] = dense_out(model, state.h);
        input = out[k];
    }
    return out;
}

} // namespace magseq
