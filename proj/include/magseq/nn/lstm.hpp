#pragma once

#include <cmath>
#include <cstddef>

#include "magseq/nn/vecmat.hpp"

namespace magseq {

// Gate weights of one LSTM cell with scalar input: four m-element input
// weight columns, four m x m recurrent matrices, four m-element biases.
struct LstmParams {
    std::size_t m = 0;
    Vec w_ri, w_rf, w_rc, w_ro;
    Mat w_hi, w_hf, w_hc, w_ho;
    Vec b_i, b_f, b_c, b_o;

    explicit LstmParams(std::size_t hidden = 0)
        : m(hidden),
          w_ri(hidden, 0.0), w_rf(hidden, 0.0), w_rc(hidden, 0.0), w_ro(hidden, 0.0),
          w_hi(hidden, hidden), w_hf(hidden, hidden), w_hc(hidden, hidden), w_ho(hidden, hidden),
          b_i(hidden, 0.0), b_f(hidden, 0.0), b_c(hidden, 0.0), b_o(hidden, 0.0) {}

    bool operator==(const LstmParams&) const = default;
};

struct LstmState {
    Vec h, c;

    explicit LstmState(std::size_t m = 0) : h(m, 0.0), c(m, 0.0) {}

    bool operator==(const LstmState&) const = default;
};

// Numerically stable logistic function.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Everything the reverse pass needs from one cell evaluation.
struct LstmStepCache {
    double input = 0.0;
    Vec h_prev, c_prev;
    Vec gate_i, gate_f, gate_o, gate_g; // I, F, O and tanh'd cell candidate
    Vec c, tanh_c, h;

    explicit LstmStepCache(std::size_t m = 0)
        : h_prev(m, 0.0), c_prev(m, 0.0),
          gate_i(m, 0.0), gate_f(m, 0.0), gate_o(m, 0.0), gate_g(m, 0.0),
          c(m, 0.0), tanh_c(m, 0.0), h(m, 0.0) {}
};

// One cell update:
//   I = sig(W_ri r + W_hi h + b_i)        F = sig(W_rf r + W_hf h + b_f)
//   c' = F o c + I o tanh(W_rc r + W_hc h + b_c)
//   O = sig(W_ro r + W_ho h + b_o)        h' = O o tanh(c')
// The cached variant advances `state` in place and records the gate values.
inline void lstm_step_cached(const LstmParams& p, double input, LstmState& state,
                             LstmStepCache& cache) {
    const std::size_t m = p.m;
    cache.input = input;
    cache.h_prev = state.h;
    cache.c_prev = state.c;

    Vec& ai = cache.gate_i;
    Vec& af = cache.gate_f;
    Vec& ag = cache.gate_g;
    Vec& ao = cache.gate_o;
    for (std::size_t j = 0; j < m; ++j) {
        ai[j] = p.w_ri[j] * input + p.b_i[j];
        af[j] = p.w_rf[j] * input + p.b_f[j];
        ag[j] = p.w_rc[j] * input + p.b_c[j];
        ao[j] = p.w_ro[j] * input + p.b_o[j];
    }
    gemv_acc(p.w_hi, state.h, ai);
    gemv_acc(p.w_hf, state.h, af);
    gemv_acc(p.w_hc, state.h, ag);
    gemv_acc(p.w_ho, state.h, ao);

    for (std::size_t j = 0; j < m; ++j) {
        ai[j] = sigmoid(ai[j]);
        af[j] = sigmoid(af[j]);
        ag[j] = std::tanh(ag[j]);
        ao[j] = sigmoid(ao[j]);
        cache.c[j] = af[j] * state.c[j] + ai[j] * ag[j];
        cache.tanh_c[j] = std::tanh(cache.c[j]);
        cache.h[j] = ao[j] * cache.tanh_c[j];
    }
    state.h = cache.h;
    state.c = cache.c;
}

inline LstmState lstm_step(const LstmParams& p, double input, const LstmState& state) {
    LstmState next = state;
    LstmStepCache cache(p.m);
    lstm_step_cached(p, input, next, cache);
    return next;
}

} // namespace magseq
