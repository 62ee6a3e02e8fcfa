#pragma once

#include <cmath>
#include <cstdint>

#include "magseq/nn/seq2seq.hpp"

namespace magseq {

// First/second-moment accumulators, shape-congruent with the model.
struct AdamState {
    Gradients moment1, moment2;
    std::uint64_t step = 0;

    explicit AdamState(std::size_t hidden = 0) : moment1(hidden), moment2(hidden) {}
};

// One bias-corrected update:
//   m <- b1 m + (1-b1) g        v <- b2 v + (1-b2) g^2
//   w <- w - eta * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
inline void adam_step(Seq2SeqModel& model, const Gradients& grads, AdamState& state,
                      double eta, double beta1 = 0.9, double beta2 = 0.999,
                      double eps = 1e-8) {
    state.step += 1;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

    std::vector<std::span<double>> w, g, m1, m2;
    auto collect = [](auto& target, auto& vec) {
        visit_param_blocks(target, [&](std::span<double> s) { vec.push_back(s); });
    };
    collect(model, w);
    collect(const_cast<Gradients&>(grads), g);
    collect(state.moment1, m1);
    collect(state.moment2, m2);

    for (std::size_t b = 0; b < w.size(); ++b) {
        for (std::size_t i = 0; i < w[b].size(); ++i) {
            const double grad = g[b][i];
            m1[b][i] = beta1 * m1[b][i] + (1.0 - beta1) * grad;
            m2[b][i] = beta2 * m2[b][i] + (1.0 - beta2) * grad * grad;
            const double mhat = m1[b][i] / c1;
            const double vhat = m2[b][i] / c2;
            w[b][i] -= eta * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

} // namespace magseq
