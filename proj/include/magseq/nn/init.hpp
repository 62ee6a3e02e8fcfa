#pragma once

#include <cmath>
#include <cstddef>

#include "magseq/core/rng.hpp"
#include "magseq/nn/seq2seq.hpp"

namespace magseq {

namespace detail {

// Uniform Glorot draw on [-limit, limit], limit = sqrt(6 / (fan_in + fan_out)).
inline void glorot_fill(Vec& v, std::size_t fan_in, std::size_t fan_out, SplitMix64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : v) w = limit * (2.0 * rng.uniform01() - 1.0);
}

// Random orthogonal matrix: modified Gram-Schmidt QR of a Gaussian matrix
// with the R diagonal kept positive (two passes for orthogonality at
// double precision).
inline void orthogonal_fill(Mat& w, SplitMix64& rng) {
    const std::size_t m = w.rows;
    Mat g(m, m);
    for (double& x : g.data) x = rng.gaussian();
    // orthonormalize the columns of g
    for (std::size_t j = 0; j < m; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                double proj = 0.0;
                for (std::size_t r = 0; r < m; ++r) proj += g(r, i) * g(r, j);
                for (std::size_t r = 0; r < m; ++r) g(r, j) -= proj * g(r, i);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < m; ++r) norm += g(r, j) * g(r, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) { // probability-zero degeneracy; restart the column
            for (std::size_t r = 0; r < m; ++r) g(r, j) = rng.gaussian();
            --j;
            continue;
        }
        for (std::size_t r = 0; r < m; ++r) g(r, j) /= norm;
    }
    w = g;
}

inline void init_cell(LstmParams& cell, SplitMix64& rng) {
    const std::size_t m = cell.m;
    glorot_fill(cell.w_ri, 1, m, rng);
    glorot_fill(cell.w_rf, 1, m, rng);
    glorot_fill(cell.w_rc, 1, m, rng);
    glorot_fill(cell.w_ro, 1, m, rng);
    orthogonal_fill(cell.w_hi, rng);
    orthogonal_fill(cell.w_hf, rng);
    orthogonal_fill(cell.w_hc, rng);
    orthogonal_fill(cell.w_ho, rng);
    // biases stay zero except the forget gate, opened at start
    for (double& b : cell.b_f) b = 1.0;
}

} // namespace detail

// Glorot-uniform input and readout weights, orthogonal recurrent weights,
// zero biases with the forget-gate bias at one.
inline Seq2SeqModel init_model(std::size_t hidden, SplitMix64& rng) {
    Seq2SeqModel model(hidden);
    detail::init_cell(model.encoder, rng);
    detail::init_cell(model.decoder, rng);
    detail::glorot_fill(model.w_out, hidden, 1, rng);
    model.b_out = 0.0;
    return model;
}

} // namespace magseq
