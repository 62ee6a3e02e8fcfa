#pragma once

#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/gauss/kalman.hpp"

namespace magseq {

struct SmootherResult {
    std::vector<GaussianBelief> smoothed;
    // Set when a predicted covariance was singular and the gain fell back to
    // a pseudo-inverse.
    bool used_pseudoinverse = false;
};

// Rauch-Tung-Striebel backward pass over a completed filter result.
inline SmootherResult rts_smoother(const StateSpaceModel& model,
                                   const FilterResult& filter) {
    const std::size_t n = filter.filtered.size();
    if (n == 0 || filter.predicted.size() != n)
        throw param_error("smoother requires a complete filter result");

    const Mat2 A = model.transition;
    SmootherResult out;
    out.smoothed.resize(n);
    out.smoothed[n - 1] = filter.filtered[n - 1];

    for (std::size_t k = n - 1; k-- > 0;) {
        const GaussianBelief& filt = filter.filtered[k];
        const GaussianBelief& pred = filter.predicted[k + 1]; // A filt + Q
        Mat2 pred_inv;
        if (invertible(pred.cov)) {
            pred_inv = inverse(pred.cov);
        } else {
            pred_inv = pseudo_inverse_sym(pred.cov);
            out.used_pseudoinverse = true;
        }
        const Mat2 gain = filt.cov * A.transpose() * pred_inv;
        const GaussianBelief& next = out.smoothed[k + 1];
        out.smoothed[k].mean = filt.mean + gain * (next.mean - pred.mean);
        out.smoothed[k].cov = symmetrize(
            filt.cov + gain * (next.cov - pred.cov) * gain.transpose());
    }
    return out;
}

} // namespace magseq
