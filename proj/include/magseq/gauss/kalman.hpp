#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/gauss/state_space.hpp"

namespace magseq {

struct FilterResult {
    std::vector<GaussianBelief> filtered;   // posterior at k given y_0..y_k
    std::vector<GaussianBelief> predicted;  // prior at k given y_0..y_{k-1}; [0] is the model prior
    std::vector<double> innovations;        // y_k - h . predicted mean
    std::vector<double> innovation_vars;    // h P_pred h^T + R
};

// Forward pass: update with y_k first, then predict to k+1 (the simulator
// measures before the field kick). Joseph-form covariance update keeps the
// posteriors PSD under round-off.
inline FilterResult kalman_filter(const StateSpaceModel& model,
                                  std::span<const double> signal) {
    if (signal.empty()) throw param_error("signal must contain at least one sample");
    for (double y : signal)
        if (!std::isfinite(y)) throw param_error("signal entries must be finite");

    const Mat2 A = model.transition;
    const Vec2 h = model.observation;
    const double R = model.obs_noise;

    FilterResult out;
    out.filtered.reserve(signal.size());
    out.predicted.reserve(signal.size());
    out.innovations.reserve(signal.size());
    out.innovation_vars.reserve(signal.size());

    GaussianBelief belief = model.prior;
    for (std::size_t k = 0; k < signal.size(); ++k) {
        out.predicted.push_back(belief);

        const double innovation = signal[k] - dot(h, belief.mean);
        const Vec2 ph = belief.cov * h;
        const double s = dot(h, ph) + R;
        const Vec2 gain{ph.x / s, ph.y / s};

        belief.mean = belief.mean + innovation * gain;
        const Mat2 ikh = Mat2::identity() - outer(gain, h);
        belief.cov = symmetrize(ikh * belief.cov * ikh.transpose() + R * outer(gain, gain));

        out.filtered.push_back(belief);
        out.innovations.push_back(innovation);
        out.innovation_vars.push_back(s);

        belief.mean = A * belief.mean;
        belief.cov = symmetrize(A * belief.cov * A.transpose() + model.process_noise);
    }
    return out;
}

} // namespace magseq
