#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/core/rng.hpp"
#include "magseq/sim/ou.hpp"
#include "magseq/sim/physics.hpp"

namespace magseq {

// One simulated run: the optical signal x_t and the field B_t that produced
// it, both of length n_steps.
struct Record {
    std::vector<double> signal; // dimensionless quadrature outcomes
    std::vector<double> field;  // pT

    bool operator==(const Record&) const = default;
};

// Deterministic measurement map given the field path, the initial atomic
// momentum and the per-step shot noise:
//   x_k = kappa sqrt(tau) p_k + v_k,   then   p_{k+1} = p_k - mu tau B_k.
// Measurement comes first within a step, so the record covers t = 0..T.
inline Record record_from_components(const PhysicsParams& params,
                                     std::vector<double> field,
                                     double p0,
                                     std::span<const double> shot_noise) {
    params.validate();
    if (field.size() != params.n_steps || shot_noise.size() != params.n_steps)
        throw param_error("field and shot-noise lengths must equal n_steps");
    const double gain = params.kappa * std::sqrt(params.tau);
    std::vector<double> signal(params.n_steps);
    double p = p0;
    for (std::uint32_t k = 0; k < params.n_steps; ++k) {
        signal[k] = gain * p + shot_noise[k];
        p -= params.mu * params.tau * field[k];
    }
    return Record{std::move(signal), std::move(field)};
}

// Samples one full record. Draw order (fixed for reproducibility):
// B_0, the n_steps - 1 field increments, p_0 ~ N(0, 1/2), then the
// n_steps shot-noise values v_k ~ N(0, 1/2).
inline Record simulate_record(const PhysicsParams& params, SplitMix64& rng) {
    std::vector<double> field = sample_ou_path(params, rng);
    const double p0 = rng.gaussian(0.0, std::sqrt(0.5));
    std::vector<double> shot(params.n_steps);
    for (double& v : shot) v = rng.gaussian(0.0, std::sqrt(0.5));
    return record_from_components(params, std::move(field), p0, shot);
}

} // namespace magseq
