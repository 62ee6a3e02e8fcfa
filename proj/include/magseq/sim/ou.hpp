#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/core/rng.hpp"
#include "magseq/sim/physics.hpp"

namespace magseq {

// Deterministic Euler-Maruyama recurrence at resolution tau:
//   B_{k+1} = B_k - gamma_b B_k tau + sqrt(sigma_b) dW_k.
// increments holds the n_steps - 1 Wiener increments dW_k (each ~ N(0, tau)
// when sampled).
inline std::vector<double> ou_path_from_increments(const PhysicsParams& params,
                                                   double b0,
                                                   std::span<const double> increments) {
    params.validate();
    if (increments.size() != params.n_steps - 1u)
        throw param_error("OU increment count must be n_steps - 1");
    const double root_sigma = std::sqrt(params.sigma_b);
    std::vector<double> path(params.n_steps);
    path[0] = b0;
    for (std::uint32_t k = 0; k + 1 < params.n_steps; ++k)
        path[k + 1] = path[k] - params.gamma_b * path[k] * params.tau +
                      root_sigma * increments[k];
    return path;
}

// B_0 from the stationary law N(0, sigma_b / (2 gamma_b)), then the
// recurrence above with dW_k ~ N(0, tau). Consumes n_steps gaussians.
inline std::vector<double> sample_ou_path(const PhysicsParams& params, SplitMix64& rng) {
    params.validate();
    if (params.gamma_b * params.tau >= 1.0)
        throw param_error("gamma_b * tau must be below 1 for a stable discretization");
    const double b0 = rng.gaussian(0.0, std::sqrt(params.stationary_variance()));
    const double root_tau = std::sqrt(params.tau);
    std::vector<double> increments(params.n_steps - 1);
    for (double& dw : increments) dw = rng.gaussian(0.0, root_tau);
    return ou_path_from_increments(params, b0, increments);
}

} // namespace magseq
