#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "magseq/core/errors.hpp"

namespace magseq {

// Everything needed to simulate one measurement record.
// Units: fields in pT, time in ms, signals dimensionless.
struct PhysicsParams {
    double kappa = 0.0;         // atom-light coupling, (ms)^(-1/2)
    double mu = 0.0;            // field coupling, (pT ms)^(-1)
    double tau = 0.0;           // step duration, ms
    std::uint32_t n_steps = 0;  // samples per record
    double gamma_b = 0.0;       // field relaxation rate, 1/ms
    double sigma_b = 0.0;       // field diffusion, pT^2/ms

    // kappa^2 = 18 / ms, mu = 90 / (pT ms), tau = 0.01 ms over t in [0, 1] ms,
    // gamma_b = 1 / ms, sigma_b = 2 pT^2 / ms.
    static PhysicsParams reference() {
        return {std::sqrt(18.0), 90.0, 0.01, 101, 1.0, 2.0};
    }

    // Record duration T = (n_steps - 1) tau.
    double duration() const { return (n_steps - 1) * tau; }

    // Equilibrium field variance sigma_b / (2 gamma_b).
    double stationary_variance() const { return sigma_b / (2.0 * gamma_b); }

    void validate() const {
        if (!std::isfinite(kappa) || !std::isfinite(mu) || !std::isfinite(tau) ||
            !std::isfinite(gamma_b) || !std::isfinite(sigma_b))
            throw param_error("physics parameters must be finite");
        if (tau <= 0.0) throw param_error("tau must be positive");
        if (n_steps < 2) throw param_error("n_steps must be at least 2");
        if (gamma_b <= 0.0) throw param_error("gamma_b must be positive");
        if (sigma_b < 0.0) throw param_error("sigma_b must be non-negative");
    }

    bool operator==(const PhysicsParams&) const = default;
};

} // namespace magseq
