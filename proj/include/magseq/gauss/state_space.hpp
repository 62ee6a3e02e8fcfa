#pragma once

#include <cmath>

#include "magseq/gauss/linalg2.hpp"
#include "magseq/sim/physics.hpp"

namespace magseq {

// Gaussian belief over the hybrid state (p_at, B).
struct GaussianBelief {
    Vec2 mean;      // (p_at dimensionless, B in pT)
    Mat2 cov;
};

// Discrete linear-Gaussian model of one probing step, matching the
// simulator's measure-then-kick ordering:
//   state  (p, B):  x_{k+1} = A x_k + w_k,  w_k ~ N(0, Q)
//   signal        :  y_k = h . x_k + v_k,    v_k ~ N(0, R)
struct StateSpaceModel {
    Mat2 transition;     // A = [[1, -mu tau], [0, 1 - gamma_b tau]]
    Mat2 process_noise;  // Q = diag(0, sigma_b tau)
    Vec2 observation;    // h = (kappa sqrt(tau), 0)
    double obs_noise;    // R = 1/2
    GaussianBelief prior; // mean 0, cov diag(1/2, sigma_b / (2 gamma_b))
};

inline StateSpaceModel build_model(const PhysicsParams& p) {
    p.validate();
    StateSpaceModel m;
    m.transition = {1.0, -p.mu * p.tau, 0.0, 1.0 - p.gamma_b * p.tau};
    m.process_noise = Mat2::diag(0.0, p.sigma_b * p.tau);
    m.observation = {p.kappa * std::sqrt(p.tau), 0.0};
    m.obs_noise = 0.5;
    m.prior = {Vec2{0.0, 0.0}, Mat2::diag(0.5, p.stationary_variance())};
    return m;
}

} // namespace magseq
