#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/gauss/state_space.hpp"

namespace magseq {

// One scalar observation y = h . x_index + noise, noise ~ N(0, variance).
struct MeasurementRow {
    std::size_t index;
    Vec2 h;
    double variance;
    double value;
};

// Exact posterior marginals of every (p_k, B_k).
struct MarginalPosterior {
    std::vector<double> mean_p, mean_b, var_p, var_b;
};

inline constexpr std::size_t kOracleMaxSteps = 64;

// Brute-force ground truth: assembles the full joint Gaussian over all 2n
// state variables plus the measurements, conditions by dense solves, and
// reads off the marginals. Quadratic memory in n, hence the step cap.
inline MarginalPosterior joint_gaussian_posterior(const StateSpaceModel& model,
                                                  std::size_t n_steps,
                                                  std::span<const MeasurementRow> rows) {
    if (n_steps == 0) throw param_error("oracle requires at least one step");
    if (n_steps > kOracleMaxSteps)
        throw param_error("oracle dimension cap exceeded");
    for (const MeasurementRow& r : rows)
        if (r.index >= n_steps) throw param_error("measurement index out of range");

    const std::size_t dim = 2 * n_steps;
    Eigen::Matrix2d A;
    A << model.transition.a00, model.transition.a01,
         model.transition.a10, model.transition.a11;
    Eigen::Matrix2d Q;
    Q << model.process_noise.a00, model.process_noise.a01,
         model.process_noise.a10, model.process_noise.a11;

    // Marginal covariances P_k, then cross blocks Cov(x_j, x_k) = P_j (A^T)^(k-j).
    std::vector<Eigen::Matrix2d> marg(n_steps);
    marg[0] << model.prior.cov.a00, model.prior.cov.a01,
               model.prior.cov.a10, model.prior.cov.a11;
    for (std::size_t k = 0; k + 1 < n_steps; ++k)
        marg[k + 1] = A * marg[k] * A.transpose() + Q;

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t j = 0; j < n_steps; ++j) {
        Eigen::Matrix2d block = marg[j];
        sigma.block<2, 2>(2 * j, 2 * j) = block;
        for (std::size_t k = j + 1; k < n_steps; ++k) {
            block = (block * A.transpose()).eval();
            sigma.block<2, 2>(2 * j, 2 * k) = block;
            sigma.block<2, 2>(2 * k, 2 * j) = block.transpose();
        }
    }

    MarginalPosterior post;
    post.mean_p.resize(n_steps);
    post.mean_b.resize(n_steps);
    post.var_p.resize(n_steps);
    post.var_b.resize(n_steps);

    if (rows.empty()) {
        for (std::size_t k = 0; k < n_steps; ++k) {
            post.mean_p[k] = model.prior.mean.x;
            post.mean_b[k] = model.prior.mean.y;
            post.var_p[k] = marg[k](0, 0);
            post.var_b[k] = marg[k](1, 1);
        }
        return post;
    }

    const std::size_t m = rows.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, dim);
    Eigen::VectorXd y(m);
    Eigen::VectorXd r(m);
    for (std::size_t a = 0; a < m; ++a) {
        H(a, 2 * rows[a].index) = rows[a].h.x;
        H(a, 2 * rows[a].index + 1) = rows[a].h.y;
        y(a) = rows[a].value;
        r(a) = rows[a].variance;
    }

    const Eigen::MatrixXd cross = sigma * H.transpose();              // Cov(x, y)
    Eigen::MatrixXd S = H * cross;                                    // Cov(y)
    S.diagonal() += r;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    const Eigen::VectorXd mean = cross * ldlt.solve(y);               // prior mean is zero
    const Eigen::MatrixXd reduction = cross * ldlt.solve(cross.transpose());

    for (std::size_t k = 0; k < n_steps; ++k) {
        post.mean_p[k] = mean(2 * k);
        post.mean_b[k] = mean(2 * k + 1);
        post.var_p[k] = sigma(2 * k, 2 * k) - reduction(2 * k, 2 * k);
        post.var_b[k] = sigma(2 * k + 1, 2 * k + 1) - reduction(2 * k + 1, 2 * k + 1);
    }
    return post;
}

// Standard conditioning on a full signal record: one row per step with the
// model's observation vector and noise.
inline MarginalPosterior joint_gaussian_oracle(const StateSpaceModel& model,
                                               std::span<const double> signal) {
    std::vector<MeasurementRow> rows;
    rows.reserve(signal.size());
    for (std::size_t k = 0; k < signal.size(); ++k)
        rows.push_back({k, model.observation, model.obs_noise, signal[k]});
    return joint_gaussian_posterior(model, signal.size(), rows);
}

} // namespace magseq
