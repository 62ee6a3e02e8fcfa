#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "magseq/core/stats.hpp"
#include "magseq/gauss/baseline.hpp"
#include "magseq/gauss/joint_oracle.hpp"
#include "magseq/gauss/kalman.hpp"
#include "magseq/gauss/rts.hpp"
#include "magseq/gauss/state_space.hpp"
#include "magseq/sim/dataset.hpp"

using namespace magseq;

TEST_CASE("state-space model fields follow from the physics") {
    const PhysicsParams p = PhysicsParams::reference();
    const StateSpaceModel m = build_model(p);

    CHECK_THAT(m.observation.x, Catch::Matchers::WithinAbs(std::sqrt(0.18), 1e-15));
    CHECK(m.observation.y == 0.0);
    CHECK(m.obs_noise == 0.5);
    CHECK_THAT(m.transition.a01, Catch::Matchers::WithinAbs(-0.9, 1e-15));
    CHECK_THAT(m.transition.a11, Catch::Matchers::WithinAbs(0.99, 1e-15));
    CHECK(m.prior.cov.a00 == 0.5);
    CHECK(m.prior.cov.a11 == 1.0);
    CHECK(m.process_noise.a11 == Catch::Approx(0.02));

    PhysicsParams decoupled = p;
    decoupled.mu = 0.0;
    const StateSpaceModel md = build_model(decoupled);
    CHECK(md.transition.a01 == 0.0);
    CHECK(md.transition.a00 == 1.0);
}

TEST_CASE("uninformative measurements leave the propagated prior") {
    PhysicsParams p = PhysicsParams::reference();
    p.kappa = 0.0;
    const StateSpaceModel m = build_model(p);
    const std::vector<double> signal(p.n_steps, 0.3);
    const FilterResult fr = kalman_filter(m, signal);
    for (std::size_t k = 0; k < signal.size(); ++k) {
        CHECK(fr.filtered[k].mean.x == 0.0);
        CHECK(fr.filtered[k].mean.y == 0.0);
        // the B marginal stays at the stationary variance
        CHECK_THAT(fr.filtered[k].cov.a11, Catch::Matchers::WithinAbs(1.0, 0.011));
    }
}

TEST_CASE("single-step update matches the scalar conjugate-Gaussian oracle") {
    const PhysicsParams p = PhysicsParams::reference();
    const StateSpaceModel m = build_model(p);
    const std::vector<double> signal{1.0};
    const FilterResult fr = kalman_filter(m, signal);

    // scalar Bayes update: only p_at is observed, B stays untouched
    const double h = std::sqrt(0.18);
    const double s = h * 0.5 * h + 0.5;
    const double k_p = 0.5 * h / s;
    const double mean_p = k_p * 1.0;
    const double var_p = 0.5 - (0.5 * h) * (0.5 * h) / s;

    CHECK_THAT(fr.filtered[0].mean.x, Catch::Matchers::WithinAbs(mean_p, 1e-12));
    CHECK_THAT(fr.filtered[0].mean.y, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(fr.filtered[0].cov.a00, Catch::Matchers::WithinAbs(var_p, 1e-12));
    CHECK_THAT(fr.filtered[0].cov.a11, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(fr.filtered[0].cov.a01, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(fr.innovations[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(fr.innovation_vars[0], Catch::Matchers::WithinAbs(s, 1e-12));
}

TEST_CASE("filter rejects non-finite signals") {
    const StateSpaceModel m = build_model(PhysicsParams::reference());
    const std::vector<double> bad{0.1, std::nan(""), 0.2};
    CHECK_THROWS_AS(kalman_filter(m, bad), param_error);
    CHECK_THROWS_AS(kalman_filter(m, std::vector<double>{}), param_error);
}

TEST_CASE("innovations are white and correctly scaled on simulated records") {
    const PhysicsParams p = PhysicsParams::reference();
    const StateSpaceModel m = build_model(p);
    constexpr std::size_t kRecords = 1000;

    double lag1_sum = 0.0;
    double std_sum = 0.0, std_sq_sum = 0.0, n_std = 0.0;
    for (std::size_t i = 0; i < kRecords; ++i) {
        SplitMix64 rng = SplitMix64::stream(4242, i);
        const Record rec = simulate_record(p, rng);
        const FilterResult fr = kalman_filter(m, rec.signal);

        std::vector<double> standardized(p.n_steps);
        for (std::size_t k = 0; k < p.n_steps; ++k) {
            standardized[k] = fr.innovations[k] / std::sqrt(fr.innovation_vars[k]);
            std_sum += standardized[k];
            std_sq_sum += standardized[k] * standardized[k];
            n_std += 1.0;
        }
        lag1_sum += correlation(std::span(standardized).first(p.n_steps - 1),
                                std::span(standardized).last(p.n_steps - 1));
    }

    const double lag1 = lag1_sum / kRecords;
    CHECK(std::abs(lag1) < 4.0 / std::sqrt(double(p.n_steps)));

    const double var = (std_sq_sum - std_sum * std_sum / n_std) / (n_std - 1.0);
    const double se = std::sqrt(2.0 / (n_std - 1.0));
    CHECK_THAT(var, Catch::Matchers::WithinAbs(1.0, 3.0 * se));
    CHECK_THAT(std_sum / n_std, Catch::Matchers::WithinAbs(0.0, 3.0 / std::sqrt(n_std)));
}

TEST_CASE("smoother boundary and no-information identities") {
    SECTION("last index equals the filtered belief") {
        const PhysicsParams p = PhysicsParams::reference();
        const StateSpaceModel m = build_model(p);
        SplitMix64 rng(9);
        const Record rec = simulate_record(p, rng);
        const FilterResult fr = kalman_filter(m, rec.signal);
        const SmootherResult sm = rts_smoother(m, fr);
        const std::size_t last = rec.signal.size() - 1;
        CHECK(sm.smoothed[last].mean.x == fr.filtered[last].mean.x);
        CHECK(sm.smoothed[last].mean.y == fr.filtered[last].mean.y);
        CHECK(sm.smoothed[last].cov.a11 == fr.filtered[last].cov.a11);
        CHECK_FALSE(sm.used_pseudoinverse);
    }
    SECTION("kappa = 0 makes smoothing a no-op") {
        PhysicsParams p = PhysicsParams::reference();
        p.kappa = 0.0;
        const StateSpaceModel m = build_model(p);
        const std::vector<double> signal(p.n_steps, 0.0);
        const FilterResult fr = kalman_filter(m, signal);
        const SmootherResult sm = rts_smoother(m, fr);
        for (std::size_t k = 0; k < signal.size(); ++k) {
            CHECK_THAT(sm.smoothed[k].cov.a00,
                       Catch::Matchers::WithinAbs(fr.filtered[k].cov.a00, 1e-14));
            CHECK_THAT(sm.smoothed[k].cov.a11,
                       Catch::Matchers::WithinAbs(fr.filtered[k].cov.a11, 1e-14));
            CHECK(sm.smoothed[k].mean.x == 0.0);
            CHECK(sm.smoothed[k].mean.y == 0.0);
        }
    }
}

TEST_CASE("singular predicted covariance takes the flagged pseudo-inverse path") {
    PhysicsParams p = PhysicsParams::reference();
    p.kappa = 0.0;
    p.sigma_b = 0.0; // B variance is exactly zero: prediction is singular
    const StateSpaceModel m = build_model(p);
    const std::vector<double> signal(8, 0.0);
    const FilterResult fr = kalman_filter(m, signal);
    const SmootherResult sm = rts_smoother(m, fr);
    CHECK(sm.used_pseudoinverse);
    for (std::size_t k = 0; k < signal.size(); ++k) {
        CHECK_THAT(sm.smoothed[k].cov.a00,
                   Catch::Matchers::WithinAbs(fr.filtered[k].cov.a00, 1e-12));
        CHECK_THAT(sm.smoothed[k].cov.a11, Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("smoother matches the joint-Gaussian oracle on short records") {
    PhysicsParams p = PhysicsParams::reference();
    p.n_steps = 8;
    const StateSpaceModel m = build_model(p);

    double worst = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        SplitMix64 rng = SplitMix64::stream(808, i);
        const Record rec = simulate_record(p, rng);
        const FilterResult fr = kalman_filter(m, rec.signal);
        const SmootherResult sm = rts_smoother(m, fr);
        const MarginalPosterior oracle = joint_gaussian_oracle(m, rec.signal);
        for (std::size_t k = 0; k < rec.signal.size(); ++k) {
            worst = std::max(worst, std::abs(sm.smoothed[k].mean.y - oracle.mean_b[k]));
            worst = std::max(worst, std::abs(sm.smoothed[k].cov.a11 - oracle.var_b[k]));
            worst = std::max(worst, std::abs(sm.smoothed[k].mean.x - oracle.mean_p[k]));
            worst = std::max(worst, std::abs(sm.smoothed[k].cov.a00 - oracle.var_p[k]));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("oracle edge behaviors") {
    PhysicsParams p = PhysicsParams::reference();
    p.n_steps = 6;
    const StateSpaceModel m = build_model(p);

    SECTION("no measurements reproduce the propagated prior") {
        const MarginalPosterior post = joint_gaussian_posterior(m, p.n_steps, {});
        Mat2 cov = m.prior.cov;
        for (std::size_t k = 0; k < p.n_steps; ++k) {
            CHECK(post.mean_b[k] == 0.0);
            CHECK_THAT(post.var_p[k], Catch::Matchers::WithinAbs(cov.a00, 1e-14));
            CHECK_THAT(post.var_b[k], Catch::Matchers::WithinAbs(cov.a11, 1e-14));
            cov = m.transition * cov * m.transition.transpose() + m.process_noise;
        }
    }
    SECTION("repeated rows equal one conditioning at half the noise") {
        // Gaussian sufficiency: two identical rows with noise R match one row
        // with noise R/2 on the same outcome.
        const MeasurementRow row{2, m.observation, m.obs_noise, 0.7};
        const std::vector<MeasurementRow> twice{row, row};
        const std::vector<MeasurementRow> half{
            {2, m.observation, m.obs_noise / 2.0, 0.7}};
        const MarginalPosterior a = joint_gaussian_posterior(m, p.n_steps, twice);
        const MarginalPosterior b = joint_gaussian_posterior(m, p.n_steps, half);
        for (std::size_t k = 0; k < p.n_steps; ++k) {
            CHECK_THAT(a.mean_b[k], Catch::Matchers::WithinAbs(b.mean_b[k], 1e-10));
            CHECK_THAT(a.var_b[k], Catch::Matchers::WithinAbs(b.var_b[k], 1e-10));
        }
    }
    SECTION("dimension cap is enforced") {
        PhysicsParams big = PhysicsParams::reference();
        big.n_steps = 65;
        const StateSpaceModel mb = build_model(big);
        const std::vector<double> signal(big.n_steps, 0.0);
        CHECK_THROWS_AS(joint_gaussian_oracle(mb, signal), param_error);
    }
}

TEST_CASE("covariances stay PSD and smoothing never inflates the B variance") {
    const PhysicsParams p = PhysicsParams::reference();
    const StateSpaceModel m = build_model(p);
    for (std::size_t i = 0; i < 50; ++i) {
        SplitMix64 rng = SplitMix64::stream(31337, i);
        const Record rec = simulate_record(p, rng);
        const FilterResult fr = kalman_filter(m, rec.signal);
        const SmootherResult sm = rts_smoother(m, fr);
        for (std::size_t k = 0; k < rec.signal.size(); ++k) {
            CHECK(min_eigenvalue_sym(fr.filtered[k].cov) >= -1e-10);
            CHECK(min_eigenvalue_sym(sm.smoothed[k].cov) >= -1e-10);
            CHECK(sm.smoothed[k].cov.a11 <= fr.filtered[k].cov.a11 + 1e-10);
        }
    }
}

TEST_CASE("smoothed residuals are calibrated at mid-interval") {
    const PhysicsParams p = PhysicsParams::reference();
    const StateSpaceModel m = build_model(p);
    constexpr std::size_t kRecords = 1000;
    const auto [lo, hi] = mid_interval_indices(p.n_steps);

    std::vector<double> standardized;
    standardized.reserve(kRecords * (hi - lo + 1));
    for (std::size_t i = 0; i < kRecords; ++i) {
        SplitMix64 rng = SplitMix64::stream(99, i);
        const Record rec = simulate_record(p, rng);
        const SmootherResult sm = rts_smoother(m, kalman_filter(m, rec.signal));
        for (std::size_t k = lo; k <= hi; ++k)
            standardized.push_back((rec.field[k] - sm.smoothed[k].mean.y) /
                                   std::sqrt(sm.smoothed[k].cov.a11));
    }
    const double var = variance(standardized);
    CHECK(var > 0.9);
    CHECK(var < 1.1);
}

TEST_CASE("baseline error curve behaviors") {
    SECTION("estimates equal to the truth give zero error") {
        PhysicsParams p = PhysicsParams::reference();
        p.kappa = 0.0; // no information: the posterior mean stays at zero
        Dataset ds;
        ds.params = p;
        ds.seed = 0;
        ds.records.assign(3, Record{std::vector<double>(p.n_steps, 0.0),
                                    std::vector<double>(p.n_steps, 0.0)});
        const BaselineErrorCurves curves = baseline_error_curve(p, ds, 1);
        for (double e : curves.error_smoothed) CHECK(e == 0.0);
    }
    SECTION("kappa = 0 on real fields floors at the stationary variance") {
        PhysicsParams p = PhysicsParams::reference();
        p.kappa = 0.0;
        const Dataset ds = generate_dataset(p, 1000, 17, 2);
        const BaselineErrorCurves curves = baseline_error_curve(p, ds, 2);
        CHECK_THAT(curves.mid_mean_smoothed, Catch::Matchers::WithinAbs(1.0, 0.13));
        CHECK_THAT(curves.mid_mean_filtered, Catch::Matchers::WithinAbs(1.0, 0.13));
    }
    SECTION("edge errors dominate the flat interior") {
        const PhysicsParams p = PhysicsParams::reference();
        const Dataset ds = generate_dataset(p, 1000, 23, 2);
        const BaselineErrorCurves curves = baseline_error_curve(p, ds, 2);
        CHECK(curves.edge_ratio_start > 1.5);
        CHECK(curves.edge_ratio_end > 2.0);
        CHECK(curves.edge_ratio_end < 6.0);
    }
    SECTION("mismatched parameters are rejected") {
        const PhysicsParams p = PhysicsParams::reference();
        const Dataset ds = generate_dataset(p, 2, 1, 1);
        PhysicsParams other = p;
        other.mu = 10.0;
        CHECK_THROWS_AS(baseline_error_curve(other, ds, 1), param_error);
    }
}
