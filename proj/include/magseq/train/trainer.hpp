#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/core/parallel.hpp"
#include "magseq/core/rng.hpp"
#include "magseq/nn/backprop.hpp"
#include "magseq/nn/checkpoint.hpp"
#include "magseq/nn/init.hpp"
#include "magseq/sim/dataset.hpp"
#include "magseq/train/adam.hpp"
#include "magseq/train/config.hpp"

namespace magseq {

// Standardization constants learned from the training signals.
struct Normalization {
    double mean = 0.0;
    double stdev = 1.0;

    double apply(double x) const { return (x - mean) / stdev; }
};

struct TrainReport {
    std::vector<double> epoch_losses; // mini-batch loss averaged over each epoch
    double wall_seconds = 0.0;
    std::uint64_t model_checksum = 0;
};

struct TrainOutcome {
    Seq2SeqModel model;
    TrainReport report;
    std::optional<Normalization> normalization;
};

// Seed-derived visiting order for one epoch; every record appears exactly once.
inline std::vector<std::size_t> epoch_permutation(std::uint64_t seed, std::size_t epoch,
                                                  std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    SplitMix64 rng = SplitMix64::stream(seed, 1 + epoch);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

namespace detail {

inline void zero_gradients(Gradients& g) {
    visit_param_blocks(g, [](std::span<double> s) {
        std::fill(s.begin(), s.end(), 0.0);
    });
}

inline void add_gradients(Gradients& into, const Gradients& from) {
    visit_param_blocks2(into, const_cast<Gradients&>(from),
                        [](std::span<double> a, std::span<double> b) {
                            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
                        });
}

inline double gradient_norm(const Gradients& g) {
    double sq = 0.0;
    visit_param_blocks(const_cast<Gradients&>(g), [&](std::span<double> s) {
        for (double v : s) sq += v * v;
    });
    return std::sqrt(sq);
}

inline void scale_gradients(Gradients& g, double factor) {
    visit_param_blocks(g, [&](std::span<double> s) {
        for (double& v : s) v *= factor;
    });
}

} // namespace detail

// Mini-batch gradient descent with teacher forcing: encode each record's
// signal, decode against the true field, and take one ADAM step per batch of
// cfg.batch_size records (the trailing short batch uses its actual size).
// Records are revisited in a fresh seed-derived order every epoch. Gradients
// of a batch are summed in record order, so the result is bitwise identical
// for any thread count.
inline TrainOutcome train(const Dataset& dataset, const TrainConfig& cfg,
                          unsigned threads = 1,
                          const std::function<void(std::size_t, double)>& on_epoch = {}) {
    cfg.validate();
    if (dataset.records.empty()) throw param_error("training dataset is empty");
    const std::size_t n_records = dataset.records.size();
    const std::size_t n_steps = dataset.params.n_steps;
    const auto t_start = std::chrono::steady_clock::now();

    TrainOutcome out;
    if (cfg.normalize_inputs) {
        double sum = 0.0, sum_sq = 0.0;
        const auto total = static_cast<double>(n_records * n_steps);
        for (const Record& r : dataset.records)
            for (double x : r.signal) {
                sum += x;
                sum_sq += x * x;
            }
        const double mean = sum / total;
        double var = sum_sq / total - mean * mean;
        if (var < 1e-300) var = 1.0;
        out.normalization = Normalization{mean, std::sqrt(var)};
    }

    // signals as fed to the encoder
    std::vector<std::vector<double>> inputs;
    if (out.normalization) {
        inputs.resize(n_records);
        for (std::size_t i = 0; i < n_records; ++i) {
            inputs[i].resize(n_steps);
            for (std::size_t k = 0; k < n_steps; ++k)
                inputs[i][k] = out.normalization->apply(dataset.records[i].signal[k]);
        }
    }
    auto input_of = [&](std::size_t i) -> std::span<const double> {
        return out.normalization ? std::span<const double>(inputs[i])
                                 : std::span<const double>(dataset.records[i].signal);
    };

    SplitMix64 init_rng = SplitMix64::stream(cfg.seed, 0);
    Seq2SeqModel model = init_model(cfg.hidden_size, init_rng);
    AdamState adam(cfg.hidden_size);

    const unsigned workers = resolve_threads(threads);
    std::vector<SequenceCache> caches(workers);
    std::vector<BackwardScratch> scratches(workers, BackwardScratch(cfg.hidden_size));
    std::vector<Gradients> per_record(cfg.batch_size, Gradients(cfg.hidden_size));
    std::vector<double> per_record_sq(cfg.batch_size, 0.0);
    Gradients batch_grad(cfg.hidden_size);

    out.report.epoch_losses.reserve(cfg.epochs);
    double eta = cfg.eta;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<std::size_t> order =
            epoch_permutation(cfg.seed, epoch, n_records);
        double epoch_sq_sum = 0.0;

        for (std::size_t begin = 0; begin < n_records; begin += cfg.batch_size) {
            const std::size_t batch_n =
                std::min(cfg.batch_size, n_records - begin);

            parallel_ranges(batch_n, workers,
                            [&](std::size_t lo, std::size_t hi, unsigned w) {
                for (std::size_t b = lo; b < hi; ++b) {
                    const std::size_t rec = order[begin + b];
                    const BatchItem item{input_of(rec),
                                         dataset.records[rec].field};
                    detail::zero_gradients(per_record[b]);
                    per_record_sq[b] = forward_record(model, item, caches[w]);
                    backward_record(model, caches[w], per_record[b], scratches[w]);
                }
            });

            detail::zero_gradients(batch_grad);
            double batch_sq = 0.0;
            for (std::size_t b = 0; b < batch_n; ++b) { // fixed reduction order
                detail::add_gradients(batch_grad, per_record[b]);
                batch_sq += per_record_sq[b];
            }
            const double batch_loss =
                batch_sq / (static_cast<double>(batch_n) * static_cast<double>(n_steps));
            if (!std::isfinite(batch_loss))
                throw numeric_error(
                    "training diverged: non-finite loss in epoch " +
                    std::to_string(epoch + 1));
            detail::scale_gradients(batch_grad,
                                    1.0 / (static_cast<double>(batch_n) *
                                           static_cast<double>(n_steps)));
            if (cfg.clip_norm > 0.0) {
                const double norm = detail::gradient_norm(batch_grad);
                if (norm > cfg.clip_norm)
                    detail::scale_gradients(batch_grad, cfg.clip_norm / norm);
            }
            adam_step(model, batch_grad, adam, eta, cfg.adam_beta1, cfg.adam_beta2,
                      cfg.adam_eps);
            epoch_sq_sum += batch_sq;
        }

        out.report.epoch_losses.push_back(
            epoch_sq_sum / (static_cast<double>(n_records) * static_cast<double>(n_steps)));
        if (on_epoch) on_epoch(epoch + 1, out.report.epoch_losses.back());
        eta *= cfg.lr_decay;
    }

    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    out.report.model_checksum = model_checksum(model);
    out.model = std::move(model);
    return out;
}

} // namespace magseq
