#pragma once

#include <cmath>
#include <cstdint>

#include "magseq/core/errors.hpp"

namespace magseq {

struct TrainConfig {
    double eta = 0.01;              // learning rate, constant
    std::size_t batch_size = 64;
    std::size_t epochs = 20;
    std::size_t hidden_size = 32;
    std::uint64_t seed = 1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    bool normalize_inputs = false;  // standardize signals by train-set mean/std
    double clip_norm = 0.0;         // global-norm gradient clip; 0 disables
    double lr_decay = 1.0;          // per-epoch multiplicative decay hook

    // Hyperparameters used for the full-size runs: hidden 80, batches of
    // 256, 30 epochs.
    static TrainConfig full_scale() {
        TrainConfig c;
        c.hidden_size = 80;
        c.batch_size = 256;
        c.epochs = 30;
        return c;
    }

    // Workstation-sized defaults (also the struct defaults).
    static TrainConfig desk_scale() { return TrainConfig{}; }

    void validate() const {
        if (!(eta > 0.0) || !std::isfinite(eta)) throw param_error("eta must be positive");
        if (batch_size < 1) throw param_error("batch_size must be at least 1");
        if (epochs < 1) throw param_error("epochs must be at least 1");
        if (hidden_size < 1) throw param_error("hidden_size must be at least 1");
        if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
            throw param_error("adam betas must lie in [0, 1)");
        if (!(adam_eps > 0.0)) throw param_error("adam_eps must be positive");
        if (clip_norm < 0.0) throw param_error("clip_norm must be non-negative");
        if (!(lr_decay > 0.0) || lr_decay > 1.0)
            throw param_error("lr_decay must lie in (0, 1]");
    }
};

} // namespace magseq
