#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "magseq/core/errors.hpp"
#include "magseq/train/config.hpp"
#include "magseq/train/trainer.hpp"

namespace magseq {

// Companion JSON written next to each checkpoint: the training configuration,
// a fingerprint of the dataset header, and the input standardization (when
// enabled) that predictions must reapply.
struct CheckpointSidecar {
    TrainConfig config;
    std::uint64_t dataset_header_hash = 0;
    std::uint64_t model_checksum = 0;
    std::optional<Normalization> normalization;
};

inline void save_sidecar(const CheckpointSidecar& sc, const std::filesystem::path& path) {
    nlohmann::json j{
        {"train",
         {{"eta", sc.config.eta},
          {"batch_size", sc.config.batch_size},
          {"epochs", sc.config.epochs},
          {"hidden_size", sc.config.hidden_size},
          {"seed", sc.config.seed},
          {"adam_beta1", sc.config.adam_beta1},
          {"adam_beta2", sc.config.adam_beta2},
          {"adam_eps", sc.config.adam_eps},
          {"normalize_inputs", sc.config.normalize_inputs},
          {"clip_norm", sc.config.clip_norm},
          {"lr_decay", sc.config.lr_decay}}},
        {"dataset_header_hash", sc.dataset_header_hash},
        {"model_checksum", sc.model_checksum},
    };
    if (sc.normalization)
        j["normalization"] = {{"mean", sc.normalization->mean},
                              {"stdev", sc.normalization->stdev}};
    else
        j["normalization"] = nullptr;

    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    os << j.dump(2) << '\n';
    if (!os) throw io_error("failed writing " + path.string());
}

inline CheckpointSidecar load_sidecar(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("malformed sidecar JSON: " + std::string(e.what()));
    }
    try {
        CheckpointSidecar sc;
        const auto& t = j.at("train");
        sc.config.eta = t.at("eta").get<double>();
        sc.config.batch_size = t.at("batch_size").get<std::size_t>();
        sc.config.epochs = t.at("epochs").get<std::size_t>();
        sc.config.hidden_size = t.at("hidden_size").get<std::size_t>();
        sc.config.seed = t.at("seed").get<std::uint64_t>();
        sc.config.adam_beta1 = t.at("adam_beta1").get<double>();
        sc.config.adam_beta2 = t.at("adam_beta2").get<double>();
        sc.config.adam_eps = t.at("adam_eps").get<double>();
        sc.config.normalize_inputs = t.at("normalize_inputs").get<bool>();
        sc.config.clip_norm = t.at("clip_norm").get<double>();
        sc.config.lr_decay = t.value("lr_decay", 1.0);
        sc.dataset_header_hash = j.at("dataset_header_hash").get<std::uint64_t>();
        sc.model_checksum = j.at("model_checksum").get<std::uint64_t>();
        if (!j.at("normalization").is_null()) {
            Normalization n;
            n.mean = j["normalization"].at("mean").get<double>();
            n.stdev = j["normalization"].at("stdev").get<double>();
            sc.normalization = n;
        }
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("sidecar JSON missing fields: " + std::string(e.what()));
    }
}

} // namespace magseq
