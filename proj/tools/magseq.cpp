// magseq: simulate optical magnetometry records of a fluctuating field,
// train the encoder-decoder LSTM estimator, and benchmark it against the
// Kalman filter / RTS smoother baseline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magseq/core/errors.hpp"
#include "magseq/gauss/baseline.hpp"
#include "magseq/report/csv.hpp"
#include "magseq/report/sidecar.hpp"
#include "magseq/sim/dataset_io.hpp"
#include "magseq/train/compare.hpp"
#include "magseq/train/evaluate.hpp"
#include "magseq/train/trainer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace magseq;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;   // bad flags, config, or input files
constexpr int kExitNumeric = 3; // runtime numeric failure (e.g. divergence)

struct RunConfig {
    PhysicsParams physics = PhysicsParams::reference();
    TrainConfig train = TrainConfig::desk_scale();
    bool desk_scale = true;
};

// JSON document mirroring RunConfig; absent fields keep their defaults and
// command-line flags override file values.
RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("malformed config JSON: " + std::string(e.what()));
    }
    try {
        if (j.contains("desk_scale")) {
            cfg.desk_scale = j["desk_scale"].get<bool>();
            if (!cfg.desk_scale) cfg.train = TrainConfig::full_scale();
        }
        if (j.contains("physics")) {
            const auto& p = j["physics"];
            cfg.physics.kappa = p.value("kappa", cfg.physics.kappa);
            cfg.physics.mu = p.value("mu", cfg.physics.mu);
            cfg.physics.tau = p.value("tau", cfg.physics.tau);
            cfg.physics.n_steps = p.value("n_steps", cfg.physics.n_steps);
            cfg.physics.gamma_b = p.value("gamma_b", cfg.physics.gamma_b);
            cfg.physics.sigma_b = p.value("sigma_b", cfg.physics.sigma_b);
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            cfg.train.eta = t.value("eta", cfg.train.eta);
            cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
            cfg.train.epochs = t.value("epochs", cfg.train.epochs);
            cfg.train.hidden_size = t.value("hidden_size", cfg.train.hidden_size);
            cfg.train.seed = t.value("seed", cfg.train.seed);
            cfg.train.adam_beta1 = t.value("adam_beta1", cfg.train.adam_beta1);
            cfg.train.adam_beta2 = t.value("adam_beta2", cfg.train.adam_beta2);
            cfg.train.adam_eps = t.value("adam_eps", cfg.train.adam_eps);
            cfg.train.normalize_inputs =
                t.value("normalize_inputs", cfg.train.normalize_inputs);
            cfg.train.clip_norm = t.value("clip_norm", cfg.train.clip_norm);
            cfg.train.lr_decay = t.value("lr_decay", cfg.train.lr_decay);
        }
    } catch (const nlohmann::json::exception& e) {
        throw format_error("bad config value: " + std::string(e.what()));
    }
    cfg.physics.validate();
    cfg.train.validate();
    return cfg;
}

void print_physics(const PhysicsParams& p) {
    std::printf("physics: kappa^2=%.6g /ms  mu=%.6g /(pT ms)  tau=%.6g ms  "
                "n_steps=%u  gamma_b=%.6g /ms  sigma_b=%.6g pT^2/ms\n",
                p.kappa * p.kappa, p.mu, p.tau, p.n_steps, p.gamma_b, p.sigma_b);
}

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0; // 0: all hardware threads
    bool desk_scale = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON config file (physics + train blocks)");
        cmd->add_option("--seed", seed, "override the RNG seed");
        cmd->add_option("--threads", threads,
                        "worker threads (0 = all cores; results do not depend on this)");
        cmd->add_flag("--desk-scale", desk_scale,
                      "force desk-scale training defaults (m=32, batch 64, 20 epochs)");
    }

    RunConfig resolve() const {
        RunConfig cfg = load_run_config(config);
        if (desk_scale) {
            const std::uint64_t keep_seed = cfg.train.seed;
            const bool keep_norm = cfg.train.normalize_inputs;
            cfg.train = TrainConfig::desk_scale();
            cfg.train.seed = keep_seed;
            cfg.train.normalize_inputs = keep_norm;
            cfg.desk_scale = true;
        }
        if (seed) cfg.train.seed = *seed;
        return cfg;
    }
};

int cmd_generate(const CommonFlags& common, std::size_t count, const std::string& out,
                 const std::string& sample_csv, std::size_t sample_index) {
    const RunConfig cfg = common.resolve();
    const std::uint64_t seed = common.seed.value_or(cfg.train.seed);
    const Dataset ds = generate_dataset(cfg.physics, count, seed, common.threads);
    save_dataset(ds, fs::path(out));
    std::printf("wrote %s: %zu records, seed %llu, rng id %u\n", out.c_str(),
                ds.records.size(), static_cast<unsigned long long>(seed), kRngId);
    print_physics(cfg.physics);
    if (!sample_csv.empty()) {
        export_record_csv(ds, sample_index, fs::path(sample_csv));
        std::printf("sample record %zu -> %s\n", sample_index, sample_csv.c_str());
    }
    return kExitOk;
}

int cmd_train(const CommonFlags& common, const std::string& dataset_path,
              const std::string& out_model, std::string metrics_path) {
    const RunConfig cfg = common.resolve();
    const Dataset ds = load_dataset(fs::path(dataset_path));
    std::printf("training on %zu records (n_steps=%u), m=%zu, batch=%zu, epochs=%zu, "
                "eta=%g, seed=%llu%s\n",
                ds.records.size(), ds.params.n_steps, cfg.train.hidden_size,
                cfg.train.batch_size, cfg.train.epochs, cfg.train.eta,
                static_cast<unsigned long long>(cfg.train.seed),
                cfg.train.normalize_inputs ? ", normalized inputs" : "");

    const TrainOutcome outcome =
        train(ds, cfg.train, common.threads, [&](std::size_t epoch, double loss) {
            std::printf("epoch %zu/%zu  loss %.6g\n", epoch, cfg.train.epochs, loss);
            std::fflush(stdout);
        });

    save_model(outcome.model, fs::path(out_model));
    CheckpointSidecar sidecar;
    sidecar.config = cfg.train;
    sidecar.dataset_header_hash = dataset_header_hash(ds);
    sidecar.model_checksum = outcome.report.model_checksum;
    sidecar.normalization = outcome.normalization;
    save_sidecar(sidecar, fs::path(out_model + ".json"));

    if (metrics_path.empty()) metrics_path = out_model + ".loss.csv";
    write_epoch_loss_csv(outcome.report, fs::path(metrics_path));
    std::printf("wrote %s and %s (checksum %016llx, %.1f s)\n", out_model.c_str(),
                metrics_path.c_str(),
                static_cast<unsigned long long>(outcome.report.model_checksum),
                outcome.report.wall_seconds);
    return kExitOk;
}

std::optional<Normalization> load_model_normalization(const std::string& model_path,
                                                      std::uint32_t n_steps) {
    const fs::path sidecar_path = model_path + ".json";
    if (!fs::exists(sidecar_path)) return std::nullopt;
    return load_sidecar(sidecar_path).normalization;
    (void)n_steps;
}

int cmd_evaluate(const CommonFlags& common, const std::string& model_path,
                 const std::string& dataset_path, const std::string& out_dir,
                 std::size_t n_samples) {
    const Seq2SeqModel model = load_model(fs::path(model_path));
    const Dataset ds = load_dataset(fs::path(dataset_path));
    const auto norm = load_model_normalization(model_path, ds.params.n_steps);

    fs::create_directories(out_dir);
    const ErrorCurve curve = evaluate_error_curve(model, ds, norm, common.threads);
    write_error_curve_csv(curve, fs::path(out_dir) / "error_curve.csv");

    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n_samples && i < ds.records.size(); ++i) ids.push_back(i);
    write_trajectories_csv(model, ds, ids, norm, fs::path(out_dir) / "trajectories.csv");

    std::printf("records %zu  mid error %.6g pT^2 (%.6g of stationary variance)\n",
                ds.records.size(), curve.mid_mean,
                curve.mid_mean / ds.params.stationary_variance());
    std::printf("edges %.6g / %.6g pT^2, edge-to-mid ratios %.3g / %.3g\n",
                curve.edge_start, curve.edge_end, curve.ratio_start, curve.ratio_end);
    std::printf("wrote %s/error_curve.csv and %s/trajectories.csv\n", out_dir.c_str(),
                out_dir.c_str());
    return kExitOk;
}

int cmd_baseline(const CommonFlags& common, const std::string& dataset_path,
                 const std::string& out_path, const std::string& record_csv,
                 std::size_t record_index) {
    const Dataset ds = load_dataset(fs::path(dataset_path));
    // config-supplied physics must match the dataset header
    const PhysicsParams params =
        common.config.empty() ? ds.params : common.resolve().physics;
    const BaselineErrorCurves curves =
        baseline_error_curve(params, ds, common.threads);
    write_baseline_csv(curves, fs::path(out_path));
    std::printf("records %zu  smoother mid error %.6g pT^2, edge ratios %.3g / %.3g\n",
                ds.records.size(), curves.mid_mean_smoothed, curves.edge_ratio_start,
                curves.edge_ratio_end);
    std::printf("filtered mid error %.6g pT^2\n", curves.mid_mean_filtered);
    std::printf("wrote %s\n", out_path.c_str());

    if (!record_csv.empty()) {
        if (record_index >= ds.records.size())
            throw param_error("record index out of range");
        const StateSpaceModel ssm = build_model(params);
        const FilterResult filt = kalman_filter(ssm, ds.records[record_index].signal);
        const SmootherResult smooth = rts_smoother(ssm, filt);
        write_record_estimate_csv(params, ds.records[record_index], smooth,
                                  fs::path(record_csv));
        std::printf("record %zu estimate -> %s\n", record_index, record_csv.c_str());
    }
    return kExitOk;
}

int cmd_compare(const CommonFlags& common, const std::string& model_path,
                const std::string& dataset_path, const std::string& out_dir) {
    const Seq2SeqModel model = load_model(fs::path(model_path));
    const Dataset ds = load_dataset(fs::path(dataset_path));
    const auto norm = load_model_normalization(model_path, ds.params.n_steps);

    const ComparisonSummary cmp = compare_estimators(model, ds, norm, common.threads);

    fs::create_directories(out_dir);
    {
        auto os = detail::open_csv(fs::path(out_dir) / "compare_curves.csv");
        os << "t,error_rnn,error_smoothed,error_filtered,"
              "error_rnn_normalized,error_smoothed_normalized\n";
        const double stationary = ds.params.stationary_variance();
        for (std::size_t k = 0; k < cmp.time.size(); ++k)
            os << detail::fmt(cmp.time[k]) << ',' << detail::fmt(cmp.error_rnn[k]) << ','
               << detail::fmt(cmp.error_smoothed[k]) << ','
               << detail::fmt(cmp.error_filtered[k]) << ','
               << detail::fmt(cmp.error_rnn[k] / stationary) << ','
               << detail::fmt(cmp.error_smoothed[k] / stationary) << '\n';
    }

    std::vector<std::pair<std::string, std::string>> rows{
        {"n_records", std::to_string(cmp.n_records)},
        {"mid_error_rnn", detail::fmt(cmp.mid_mean_rnn)},
        {"mid_error_smoothed", detail::fmt(cmp.mid_mean_smoothed)},
        {"mid_error_filtered", detail::fmt(cmp.mid_mean_filtered)},
        {"ratio_rnn_to_smoother", detail::fmt(cmp.ratio_rnn_to_smoother)},
        {"ratio_standard_error", detail::fmt(cmp.ratio_standard_error)},
        {"edge_ratio_start_rnn", detail::fmt(cmp.edge_ratio_start_rnn)},
        {"edge_ratio_end_rnn", detail::fmt(cmp.edge_ratio_end_rnn)},
        {"edge_ratio_start_smoothed", detail::fmt(cmp.edge_ratio_start_smoothed)},
        {"edge_ratio_end_smoothed", detail::fmt(cmp.edge_ratio_end_smoothed)},
        {"teacher_mse", detail::fmt(cmp.gap.teacher_mse)},
        {"autoregressive_mse", detail::fmt(cmp.gap.autoregressive_mse)},
    };
    write_summary_csv(rows, fs::path(out_dir) / "compare_summary.csv");

    std::printf("%-28s %s\n", "metric", "value");
    for (const auto& [k, v] : rows) std::printf("%-28s %s\n", k.c_str(), v.c_str());
    std::printf("wrote %s/compare_curves.csv and %s/compare_summary.csv\n",
                out_dir.c_str(), out_dir.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "magnetometry sequence toolkit: simulated optical records, LSTM field "
        "estimation, and the Gaussian filter/smoother baseline.\n"
        "Exit codes: 0 success, 2 usage or config error, 3 numeric failure."};
    app.require_subcommand(1);

    CommonFlags g_generate, g_train, g_evaluate, g_baseline, g_compare;

    auto* generate = app.add_subcommand(
        "generate", "simulate records and write a dataset file");
    std::size_t count = 0;
    std::string gen_out = "dataset.bin", sample_csv;
    std::size_t sample_index = 0;
    generate->add_option("--count", count, "number of records (at least 1)")
        ->required();
    generate->add_option("--out", gen_out, "output dataset path");
    generate->add_option("--sample-csv", sample_csv,
                         "also export one record as CSV (t,signal,field)");
    generate->add_option("--sample-index", sample_index, "record to export");
    g_generate.attach(generate);

    auto* train_cmd = app.add_subcommand(
        "train", "train the encoder-decoder model on a dataset");
    std::string train_dataset, out_model = "model.bin", metrics_path;
    train_cmd->add_option("--dataset", train_dataset, "training dataset")->required();
    train_cmd->add_option("--out-model", out_model, "checkpoint output path");
    train_cmd->add_option("--metrics", metrics_path,
                          "per-epoch loss CSV (default <model>.loss.csv)");
    g_train.attach(train_cmd);

    auto* evaluate = app.add_subcommand(
        "evaluate", "closed-loop error curve of a trained model on a test set");
    std::string eval_model, eval_dataset, eval_out = "eval";
    std::size_t n_samples = 2;
    evaluate->add_option("--model", eval_model, "checkpoint path")->required();
    evaluate->add_option("--dataset", eval_dataset, "test dataset")->required();
    evaluate->add_option("--out-dir", eval_out,
                         "directory for error_curve.csv (t,error,error_normalized) "
                         "and trajectories.csv (record_id,t,B_true,B_est)");
    evaluate->add_option("--samples", n_samples, "sample trajectories to export");
    g_evaluate.attach(evaluate);

    auto* baseline = app.add_subcommand(
        "baseline", "Kalman filter + RTS smoother error curve on a dataset");
    std::string base_dataset, base_out = "baseline.csv", record_csv;
    std::size_t record_index = 0;
    baseline->add_option("--dataset", base_dataset, "test dataset")->required();
    baseline->add_option("--out", base_out,
                         "output CSV (t,error_smoothed,error_filtered)");
    baseline->add_option("--record-csv", record_csv,
                         "also export one record's smoothed estimate "
                         "(t,B_true,B_smoothed,B_var_smoothed)");
    baseline->add_option("--record-index", record_index, "record to export");
    g_baseline.attach(baseline);

    auto* compare = app.add_subcommand(
        "compare", "run the RNN and the smoother on the same records");
    std::string cmp_model, cmp_dataset, cmp_out = "compare";
    compare->add_option("--model", cmp_model, "checkpoint path")->required();
    compare->add_option("--dataset", cmp_dataset, "test dataset")->required();
    compare->add_option("--out-dir", cmp_out,
                        "directory for compare_curves.csv and compare_summary.csv");
    g_compare.attach(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed())
            return cmd_generate(g_generate, count, gen_out, sample_csv, sample_index);
        if (train_cmd->parsed())
            return cmd_train(g_train, train_dataset, out_model, metrics_path);
        if (evaluate->parsed())
            return cmd_evaluate(g_evaluate, eval_model, eval_dataset, eval_out, n_samples);
        if (baseline->parsed())
            return cmd_baseline(g_baseline, base_dataset, base_out, record_csv,
                                record_index);
        if (compare->parsed())
            return cmd_compare(g_compare, cmp_model, cmp_dataset, cmp_out);
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const param_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const format_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const truncation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected failure: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitOk;
}
