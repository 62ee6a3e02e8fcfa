#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "magseq/core/errors.hpp"
#include "magseq/gauss/baseline.hpp"
#include "magseq/gauss/rts.hpp"
#include "magseq/train/evaluate.hpp"
#include "magseq/train/trainer.hpp"

namespace magseq {

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    return os;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

// epoch,loss
inline void write_epoch_loss_csv(const TrainReport& report,
                                 const std::filesystem::path& path) {
    auto os = detail::open_csv(path);
    os << "epoch,loss\n";
    for (std::size_t e = 0; e < report.epoch_losses.size(); ++e)
        os << (e + 1) << ',' << detail::fmt(report.epoch_losses[e]) << '\n';
    if (!os) throw io_error("failed writing " + path.string());
}

// t,error,error_normalized
inline void write_error_curve_csv(const ErrorCurve& curve,
                                  const std::filesystem::path& path) {
    auto os = detail::open_csv(path);
    os << "t,error,error_normalized\n";
    for (std::size_t k = 0; k < curve.time.size(); ++k)
        os << detail::fmt(curve.time[k]) << ',' << detail::fmt(curve.error[k]) << ','
           << detail::fmt(curve.error_normalized[k]) << '\n';
    if (!os) throw io_error("failed writing " + path.string());
}

// t,error_smoothed,error_filtered
inline void write_baseline_csv(const BaselineErrorCurves& curves,
                               const std::filesystem::path& path) {
    auto os = detail::open_csv(path);
    os << "t,error_smoothed,error_filtered\n";
    for (std::size_t k = 0; k < curves.time.size(); ++k)
        os << detail::fmt(curves.time[k]) << ','
           << detail::fmt(curves.error_smoothed[k]) << ','
           << detail::fmt(curves.error_filtered[k]) << '\n';
    if (!os) throw io_error("failed writing " + path.string());
}

// t,B_true,B_smoothed,B_var_smoothed for one record
inline void write_record_estimate_csv(const PhysicsParams& params, const Record& record,
                                      const SmootherResult& smoothed,
                                      const std::filesystem::path& path) {
    auto os = detail::open_csv(path);
    os << "t,B_true,B_smoothed,B_var_smoothed\n";
    for (std::size_t k = 0; k < record.field.size(); ++k)
        os << detail::fmt(k * params.tau) << ',' << detail::fmt(record.field[k]) << ','
           << detail::fmt(smoothed.smoothed[k].mean.y) << ','
           << detail::fmt(smoothed.smoothed[k].cov.a11) << '\n';
    if (!os) throw io_error("failed writing " + path.string());
}

// record_id,t,B_true,B_est for a handful of sample records
inline void write_trajectories_csv(const Seq2SeqModel& model, const Dataset& test,
                                   std::span<const std::size_t> record_ids,
                                   const std::optional<Normalization>& norm,
                                   const std::filesystem::path& path) {
    auto os = detail::open_csv(path);
    os << "record_id,t,B_true,B_est\n";
    for (std::size_t id : record_ids) {
        if (id >= test.records.size()) throw param_error("record index out of range");
        const Record& rec = test.records[id];
        const std::vector<double> est = predict(model, rec.signal, norm);
        for (std::size_t k = 0; k < rec.field.size(); ++k)
            os << id << ',' << detail::fmt(k * test.params.tau) << ','
               << detail::fmt(rec.field[k]) << ',' << detail::fmt(est[k]) << '\n';
    }
    if (!os) throw io_error("failed writing " + path.string());
}

// key,value summary table
inline void write_summary_csv(std::span<const std::pair<std::string, std::string>> rows,
                              const std::filesystem::path& path) {
    auto os = detail::open_csv(path);
    os << "key,value\n";
    for (const auto& [key, value] : rows) os << key << ',' << value << '\n';
    if (!os) throw io_error("failed writing " + path.string());
}

} // namespace magseq
