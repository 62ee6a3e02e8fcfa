#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "magseq/core/binary_io.hpp"
#include "magseq/core/errors.hpp"
#include "magseq/core/hash.hpp"
#include "magseq/core/rng.hpp"
#include "magseq/sim/dataset.hpp"

namespace magseq {

// Dataset container, little-endian:
//   "MGSQ" | u32 version=1 | u64 count | u32 n_steps | f64 tau | f64 kappa |
//   f64 mu | f64 gamma_b | f64 sigma_b | u64 seed | u32 rng_id
// followed per record by n_steps signal values and n_steps field values,
// all f64.
inline constexpr char kDatasetMagic[4] = {'M', 'G', 'S', 'Q'};
inline constexpr std::uint32_t kDatasetVersion = 1;

inline void save_dataset(const Dataset& ds, std::ostream& os) {
    write_magic(os, kDatasetMagic);
    write_u32(os, kDatasetVersion);
    write_u64(os, ds.records.size());
    write_u32(os, ds.params.n_steps);
    write_f64(os, ds.params.tau);
    write_f64(os, ds.params.kappa);
    write_f64(os, ds.params.mu);
    write_f64(os, ds.params.gamma_b);
    write_f64(os, ds.params.sigma_b);
    write_u64(os, ds.seed);
    write_u32(os, kRngId);
    for (const Record& r : ds.records) {
        write_f64_array(os, r.signal);
        write_f64_array(os, r.field);
    }
    if (!os) throw io_error("failed writing dataset stream");
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    save_dataset(ds, os);
}

inline Dataset load_dataset(std::istream& is) {
    expect_magic(is, kDatasetMagic, "dataset header");
    const std::uint32_t version = read_u32(is, "dataset version");
    if (version != kDatasetVersion)
        throw format_error("unsupported dataset version " + std::to_string(version));
    const std::uint64_t count = read_u64(is, "record count");
    Dataset ds;
    ds.params.n_steps = read_u32(is, "n_steps");
    ds.params.tau = read_f64(is, "tau");
    ds.params.kappa = read_f64(is, "kappa");
    ds.params.mu = read_f64(is, "mu");
    ds.params.gamma_b = read_f64(is, "gamma_b");
    ds.params.sigma_b = read_f64(is, "sigma_b");
    ds.seed = read_u64(is, "seed");
    const std::uint32_t rng_id = read_u32(is, "rng id");
    if (rng_id != kRngId)
        throw format_error("unsupported rng id " + std::to_string(rng_id));
    ds.params.validate();
    ds.records.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        ds.records[i].signal.resize(ds.params.n_steps);
        ds.records[i].field.resize(ds.params.n_steps);
        read_f64_array(is, ds.records[i].signal, "record signal");
        read_f64_array(is, ds.records[i].field, "record field");
    }
    return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    return load_dataset(is);
}

// Fingerprint of the header fields only (record payload excluded); stored in
// checkpoint sidecars to tie a model to the data it was trained on.
inline std::uint64_t dataset_header_hash(const Dataset& ds) {
    std::ostringstream os(std::ios::binary);
    write_magic(os, kDatasetMagic);
    write_u32(os, kDatasetVersion);
    write_u64(os, ds.records.size());
    write_u32(os, ds.params.n_steps);
    write_f64(os, ds.params.tau);
    write_f64(os, ds.params.kappa);
    write_f64(os, ds.params.mu);
    write_f64(os, ds.params.gamma_b);
    write_f64(os, ds.params.sigma_b);
    write_u64(os, ds.seed);
    write_u32(os, kRngId);
    const std::string bytes = os.str();
    return fnv1a64(bytes.data(), bytes.size());
}

// One record as CSV rows `t,signal,field`.
inline void export_record_csv(const Dataset& ds, std::size_t index, std::ostream& os) {
    if (index >= ds.records.size()) throw param_error("record index out of range");
    const Record& r = ds.records[index];
    os << "t,signal,field\n";
    char line[96];
    for (std::uint32_t k = 0; k < ds.params.n_steps; ++k) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n",
                      k * ds.params.tau, r.signal[k], r.field[k]);
        os << line;
    }
    if (!os) throw io_error("failed writing record CSV");
}

inline void export_record_csv(const Dataset& ds, std::size_t index,
                              const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    export_record_csv(ds, index, os);
}

} // namespace magseq
