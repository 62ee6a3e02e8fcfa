#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "magseq/core/binary_io.hpp"
#include "magseq/core/errors.hpp"
#include "magseq/core/hash.hpp"
#include "magseq/nn/seq2seq.hpp"

namespace magseq {

// Model checkpoint, little-endian:
//   "MGNN" | u32 version=1 | u32 m | u32 input_dim=1
// then every parameter block as f64 (matrices row-major) in the
// visit_param_blocks order.
inline constexpr char kModelMagic[4] = {'M', 'G', 'N', 'N'};
inline constexpr std::uint32_t kModelVersion = 1;
inline constexpr std::uint32_t kModelInputDim = 1;

inline void save_model(const Seq2SeqModel& model, std::ostream& os) {
    write_magic(os, kModelMagic);
    write_u32(os, kModelVersion);
    write_u32(os, static_cast<std::uint32_t>(model.m));
    write_u32(os, kModelInputDim);
    visit_param_blocks(const_cast<Seq2SeqModel&>(model), [&](std::span<double> block) {
        write_f64_array(os, block);
    });
    if (!os) throw io_error("failed writing model stream");
}

inline void save_model(const Seq2SeqModel& model, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    save_model(model, os);
}

inline Seq2SeqModel load_model(std::istream& is) {
    expect_magic(is, kModelMagic, "model header");
    const std::uint32_t version = read_u32(is, "model version");
    if (version != kModelVersion)
        throw format_error("unsupported model version " + std::to_string(version));
    const std::uint32_t m = read_u32(is, "hidden size");
    const std::uint32_t input_dim = read_u32(is, "input dim");
    if (input_dim != kModelInputDim)
        throw format_error("unsupported input dim " + std::to_string(input_dim));
    Seq2SeqModel model(m);
    visit_param_blocks(model, [&](std::span<double> block) {
        read_f64_array(is, block, "model parameters");
    });
    return model;
}

inline Seq2SeqModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    return load_model(is);
}

// Checksum of the serialized checkpoint bytes.
inline std::uint64_t model_checksum(const Seq2SeqModel& model) {
    std::ostringstream os(std::ios::binary);
    save_model(model, os);
    const std::string bytes = os.str();
    return fnv1a64(bytes.data(), bytes.size());
}

} // namespace magseq
