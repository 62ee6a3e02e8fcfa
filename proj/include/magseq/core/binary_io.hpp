#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "magseq/core/errors.hpp"

namespace magseq {

// Little-endian primitives for the on-disk containers.

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_f64(std::ostream& os, double v) {
    write_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline void write_f64_array(std::ostream& os, std::span<const double> vals) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(vals.data()),
                 static_cast<std::streamsize>(vals.size() * sizeof(double)));
    } else {
        for (double v : vals) write_f64(os, v);
    }
}

inline std::uint32_t read_u32(std::istream& is, const char* what) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (is.gcount() != 4)
        throw truncation_error(std::string("unexpected end of stream reading ") + what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& is, const char* what) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (is.gcount() != 8)
        throw truncation_error(std::string("unexpected end of stream reading ") + what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double read_f64(std::istream& is, const char* what) {
    return std::bit_cast<double>(read_u64(is, what));
}

inline void read_f64_array(std::istream& is, std::span<double> out, const char* what) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(out.data()),
                static_cast<std::streamsize>(out.size() * sizeof(double)));
        if (static_cast<std::size_t>(is.gcount()) != out.size() * sizeof(double))
            throw truncation_error(std::string("unexpected end of stream reading ") + what);
    } else {
        for (double& v : out) v = read_f64(is, what);
    }
}

inline void write_magic(std::ostream& os, const char magic[4]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char magic[4], const char* what) {
    char got[4] = {};
    is.read(got, 4);
    if (is.gcount() != 4)
        throw truncation_error(std::string("unexpected end of stream reading ") + what);
    if (std::memcmp(got, magic, 4) != 0)
        throw format_error(std::string("bad magic bytes for ") + what);
}

} // namespace magseq
