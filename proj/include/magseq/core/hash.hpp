#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace magseq {

// FNV-1a, 64-bit. Used for checkpoint checksums and header fingerprints.
class Fnv1a64 {
public:
    void update(std::span<const unsigned char> bytes) {
        for (unsigned char b : bytes) {
            hash_ ^= b;
            hash_ *= 0x100000001B3ull;
        }
    }

    void update(const void* data, std::size_t n) {
        update({static_cast<const unsigned char*>(data), n});
    }

    std::uint64_t digest() const { return hash_; }

private:
    std::uint64_t hash_ = 0xCBF29CE484222325ull;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    Fnv1a64 h;
    h.update(data, n);
    return h.digest();
}

} // namespace magseq
