#pragma once

#include <cstdint>
#include <vector>

#include "magseq/core/parallel.hpp"
#include "magseq/core/rng.hpp"
#include "magseq/sim/physics.hpp"
#include "magseq/sim/record.hpp"

namespace magseq {

struct Dataset {
    PhysicsParams params;
    std::uint64_t seed = 0;
    std::vector<Record> records;

    bool operator==(const Dataset&) const = default;
};

// Record i is drawn from the stream derived from (seed, i), so the result is
// identical for any worker count and records may be generated in parallel.
inline Dataset generate_dataset(const PhysicsParams& params, std::size_t count,
                                std::uint64_t seed, unsigned threads = 1) {
    params.validate();
    if (count < 1) throw param_error("dataset must contain at least one record");
    Dataset ds{params, seed, std::vector<Record>(count)};
    parallel_for(count, threads, [&](std::size_t i) {
        SplitMix64 rng = SplitMix64::stream(seed, i);
        ds.records[i] = simulate_record(params, rng);
    });
    return ds;
}

} // namespace magseq
