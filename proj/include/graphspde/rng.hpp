#pragma once

#include <cstdint>

namespace graphspde {

/// Derives an independent stream seed from (master, stream) via splitmix64
/// mixing. Monte-Carlo batches use derive_seed(master, i) for sample i, so
/// results do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Small deterministic generator (xoshiro256** core, Box-Muller normals).
/// Output is bit-reproducible for a given seed; no libstdc++ distribution
/// objects are involved.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform draw in [0, 1) with 53-bit resolution.
    double uniform();

    /// Standard normal draw.
    double normal();

private:
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace graphspde
