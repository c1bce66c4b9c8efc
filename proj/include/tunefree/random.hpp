#pragma once

#include "tunefree/types.hpp"

#include <array>
#include <cstdint>

namespace tunefree {

/// Philox4x32-10 counter-based generator. Block i of stream (key) is a pure
/// function of (key, i), so draws are reproducible on every platform.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key) : key_(key) {}

    Block operator()(std::uint64_t counter_lo, std::uint64_t counter_hi) const;

private:
    std::uint64_t key_;
};

/// Seeded source of N(0, 1) draws: Philox blocks turned into 53-bit uniforms,
/// then a Box-Muller pair per two uniforms. Identical (seed, stream) give
/// identical sequences.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), philox_(mix(seed, stream)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    double normal();
    Vector normal_vector(Index n);
    /// Column-major fill.
    Matrix normal_matrix(Index rows, Index cols);

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

private:
    double uniform_open();

    std::uint64_t seed_;
    std::uint64_t stream_;
    Philox4x32 philox_;
    std::uint64_t counter_ = 0;
    Philox4x32::Block block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for an independent stream keyed by (base, index, purpose).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index,
                          std::uint64_t purpose);

} // namespace tunefree
