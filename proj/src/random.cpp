#include "tunefree/random.hpp"

#include <cmath>
#include <numbers>

namespace tunefree {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi,
                    std::uint32_t &lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

Philox4x32::Block Philox4x32::operator()(std::uint64_t counter_lo,
                                         std::uint64_t counter_hi) const {
    Block c{static_cast<std::uint32_t>(counter_lo),
            static_cast<std::uint32_t>(counter_lo >> 32),
            static_cast<std::uint32_t>(counter_hi),
            static_cast<std::uint32_t>(counter_hi >> 32)};
    std::uint32_t k0 = static_cast<std::uint32_t>(key_);
    std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index,
                          std::uint64_t purpose) {
    return splitmix64(splitmix64(splitmix64(base) ^ index) ^ (purpose * 0x632BE59BD9B4E019ull));
}

std::uint64_t GaussianSampler::mix(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2Dull));
}

double GaussianSampler::uniform_open() {
    if (used_ >= 4) {
        block_ = philox_(counter_++, 0);
        used_ = 0;
    }
    const std::uint64_t hi = block_[used_];
    const std::uint64_t lo = block_[used_ + 1];
    used_ += 2;
    const std::uint64_t bits = ((hi << 32) | lo) >> 11; // 53 bits
    // (bits + 0.5) / 2^53 lies strictly inside (0, 1).
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double GaussianSampler::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Vector GaussianSampler::normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = normal();
    return v;
}

Matrix GaussianSampler::normal_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = normal();
    return m;
}

} // namespace tunefree
