#pragma once

#include <cstdint>
#include <random>

namespace circlab {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Stream seed for replica `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

// mt19937_64 stream producing open-interval uniforms (top 53 bits) and
// standard normals through the inverse normal CDF, one uniform per normal.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace circlab
