#include "circlab/rng.hpp"

#include <boost/math/distributions/normal.hpp>

namespace circlab {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double NormalStream::normal() {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, uniform());
}

}  // namespace circlab
