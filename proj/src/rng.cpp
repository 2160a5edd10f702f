#include "kldwave/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace kldwave {

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double SeededRng::uniform() {
    // 53 random mantissa bits, shifted by half an ulp so 0 and 1 are unreachable.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::normal() {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, uniform());
}

std::complex<double> SeededRng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

}  // namespace kldwave
