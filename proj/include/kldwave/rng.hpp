#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace kldwave {

// Deterministic random source. The engine is std::mt19937_64 seeded through
// std::seed_seq with the 32-bit words (seed_lo, seed_hi, stream_lo, stream_hi);
// both algorithms are fully specified by the C++ standard, so a given
// (seed, stream) pair yields the same sequence on every conforming platform.
// Gaussian draws use the inverse normal CDF applied to a 53-bit uniform in
// (0, 1), never a library-defined distribution object.
class SeededRng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64/seed_seq/inverse-cdf";

    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Circularly-symmetric CN(0, 1): real and imaginary parts N(0, 1/2).
    std::complex<double> complex_normal();
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace kldwave
