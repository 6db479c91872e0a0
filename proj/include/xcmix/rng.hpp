#pragma once

#include <cstdint>
#include <random>

namespace xcmix {

// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);

// Sub-seed for stream `stream` under `root`:
//   sub_seed(root, k) = splitmix64(root + (k + 1) * 0x9E3779B97F4A7C15)
// Chains use stream = chain index; predictive chunks use a separate range
// (see predictive.hpp), so no two consumers share a stream.
std::uint64_t sub_seed(std::uint64_t root, std::uint64_t stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on the open interval (0, 1).
    double uniform();
    double normal() { return normal_(engine_); }
    double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
    // Gamma with the given shape and rate (mean shape / rate).
    double gamma(double shape, double rate);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::gamma_distribution<double> gamma_{};
};

} // namespace xcmix
