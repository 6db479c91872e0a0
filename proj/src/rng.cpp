#include "xcmix/rng.hpp"

namespace xcmix {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(root + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

double Rng::uniform() {
    for (;;) {
        double u = std::generate_canonical<double, 53>(engine_);
        if (u > 0.0 && u < 1.0) return u;
    }
}

double Rng::gamma(double shape, double rate) {
    using P = std::gamma_distribution<double>::param_type;
    return gamma_(engine_, P(shape, 1.0 / rate));
}

} // namespace xcmix
