#include "renewcast/rng.hpp"

#include <cmath>

namespace renewcast {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double mean) {
    return -mean * std::log(uniform_pos());
}

}  // namespace renewcast
