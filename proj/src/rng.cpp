#include "povm/rng.hpp"

#include "povm/tolerances.hpp"

namespace povm {

Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

// splitmix64 finalizer
std::uint64_t Rng::mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a
std::uint64_t Rng::hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t Rng::index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return x % n;
}

Rng Rng::substream(std::uint64_t id) const {
    return Rng(mix(key_ ^ mix(id + 0x3c6ef372fe94f82bULL)), KeyTag{});
}

Rng Rng::stream(std::string_view name) const { return substream(hash_name(name)); }

} // namespace povm
