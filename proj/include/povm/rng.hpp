#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace povm {

// Counter-based generator: the n-th output of a stream is a pure function of
// (key, n), so a trial's draws never depend on scheduling. Substreams derive
// new keys from (parent key, id); named streams hash the name into the id.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc908ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + mix(counter_++)); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n). n > 0.
    std::uint64_t index(std::uint64_t n);

    // +1 or -1 with equal probability.
    int sign() { return ((*this)() >> 63) ? 1 : -1; }

    Rng substream(std::uint64_t id) const;
    Rng stream(std::string_view name) const;

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t x);
    static std::uint64_t hash_name(std::string_view name);

private:
    struct KeyTag {};
    Rng(std::uint64_t key, KeyTag) : key_(key) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace povm
