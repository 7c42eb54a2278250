#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace cyclemix {

// Counter-based splittable generator (SplitMix64 finalizer in counter mode).
// A stream is (key, counter); child streams derive a new key from a tag, so
// parallel sweep workers can draw independent, schedule-invariant streams.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : key_(mix(seed + GOLDEN)) {}

    uint64_t key() const noexcept { return key_; }

    RngStream child(uint64_t tag) const {
        RngStream c(*this);
        c.key_ = mix(key_ ^ mix(tag + GOLDEN));
        c.ctr_ = 0;
        return c;
    }

    uint64_t next_u64() {
        ctr_ += GOLDEN;
        return mix(key_ + ctr_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Deterministic seed for a tagged sub-stream; used to give every sweep
    // trial its own graph seed independent of scheduling.
    static uint64_t derive_seed(uint64_t base, uint64_t tag) {
        return mix(mix(base + GOLDEN) ^ mix(tag + GOLDEN));
    }

    // Unbiased uniform integer in [0, bound) via rejection.
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static constexpr uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t key_;
    uint64_t ctr_ = 0;
};

}  // namespace cyclemix
