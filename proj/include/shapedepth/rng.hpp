#pragma once

#include <cmath>
#include <cstdint>

namespace shapedepth {

// Counter-based generator built on the splitmix64 finalizer. Output i of a
// stream is a pure function of (key, i), so substreams derived per replicate
// or per row are reproducible regardless of evaluation order or threading.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed + kGamma)) {}

    // Child stream for an index (replicate, row, direction, ...).
    [[nodiscard]] Rng substream(std::uint64_t index) const {
        Rng child(0);
        child.key_ = mix(key_ ^ mix(index * kGamma + 0x94D049BB133111EBull));
        child.counter_ = 0;
        child.has_cached_gaussian_ = false;
        return child;
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (no rejection, so the stream consumed
    // per draw is fixed).
    double next_gaussian() {
        if (has_cached_gaussian_) {
            has_cached_gaussian_ = false;
            return cached_gaussian_;
        }
        const double u1 = next_open();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        cached_gaussian_ = r * std::sin(a);
        has_cached_gaussian_ = true;
        return r * std::cos(a);
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_cached_gaussian_ = false;
    double cached_gaussian_ = 0.0;
};

inline constexpr const char* kRngFamily = "splitmix64-counter";

}  // namespace shapedepth
